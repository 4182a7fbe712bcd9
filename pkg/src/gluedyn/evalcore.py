"""Batch circuit evaluation with backend selection at import time.

The compiled extension is preferred; the pure-Python interpreter is the
drop-in fallback.  Set GLUEDYN_EVAL=python to force the fallback (used by the
benchmark and the backend-equivalence tests).  Both backends are exact; only
throughput differs.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .circuits import Circuit

from . import _evalpure

if os.environ.get("GLUEDYN_EVAL", "").lower() == "python":
    _impl = _evalpure
    BACKEND = "python"
else:
    try:
        from . import _evalcore as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _evalpure
        BACKEND = "python"


def backend_name() -> str:
    return BACKEND


def run_batch_with(impl, circuit: Circuit, inputs: np.ndarray) -> np.ndarray:
    packed = circuit.packed()
    inputs = np.ascontiguousarray(inputs, dtype=np.uint8)
    if inputs.ndim != 2 or inputs.shape[1] != circuit.input_count:
        raise ValueError(
            f"inputs must be rows of width {circuit.input_count}, got {inputs.shape}"
        )
    out = np.empty((inputs.shape[0], circuit.output_count), dtype=np.uint8)
    impl.run_batch(
        packed["kinds"], packed["arg0"], packed["arg1"], packed["output_ids"], inputs, out
    )
    return out


def batch_evaluate(circuit: Circuit, inputs: np.ndarray, jobs: int = 1) -> np.ndarray:
    """Evaluate the circuit on every row; optionally fan rows out over threads.

    The compiled kernel releases the GIL, so jobs > 1 gives real parallelism
    there; results are ordered by row either way.
    """
    if jobs <= 1 or inputs.shape[0] < 2 * jobs:
        return run_batch_with(_impl, circuit, inputs)
    chunks = np.array_split(np.ascontiguousarray(inputs, dtype=np.uint8), jobs)
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        parts = list(pool.map(lambda ch: run_batch_with(_impl, circuit, ch), chunks))
    return np.concatenate(parts, axis=0)


def encode_configs(values, width: int) -> np.ndarray:
    """Little-endian bit matrix for a sequence of configuration labels."""
    rows = np.empty((len(values), width), dtype=np.uint8)
    for r, value in enumerate(values):
        for j in range(width):
            rows[r, j] = (value >> j) & 1
    return rows


def decode_configs(bits: np.ndarray) -> list[int]:
    out = []
    for r in range(bits.shape[0]):
        v = 0
        for j in range(bits.shape[1] - 1, -1, -1):
            v = (v << 1) | int(bits[r, j])
        out.append(v)
    return out
