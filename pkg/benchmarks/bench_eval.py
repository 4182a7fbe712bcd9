#!/usr/bin/env python3
"""Compare the compiled evaluation kernel against the pure-Python fallback.

Compiles one deterministic instance, then times full-circuit evaluation over
a batch of input rows with each backend.  The workload is the same hot loop
`check` and `enumerate` run: one pass over the gate list per row.
"""

import argparse
import time

import numpy as np

from gluedyn import _evalpure, evalcore
from gluedyn.detcompile import compile_det
from gluedyn.evalcore import encode_configs, run_batch_with
from gluedyn.fixtures import toy_family
from gluedyn.oracle import make_instance
from gluedyn.satfront import PropFormula


def time_backend(impl, circuit, rows, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        out = run_batch_with(impl, circuit, rows)
        best = min(best, time.perf_counter() - start)
    return best, out


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--s", type=int, default=6, help="variable count of the instance")
    parser.add_argument("--rows", type=int, default=2048, help="input rows per run")
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    family = toy_family()
    inst = make_instance(family, PropFormula(args.s, clauses=((1,),)), mode="det", L=2)
    circuit = compile_det(inst)
    rows = encode_configs(
        [c % inst.sizes.total for c in range(args.rows)], circuit.input_count
    )
    gate_visits = len(circuit) * args.rows

    print(f"instance: s={args.s}, T={inst.sizes.total}, gates={len(circuit)}")
    print(f"workload: {args.rows} rows = {gate_visits/1e6:.1f}M gate visits per run")
    print(f"active backend at import: {evalcore.backend_name()}")

    results = {}
    pure_time, pure_out = time_backend(_evalpure, circuit, rows, args.repeats)
    results["python"] = pure_time
    print(f"python  : {pure_time:8.3f}s  ({gate_visits/pure_time/1e6:7.1f}M gate visits/s)")

    if evalcore.BACKEND == "cython":
        cy_time, cy_out = time_backend(evalcore._impl, circuit, rows, args.repeats)
        results["cython"] = cy_time
        print(f"cython  : {cy_time:8.3f}s  ({gate_visits/cy_time/1e6:7.1f}M gate visits/s)")
        assert np.array_equal(pure_out, cy_out), "backends disagree"
        print(f"speedup : {pure_time/cy_time:.1f}x, outputs identical")
    else:
        print("cython  : extension not built; only the fallback was timed")


if __name__ == "__main__":
    main()
