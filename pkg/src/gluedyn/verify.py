"""Ground-truth extraction: enumerate a circuit's semantics at desk scale,
compare against the explicit oracle, and run the end-to-end separation probe.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .circuits import Circuit
from .evalcore import batch_evaluate, encode_configs
from .oracle import MODE_DET, MODE_NONDET, ExplicitDynamics, ReductionInstance

DEFAULT_DET_BOUND = 1 << 16
DEFAULT_NONDET_BOUND = 1 << 9


class EnumerationBoundError(ValueError):
    def __init__(self, total: int, bound: int):
        super().__init__(
            f"{total} configurations exceed the desk-scale bound {bound};"
            f" raise the bound explicitly to proceed"
        )
        self.total = total
        self.bound = bound


class GraphSizeMismatch(ValueError):
    def __init__(self, left: int, right: int):
        super().__init__(f"vertex counts differ: {left} vs {right}")
        self.left = left
        self.right = right


@dataclass(frozen=True)
class SemanticGraph:
    """Explicit digraph extracted from a circuit or an oracle."""

    vertex_count: int
    successors: tuple[tuple[int, ...], ...]

    @classmethod
    def from_arcs(cls, vertex_count: int, arcs: Iterable[tuple[int, int]]) -> "SemanticGraph":
        succ: list[list[int]] = [[] for _ in range(vertex_count)]
        for u, w in sorted(set(arcs)):
            succ[u].append(w)
        return cls(vertex_count, tuple(tuple(s) for s in succ))

    @classmethod
    def from_dynamics(cls, dyn: ExplicitDynamics) -> "SemanticGraph":
        return cls.from_arcs(dyn.total, dyn.arcs)

    def has_arc(self, u: int, w: int) -> bool:
        return w in self.successors[u]

    def arcs(self) -> list[tuple[int, int]]:
        return [(u, w) for u in range(self.vertex_count) for w in self.successors[u]]

    def out_degree_one(self) -> bool:
        return all(len(s) == 1 for s in self.successors)


def enumerate_semantics(
    circuit: Circuit,
    mode: str,
    total: int,
    bound: int | None = None,
    jobs: int = 1,
) -> SemanticGraph:
    """Materialize the circuit's dynamics: total evaluations in deterministic
    mode, total**2 in non-deterministic mode."""
    if mode == MODE_DET:
        limit = bound if bound is not None else DEFAULT_DET_BOUND
        if total > limit:
            raise EnumerationBoundError(total, limit)
        n_in = circuit.input_count
        rows = encode_configs(range(total), n_in)
        outs = batch_evaluate(circuit, rows, jobs=jobs)
        weights = np.asarray([1 << j for j in range(circuit.output_count)], dtype=np.int64)
        values = outs.astype(np.int64) @ weights
        return SemanticGraph(total, tuple((int(v),) for v in values))
    if mode == MODE_NONDET:
        limit = bound if bound is not None else DEFAULT_NONDET_BOUND
        if total > limit:
            raise EnumerationBoundError(total, limit)
        n_in = circuit.input_count // 2
        right = encode_configs(range(total), n_in)
        succ: list[tuple[int, ...]] = []
        for c in range(total):
            left = np.tile(encode_configs([c], n_in), (total, 1))
            rows = np.concatenate([left, right], axis=1)
            outs = batch_evaluate(circuit, rows, jobs=jobs)
            succ.append(tuple(int(w) for w in np.flatnonzero(outs[:, 0])))
        return SemanticGraph(total, tuple(succ))
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class EquivalenceVerdict:
    equivalent: bool
    total: int
    vertex: int | None = None
    expected: tuple[int, ...] | None = None
    found: tuple[int, ...] | None = None

    def __str__(self) -> str:
        if self.equivalent:
            return f"EQUIVALENT ({self.total} configurations)"
        return (
            f"MISMATCH at vertex {self.vertex}: oracle {list(self.expected)},"
            f" circuit {list(self.found)}"
        )


def check_equivalence(
    semantics: SemanticGraph, oracle: ExplicitDynamics | SemanticGraph
) -> EquivalenceVerdict:
    """Exact arc-set equality; the first differing vertex is reported."""
    reference = (
        oracle if isinstance(oracle, SemanticGraph) else SemanticGraph.from_dynamics(oracle)
    )
    if semantics.vertex_count != reference.vertex_count:
        raise GraphSizeMismatch(semantics.vertex_count, reference.vertex_count)
    for c in range(reference.vertex_count):
        if semantics.successors[c] != reference.successors[c]:
            return EquivalenceVerdict(
                False,
                reference.vertex_count,
                vertex=c,
                expected=reference.successors[c],
                found=semantics.successors[c],
            )
    return EquivalenceVerdict(True, reference.vertex_count)


@dataclass(frozen=True)
class SeparationReport:
    mode: str
    total: int
    satisfiable: bool
    property_holds: bool
    agree: bool
    gates: int


def rice_probe(inst: ReductionInstance, formula_text: str = "exists x (x -> x)") -> SeparationReport:
    """Compile, enumerate, model-check, brute-force the formula, and compare.

    The glued dynamics satisfies the probed property exactly when the
    self-loop-carrying branch gadget appears, i.e. when the input formula is
    satisfiable; this report says whether the compiled circuit agrees.
    """
    from .detcompile import compile_det
    from .mso import mso_check, parse_mso
    from .nondetcompile import compile_nondet
    from .satfront import is_satisfiable

    if inst.mode == MODE_DET:
        circuit = compile_det(inst)
    else:
        circuit = compile_nondet(inst)
    semantics = enumerate_semantics(circuit, inst.mode, inst.sizes.total)
    holds = mso_check(semantics, parse_mso(formula_text))
    sat = is_satisfiable(inst.formula)
    return SeparationReport(
        mode=inst.mode,
        total=inst.sizes.total,
        satisfiable=sat,
        property_holds=holds,
        agree=holds == sat,
        gates=len(circuit),
    )
