"""Ground-truth dynamics built explicitly at desk scale.

The oracle materializes the glued dynamics directly on the canonical label
allocation: every copy's arcs are mapped through the layout's affine label
maps in exact integer arithmetic, merged ports union their arcs, and in
deterministic mode every vertex must end up with exactly one out-arc.  This
graph is what every compiled circuit is checked against.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .gluing import GadgetFamily, delta_with_placements
from .satfront import PropFormula, sbar
from .sizing import InstanceSizes, Layout, make_sizes

MODE_DET = "det"
MODE_NONDET = "nondet"


class DeterminismError(ValueError):
    """The glued dynamics is not a function in deterministic mode."""


@dataclass(frozen=True)
class ReductionInstance:
    """A gadget family plus a propositional formula and mode flags."""

    family: GadgetFamily
    formula: PropFormula
    sizes: InstanceSizes
    mode: str = MODE_DET

    @property
    def layout(self) -> Layout:
        return Layout.build(self.family, self.sizes.s, self.sizes.L)

    def branch_letters(self) -> list[int]:
        """Gadget letter per assignment row: 0 on satisfying rows, 1 otherwise.

        This is the falsity word read as gadget indices, so the self-loop
        carrier appears exactly when the formula has a satisfying row.
        """
        return sbar(self.formula)

    def gluing_word(self) -> list[int]:
        return [2] + self.branch_letters() + [4] * self.sizes.L + [3]


def make_instance(
    family: GadgetFamily,
    formula: PropFormula,
    mode: str = MODE_DET,
    uniform: bool = False,
    L: int | None = None,
) -> ReductionInstance:
    if mode not in (MODE_DET, MODE_NONDET):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == MODE_DET:
        family.validate_deterministic()
    else:
        family.validate_port_agreement()
    sizes = make_sizes(family, formula.variable_count, uniform=uniform, L=L)
    return ReductionInstance(family=family, formula=formula, sizes=sizes, mode=mode)


@dataclass
class ExplicitDynamics:
    """Fully materialized digraph on 0..total-1 with its label allocation."""

    total: int
    arcs: set[tuple[int, int]]
    allocation: dict[int, tuple[int, int, int]]  # c -> (copy, gadget, local)
    copy_gadgets: list[int]
    successors_map: dict[int, list[int]] = field(default_factory=dict)

    def __post_init__(self):
        if not self.successors_map:
            succ: dict[int, list[int]] = {c: [] for c in range(self.total)}
            for u, w in sorted(self.arcs):
                succ[u].append(w)
            self.successors_map = succ

    def successor(self, c: int) -> int:
        outs = self.successors_map[c]
        if len(outs) != 1:
            raise DeterminismError(f"vertex {c} has out-degree {len(outs)}")
        return outs[0]

    def successors(self, c: int) -> list[int]:
        return self.successors_map[c]

    def has_arc(self, u: int, w: int) -> bool:
        return (u, w) in self.arcs


def explicit_dynamics(inst: ReductionInstance) -> ExplicitDynamics:
    """Build the glued dynamics on the canonical allocation.

    Ports merged across copies keep every contributed arc (union).  In
    deterministic mode the result must have out-degree exactly one; the
    diagnostic names the offending global vertex and the copies that
    contributed arcs to it.
    """
    layout = inst.layout
    family = inst.family
    letters = inst.branch_letters()

    arcs: set[tuple[int, int]] = set()
    contributors: dict[int, list[tuple[int, int, int]]] = {}
    copy_gadgets: list[int] = []
    for i in range(layout.copies):
        gadget = layout.gadget_of_copy(i, letters)
        copy_gadgets.append(gadget)
        graph = family.graph(gadget)
        for u, w in graph.sorted_arcs():
            gu = layout.global_label(i, gadget, u)
            gw = layout.global_label(i, gadget, w)
            arcs.add((gu, gw))
            contributors.setdefault(gu, []).append((i, gadget, gw))

    allocation: dict[int, tuple[int, int, int]] = {}
    for c in range(layout.total):
        i, _secondary = layout.copy_of(c)
        gadget = copy_gadgets[i]
        allocation[c] = (i, gadget, layout.local_label(c, gadget, i))

    dyn = ExplicitDynamics(
        total=layout.total,
        arcs=arcs,
        allocation=allocation,
        copy_gadgets=copy_gadgets,
    )
    if inst.mode == MODE_DET:
        for c in range(layout.total):
            outs = dyn.successors_map[c]
            if len(outs) != 1:
                who = sorted(set(contributors.get(c, [])))
                detail = ", ".join(f"copy {i} (G{g}) -> {t}" for i, g, t in who) or "none"
                raise DeterminismError(
                    f"global vertex {c} has out-degree {len(outs)}"
                    f" in deterministic mode; contributing gadgets: {detail}"
                )
    return dyn


def fold_placement_map(inst: ReductionInstance) -> dict[int, int]:
    """Label correspondence between the generic fold and the canonical oracle.

    Replays the composition fold recording each copy's final labels, then maps
    them onto the canonical allocation.  Raises if the correspondence is not a
    consistent bijection, so an exact arc-for-arc comparison is meaningful.
    """
    layout = inst.layout
    letters = inst.branch_letters()
    word = inst.gluing_word()
    folded, placements = delta_with_placements(inst.family, word)
    if folded.size != layout.total:
        raise DeterminismError(
            f"fold produced {folded.size} vertices, layout says {layout.total}"
        )
    mapping: dict[int, int] = {}
    for i, rename in enumerate(placements):
        gadget = layout.gadget_of_copy(i, letters)
        for local, fold_label in rename.items():
            canonical = layout.global_label(i, gadget, local)
            if mapping.setdefault(fold_label, canonical) != canonical:
                raise DeterminismError(
                    f"fold label {fold_label} maps to both {mapping[fold_label]}"
                    f" and {canonical}"
                )
    if sorted(mapping) != list(range(layout.total)) or sorted(
        mapping.values()
    ) != list(range(layout.total)):
        raise DeterminismError("fold/canonical correspondence is not a bijection")
    return mapping


def export_dot(dyn: ExplicitDynamics, annotations: bool = True, name: str = "dynamics") -> str:
    """Graphviz text with deterministic ordering; byte-identical across runs."""
    lines = [f"digraph {name} {{"]
    for c in range(dyn.total):
        if annotations and c in dyn.allocation:
            i, gadget, local = dyn.allocation[c]
            lines.append(f'  {c} [label="{c}\\n(copy {i}, G{gadget}:{local})"];')
        else:
            lines.append(f"  {c};")
    for u, w in sorted(dyn.arcs):
        lines.append(f"  {u} -> {w};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def dynamics_from_arcs(total: int, arcs: Iterable[tuple[int, int]]) -> ExplicitDynamics:
    """Wrap a raw arc list (no gadget provenance) in the oracle structure."""
    return ExplicitDynamics(
        total=total,
        arcs=set(arcs),
        allocation={},
        copy_gadgets=[],
    )
