"""Boundaried graphs, the port-merging composition, and gadget families.

A boundaried graph carries two equal-length port tuples.  Composition takes
the disjoint union and merges the left graph's secondary ports pointwise with
the right graph's primary ports; iterating it along an index word builds the
full dynamics.  The five-gadget family is the per-formula constant package:
one opener (index 2), two per-assignment branch gadgets (0 and 1, equal
size), one padding gadget (4) and one closer (3), plus the arithmetic
constants used to size the padding run.

Port labels are canonical and validated eagerly on load: primary-only ports
are the lowest labels, secondary-only ports sit just below the shared ports,
and the shared ports occupy the top labels of every gadget.  Every affine
label computation downstream depends on this layout.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

HEAD = 2  # opener gadget, glued first
TAIL = 3  # closer gadget, glued last
PAD = 4  # padding gadget
BRANCH = (0, 1)  # assignment-selected gadgets; index 0 marks a satisfying row

GRAPH_KEYS = ("G0", "G1", "G2", "G3", "G4")


class GammaValidationError(ValueError):
    """A gadget family file or object violates the canonical conventions."""


@dataclass(frozen=True)
class BoundariedGraph:
    """Digraph on labels 0..size-1 with primary and secondary port tuples."""

    size: int
    arcs: frozenset[tuple[int, int]]
    primary: tuple[int, ...]
    secondary: tuple[int, ...]

    def __post_init__(self):
        if len(self.primary) != len(self.secondary):
            raise GammaValidationError("primary and secondary port tuples differ in length")
        for ports in (self.primary, self.secondary):
            if len(set(ports)) != len(ports):
                raise GammaValidationError(f"repeated labels in port tuple {ports}")
            for v in ports:
                if not 0 <= v < self.size:
                    raise GammaValidationError(f"port label {v} outside 0..{self.size - 1}")
        for u, w in self.arcs:
            if not (0 <= u < self.size and 0 <= w < self.size):
                raise GammaValidationError(f"arc ({u},{w}) outside 0..{self.size - 1}")

    @property
    def port_count(self) -> int:
        return len(self.primary)

    def sorted_arcs(self) -> list[tuple[int, int]]:
        return sorted(self.arcs)

    def successors(self, v: int) -> list[int]:
        return sorted(w for (u, w) in self.arcs if u == v)

    def out_degree_map(self) -> dict[int, int]:
        deg = {v: 0 for v in range(self.size)}
        for u, _ in self.arcs:
            deg[u] += 1
        return deg


def glue(left: BoundariedGraph, right: BoundariedGraph) -> BoundariedGraph:
    """Disjoint union with the right graph's primary ports merged pointwise
    onto the left graph's secondary ports.

    The left graph keeps its labels; the right graph's non-primary vertices
    receive fresh labels left.size, left.size+1, ... in ascending original
    order, which makes the composition fully deterministic.
    """
    if left.port_count != right.port_count:
        raise GammaValidationError(
            f"port arity mismatch: {left.port_count} vs {right.port_count}"
        )
    rename: dict[int, int] = {}
    for pos, v in enumerate(right.primary):
        rename[v] = left.secondary[pos]
    fresh = left.size
    for v in range(right.size):
        if v not in rename:
            rename[v] = fresh
            fresh += 1
    arcs = set(left.arcs)
    arcs.update((rename[u], rename[w]) for (u, w) in right.arcs)
    return BoundariedGraph(
        size=fresh,
        arcs=frozenset(arcs),
        primary=left.primary,
        secondary=tuple(rename[v] for v in right.secondary),
    )


@dataclass(frozen=True)
class FamilyConstants:
    """Arithmetic constants sizing the padding run for a given family."""

    a: int
    b: int
    mu: int
    alpha: int
    log_q_alpha: int

    def as_dict(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "mu": self.mu,
            "alpha": self.alpha,
            "log_q_alpha": self.log_q_alpha,
        }


def canonical_ports(size: int, k2: int, k3: int, role: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Canonical port tuples for a gadget of the given role.

    Shared ports are the top k3 labels everywhere.  Primary-only ports are
    0..k2-1 and secondary-only ports are the k2 labels just below the shared
    block.  The opener's primary tuple and the closer's secondary tuple are
    never merged with anything; they are set to mirror the meaningful side.
    """
    shared = tuple(range(size - k3, size))
    primary_only = tuple(range(k2))
    secondary_only = tuple(range(size - k2 - k3, size - k3))
    primary = primary_only + shared
    secondary = secondary_only + shared
    if role == HEAD:
        return secondary, secondary
    if role == TAIL:
        return primary, primary
    return primary, secondary


@dataclass(frozen=True)
class GadgetFamily:
    """The five fixed gadgets plus their arithmetic constants."""

    q: int
    k2: int
    k3: int
    constants: FamilyConstants
    graphs: tuple[BoundariedGraph, ...]  # indexed 0..4

    def __post_init__(self):
        if self.q < 2:
            raise GammaValidationError(f"alphabet size q={self.q} must be at least 2")
        if self.k2 < 0 or self.k3 < 0 or self.k2 + self.k3 < 1:
            raise GammaValidationError("port counts k2, k3 must be non-negative with k2+k3 >= 1")
        if len(self.graphs) != 5:
            raise GammaValidationError("a family has exactly five gadgets")
        sizes = [g.size for g in self.graphs]
        if sizes[0] != sizes[1]:
            raise GammaValidationError(
                f"the two branch gadgets must have equal size ({sizes[0]} vs {sizes[1]})"
            )
        for j, g in enumerate(self.graphs):
            need = (2 * self.k2 + self.k3) if j in (0, 1, 4) else (self.k2 + self.k3)
            if g.size < need:
                raise GammaValidationError(
                    f"G{j} has {g.size} vertices, fewer than its {need} port slots"
                )
            expect = canonical_ports(g.size, self.k2, self.k3, j if j in (HEAD, TAIL) else 0)
            if (g.primary, g.secondary) != expect:
                raise GammaValidationError(f"G{j} does not carry the canonical port labeling")
        if self.branch_stride < 1 or self.pad_stride < 1:
            raise GammaValidationError("branch and padding slices must be non-empty")

    @property
    def k(self) -> int:
        return self.k2 + self.k3

    def graph(self, j: int) -> BoundariedGraph:
        return self.graphs[j]

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(g.size for g in self.graphs)

    # interior sizes: vertices not shared with a neighbouring copy
    @property
    def head_core(self) -> int:
        return self.graphs[HEAD].size - self.k2 - self.k3

    @property
    def branch_core(self) -> int:
        return self.graphs[0].size - 2 * self.k2 - self.k3

    @property
    def pad_core(self) -> int:
        return self.graphs[PAD].size - 2 * self.k2 - self.k3

    @property
    def tail_core(self) -> int:
        return self.graphs[TAIL].size - self.k2 - self.k3

    @property
    def branch_stride(self) -> int:
        return self.branch_core + self.k2

    @property
    def pad_stride(self) -> int:
        return self.pad_core + self.k2

    def validate_deterministic(self) -> None:
        for j, g in enumerate(self.graphs):
            for v, deg in g.out_degree_map().items():
                if deg > 1:
                    raise GammaValidationError(
                        f"G{j} vertex {v} has out-degree {deg}; deterministic mode"
                        " requires at most one"
                    )

    def validate_port_agreement(self) -> None:
        """Both branch gadgets must agree on arcs between port vertices.

        The adjacency circuit reads port-to-port arcs through a clamped
        assignment, so a family where the two branches disagree there would
        compile incorrectly; reject it up front.
        """
        g0, g1 = self.graphs[0], self.graphs[1]
        ports = set(g0.primary) | set(g0.secondary)
        arcs0 = {(u, w) for (u, w) in g0.arcs if u in ports and w in ports}
        arcs1 = {(u, w) for (u, w) in g1.arcs if u in ports and w in ports}
        if arcs0 != arcs1:
            diff = sorted(arcs0 ^ arcs1)
            raise GammaValidationError(
                f"branch gadgets disagree on port-to-port arcs: {diff}"
            )

    def to_json_dict(self) -> dict:
        return {
            "q": self.q,
            "k2": self.k2,
            "k3": self.k3,
            "constants": self.constants.as_dict(),
            "graphs": {
                key: {"size": g.size, "arcs": [list(a) for a in g.sorted_arcs()]}
                for key, g in zip(GRAPH_KEYS, self.graphs)
            },
        }

    def digest(self) -> str:
        blob = json.dumps(self.to_json_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def family_from_dict(doc: Mapping) -> GadgetFamily:
    try:
        q = int(doc["q"])
        k2 = int(doc["k2"])
        k3 = int(doc["k3"])
        raw_constants = doc["constants"]
        raw_graphs = doc["graphs"]
    except (KeyError, TypeError, ValueError) as exc:
        raise GammaValidationError(f"malformed family document: {exc}") from exc
    try:
        constants = FamilyConstants(
            a=int(raw_constants["a"]),
            b=int(raw_constants["b"]),
            mu=int(raw_constants["mu"]),
            alpha=int(raw_constants["alpha"]),
            log_q_alpha=int(raw_constants["log_q_alpha"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise GammaValidationError(f"malformed constants block: {exc}") from exc
    graphs = []
    for j, key in enumerate(GRAPH_KEYS):
        if key not in raw_graphs:
            raise GammaValidationError(f"missing gadget {key}")
        entry = raw_graphs[key]
        size = int(entry["size"])
        arcs = frozenset((int(u), int(w)) for u, w in entry["arcs"])
        primary, secondary = canonical_ports(size, k2, k3, j if j in (HEAD, TAIL) else 0)
        graphs.append(BoundariedGraph(size, arcs, primary, secondary))
    return GadgetFamily(q=q, k2=k2, k3=k3, constants=constants, graphs=tuple(graphs))


def load_family(path: str) -> GadgetFamily:
    with open(path, "r", encoding="utf-8") as fp:
        try:
            doc = json.load(fp)
        except json.JSONDecodeError as exc:
            raise GammaValidationError(f"{path}: not valid JSON: {exc}") from exc
    return family_from_dict(doc)


def delta(family: GadgetFamily, word: Sequence[int]) -> BoundariedGraph:
    """Left fold of the composition along an index word."""
    if len(word) == 0:
        raise GammaValidationError("empty gluing word")
    for letter in word:
        if letter not in range(5):
            raise GammaValidationError(f"letter {letter} outside the gadget alphabet 0..4")
    acc = family.graph(word[0])
    for letter in word[1:]:
        acc = glue(acc, family.graph(letter))
    return acc


def delta_with_placements(
    family: GadgetFamily, word: Sequence[int]
) -> tuple[BoundariedGraph, list[dict[int, int]]]:
    """Fold like `delta` while recording where each copy's vertices land.

    placements[t][v] is the final label of vertex v of the t-th glued gadget.
    Because the left operand keeps its labels at every step, the recorded
    labels stay valid through the whole fold.
    """
    if len(word) == 0:
        raise GammaValidationError("empty gluing word")
    first = family.graph(word[0])
    acc = first
    placements = [{v: v for v in range(first.size)}]
    for letter in word[1:]:
        right = family.graph(letter)
        rename: dict[int, int] = {}
        for pos, v in enumerate(right.primary):
            rename[v] = acc.secondary[pos]
        fresh = acc.size
        for v in range(right.size):
            if v not in rename:
                rename[v] = fresh
                fresh += 1
        placements.append(rename)
        acc = glue(acc, right)
    return acc, placements


# --- tree decompositions ----------------------------------------------------


@dataclass(frozen=True)
class TreeDecomposition:
    nodes: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    bags: Mapping[int, frozenset[int]]


@dataclass(frozen=True)
class DecompositionViolation:
    kind: str  # "tree" | "vertex-coverage" | "arc-coverage" | "connectivity"
    witness: object

    def __str__(self) -> str:
        return f"{self.kind} violated (witness: {self.witness})"


def validate_tree_decomposition(
    vertex_count: int,
    arcs: Iterable[tuple[int, int]],
    decomposition: TreeDecomposition,
) -> int | DecompositionViolation:
    """Check the three decomposition properties; return the width or the
    first violation with a witness."""
    nodes = list(decomposition.nodes)
    node_set = set(nodes)
    adj: dict[int, set[int]] = {t: set() for t in nodes}
    for a, b in decomposition.edges:
        if a not in node_set or b not in node_set:
            return DecompositionViolation("tree", (a, b))
        adj[a].add(b)
        adj[b].add(a)
    if nodes:
        seen = {nodes[0]}
        stack = [nodes[0]]
        while stack:
            t = stack.pop()
            for u in adj[t]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        if len(seen) != len(nodes) or len(decomposition.edges) != len(nodes) - 1:
            return DecompositionViolation("tree", "not a connected acyclic tree")

    covered: set[int] = set()
    for t in nodes:
        covered.update(decomposition.bags[t])
    for v in range(vertex_count):
        if v not in covered:
            return DecompositionViolation("vertex-coverage", v)

    for u, w in sorted(set(arcs)):
        if not any(u in decomposition.bags[t] and w in decomposition.bags[t] for t in nodes):
            return DecompositionViolation("arc-coverage", (u, w))

    for v in range(vertex_count):
        holding = [t for t in nodes if v in decomposition.bags[t]]
        if not holding:
            continue
        seen = {holding[0]}
        stack = [holding[0]]
        holding_set = set(holding)
        while stack:
            t = stack.pop()
            for u in adj[t]:
                if u in holding_set and u not in seen:
                    seen.add(u)
                    stack.append(u)
        if seen != holding_set:
            return DecompositionViolation("connectivity", v)

    if not nodes:
        return DecompositionViolation("tree", "no nodes")
    return max(len(decomposition.bags[t]) for t in nodes) - 1
