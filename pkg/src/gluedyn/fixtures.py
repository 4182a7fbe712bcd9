"""Built-in desk-scale fixtures used by the test suite, the CLI examples and
the benchmarks."""

from __future__ import annotations

from .gluing import GadgetFamily, family_from_dict
from .verify import SemanticGraph

TOY_FAMILY_DOC = {
    "q": 2,
    "k2": 1,
    "k3": 1,
    "constants": {"a": 1, "b": 1, "mu": 1, "alpha": 1, "log_q_alpha": 0},
    "graphs": {
        "G0": {"size": 4, "arcs": [[0, 1], [1, 1]]},
        "G1": {"size": 4, "arcs": [[0, 1], [1, 2]]},
        "G2": {"size": 3, "arcs": [[0, 1]]},
        "G3": {"size": 7, "arcs": [[0, 1], [1, 2], [2, 3], [3, 4], [4, 5], [5, 6], [6, 0]]},
        "G4": {"size": 4, "arcs": [[0, 1], [1, 2]]},
    },
}


def toy_family() -> GadgetFamily:
    """Deterministic two-port family; only G0 carries a self-loop, so
    fixed-point existence separates satisfiable from unsatisfiable formulas."""
    return family_from_dict(TOY_FAMILY_DOC)


def toy_family_nondet() -> GadgetFamily:
    """The toy family with one extra branch arc (1 -> 2 in G0), the smallest
    genuinely non-deterministic variant that keeps the fixed-point separation."""
    doc = {
        **TOY_FAMILY_DOC,
        "graphs": {
            **TOY_FAMILY_DOC["graphs"],
            "G0": {"size": 4, "arcs": [[0, 1], [1, 1], [1, 2]]},
        },
    }
    return family_from_dict(doc)


def toy_family_uniform() -> GadgetFamily:
    """Toy graphs with constants that make every total an exact power of two.

    With a=1, b=4, mu=1, alpha=1 the padding run is 7*2**s - 4 and the total
    comes out to 2**(s+4) for every s, exercising the uniform path end to end.
    """
    doc = {
        **TOY_FAMILY_DOC,
        "constants": {"a": 1, "b": 4, "mu": 1, "alpha": 1, "log_q_alpha": 0},
    }
    return family_from_dict(doc)


def demo_dynamics() -> SemanticGraph:
    """Dynamics of a two-automata network on a ternary alphabet where the
    first coordinate is frozen and the second alternates between 1 and 2.

    Local rules: next first coordinate = first coordinate; next second
    coordinate = (second coordinate mod 2) + 1.  Nine configurations, no
    fixed point, three 2-cycles.
    """
    q, n = 3, 2
    arcs = []
    for x1 in range(q):
        for x2 in range(q):
            c = x1 * q + x2
            succ = x1 * q + ((x2 % 2) + 1)
            arcs.append((c, succ))
    return SemanticGraph.from_arcs(q**n, arcs)
