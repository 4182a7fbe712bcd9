import random

import pytest

from gluedyn.fixtures import toy_family, toy_family_nondet, toy_family_uniform
from gluedyn.gluing import family_from_dict
from gluedyn.oracle import make_instance
from gluedyn.satfront import PropFormula, parse_dimacs, parse_expr


@pytest.fixture(scope="session")
def toy():
    return toy_family()

@pytest.fixture(scope="session")
def ntoy():
    return toy_family_nondet()


@pytest.fixture(scope="session")
def utoy():
    return toy_family_uniform()


# Asymmetric family: two-wide port blocks, unequal strides (4 vs 5).  Seam
# convention: port position 0 is supplied by the next copy's primary side,
# position 1 by the previous copy's secondary side, so the glued graph has
# out-degree exactly one.
WIDE_FAMILY_DOC = {
    "q": 2,
    "k2": 2,
    "k3": 1,
    "constants": {"a": 1, "b": 1, "mu": 1, "alpha": 1, "log_q_alpha": 0},
    "graphs": {
        "G2": {"size": 5, "arcs": [[0, 1], [1, 2], [3, 0], [4, 0]]},
        "G0": {"size": 7, "arcs": [[0, 3], [2, 2], [3, 2], [5, 2]]},
        "G1": {"size": 7, "arcs": [[0, 3], [2, 3], [3, 2], [5, 3]]},
        "G4": {"size": 8, "arcs": [[0, 4], [2, 3], [3, 7], [4, 2], [6, 3]]},
        "G3": {"size": 7, "arcs": [[0, 5], [2, 3], [3, 4], [4, 6], [5, 2]]},
    },
}

WIDE_NONDET_GRAPHS = {
    **WIDE_FAMILY_DOC["graphs"],
    "G0": {"size": 7, "arcs": [[0, 3], [2, 2], [2, 4], [3, 2], [3, 3], [5, 2], [6, 6]]},
    "G1": {"size": 7, "arcs": [[0, 3], [2, 3], [3, 2], [5, 3], [6, 6]]},
    "G4": {"size": 8, "arcs": [[0, 4], [2, 3], [3, 7], [4, 2], [6, 3], [7, 7]]},
    "G3": {"size": 7, "arcs": [[0, 5], [2, 3], [3, 4], [4, 6], [5, 2], [6, 2], [6, 6]]},
}


@pytest.fixture(scope="session")
def wide():
    return family_from_dict(WIDE_FAMILY_DOC)


@pytest.fixture(scope="session")
def wide_nondet():
    return family_from_dict({**WIDE_FAMILY_DOC, "graphs": WIDE_NONDET_GRAPHS})


# Formula suite: satisfiable / unsatisfiable / tautology at every s in 1..3,
# mixed expression and DIMACS sources, padding lengths covering the empty run.
DET_SUITE = [
    ("x1", 2),
    ("x1 & !x1", 2),
    ("x1 | !x1", 2),
    ("x1", 0),
    ("(x1 | x2) & !x1", 1),
    ("x1 & !x1 & x2", 2),
    ("x1 | !x1 | x2", 0),
    ("(x1 | x2) & (!x1 | !x2)", 3),
    ("(x1 | !x2) & (x2 | !x1)", 2),
    ("(x1 | x2 | x3) & (!x1 | x2) & (!x2 | x3)", 2),
    ("(x1 | x2) & (x1 | !x2) & (!x1 | x3) & (!x1 | !x3)", 1),
    ("x1 | x2 | x3 | !x1", 0),
    ("p cnf 2 2\n1 2 0\n-1 0", 2),
]

def _parse(text: str) -> PropFormula:
    if text.startswith("p cnf"):
        return parse_dimacs(text)
    return parse_expr(text)


def det_suite():
    return [(_parse(text), L) for text, L in DET_SUITE]


def nondet_suite():
    return [(f, L) for f, L in det_suite() if f.variable_count <= 2]


def random_cnfs(count: int = 20, max_vars: int = 3, seed: int = 20250810):
    """Frozen pseudo-random 3-CNF batch for the separation tests."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        s = rng.randint(1, max_vars)
        clauses = []
        for _ in range(rng.randint(1, 4)):
            clauses.append(
                tuple(rng.choice((1, -1)) * rng.randint(1, s) for _ in range(3))
            )
        out.append(PropFormula(s, clauses=tuple(clauses)))
    return out


@pytest.fixture(scope="session")
def toy_sat_instance(toy):
    return make_instance(toy, parse_expr("x1"), mode="det", L=2)
