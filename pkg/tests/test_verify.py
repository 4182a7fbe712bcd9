import pytest

from conftest import random_cnfs
from gluedyn.circuits import Circuit, Gate
from gluedyn.detcompile import compile_det
from gluedyn.fixtures import demo_dynamics
from gluedyn.nondetcompile import compile_nondet
from gluedyn.oracle import dynamics_from_arcs, explicit_dynamics, make_instance
from gluedyn.satfront import is_satisfiable, parse_expr
from gluedyn.verify import (
    EnumerationBoundError,
    GraphSizeMismatch,
    SemanticGraph,
    check_equivalence,
    enumerate_semantics,
    rice_probe,
)


def identity_circuit(width):
    gates = [Gate(i, "input") for i in range(width)]
    gates += [Gate(width + i, "output", (i,)) for i in range(width)]
    return Circuit(width, width, gates, list(range(width, 2 * width)))


def test_enumerate_identity_is_all_self_loops():
    sem = enumerate_semantics(identity_circuit(4), "det", 16)
    assert all(sem.successors[c] == (c,) for c in range(16))


def test_demo_dynamics_table():
    g = demo_dynamics()
    expected = {0: 1, 1: 2, 2: 1, 3: 4, 4: 5, 5: 4, 6: 7, 7: 8, 8: 7}
    assert {c: g.successors[c][0] for c in range(9)} == expected


def test_enumerate_bound_refusal():
    with pytest.raises(EnumerationBoundError) as err:
        enumerate_semantics(identity_circuit(20), "det", 1 << 20)
    assert err.value.bound == 1 << 16
    sem = enumerate_semantics(identity_circuit(4), "det", 16, bound=16)
    assert sem.vertex_count == 16


def test_enumerate_matches_oracle(toy):
    inst = make_instance(toy, parse_expr("x1"), mode="det", L=2)
    sem = enumerate_semantics(compile_det(inst), "det", 16)
    assert check_equivalence(sem, explicit_dynamics(inst)).equivalent


def test_check_equivalence_flags_mutation(toy):
    inst = make_instance(toy, parse_expr("x1"), mode="det", L=2)
    dyn = explicit_dynamics(inst)
    arcs = set(dyn.arcs)
    arcs.remove((7, 8))
    arcs.add((7, 9))
    mutated = dynamics_from_arcs(16, arcs)
    sem = enumerate_semantics(compile_det(inst), "det", 16)
    verdict = check_equivalence(sem, mutated)
    assert not verdict.equivalent
    assert verdict.vertex == 7
    assert verdict.expected == (9,)
    assert verdict.found == (8,)


def test_check_equivalence_size_mismatch():
    a = SemanticGraph.from_arcs(3, [(0, 1)])
    b = SemanticGraph.from_arcs(4, [(0, 1)])
    with pytest.raises(GraphSizeMismatch):
        check_equivalence(a, b)


def test_det_circuit_against_nondet_oracle(toy):
    """A function graph compared against the relation oracle of the same
    instance: they coincide when the family is deterministic."""
    det_inst = make_instance(toy, parse_expr("x1"), mode="det", L=2)
    nd_inst = make_instance(toy, parse_expr("x1"), mode="nondet", L=2)
    sem = enumerate_semantics(compile_det(det_inst), "det", 16)
    assert check_equivalence(sem, explicit_dynamics(nd_inst)).equivalent


def test_nondet_enumeration_bound(ntoy):
    c = compile_nondet(make_instance(ntoy, parse_expr("x1"), mode="nondet", L=2))
    with pytest.raises(EnumerationBoundError):
        enumerate_semantics(c, "nondet", 16, bound=8)


def test_rice_probe_trio(toy, ntoy):
    report = rice_probe(make_instance(toy, parse_expr("x1"), mode="det", L=2))
    assert report.agree and report.satisfiable and report.property_holds

    report = rice_probe(make_instance(toy, parse_expr("x1 & !x1"), mode="det", L=2))
    assert report.agree and not report.satisfiable and not report.property_holds

    report = rice_probe(make_instance(ntoy, parse_expr("x1"), mode="nondet", L=2))
    assert report.agree and report.mode == "nondet"


def test_rice_probe_random_batch(toy, ntoy):
    for formula in random_cnfs(8, seed=7):
        for family, mode in ((toy, "det"), (ntoy, "nondet")):
            report = rice_probe(make_instance(family, formula, mode=mode, L=1))
            assert report.agree
            assert report.satisfiable == is_satisfiable(formula)


def test_enumeration_is_parallel_safe(toy):
    inst = make_instance(toy, parse_expr("x1"), mode="det", L=2)
    circuit = compile_det(inst)
    solo = enumerate_semantics(circuit, "det", 16, jobs=1)
    multi = enumerate_semantics(circuit, "det", 16, jobs=4)
    assert solo == multi
