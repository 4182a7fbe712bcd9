import pytest

from conftest import nondet_suite
from gluedyn.circuits import BitWord, serialize
from gluedyn.emit import ConstructionError, Emitter, ListSink
from gluedyn.detcompile import bus_width, compile_det
from gluedyn.gluing import GammaValidationError
from gluedyn.nondetcompile import (
    compile_nondet,
    emit_branch_adjacency,
    emit_gadget_adjacency,
)
from gluedyn.oracle import explicit_dynamics, make_instance
from gluedyn.satfront import parse_expr
from gluedyn.sizing import Layout
from gluedyn.verify import check_equivalence, enumerate_semantics


def adjacency_circuit(layout, gadget):
    e = Emitter(ListSink())
    width = bus_width(layout)
    v = [e.input() for _ in range(width)]
    v2 = [e.input() for _ in range(width)]
    e.output(emit_gadget_adjacency(e, layout, gadget, v, v2))
    return e.finish(), width


def branch_adjacency_circuit(inst):
    e = Emitter(ListSink())
    width = bus_width(inst.layout)
    idx = [e.input() for _ in range(width)]
    v = [e.input() for _ in range(width)]
    v2 = [e.input() for _ in range(width)]
    e.output(emit_branch_adjacency(e, inst, idx, v, v2))
    return e.finish(), width


def arc_bit(circuit, c, c2):
    half = circuit.input_count // 2
    word = BitWord.from_int(c + (c2 << half), circuit.input_count)
    return circuit.evaluate(word).to_int()


def test_gadget_adjacency_examples(ntoy):
    layout = Layout.build(ntoy, 1, 2)
    circuit, width = adjacency_circuit(layout, 0)

    def bit(v, v2):
        return circuit.evaluate(BitWord.from_int(v + (v2 << width), 2 * width)).to_int()

    assert bit(1, 1) == 1
    assert bit(1, 2) == 1
    assert bit(0, 1) == 1
    assert bit(2, 2) == 0
    assert bit(0, 0) == 0


def test_gadget_adjacency_exhaustive(ntoy):
    layout = Layout.build(ntoy, 1, 2)
    for gadget in range(5):
        graph = ntoy.graph(gadget)
        circuit, width = adjacency_circuit(layout, gadget)
        for v in range(graph.size):
            for v2 in range(graph.size):
                got = circuit.evaluate(
                    BitWord.from_int(v + (v2 << width), 2 * width)
                ).to_int()
                assert got == int((v, v2) in graph.arcs), (gadget, v, v2)


def test_branch_adjacency_polarity(ntoy):
    inst = make_instance(ntoy, parse_expr("!x1"), mode="nondet", L=2)
    circuit, width = branch_adjacency_circuit(inst)

    def bit(idx, v, v2):
        word = BitWord.from_int(idx + (v << width) + (v2 << (2 * width)), 3 * width)
        return circuit.evaluate(word).to_int()

    # row 0 satisfies !x1: branch gadget 0 with its extra arc
    assert bit(1, 1, 2) == 1
    # row 1 falsifies !x1: branch gadget 1, no self-loop
    assert bit(2, 1, 1) == 0
    assert bit(1, 1, 1) == 1


def test_branch_adjacency_port_pairs_agree(ntoy):
    """Arcs between port labels are branch-independent, so the clamped
    index-zero lane reports them exactly."""
    inst = make_instance(ntoy, parse_expr("x1"), mode="nondet", L=2)
    circuit, width = branch_adjacency_circuit(inst)
    g0 = ntoy.graph(0)
    ports = sorted(set(g0.primary) | set(g0.secondary))
    for v in ports:
        for v2 in ports:
            bits = set()
            for idx in (0, 1, 2):
                word = BitWord.from_int(idx + (v << width) + (v2 << (2 * width)), 3 * width)
                bits.add(circuit.evaluate(word).to_int())
            assert len(bits) == 1, (v, v2)
            assert bits == {int((v, v2) in g0.arcs)}


def test_port_disagreement_rejected():
    from gluedyn.fixtures import TOY_FAMILY_DOC
    from gluedyn.gluing import family_from_dict

    doc = {
        **TOY_FAMILY_DOC,
        "graphs": {**TOY_FAMILY_DOC["graphs"], "G0": {"size": 4, "arcs": [[0, 1], [3, 3]]}},
    }
    family = family_from_dict(doc)
    with pytest.raises(GammaValidationError):
        make_instance(family, parse_expr("x1"), mode="nondet", L=2)


def test_nondeterministic_family_rejected_in_det_mode(ntoy):
    with pytest.raises(GammaValidationError):
        make_instance(ntoy, parse_expr("x1"), mode="det", L=2)


def test_arc_select_frozen_cases(ntoy):
    inst = make_instance(ntoy, parse_expr("!x1"), mode="nondet", L=2)
    circuit = compile_nondet(inst)
    assert arc_bit(circuit, 2, 2) == 1
    assert arc_bit(circuit, 2, 3) == 1
    assert arc_bit(circuit, 2, 4) == 0
    assert arc_bit(circuit, 15, 9) == 1
    # distant copies, neither endpoint shared
    assert arc_bit(circuit, 2, 9) == 0


def test_master_equivalence_nondet(ntoy, wide_nondet):
    for family in (ntoy, wide_nondet):
        for formula, L in nondet_suite():
            inst = make_instance(family, formula, mode="nondet", L=L)
            dyn = explicit_dynamics(inst)
            sem = enumerate_semantics(compile_nondet(inst), "nondet", inst.sizes.total)
            verdict = check_equivalence(sem, dyn)
            assert verdict.equivalent, (family.sizes, formula.source, L, str(verdict))


def test_unsat_has_no_self_arc(ntoy):
    inst = make_instance(ntoy, parse_expr("x1 & !x1"), mode="nondet", L=2)
    sem = enumerate_semantics(compile_nondet(inst), "nondet", inst.sizes.total)
    assert all(not sem.has_arc(c, c) for c in range(sem.vertex_count))


def test_cross_mode_consistency(toy, wide):
    for family in (toy, wide):
        for text, L in (("x1", 2), ("x1 & !x1", 1), ("(x1 | x2) & !x1", 0)):
            formula = parse_expr(text)
            det_inst = make_instance(family, formula, mode="det", L=L)
            nd_inst = make_instance(family, formula, mode="nondet", L=L)
            det_sem = enumerate_semantics(compile_det(det_inst), "det", det_inst.sizes.total)
            nd_sem = enumerate_semantics(
                compile_nondet(nd_inst), "nondet", nd_inst.sizes.total
            )
            assert check_equivalence(nd_sem, det_sem).equivalent


def classify_pair(layout, c, c2):
    """Python mirror of the arc router's first-match case analysis."""
    i, _ = layout.copy_of(c)
    i2, _ = layout.copy_of(c2)
    sh = c >= layout.shared_start
    sh2 = c2 >= layout.shared_start
    two_s = 1 << layout.s
    L = layout.L
    last = layout.last_copy
    m = max(i, i2)
    diff = abs(i - i2)
    conditions = [
        diff > 1 and not sh and not sh2,
        sh and sh2,
        (i == i2 and 0 < i < two_s) or (sh and 0 < i2 < two_s) or (sh2 and 0 < i < two_s),
        (i == i2 and two_s < i < two_s + L)
        or (sh and two_s < i2 < two_s + L)
        or (sh2 and two_s < i < two_s + L),
        (i == i2 == two_s) or (sh and i2 == two_s) or (sh2 and i == two_s),
        (i == i2 == 0 and not sh and not sh2) or (sh and i2 == 0) or (sh2 and i == 0),
        (i == i2 == two_s + L and not sh and not sh2)
        or (sh and i2 == two_s + L)
        or (sh2 and i == two_s + L),
        diff == 1 and 0 < m <= two_s,
        diff == 1 and two_s < m <= two_s + L,
        (i == i2 == last)
        or (diff == 1 and m == last)
        or (sh and i2 == last)
        or (sh2 and i == last),
    ]
    for case, fired in enumerate(conditions, start=1):
        if fired:
            return case
    return 0


def test_case_coverage_counter(ntoy, wide_nondet):
    """Every router case is exercised somewhere in the fixture suite."""
    seen = {}
    for family in (ntoy, wide_nondet):
        for formula, L in nondet_suite():
            layout = Layout.build(family, formula.variable_count, L)
            for c in range(layout.total):
                for c2 in range(layout.total):
                    case = classify_pair(layout, c, c2)
                    seen[case] = seen.get(case, 0) + 1
    assert set(seen) >= set(range(1, 11)), sorted(seen)


def test_compilation_reproducible(ntoy):
    inst = make_instance(ntoy, parse_expr("x1"), mode="nondet", L=2)
    assert serialize(compile_nondet(inst)) == serialize(compile_nondet(inst))


def test_metadata_header(ntoy):
    inst = make_instance(ntoy, parse_expr("x1"), mode="nondet", L=2)
    circuit = compile_nondet(inst)
    assert circuit.input_count == 8
    assert circuit.output_count == 1
    assert circuit.meta["mode"] == "nondet"


def test_wrong_mode_rejected(ntoy):
    inst = make_instance(ntoy, parse_expr("x1"), mode="nondet", L=2)
    with pytest.raises(ConstructionError):
        compile_det(inst)
