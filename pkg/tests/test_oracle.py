import pytest

from conftest import det_suite
from gluedyn.fixtures import demo_dynamics
from gluedyn.gluing import delta_with_placements
from gluedyn.oracle import (
    DeterminismError,
    dynamics_from_arcs,
    explicit_dynamics,
    export_dot,
    fold_placement_map,
    make_instance,
)
from gluedyn.satfront import parse_expr

# Successor table of the toy instance with S = x1 and two padding copies,
# frozen from the explicit oracle: the satisfying row places the
# self-loop-carrying gadget at copy 2, so 4 is the unique fixed point.
TOY_X1_TABLE = {
    0: 1, 1: 2, 2: 3, 3: 4, 4: 4, 5: 6, 6: 7, 7: 8,
    8: 9, 9: 10, 10: 11, 11: 12, 12: 13, 13: 14, 14: 15, 15: 9,
}


def test_toy_transition_table(toy):
    inst = make_instance(toy, parse_expr("x1"), mode="det", L=2)
    dyn = explicit_dynamics(inst)
    assert dyn.total == 16
    assert {c: dyn.successor(c) for c in range(16)} == TOY_X1_TABLE


def test_unsat_has_no_fixed_point(toy):
    inst = make_instance(toy, parse_expr("x1 & !x1"), mode="det", L=2)
    dyn = explicit_dynamics(inst)
    assert all(dyn.successor(c) != c for c in range(dyn.total))


def test_tautology_places_self_loop_everywhere(toy):
    inst = make_instance(toy, parse_expr("x1 | !x1"), mode="det", L=2)
    assert inst.branch_letters() == [0, 0]
    dyn = explicit_dynamics(inst)
    fixed = [c for c in range(dyn.total) if dyn.successor(c) == c]
    assert len(fixed) == 2  # one per branch copy


def test_gluing_word(toy):
    inst = make_instance(toy, parse_expr("x1"), mode="det", L=2)
    assert inst.gluing_word() == [2, 1, 0, 4, 4, 3]


def test_copy_index_table(toy_sat_instance):
    lay = toy_sat_instance.layout
    expected = {0: (0, 0), 1: (0, 1), 3: (1, 1), 6: (3, 0), 9: (4, 1), 12: (5, 0), 15: (0, 1)}
    for c, want in expected.items():
        i, p = lay.copy_of(c)
        assert (i, int(p)) == want
    # first label after the opener slice belongs to copy 1
    assert lay.copy_of(lay.head_end)[0] == 1
    # first shared label belongs to copy 0 and is a secondary port
    assert lay.copy_of(lay.shared_start) == (0, True)


def test_local_global_label_examples(toy_sat_instance):
    lay = toy_sat_instance.layout
    # branch copies
    assert lay.local_label(1, 0, 1) == 0
    assert lay.local_label(2, 1, 1) == 1
    assert lay.local_label(3, 1, 1) == 2
    assert lay.local_label(3, 0, 2) == 0
    # closer
    assert lay.local_label(9, 3, 5) == 0
    assert lay.local_label(14, 3, 5) == 5
    # shared labels per gadget type
    assert lay.local_label(15, 2, 0) == 2
    assert lay.local_label(15, 0, 1) == 3
    assert lay.local_label(15, 3, 5) == 6
    # inverses
    assert lay.global_label(1, 0, 1) == 2
    assert lay.global_label(2, 0, 1) == 4
    assert lay.global_label(5, 3, 0) == 9
    assert lay.global_label(5, 3, 6) == 15


def test_allocation_covers_every_label(toy):
    inst = make_instance(toy, parse_expr("x1"), mode="det", L=2)
    dyn = explicit_dynamics(inst)
    assert sorted(dyn.allocation) == list(range(16))
    # ports map to their smallest-index copy
    assert dyn.allocation[15] == (0, 2, 2)
    assert dyn.allocation[3] == (1, 1, 2)


def test_fold_matches_canonical_allocation_everywhere(toy, wide, ntoy, wide_nondet):
    cases = [(toy, "det"), (wide, "det"), (ntoy, "nondet"), (wide_nondet, "nondet")]
    for family, mode in cases:
        for formula, L in det_suite()[:8]:
            inst = make_instance(family, formula, mode=mode, L=L)
            dyn = explicit_dynamics(inst)
            folded, _ = delta_with_placements(family, inst.gluing_word())
            phi = fold_placement_map(inst)
            assert {(phi[u], phi[w]) for u, w in folded.arcs} == dyn.arcs


def test_out_degree_diagnostic_names_vertex_and_gadgets(toy):
    from gluedyn.gluing import family_from_dict
    from gluedyn.fixtures import TOY_FAMILY_DOC

    # G2's secondary port 1 gets an arc while the branch primary port keeps
    # its own: the merged vertex ends up with out-degree 2
    doc = {
        **TOY_FAMILY_DOC,
        "graphs": {
            **TOY_FAMILY_DOC["graphs"],
            "G2": {"size": 3, "arcs": [[0, 1], [1, 0]]},
        },
    }
    family = family_from_dict(doc)
    inst = make_instance(family, parse_expr("x1"), mode="det", L=2)
    with pytest.raises(DeterminismError) as err:
        explicit_dynamics(inst)
    message = str(err.value)
    assert "vertex 1" in message and "copy 0" in message and "copy 1" in message


def test_nondet_mode_keeps_multi_arcs(ntoy):
    inst = make_instance(ntoy, parse_expr("x1"), mode="nondet", L=2)
    dyn = explicit_dynamics(inst)
    assert dyn.successors(4) == [4, 5]  # genuine branching at the satisfied copy


def test_shared_port_arcs_are_unioned(ntoy, wide_nondet):
    # the closer's shared-port arc is present exactly once despite the merge
    inst = make_instance(ntoy, parse_expr("x1"), mode="nondet", L=2)
    dyn = explicit_dynamics(inst)
    assert dyn.has_arc(15, 9)
    # any gadget's arc between two shared ports survives into the glued graph:
    # the wide nondet family has shared-port self-loops in several gadgets
    inst = make_instance(wide_nondet, parse_expr("x1"), mode="nondet", L=2)
    dyn = explicit_dynamics(inst)
    shared = dyn.total - 1
    assert dyn.has_arc(shared, shared)
    for gadget in (0, 1, 3, 4):
        graph = wide_nondet.graph(gadget)
        assert (graph.size - 1, graph.size - 1) in graph.arcs


def test_export_dot_two_cycle():
    dyn = dynamics_from_arcs(2, [(0, 1), (1, 0)])
    text = export_dot(dyn, annotations=False)
    assert "0 -> 1;" in text and "1 -> 0;" in text


def test_export_dot_demo_dynamics_counts():
    g = demo_dynamics()
    dyn = dynamics_from_arcs(g.vertex_count, g.arcs())
    text = export_dot(dyn)
    assert text.count("->") == 9
    assert g.vertex_count == 9


def test_export_dot_is_deterministic(toy):
    inst = make_instance(toy, parse_expr("x1"), mode="det", L=2)
    a = export_dot(explicit_dynamics(inst))
    b = export_dot(explicit_dynamics(inst))
    assert a == b
    assert "(copy 2, G0:1)" in a


def test_eq2_total_matches_oracle_count(toy, wide):
    for family in (toy, wide):
        for formula, L in det_suite():
            inst = make_instance(family, formula, mode="det", L=L)
            dyn = explicit_dynamics(inst)
            assert dyn.total == inst.sizes.total
            assert len({u for u, _ in dyn.arcs} | {w for _, w in dyn.arcs}) <= dyn.total
