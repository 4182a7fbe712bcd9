"""Acceptance suite: one test per criterion, one printed verdict line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the verdict lines.
All comparisons are exact unless a tolerance is stated inline.
"""

import time
from contextlib import contextmanager
from fractions import Fraction

import numpy as np

from conftest import det_suite, nondet_suite, random_cnfs
from gluedyn.circuits import serialize
from gluedyn.detcompile import compile_det, count_det, stream_det
from gluedyn.fixtures import demo_dynamics
from gluedyn.mso import mso_check
from gluedyn.nondetcompile import compile_nondet
from gluedyn.oracle import explicit_dynamics, make_instance
from gluedyn.satfront import PropFormula, is_satisfiable, parse_expr, sbar
from gluedyn.sizing import Layout, compute_L, solve_N, total_vertices
from gluedyn.verify import check_equivalence, enumerate_semantics


@contextmanager
def criterion(number, description):
    started = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"\ncriterion {number:2d} FAIL  {description}")
        raise
    elapsed = time.perf_counter() - started
    print(f"\ncriterion {number:2d} PASS  {description} ({elapsed:.2f}s)")


def test_criterion_1_demo_dynamics_model_checking():
    with criterion(1, "nine-vertex demo dynamics separates the two probe formulas"):
        started = time.perf_counter()
        g = demo_dynamics()
        assert g.vertex_count == 9
        assert mso_check(g, "exists x (x -> x)") is False
        assert mso_check(g, "exists x (exists y (x -> y & y -> x))") is True
        assert time.perf_counter() - started < 1.0


def test_criterion_2_deterministic_oracle_equivalence(toy):
    with criterion(2, "deterministic circuits match the gluing oracle on every configuration"):
        started = time.perf_counter()
        suite = det_suite()
        assert len(suite) >= 12
        assert {f.variable_count for f, _ in suite} == {1, 2, 3}
        flavors = {(is_satisfiable(f), not any(sbar(f))) for f, _ in suite}
        for formula, L in suite:
            inst = make_instance(toy, formula, mode="det", L=L)
            dyn = explicit_dynamics(inst)
            sem = enumerate_semantics(compile_det(inst), "det", inst.sizes.total)
            verdict = check_equivalence(sem, dyn)
            assert verdict.equivalent, (formula.source, L, str(verdict))
        assert (True, True) in flavors and (False, False) in flavors and (True, False) in flavors
        assert time.perf_counter() - started < 10.0


def test_criterion_3_nondeterministic_oracle_equivalence(ntoy):
    with criterion(3, "adjacency circuits match the oracle on the full T x T matrix"):
        started = time.perf_counter()
        for formula, L in nondet_suite():
            inst = make_instance(ntoy, formula, mode="nondet", L=L)
            dyn = explicit_dynamics(inst)
            sem = enumerate_semantics(compile_nondet(inst), "nondet", inst.sizes.total)
            verdict = check_equivalence(sem, dyn)
            assert verdict.equivalent, (formula.source, L, str(verdict))
        assert time.perf_counter() - started < 30.0


def test_criterion_4_separation_agreement(toy, ntoy):
    with criterion(4, "fixed-point property agrees with satisfiability on every probe"):
        edge_cases = [parse_expr("x1"), parse_expr("x1 & !x1"), parse_expr("x1 | !x1")]
        batch = random_cnfs(20) + edge_cases
        assert len(batch) >= 20
        agreements = 0
        for formula in batch:
            for family, mode in ((toy, "det"), (ntoy, "nondet")):
                inst = make_instance(family, formula, mode=mode, L=1)
                if mode == "det":
                    circuit = compile_det(inst)
                else:
                    circuit = compile_nondet(inst)
                sem = enumerate_semantics(circuit, mode, inst.sizes.total)
                holds = mso_check(sem, "exists x (x -> x)")
                assert holds == is_satisfiable(formula), formula
                agreements += 1
        assert agreements == 2 * len(batch)


def test_criterion_5_size_identity(toy, ntoy, utoy):
    with criterion(5, "summed slice sizes equal the oracle vertex count; uniform totals are exact powers"):
        for formula, L in det_suite():
            inst = make_instance(toy, formula, mode="det", L=L)
            dyn = explicit_dynamics(inst)
            direct = total_vertices(toy, formula.variable_count, L)
            assert dyn.total == direct == inst.sizes.total
            assert sorted(dyn.allocation) == list(range(direct))
        for formula, L in nondet_suite():
            inst = make_instance(ntoy, formula, mode="nondet", L=L)
            assert explicit_dynamics(inst).total == total_vertices(ntoy, formula.variable_count, L)
        for s in (1, 2, 3):
            inst = make_instance(utoy, PropFormula(s, clauses=((1,),)), mode="det", uniform=True)
            assert inst.sizes.total == utoy.q ** solve_N(inst.sizes.total, utoy.q)
            assert inst.sizes.N == solve_N(inst.sizes.total, utoy.q)
            assert explicit_dynamics(inst).total == inst.sizes.total


def test_criterion_6_inverse_identity(toy):
    with criterion(6, "global->local->global label round-trip is the identity on all routed lanes"):
        from test_detcompile import lane_circuit, routed_lanes
        from gluedyn.detcompile import bus_width
        from gluedyn.evalcore import batch_evaluate, encode_configs

        layouts = sorted({(f.variable_count, L) for f, L in det_suite()})
        for s, L in layouts:
            layout = Layout.build(toy, s, L)
            width = bus_width(layout)
            for kind, idx, configs in routed_lanes(layout):
                circuit, _ = lane_circuit(layout, kind)
                rows = encode_configs([idx + (c << width) for c in configs], 2 * width)
                outs = batch_evaluate(circuit, rows)
                for row, c in enumerate(configs):
                    back = sum(int(outs[row, width + j]) << j for j in range(width))
                    assert back == c, (s, L, kind, idx, c)


def test_criterion_7_padding_closed_form():
    with criterion(7, "padding length closed form matches the rational-arithmetic oracle"):
        for s in range(1, 11):
            got = compute_L(s, 2, 1, 1, 1, 1, 0)
            independent = Fraction(1, 1) * (Fraction(2) ** (s + 1) - 1) - 1 * 2**s
            assert independent.denominator == 1
            assert got == int(independent) == 2**s - 1


def test_criterion_8_empty_padding_patch(toy):
    with criterion(8, "empty padding run compiles through the patched router and matches the oracle"):
        inst = make_instance(toy, parse_expr("x1"), mode="det", L=0)
        assert inst.sizes.total == 12
        dyn = explicit_dynamics(inst)
        sem = enumerate_semantics(compile_det(inst), "det", 12)
        assert check_equivalence(sem, dyn).equivalent


def test_criterion_9_scaling(toy):
    with criterion(9, "gate counts fit a cubic and peak workspace fits a line over s=1..8 (20% residual)"):
        started = time.perf_counter()
        ss, gates, workspace = [], [], []
        for s in range(1, 9):
            inst = make_instance(toy, PropFormula(s, clauses=((1,),)), mode="det", L=2)
            stats = count_det(inst)
            ss.append(s)
            gates.append(stats.gates)
            workspace.append(stats.peak_workspace_bytes)
        gate_fit = np.polyval(np.polyfit(ss, gates, 3), ss)
        gate_residual = np.max(np.abs(gate_fit - gates) / np.asarray(gates, float))
        assert gate_residual <= 0.20, gate_residual
        ws_fit = np.polyval(np.polyfit(ss, workspace, 1), ss)
        ws_residual = np.max(np.abs(ws_fit - workspace) / np.asarray(workspace, float))
        assert ws_residual <= 0.20, ws_residual
        assert time.perf_counter() - started < 60.0


def test_criterion_10_byte_identical_compilation(toy):
    with criterion(10, "identical instances compile to byte-identical artifacts"):
        import io

        inst = make_instance(toy, parse_expr("(x1 | x2) & !x1"), mode="det", L=2)
        assert serialize(compile_det(inst)) == serialize(compile_det(inst))
        first, second = io.StringIO(), io.StringIO()
        stream_det(inst, first)
        stream_det(inst, second)
        assert first.getvalue() == second.getvalue()
        assert first.getvalue() == serialize(compile_det(inst))


def test_criterion_11_cross_mode_consistency(toy):
    with criterion(11, "adjacency compilation of a deterministic family equals the function graph"):
        for formula, L in nondet_suite():
            det_inst = make_instance(toy, formula, mode="det", L=L)
            nd_inst = make_instance(toy, formula, mode="nondet", L=L)
            det_sem = enumerate_semantics(compile_det(det_inst), "det", det_inst.sizes.total)
            nd_sem = enumerate_semantics(compile_nondet(nd_inst), "nondet", nd_inst.sizes.total)
            assert check_equivalence(nd_sem, det_sem).equivalent, (formula.source, L)
