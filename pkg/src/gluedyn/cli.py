"""Batch command-line surface.

Exit codes: 0 success, 1 domain error (validation, uniformity, equivalence
mismatch), 2 usage error.  Diagnostics go to stderr; artifacts to files or
stdout.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from .circuits import BitWord, CircuitError, deserialize
from .detcompile import compile_det, count_det, stream_det
from .emit import ConstructionError
from .gluing import GammaValidationError, load_family
from .mso import MsoBudgetError, MsoSyntaxError, mso_verdict, parse_mso
from .nondetcompile import compile_nondet, count_nondet, stream_nondet
from .oracle import (
    MODE_DET,
    MODE_NONDET,
    DeterminismError,
    dynamics_from_arcs,
    explicit_dynamics,
    export_dot,
    make_instance,
)
from .satfront import FormulaParseError, parse_dimacs, parse_expr
from .sizing import InstanceConstantsError, UniformityError, solve_N
from .verify import (
    EnumerationBoundError,
    GraphSizeMismatch,
    SemanticGraph,
    check_equivalence,
    enumerate_semantics,
    rice_probe,
)

DOMAIN_ERRORS = (
    GammaValidationError,
    FormulaParseError,
    InstanceConstantsError,
    UniformityError,
    DeterminismError,
    ConstructionError,
    CircuitError,
    EnumerationBoundError,
    GraphSizeMismatch,
    MsoSyntaxError,
    MsoBudgetError,
    ValueError,
    OSError,
)


def _load_formula(source: str):
    if os.path.exists(source):
        with open(source, "r", encoding="utf-8") as fp:
            text = fp.read()
        if text.lstrip().startswith(("p", "c")):
            return parse_dimacs(text)
        return parse_expr(text.strip())
    return parse_expr(source)


def _instance(args, mode=None):
    family = load_family(args.gamma)
    formula = _load_formula(args.sat)
    uniform = not args.free
    L = args.L if not uniform else None
    if not uniform and L is None:
        raise ValueError("--free requires --L <n>")
    return make_instance(
        family, formula, mode=mode or getattr(args, "mode", MODE_DET), uniform=uniform, L=L
    )


def _load_graph(path: str, jobs: int = 1) -> SemanticGraph:
    with open(path, "r", encoding="utf-8") as fp:
        text = fp.read()
    doc = json.loads(text)
    if "gates" in doc:
        circuit = deserialize(text)
        meta = circuit.meta
        if "T" not in meta or "mode" not in meta:
            raise ValueError("circuit file lacks instance metadata (T, mode)")
        return enumerate_semantics(circuit, meta["mode"], int(meta["T"]), jobs=jobs)
    if "vertices" in doc and "arcs" in doc:
        return SemanticGraph.from_arcs(int(doc["vertices"]), [tuple(a) for a in doc["arcs"]])
    raise ValueError("graph file is neither a circuit nor a vertices/arcs object")


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", encoding="utf-8"), True


def cmd_params(args) -> int:
    inst = _instance(args)
    sizes = inst.sizes
    print(f"2^s={sizes.two_pow_s}")
    print(f"L={sizes.L}")
    print(f"T={sizes.total}")
    if sizes.N is not None:
        print(f"N={sizes.N}")
    else:
        try:
            print(f"N={solve_N(sizes.total, inst.family.q)}")
        except UniformityError:
            print("N=-")
    return 0


def cmd_compile(args) -> int:
    inst = _instance(args)
    out, close = _open_out(args.output)
    start = time.perf_counter()
    try:
        if inst.mode == MODE_DET:
            stats = stream_det(inst, out)
        else:
            stats = stream_nondet(inst, out)
    finally:
        if close:
            out.close()
    elapsed = time.perf_counter() - start
    if args.emit_stats:
        payload = {
            "gates": stats.gates,
            "wires": stats.wires,
            "peak_workspace_bytes": stats.peak_workspace_bytes,
            "emission_time": elapsed,
        }
        with open(args.emit_stats, "w", encoding="utf-8") as fp:
            json.dump(payload, fp, sort_keys=True)
            fp.write("\n")
    return 0


def cmd_eval(args) -> int:
    if args.circuit:
        with open(args.circuit, "r", encoding="utf-8") as fp:
            circuit = deserialize(fp.read())
        mode = circuit.meta.get("mode", MODE_DET)
    else:
        if not args.gamma or not args.sat:
            raise ValueError("need either --circuit or --gamma with --sat")
        inst = _instance(args)
        circuit = compile_det(inst) if inst.mode == MODE_DET else compile_nondet(inst)
        mode = inst.mode
    config = int(args.config)
    if mode == MODE_NONDET:
        if args.config2 is None:
            raise ValueError("non-deterministic circuits need --config and --config2")
        half = circuit.input_count // 2
        word = BitWord.from_int(config, half).bits + BitWord.from_int(
            int(args.config2), half
        ).bits
        print(circuit.evaluate(BitWord(word)).to_int())
    else:
        word = BitWord.from_int(config, circuit.input_count)
        print(circuit.evaluate(word).to_int())
    return 0


def cmd_enumerate(args) -> int:
    if args.circuit:
        with open(args.circuit, "r", encoding="utf-8") as fp:
            circuit = deserialize(fp.read())
        meta = circuit.meta
        if "T" not in meta or "mode" not in meta:
            raise ValueError("circuit file lacks instance metadata (T, mode)")
        mode, total = meta["mode"], int(meta["T"])
    else:
        if not args.gamma or not args.sat:
            raise ValueError("need either --circuit or --gamma with --sat")
        inst = _instance(args)
        circuit = compile_det(inst) if inst.mode == MODE_DET else compile_nondet(inst)
        mode, total = inst.mode, inst.sizes.total
    sem = enumerate_semantics(circuit, mode, total, bound=args.bound, jobs=args.jobs)
    out, close = _open_out(args.output)
    try:
        if args.dot:
            out.write(export_dot(dynamics_from_arcs(sem.vertex_count, sem.arcs())))
        else:
            for u, w in sem.arcs():
                out.write(f"{u} {w}\n")
    finally:
        if close:
            out.close()
    return 0


def cmd_oracle(args) -> int:
    inst = _instance(args)
    dyn = explicit_dynamics(inst)
    out, close = _open_out(args.output)
    try:
        if args.dot:
            out.write(export_dot(dyn))
        else:
            for u, w in sorted(dyn.arcs):
                out.write(f"{u} {w}\n")
    finally:
        if close:
            out.close()
    return 0


def cmd_check(args) -> int:
    inst = _instance(args)
    dyn = explicit_dynamics(inst)
    circuit = compile_det(inst) if inst.mode == MODE_DET else compile_nondet(inst)
    sem = enumerate_semantics(circuit, inst.mode, inst.sizes.total, jobs=args.jobs)
    verdict = check_equivalence(sem, dyn)
    if verdict.equivalent:
        print(verdict)
        return 0
    print(verdict, file=sys.stderr)
    return 1


def cmd_mso(args) -> int:
    graph = _load_graph(args.graph, jobs=args.jobs)
    verdict = mso_verdict(graph, parse_mso(args.formula), budget=args.budget)
    payload = {"result": verdict.result, "cost": verdict.cost}
    if verdict.witness is not None:
        payload["witness"] = verdict.witness
    print(json.dumps(payload, sort_keys=True))
    return 0


def cmd_rice(args) -> int:
    inst = _instance(args)
    report = rice_probe(inst, args.formula)
    print(
        json.dumps(
            {
                "mode": report.mode,
                "total": report.total,
                "satisfiable": report.satisfiable,
                "property_holds": report.property_holds,
                "agree": report.agree,
                "gates": report.gates,
            },
            sort_keys=True,
        )
    )
    return 0 if report.agree else 1


def cmd_stats(args) -> int:
    inst = _instance(args)
    start = time.perf_counter()
    stats = count_det(inst) if inst.mode == MODE_DET else count_nondet(inst)
    elapsed = time.perf_counter() - start
    print(
        json.dumps(
            {
                "gates": stats.gates,
                "wires": stats.wires,
                "peak_workspace_bytes": stats.peak_workspace_bytes,
                "emission_time": elapsed,
            },
            sort_keys=True,
        )
    )
    return 0


def _add_instance_flags(p: argparse.ArgumentParser, with_mode=True) -> None:
    p.add_argument("--gamma", required=True, help="gadget family JSON file")
    p.add_argument("--sat", required=True, help="DIMACS file or expression string")
    if with_mode:
        p.add_argument("--mode", choices=(MODE_DET, MODE_NONDET), default=MODE_DET)
    sizing = p.add_mutually_exclusive_group()
    sizing.add_argument("--uniform", action="store_true", default=True,
                        help="size the padding run from the family constants (default)")
    sizing.add_argument("--free", dest="free", action="store_true", default=False,
                        help="use an explicit padding length (--L)")
    p.add_argument("--L", type=int, default=None, help="padding length in free mode")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gluedyn",
        description="compile SAT formulas into succinct dynamics circuits and verify them",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params", help="print instance arithmetic")
    _add_instance_flags(p, with_mode=False)
    p.set_defaults(func=cmd_params, mode=MODE_DET)

    p = sub.add_parser("compile", help="emit the circuit JSON")
    _add_instance_flags(p)
    p.add_argument("-o", "--output", default=None, help="output file (default stdout)")
    p.add_argument("--emit-stats", default=None, help="write gate/workspace stats JSON here")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("eval", help="evaluate one configuration")
    p.add_argument("--circuit", default=None, help="circuit JSON file")
    p.add_argument("--gamma")
    p.add_argument("--sat")
    p.add_argument("--mode", choices=(MODE_DET, MODE_NONDET), default=MODE_DET)
    p.add_argument("--uniform", action="store_true", default=True)
    p.add_argument("--free", action="store_true", default=False)
    p.add_argument("--L", type=int, default=None)
    p.add_argument("--config", required=True, help="configuration label, decimal")
    p.add_argument("--config2", default=None, help="second configuration (nondet)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("enumerate", help="materialize the circuit's dynamics")
    p.add_argument("--circuit", default=None, help="circuit JSON file")
    p.add_argument("--gamma")
    p.add_argument("--sat")
    p.add_argument("--mode", choices=(MODE_DET, MODE_NONDET), default=MODE_DET)
    p.add_argument("--uniform", action="store_true", default=True)
    p.add_argument("--free", action="store_true", default=False)
    p.add_argument("--L", type=int, default=None)
    p.add_argument("--bound", type=int, default=None, help="override the desk-scale bound")
    p.add_argument("--dot", action="store_true", help="emit Graphviz instead of arc pairs")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("oracle", help="materialize the explicit gluing oracle")
    _add_instance_flags(p)
    p.add_argument("--dot", action="store_true")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("check", help="compile, build the oracle, compare exactly")
    _add_instance_flags(p)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("mso", help="model-check a formula on a graph or circuit")
    p.add_argument("--formula", required=True)
    p.add_argument("--graph", required=True, help="circuit JSON or vertices/arcs JSON")
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_mso)

    p = sub.add_parser("rice", help="end-to-end separation probe")
    _add_instance_flags(p)
    p.add_argument("--formula", default="exists x (x -> x)")
    p.set_defaults(func=cmd_rice)

    p = sub.add_parser("stats", help="emission statistics without an artifact")
    _add_instance_flags(p)
    p.set_defaults(func=cmd_stats)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "free", False):
        args.uniform = False
    try:
        return args.func(args)
    except DOMAIN_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
