"""Propositional formulas: DIMACS and expression parsing, brute-force
evaluation, the falsity word, and compilation to gates.

Variable v reads bit v-1 of the assignment index (little-endian), the same
bit order the circuit buses use, so a decremented copy-index bus can feed a
compiled formula directly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from .emit import Bus, Emitter


class FormulaParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


# Expression trees are nested tuples:
#   ("var", v) | ("not", t) | ("and", a, b) | ("or", a, b)
Expr = tuple


@dataclass(frozen=True)
class PropFormula:
    """CNF clause list or parsed expression tree over variables 1..s."""

    variable_count: int
    clauses: tuple[tuple[int, ...], ...] | None = None
    tree: Expr | None = None
    source: str = ""

    def __post_init__(self):
        if self.variable_count < 1:
            raise FormulaParseError("at least one variable is required")
        if (self.clauses is None) == (self.tree is None):
            raise FormulaParseError("exactly one of clauses/tree must be given")
        if self.clauses is not None:
            for clause in self.clauses:
                for lit in clause:
                    if lit == 0 or abs(lit) > self.variable_count:
                        raise FormulaParseError(f"literal {lit} out of range 1..{self.variable_count}")


def parse_dimacs(text: str) -> PropFormula:
    """Parse DIMACS CNF; declared variable and clause counts are enforced."""
    var_count = None
    clause_count = None
    clauses: list[tuple[int, ...]] = []
    pending: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            if var_count is not None:
                raise FormulaParseError("duplicate header", lineno)
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise FormulaParseError(f"malformed header {line!r}", lineno)
            try:
                var_count, clause_count = int(parts[2]), int(parts[3])
            except ValueError:
                raise FormulaParseError(f"malformed header {line!r}", lineno) from None
            continue
        if var_count is None:
            raise FormulaParseError("clause before 'p cnf' header", lineno)
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise FormulaParseError(f"bad token {tok!r}", lineno) from None
            if lit == 0:
                clauses.append(tuple(pending))
                pending.clear()
            else:
                if abs(lit) > var_count:
                    raise FormulaParseError(
                        f"literal {lit} exceeds declared variable count {var_count}", lineno
                    )
                pending.append(lit)
    if var_count is None:
        raise FormulaParseError("missing 'p cnf' header")
    if pending:
        raise FormulaParseError("trailing literals without terminating 0")
    if clause_count is not None and len(clauses) != clause_count:
        raise FormulaParseError(
            f"declared {clause_count} clauses, found {len(clauses)}"
        )
    return PropFormula(var_count, clauses=tuple(clauses), source="dimacs")


_TOKEN = re.compile(r"\s*(x\d+|[()!&|])")


def parse_expr(text: str, variable_count: int | None = None) -> PropFormula:
    """Tiny expression syntax for readable fixtures: &, |, !, parens, x<k>."""
    tokens: list[str] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise FormulaParseError(f"unexpected input at {text[pos:]!r}")
            break
        tokens.append(m.group(1))
        pos = m.end()
    if not tokens:
        raise FormulaParseError("empty expression")

    idx = 0

    def peek() -> str | None:
        return tokens[idx] if idx < len(tokens) else None

    def take(expected: str | None = None) -> str:
        nonlocal idx
        if idx >= len(tokens):
            raise FormulaParseError("unexpected end of expression")
        tok = tokens[idx]
        if expected is not None and tok != expected:
            raise FormulaParseError(f"expected {expected!r}, found {tok!r}")
        idx += 1
        return tok

    max_var = 0

    def parse_or() -> Expr:
        node = parse_and()
        while peek() == "|":
            take()
            node = ("or", node, parse_and())
        return node

    def parse_and() -> Expr:
        node = parse_unary()
        while peek() == "&":
            take()
            node = ("and", node, parse_unary())
        return node

    def parse_unary() -> Expr:
        nonlocal max_var
        tok = peek()
        if tok == "!":
            take()
            return ("not", parse_unary())
        if tok == "(":
            take()
            node = parse_or()
            take(")")
            return node
        if tok is not None and tok.startswith("x"):
            take()
            v = int(tok[1:])
            if v < 1:
                raise FormulaParseError(f"variable index {v} out of range")
            max_var = max(max_var, v)
            return ("var", v)
        raise FormulaParseError(f"unexpected token {tok!r}")

    tree = parse_or()
    if idx != len(tokens):
        raise FormulaParseError(f"trailing tokens starting at {tokens[idx]!r}")
    s = variable_count if variable_count is not None else max_var
    if max_var > s:
        raise FormulaParseError(f"variable x{max_var} exceeds declared count {s}")
    return PropFormula(s, tree=tree, source=text)


def parse_formula(text: str, variable_count: int | None = None) -> PropFormula:
    """Accept either DIMACS text or an expression string."""
    if text.lstrip().startswith(("p ", "p\t", "c ", "c\t", "p cnf")):
        return parse_dimacs(text)
    return parse_expr(text, variable_count)


def _eval_tree(tree: Expr, assignment: int) -> bool:
    op = tree[0]
    if op == "var":
        return bool((assignment >> (tree[1] - 1)) & 1)
    if op == "not":
        return not _eval_tree(tree[1], assignment)
    if op == "and":
        return _eval_tree(tree[1], assignment) and _eval_tree(tree[2], assignment)
    if op == "or":
        return _eval_tree(tree[1], assignment) or _eval_tree(tree[2], assignment)
    raise ValueError(f"unknown node {op!r}")


def eval_assignment(formula: PropFormula, assignment: int) -> bool:
    """Truth value where variable v takes bit v-1 of the assignment index."""
    if not 0 <= assignment < (1 << formula.variable_count):
        raise ValueError(
            f"assignment {assignment} out of range for {formula.variable_count} variables"
        )
    if formula.tree is not None:
        return _eval_tree(formula.tree, assignment)
    for clause in formula.clauses:
        if not any(
            ((assignment >> (abs(lit) - 1)) & 1) == (1 if lit > 0 else 0) for lit in clause
        ):
            return False
    return True


def sbar(formula: PropFormula) -> list[int]:
    """Falsity word: bit i is 1 exactly when the formula is false on assignment i."""
    return [0 if eval_assignment(formula, i) else 1 for i in range(1 << formula.variable_count)]


def satisfying_assignments(formula: PropFormula) -> list[int]:
    return [i for i in range(1 << formula.variable_count) if eval_assignment(formula, i)]


def is_satisfiable(formula: PropFormula) -> bool:
    return any(eval_assignment(formula, i) for i in range(1 << formula.variable_count))


def compile_formula(e: Emitter, formula: PropFormula, assignment_bus: Bus) -> int:
    """Emit one copy of the formula over the given wires; O(formula size) gates."""
    if len(assignment_bus) != formula.variable_count:
        raise ValueError(
            f"assignment bus has {len(assignment_bus)} wires, formula needs "
            f"{formula.variable_count}"
        )
    if formula.tree is not None:

        def rec(node: Expr) -> int:
            op = node[0]
            if op == "var":
                return assignment_bus[node[1] - 1]
            if op == "not":
                return e.not_(rec(node[1]))
            if op == "and":
                return e.and_(rec(node[1]), rec(node[2]))
            return e.or_(rec(node[1]), rec(node[2]))

        return rec(formula.tree)
    neg_cache: dict[int, int] = {}
    clause_wires = []
    for clause in formula.clauses:
        lits = []
        for lit in clause:
            if lit > 0:
                lits.append(assignment_bus[lit - 1])
            else:
                v = -lit
                if v not in neg_cache:
                    neg_cache[v] = e.not_(assignment_bus[v - 1])
                lits.append(neg_cache[v])
        clause_wires.append(e.or_many(lits))
    return e.and_many(clause_wires)
