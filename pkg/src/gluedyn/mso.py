"""Brute-force model checking of monadic second-order graph sentences.

Signature: arcs and equality on vertices, membership in vertex sets.
Lowercase identifiers quantify over vertices, uppercase over vertex sets.
Set quantifiers walk the subsets in Gray-code order (one element flips per
step) and every quantifier exits early on a witness, which is what makes
desk-scale instances practical.  A cost estimate guards against formulas
whose quantifier structure would blow up.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .verify import SemanticGraph


class MsoSyntaxError(ValueError):
    pass


class MsoBudgetError(ValueError):
    def __init__(self, estimated: int, budget: int):
        super().__init__(f"estimated cost {estimated} exceeds budget {budget}")
        self.estimated = estimated
        self.budget = budget


# AST ------------------------------------------------------------------------


@dataclass(frozen=True)
class Arc:
    x: str
    y: str


@dataclass(frozen=True)
class Eq:
    x: str
    y: str


@dataclass(frozen=True)
class Member:
    x: str
    xs: str


@dataclass(frozen=True)
class Not:
    body: "Node"


@dataclass(frozen=True)
class Or:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class And:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Quant:
    exists: bool
    var: str
    over_sets: bool
    body: "Node"


Node = Arc | Eq | Member | Not | Or | And | Quant

_TOKEN = re.compile(r"\s*(->|=>|[A-Za-z_][A-Za-z0-9_]*|[()!&|=])")
_KEYWORDS = {"exists", "forall", "in"}


def _is_set_var(name: str) -> bool:
    return name[0].isupper()


def parse_mso(text: str) -> Node:
    """exists x (...), forall X (...), x -> y, x = y, x in X, !, &, |, =>."""
    tokens: list[str] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise MsoSyntaxError(f"unexpected input at {text[pos:]!r}")
            break
        tokens.append(m.group(1))
        pos = m.end()
    if not tokens:
        raise MsoSyntaxError("empty formula")

    idx = 0

    def peek() -> Optional[str]:
        return tokens[idx] if idx < len(tokens) else None

    def take(expected: Optional[str] = None) -> str:
        nonlocal idx
        if idx >= len(tokens):
            raise MsoSyntaxError("unexpected end of formula")
        tok = tokens[idx]
        if expected is not None and tok != expected:
            raise MsoSyntaxError(f"expected {expected!r}, found {tok!r}")
        idx += 1
        return tok

    def parse_implies() -> Node:
        node = parse_or()
        if peek() == "=>":
            take()
            return Or(Not(node), parse_implies())
        return node

    def parse_or() -> Node:
        node = parse_and()
        while peek() == "|":
            take()
            node = Or(node, parse_and())
        return node

    def parse_and() -> Node:
        node = parse_unary()
        while peek() == "&":
            take()
            node = And(node, parse_unary())
        return node

    def parse_unary() -> Node:
        tok = peek()
        if tok == "!":
            take()
            return Not(parse_unary())
        if tok in ("exists", "forall"):
            take()
            var = take()
            if var in _KEYWORDS or not var[0].isalpha() and var[0] != "_":
                raise MsoSyntaxError(f"bad quantified variable {var!r}")
            body = parse_unary()
            return Quant(tok == "exists", var, _is_set_var(var), body)
        if tok == "(":
            take()
            node = parse_implies()
            take(")")
            return node
        if tok is not None and (tok[0].isalpha() or tok[0] == "_") and tok not in _KEYWORDS:
            left = take()
            rel = peek()
            if rel == "->":
                take()
                right = take()
                if _is_set_var(left) or _is_set_var(right):
                    raise MsoSyntaxError("arc atoms relate vertex variables")
                return Arc(left, right)
            if rel == "=":
                take()
                right = take()
                if _is_set_var(left) or _is_set_var(right):
                    raise MsoSyntaxError("equality atoms relate vertex variables")
                return Eq(left, right)
            if rel == "in":
                take()
                right = take()
                if _is_set_var(left) or not _is_set_var(right):
                    raise MsoSyntaxError("membership is vertex-in-set")
                return Member(left, right)
            raise MsoSyntaxError(f"dangling identifier {left!r}")
        raise MsoSyntaxError(f"unexpected token {tok!r}")

    node = parse_implies()
    if idx != len(tokens):
        raise MsoSyntaxError(f"trailing tokens starting at {tokens[idx]!r}")
    _check_closed(node, set(), set())
    return node


def _check_closed(node: Node, vertex_vars: set[str], set_vars: set[str]) -> None:
    if isinstance(node, Arc) or isinstance(node, Eq):
        for v in (node.x, node.y):
            if v not in vertex_vars:
                raise MsoSyntaxError(f"free vertex variable {v!r}")
    elif isinstance(node, Member):
        if node.x not in vertex_vars:
            raise MsoSyntaxError(f"free vertex variable {node.x!r}")
        if node.xs not in set_vars:
            raise MsoSyntaxError(f"free set variable {node.xs!r}")
    elif isinstance(node, Not):
        _check_closed(node.body, vertex_vars, set_vars)
    elif isinstance(node, (Or, And)):
        _check_closed(node.left, vertex_vars, set_vars)
        _check_closed(node.right, vertex_vars, set_vars)
    elif isinstance(node, Quant):
        if node.over_sets:
            _check_closed(node.body, vertex_vars, set_vars | {node.var})
        else:
            _check_closed(node.body, vertex_vars | {node.var}, set_vars)


def estimate_cost(node: Node, vertex_count: int) -> int:
    if isinstance(node, (Arc, Eq, Member)):
        return 1
    if isinstance(node, Not):
        return estimate_cost(node.body, vertex_count)
    if isinstance(node, (Or, And)):
        return estimate_cost(node.left, vertex_count) + estimate_cost(node.right, vertex_count)
    domain = (1 << vertex_count) if node.over_sets else max(vertex_count, 1)
    return domain * estimate_cost(node.body, vertex_count) + 1


def gray_subsets(n: int):
    """All subsets of range(n) as bitmasks, consecutive masks one flip apart."""
    for k in range(1 << n):
        yield k ^ (k >> 1)


DEFAULT_BUDGET = 50_000_000


class _Checker:
    def __init__(self, graph: SemanticGraph):
        self.graph = graph
        self.cost = 0

    def eval(self, node: Node, env: dict[str, int]) -> bool:
        self.cost += 1
        if isinstance(node, Arc):
            return self.graph.has_arc(env[node.x], env[node.y])
        if isinstance(node, Eq):
            return env[node.x] == env[node.y]
        if isinstance(node, Member):
            return bool((env[node.xs] >> env[node.x]) & 1)
        if isinstance(node, Not):
            return not self.eval(node.body, env)
        if isinstance(node, Or):
            return self.eval(node.left, env) or self.eval(node.right, env)
        if isinstance(node, And):
            return self.eval(node.left, env) and self.eval(node.right, env)
        assert isinstance(node, Quant)
        domain = (
            gray_subsets(self.graph.vertex_count)
            if node.over_sets
            else range(self.graph.vertex_count)
        )
        for value in domain:
            env[node.var] = value
            result = self.eval(node.body, env)
            if result == node.exists:
                del env[node.var]
                return node.exists
        env.pop(node.var, None)
        return not node.exists


def mso_check(
    graph: SemanticGraph, formula: Node | str, budget: int | None = DEFAULT_BUDGET
) -> bool:
    node = parse_mso(formula) if isinstance(formula, str) else formula
    if budget is not None:
        estimated = estimate_cost(node, graph.vertex_count)
        if estimated > budget:
            raise MsoBudgetError(estimated, budget)
    return _Checker(graph).eval(node, {})


@dataclass(frozen=True)
class MsoVerdict:
    result: bool
    witness: dict[str, int] | None
    cost: int


def mso_verdict(
    graph: SemanticGraph, formula: Node | str, budget: int | None = DEFAULT_BUDGET
) -> MsoVerdict:
    """Like `mso_check` but also reports a witness for an outermost
    existential vertex prefix and the actual work done."""
    node = parse_mso(formula) if isinstance(formula, str) else formula
    if budget is not None:
        estimated = estimate_cost(node, graph.vertex_count)
        if estimated > budget:
            raise MsoBudgetError(estimated, budget)
    prefix: list[str] = []
    core = node
    while isinstance(core, Quant) and core.exists and not core.over_sets:
        prefix.append(core.var)
        core = core.body
    checker = _Checker(graph)
    if not prefix:
        result = checker.eval(node, {})
        return MsoVerdict(result, None, checker.cost)

    env: dict[str, int] = {}

    def search(depth: int) -> bool:
        if depth == len(prefix):
            return checker.eval(core, env)
        for value in range(graph.vertex_count):
            env[prefix[depth]] = value
            if search(depth + 1):
                return True
        del env[prefix[depth]]
        return False

    if search(0):
        return MsoVerdict(True, {v: env[v] for v in prefix}, checker.cost)
    return MsoVerdict(False, None, checker.cost)


def fo_check(graph: SemanticGraph, formula: Node | str) -> bool:
    """Independent first-order-only evaluator used as a differential oracle.

    Rejects set quantifiers and membership; evaluates by materializing the
    quantifier tree over explicit assignment dictionaries, with no early-exit
    bookkeeping shared with the main checker.
    """
    node = parse_mso(formula) if isinstance(formula, str) else formula

    def walk(n: Node, env: dict[str, int]) -> bool:
        if isinstance(n, Arc):
            return env[n.y] in graph.successors[env[n.x]]
        if isinstance(n, Eq):
            return env[n.x] == env[n.y]
        if isinstance(n, Member):
            raise MsoSyntaxError("set membership is not first-order")
        if isinstance(n, Not):
            return not walk(n.body, env)
        if isinstance(n, Or):
            return walk(n.left, env) or walk(n.right, env)
        if isinstance(n, And):
            return walk(n.left, env) and walk(n.right, env)
        assert isinstance(n, Quant)
        if n.over_sets:
            raise MsoSyntaxError("set quantifier is not first-order")
        outcomes = [walk(n.body, {**env, n.var: v}) for v in range(graph.vertex_count)]
        return any(outcomes) if n.exists else all(outcomes)

    return walk(node, {})
