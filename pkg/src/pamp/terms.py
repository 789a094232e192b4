"""Formula terms over booleans and linear rational arithmetic.

Terms are immutable DAG nodes compared by identity; builders fold constants
and flatten nested connectives.  Arithmetic lives in LinExpr (sum of
rational-coefficient variables plus a constant), and every atom is kept in
the normal form  expr <= 0,  expr < 0,  or  expr = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

LE = "<="
LT = "<"
EQ = "="

BOOL = "Bool"
REAL = "Real"


@dataclass(frozen=True)
class LinExpr:
    coeffs: tuple[tuple[str, Fraction], ...]  # sorted by name, coefficients nonzero
    const: Fraction = Fraction(0)

    @staticmethod
    def build(coeffs: Mapping[str, Fraction], const=Fraction(0)) -> "LinExpr":
        items = tuple(
            sorted((v, Fraction(c)) for v, c in coeffs.items() if c != 0)
        )
        return LinExpr(coeffs=items, const=Fraction(const))

    @staticmethod
    def var(name: str) -> "LinExpr":
        return LinExpr(coeffs=((name, Fraction(1)),))

    @staticmethod
    def const_of(value) -> "LinExpr":
        return LinExpr(coeffs=(), const=Fraction(value))

    def as_dict(self) -> dict[str, Fraction]:
        return dict(self.coeffs)

    def __add__(self, other: "LinExpr") -> "LinExpr":
        acc = self.as_dict()
        for v, c in other.coeffs:
            acc[v] = acc.get(v, Fraction(0)) + c
        return LinExpr.build(acc, self.const + other.const)

    def __sub__(self, other: "LinExpr") -> "LinExpr":
        return self + other.scale(Fraction(-1))

    def scale(self, k) -> "LinExpr":
        k = Fraction(k)
        if k == 0:
            return LinExpr.const_of(0)
        return LinExpr(
            coeffs=tuple((v, c * k) for v, c in self.coeffs), const=self.const * k
        )

    def shift(self, value) -> "LinExpr":
        return LinExpr(coeffs=self.coeffs, const=self.const + Fraction(value))

    def coeff(self, name: str) -> Fraction:
        for v, c in self.coeffs:
            if v == name:
                return c
        return Fraction(0)

    def drop(self, name: str) -> "LinExpr":
        return LinExpr(
            coeffs=tuple((v, c) for v, c in self.coeffs if v != name), const=self.const
        )

    def vars(self) -> frozenset[str]:
        return frozenset(v for v, _ in self.coeffs)

    @property
    def is_const(self) -> bool:
        return not self.coeffs

    def evaluate(self, env: Mapping[str, Fraction]) -> Fraction:
        total = self.const
        for v, c in self.coeffs:
            total += c * env[v]
        return total

    def subst(self, mapping: Mapping[str, "LinExpr | Fraction"]) -> "LinExpr":
        out = LinExpr.const_of(self.const)
        for v, c in self.coeffs:
            repl = mapping.get(v)
            if repl is None:
                out = out + LinExpr(coeffs=((v, c),))
            elif isinstance(repl, LinExpr):
                out = out + repl.scale(c)
            else:
                out = out + LinExpr.const_of(Fraction(repl) * c)
        return out


class Term:
    __slots__ = ()


@dataclass(frozen=True, eq=False)
class BoolLit(Term):
    value: bool


@dataclass(frozen=True, eq=False)
class BoolVar(Term):
    name: str


@dataclass(frozen=True, eq=False)
class Not(Term):
    arg: Term


@dataclass(frozen=True, eq=False)
class Conn(Term):
    op: str  # "and" | "or"
    args: tuple[Term, ...]


@dataclass(frozen=True, eq=False)
class Atom(Term):
    op: str  # LE | LT | EQ, read as  expr op 0
    expr: LinExpr


@dataclass(frozen=True, eq=False)
class Forall(Term):
    bound: tuple[tuple[str, str], ...]  # (name, sort)
    body: Term


TRUE = BoolLit(True)
FALSE = BoolLit(False)


def mk_bool(value: bool) -> Term:
    return TRUE if value else FALSE


def mk_not(t: Term) -> Term:
    if isinstance(t, BoolLit):
        return mk_bool(not t.value)
    if isinstance(t, Not):
        return t.arg
    return Not(t)


def _flatten(op: str, args: Iterable[Term]) -> list[Term] | None:
    """None means the connective short-circuits to its absorbing literal."""
    absorb = op == "or"
    out: list[Term] = []
    for a in args:
        if isinstance(a, BoolLit):
            if a.value == absorb:
                return None
            continue
        if isinstance(a, Conn) and a.op == op:
            out.extend(a.args)
        else:
            out.append(a)
    return out


def mk_and(*args: Term) -> Term:
    flat = _flatten("and", args)
    if flat is None:
        return FALSE
    if not flat:
        return TRUE
    if len(flat) == 1:
        return flat[0]
    return Conn("and", tuple(flat))


def mk_or(*args: Term) -> Term:
    flat = _flatten("or", args)
    if flat is None:
        return TRUE
    if not flat:
        return FALSE
    if len(flat) == 1:
        return flat[0]
    return Conn("or", tuple(flat))


def mk_implies(a: Term, b: Term) -> Term:
    return mk_or(mk_not(a), b)


def mk_iff(a: Term, b: Term) -> Term:
    if isinstance(a, BoolLit):
        return b if a.value else mk_not(b)
    if isinstance(b, BoolLit):
        return a if b.value else mk_not(a)
    return mk_and(mk_or(mk_not(a), b), mk_or(a, mk_not(b)))


def _atom(op: str, expr: LinExpr) -> Term:
    if expr.is_const:
        if op == LE:
            return mk_bool(expr.const <= 0)
        if op == LT:
            return mk_bool(expr.const < 0)
        return mk_bool(expr.const == 0)
    return Atom(op, expr)


def mk_le(lhs: LinExpr, rhs: LinExpr) -> Term:
    return _atom(LE, lhs - rhs)


def mk_lt(lhs: LinExpr, rhs: LinExpr) -> Term:
    return _atom(LT, lhs - rhs)


def mk_ge(lhs: LinExpr, rhs: LinExpr) -> Term:
    return _atom(LE, rhs - lhs)


def mk_gt(lhs: LinExpr, rhs: LinExpr) -> Term:
    return _atom(LT, rhs - lhs)


def mk_eq(lhs: LinExpr, rhs: LinExpr) -> Term:
    return _atom(EQ, lhs - rhs)


def mk_forall(bound: Iterable[tuple[str, str]], body: Term) -> Term:
    bound = tuple(bound)
    if not bound or isinstance(body, BoolLit):
        return body
    return Forall(bound, body)


def exactly_one(terms: list[Term]) -> Term:
    at_least = mk_or(*terms)
    pairs = [
        mk_or(mk_not(terms[i]), mk_not(terms[j]))
        for i in range(len(terms))
        for j in range(i + 1, len(terms))
    ]
    return mk_and(at_least, *pairs)


def at_most_one(terms: list[Term]) -> Term:
    pairs = [
        mk_or(mk_not(terms[i]), mk_not(terms[j]))
        for i in range(len(terms))
        for j in range(i + 1, len(terms))
    ]
    return mk_and(*pairs)


# ---------------------------------------------------------------------------
# Evaluation, substitution, variable collection


def eval_term(
    t: Term, bools: Mapping[str, bool], rats: Mapping[str, Fraction]
) -> bool:
    if isinstance(t, BoolLit):
        return t.value
    if isinstance(t, BoolVar):
        return bools[t.name]
    if isinstance(t, Not):
        return not eval_term(t.arg, bools, rats)
    if isinstance(t, Conn):
        if t.op == "and":
            return all(eval_term(a, bools, rats) for a in t.args)
        return any(eval_term(a, bools, rats) for a in t.args)
    if isinstance(t, Atom):
        value = t.expr.evaluate(rats)
        if t.op == LE:
            return value <= 0
        if t.op == LT:
            return value < 0
        return value == 0
    if isinstance(t, Forall):
        raise ValueError("cannot evaluate a quantified term directly")
    raise TypeError(f"unknown term {t!r}")


def subst_term(
    t: Term,
    bools: Mapping[str, bool] | None = None,
    rats: Mapping[str, LinExpr | Fraction] | None = None,
    _cache: dict | None = None,
) -> Term:
    bools = bools or {}
    rats = rats or {}
    cache: dict[int, Term] = {} if _cache is None else _cache

    def go(node: Term) -> Term:
        key = id(node)
        hit = cache.get(key)
        if hit is not None:
            return hit
        if isinstance(node, BoolLit):
            out: Term = node
        elif isinstance(node, BoolVar):
            out = mk_bool(bools[node.name]) if node.name in bools else node
        elif isinstance(node, Not):
            out = mk_not(go(node.arg))
        elif isinstance(node, Conn):
            args = [go(a) for a in node.args]
            out = mk_and(*args) if node.op == "and" else mk_or(*args)
        elif isinstance(node, Atom):
            out = _atom(node.op, node.expr.subst(rats))
        elif isinstance(node, Forall):
            shadowed = {name for name, _ in node.bound}
            inner_b = {k: v for k, v in bools.items() if k not in shadowed}
            inner_r = {k: v for k, v in rats.items() if k not in shadowed}
            out = mk_forall(node.bound, subst_term(node.body, inner_b, inner_r))
        else:
            raise TypeError(f"unknown term {node!r}")
        cache[key] = out
        return out

    return go(t)


def free_vars(t: Term) -> tuple[frozenset[str], frozenset[str]]:
    """(bool names, real names), ignoring quantified binders."""
    bools: set[str] = set()
    rats: set[str] = set()
    seen: set[int] = set()

    def go(node: Term, bound: frozenset[str]) -> None:
        if not bound and id(node) in seen:
            return
        if not bound:
            seen.add(id(node))
        if isinstance(node, BoolVar):
            if node.name not in bound:
                bools.add(node.name)
        elif isinstance(node, Not):
            go(node.arg, bound)
        elif isinstance(node, Conn):
            for a in node.args:
                go(a, bound)
        elif isinstance(node, Atom):
            rats.update(v for v in node.expr.vars() if v not in bound)
        elif isinstance(node, Forall):
            inner = bound | {name for name, _ in node.bound}
            go(node.body, inner)

    go(t, frozenset())
    return frozenset(bools), frozenset(rats)


def term_size(t: Term) -> int:
    """Distinct DAG nodes, a rough complexity measure for stats."""
    seen: set[int] = set()

    def go(node: Term) -> None:
        if id(node) in seen:
            return
        seen.add(id(node))
        if isinstance(node, Not):
            go(node.arg)
        elif isinstance(node, Conn):
            for a in node.args:
                go(a)
        elif isinstance(node, Forall):
            go(node.body)

    go(t)
    return len(seen)
