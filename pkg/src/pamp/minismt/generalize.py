"""Counterexample generalization for exists-forall solving.

Given a quantifier-free formula that is false at a model, extract a prime
implicant of its negation (justification walk with sign-strengthened
disequalities), then project away a designated set of variables: bound
booleans drop outright, bound reals go through Gaussian substitution on
equalities followed by Fourier-Motzkin on the inequalities.  The result
is an exact certificate region in the remaining variables.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from ..terms import (
    EQ,
    LE,
    LT,
    Atom,
    BoolLit,
    BoolVar,
    Conn,
    LinExpr,
    Not,
    Term,
    mk_and,
    mk_bool,
    mk_not,
)

# literal forms: ("bool", name, polarity) or ("lin", op, LinExpr) read expr op 0
Lit = tuple


def _strengthen_diseq(expr: LinExpr, rats: Mapping[str, Fraction]) -> Lit:
    # expr != 0 at the model; pick the side the model is on
    value = expr.evaluate(rats)
    if value < 0:
        return ("lin", LT, expr)
    return ("lin", LT, expr.scale(Fraction(-1)))


def implicant(
    t: Term,
    want: bool,
    bools: Mapping[str, bool],
    rats: Mapping[str, Fraction],
) -> list[Lit]:
    """Literals true at the model whose conjunction forces t == want."""
    ev_cache: dict[int, bool] = {}

    def ev(node: Term) -> bool:
        key = id(node)
        hit = ev_cache.get(key)
        if hit is None:
            hit = _eval(node)
            ev_cache[key] = hit
        return hit

    def _eval(node: Term) -> bool:
        if isinstance(node, BoolLit):
            return node.value
        if isinstance(node, BoolVar):
            return bools[node.name]
        if isinstance(node, Not):
            return not ev(node.arg)
        if isinstance(node, Conn):
            if node.op == "and":
                return all(ev(a) for a in node.args)
            return any(ev(a) for a in node.args)
        if isinstance(node, Atom):
            value = node.expr.evaluate(rats)
            if node.op == LE:
                return value <= 0
            if node.op == LT:
                return value < 0
            return value == 0
        raise TypeError(f"cannot take implicant of {type(node).__name__}")

    out: list[Lit] = []
    seen: set[tuple[int, bool]] = set()

    def walk(node: Term, goal: bool) -> None:
        key = (id(node), goal)
        if key in seen:
            return
        seen.add(key)
        if ev(node) != goal:
            raise ValueError("model does not give the term the expected value")
        if isinstance(node, BoolLit):
            return
        if isinstance(node, BoolVar):
            out.append(("bool", node.name, goal))
            return
        if isinstance(node, Not):
            walk(node.arg, not goal)
            return
        if isinstance(node, Conn):
            forced = goal if node.op == "and" else not goal
            if forced:
                for a in node.args:
                    walk(a, goal)
            else:
                for a in node.args:
                    if ev(a) == goal:
                        walk(a, goal)
                        return
                raise AssertionError("no witnessing disjunct")
            return
        if isinstance(node, Atom):
            if node.op == LE:
                lit = ("lin", LE, node.expr) if goal else ("lin", LT, node.expr.scale(Fraction(-1)))
            elif node.op == LT:
                lit = ("lin", LT, node.expr) if goal else ("lin", LE, node.expr.scale(Fraction(-1)))
            elif goal:
                lit = ("lin", EQ, node.expr)
            else:
                lit = _strengthen_diseq(node.expr, rats)
            out.append(lit)
            return
        raise TypeError(f"cannot take implicant of {type(node).__name__}")

    walk(t, want)
    return out


def _gauss(lits: list[Lit], drop: set[str]) -> list[Lit]:
    """Substitute out droppable variables using the equality literals."""
    work = list(lits)
    changed = True
    while changed:
        changed = False
        for i, lit in enumerate(work):
            if lit[0] != "lin" or lit[1] != EQ:
                continue
            expr: LinExpr = lit[2]
            target = next((v for v in expr.vars() if v in drop), None)
            if target is None:
                continue
            c = expr.coeff(target)
            # target = -(rest)/c
            rest = expr.drop(target).scale(Fraction(-1) / c)
            mapping = {target: rest}
            out: list[Lit] = []
            for j, other in enumerate(work):
                if j == i:
                    continue
                if other[0] == "lin":
                    out.append((other[0], other[1], other[2].subst(mapping)))
                else:
                    out.append(other)
            work = out
            changed = True
            break
    return work


def _fourier_motzkin(lits: list[Lit], drop: set[str]) -> list[Lit]:
    work = list(lits)
    for name in sorted(drop):
        lower: list[tuple[str, LinExpr]] = []
        upper: list[tuple[str, LinExpr]] = []
        rest: list[Lit] = []
        for lit in work:
            if lit[0] != "lin" or name not in lit[2].vars():
                rest.append(lit)
                continue
            op, expr = lit[1], lit[2]
            sides = [(op, expr)]
            if op == EQ:
                sides = [(LE, expr), (LE, expr.scale(Fraction(-1)))]
            for op_s, es in sides:
                if es.coeff(name) > 0:
                    upper.append((op_s, es))
                else:
                    lower.append((op_s, es))
        for op_u, eu in upper:
            cu = eu.coeff(name)
            for op_l, el in lower:
                cl = el.coeff(name)
                combined = eu.scale(-cl) + el.scale(cu)
                op = LT if LT in (op_u, op_l) else LE
                rest.append(("lin", op, combined.drop(name)))
        work = rest
    return work


def project(lits: list[Lit], drop_bools: set[str], drop_reals: set[str]) -> list[Lit]:
    kept = [l for l in lits if not (l[0] == "bool" and l[1] in drop_bools)]
    kept = _gauss(kept, drop_reals)
    kept = _fourier_motzkin(kept, drop_reals)
    out: list[Lit] = []
    for lit in kept:
        if lit[0] == "lin" and lit[2].is_const:
            k = lit[2].const
            ok = k <= 0 if lit[1] == LE else (k < 0 if lit[1] == LT else k == 0)
            if not ok:
                raise AssertionError("projection produced a false constant")
            continue
        out.append(lit)
    return out


def lits_to_term(lits: list[Lit]) -> Term:
    parts: list[Term] = []
    for lit in lits:
        if lit[0] == "bool":
            var = BoolVar(lit[1])
            parts.append(var if lit[2] else mk_not(var))
        else:
            parts.append(Atom(lit[1], lit[2]))
    return mk_and(*parts)


def generalize_bad_candidate(
    body: Term,
    bools: Mapping[str, bool],
    rats: Mapping[str, Fraction],
    bound_bools: set[str],
    bound_reals: set[str],
) -> Term:
    """A constraint over the free variables excluding this counterexample.

    body is the universally quantified matrix; the model makes it false.
    The returned term is the negation of an exact projected implicant, so
    adding it never excludes a genuinely good candidate, and the same
    counterexample region cannot be produced twice.
    """
    lits = implicant(body, False, bools, rats)
    lits = project(lits, bound_bools, bound_reals)
    if not lits:
        return mk_bool(False)
    return mk_not(lits_to_term(lits))
