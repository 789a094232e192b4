"""Exists-forall solving by counterexample-guided candidate refinement.

Supported fragment: a conjunction of quantifier-free assertions plus
top-level universally quantified assertions (the shape every query in
this package emits).  Candidates come from the ground part plus learned
lemmas; each counterexample is generalized to an exact excluded region,
which guarantees termination over a fixed atom vocabulary.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable

from ..terms import (
    BOOL,
    Conn,
    Forall,
    Not,
    Term,
    free_vars,
    mk_not,
    subst_term,
)
from .cnf import solve_ground
from .generalize import generalize_bad_candidate

SAT = "sat"
UNSAT = "unsat"
UNKNOWN = "unknown"


class UnsupportedQuantifier(ValueError):
    pass


def _contains_forall(t: Term, cache: dict[int, bool]) -> bool:
    key = id(t)
    hit = cache.get(key)
    if hit is not None:
        return hit
    if isinstance(t, Forall):
        out = True
    elif isinstance(t, Not):
        out = _contains_forall(t.arg, cache)
    elif isinstance(t, Conn):
        out = any(_contains_forall(a, cache) for a in t.args)
    else:
        out = False
    cache[key] = out
    return out


def _flatten_forall(t: Forall) -> tuple[tuple[tuple[str, str], ...], Term]:
    bound = list(t.bound)
    body = t.body
    while isinstance(body, Forall):
        bound.extend(body.bound)
        body = body.body
    return tuple(bound), body


def solve(
    asserts: list[Term],
    bool_names: Iterable[str] = (),
    real_names: Iterable[str] = (),
    deadline: float | None = None,
) -> tuple[str, dict[str, bool] | None, dict[str, Fraction] | None]:
    ground: list[Term] = []
    quants: list[tuple[tuple[tuple[str, str], ...], Term]] = []
    cache: dict[int, bool] = {}
    for t in asserts:
        if isinstance(t, Forall):
            bound, body = _flatten_forall(t)
            if _contains_forall(body, cache):
                raise UnsupportedQuantifier("nested quantifier blocks are not supported")
            quants.append((bound, body))
        elif _contains_forall(t, cache):
            raise UnsupportedQuantifier(
                "universal quantifiers must occur as whole assertions"
            )
        else:
            ground.append(t)

    all_bools = set(bool_names)
    all_reals = set(real_names)
    for t in ground:
        fb, fr = free_vars(t)
        all_bools |= fb
        all_reals |= fr
    for bound, body in quants:
        names = {n for n, _ in bound}
        fb, fr = free_vars(body)
        all_bools |= fb - names
        all_reals |= fr - names
    for bound, _ in quants:
        for n, _ in bound:
            if n in all_bools or n in all_reals:
                raise UnsupportedQuantifier(f"bound name {n!r} shadows a free variable")

    if not quants:
        status, bools, rats = solve_ground(ground, deadline)
        if status != SAT:
            return status, None, None
        return SAT, _complete_bools(bools, all_bools), _complete_rats(rats, all_reals)

    lemmas: list[Term] = []
    while True:
        status, bools, rats = solve_ground(ground + lemmas, deadline)
        if status != SAT:
            return status, None, None
        cand_b = _complete_bools(bools, all_bools)
        cand_r = _complete_rats(rats, all_reals)
        failed = None
        for bound, body in quants:
            sub = subst_term(body, cand_b, cand_r)
            v_status, v_bools, v_rats = solve_ground([mk_not(sub)], deadline)
            if v_status == UNKNOWN:
                return UNKNOWN, None, None
            if v_status == SAT:
                y_bools = {n for n, s in bound if s == BOOL}
                y_reals = {n for n, s in bound if s != BOOL}
                full_b = dict(cand_b)
                full_r = dict(cand_r)
                full_b.update(_complete_bools(v_bools or {}, y_bools))
                full_r.update(_complete_rats(v_rats or {}, y_reals))
                failed = generalize_bad_candidate(
                    body, full_b, full_r, y_bools, y_reals
                )
                break
        if failed is None:
            return SAT, cand_b, cand_r
        lemmas.append(failed)


def _complete_bools(model: dict[str, bool], names: set[str]) -> dict[str, bool]:
    out = {n: False for n in names}
    out.update({k: v for k, v in model.items() if k in names or k in out})
    return out


def _complete_rats(model: dict[str, Fraction], names: set[str]) -> dict[str, Fraction]:
    out = {n: Fraction(0) for n in names}
    out.update({k: v for k, v in model.items() if k in names or k in out})
    return out
