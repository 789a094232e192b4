"""Constraint encodings checked against the reference executor.

The ground check query (fixed plan, symbolic trace) must agree with the
explicit zone-graph search verdict for verdict: a violation formula is
satisfiable exactly when the search finds a violating run.
"""

import random
from fractions import Fraction as F

import pytest

from pamp import texec
from pamp.backend import SAT, UNSAT, SolverConfig, solve_terms
from pamp.encoding import build_plan_check, cc_term, fixed_events, sequence_events
from pamp.generators import random_check_triple
from pamp.minismt.generalize import implicant
from pamp.model import ClockAtom, ClockConstraint, plan_to_snap_sequence
from pamp.terms import LinExpr


CFG = SolverConfig(timeout=60.0)


def _sat(asserts, query):
    res = solve_terms(list(asserts), list(query.bool_names), list(query.real_names), CFG)
    assert res.status in (SAT, UNSAT)
    return res.status == SAT


@pytest.mark.parametrize("seed", range(1000, 1010))
def test_check_query_matches_zone_search(seed):
    rng = random.Random(seed)
    plan, automaton, bad, kappa = random_check_triple(rng)
    seq = plan_to_snap_sequence(plan)
    q = build_plan_check(automaton, bad, kappa, seq)

    w_exec = texec.check_executability(automaton, seq, kappa)
    assert _sat([q.trace_ok, q.exec_violation], q) == (w_exec is not None)

    w_safe = texec.check_safety(automaton, seq, bad, kappa)
    assert _sat([q.trace_ok, q.safety_violation], q) == (w_safe is not None)


def test_slot_budget():
    # instant moves are free, so a length-n sequence gets kappa*n slots,
    # and the empty sequence still needs its initial slot
    rng = random.Random(7)
    for _ in range(10):
        plan, automaton, bad, kappa = random_check_triple(rng)
        seq = plan_to_snap_sequence(plan)
        q = build_plan_check(automaton, bad, kappa, seq)
        assert q.shape.slots == max(kappa * len(seq.events), 1)


def test_cc_term_difference_atom():
    cc = ClockConstraint(
        atoms=(
            ClockAtom("x", "<=", 3, other="y"),
            ClockAtom("x", ">=", 2),
        )
    )
    env = {"x": LinExpr.var("x"), "y": LinExpr.var("y")}
    term = cc_term(cc, env)

    def holds(x, y):
        try:
            implicant(term, True, {}, {"x": F(x), "y": F(y)})
            return True
        except ValueError:
            return False

    assert holds(5, 3)  # x-y = 2 <= 3, x >= 2
    assert not holds(7, 3)  # difference too large
    assert not holds(1, 0)  # lower bound broken


def test_sequence_events_match_fixed_form():
    rng = random.Random(3)
    plan, *_ = random_check_triple(rng)
    seq = plan_to_snap_sequence(plan)
    ev = sequence_events(seq)
    labels = [ref.label for _, ref in seq.events]
    times = [t for t, _ in seq.events]
    direct = fixed_events(labels, times)
    assert ev.n == direct.n == len(labels)
    for j in range(1, ev.n + 1):
        assert ev.time(j) == direct.time(j) == LinExpr.const_of(times[j - 1])
        assert ev.label(labels[j - 1], j) == direct.label(labels[j - 1], j)
    assert ev.window_end() == LinExpr.const_of(times[-1])


def test_empty_sequence_window_end_is_zero():
    ev = fixed_events([], [])
    assert ev.window_end() == LinExpr.const_of(0)
