"""Acceptance suite for the solver stack.

Each test pins one external obligation of the package: the running
factory example end to end in both modes, the two canonical failing
schedules with replayable witnesses, large randomized agreement checks
between the symbolic encodings and the zone-graph oracle and between the
two solver modes, refinement-loop behavior, and the qualitative
comparison on the desk-scale benchmark grid.  Several tests run full
solves; the module takes tens of minutes, dominated by the one-shot
mode and the benchmark grid.
"""

import random
import statistics
import time
from fractions import Fraction as F

import pytest

from pamp import texec
from pamp.backend import SAT, UNSAT, SolverConfig, solve_terms
from pamp.bench import desk_suite, run_suite, solved
from pamp.encoding import build_plan_check
from pamp.engine import EngineConfig, solve_enc, solve_ref
from pamp.generators import (
    factory_plan_late,
    factory_plan_rushed,
    gen_factory,
    gen_rover,
    random_check_triple,
    random_pamp_instance,
)
from pamp.model import plan_to_snap_sequence
from pamp.texec import replay_run, validate_plan

# every Solution any test produces lands here and is revalidated at the end
_SOLUTIONS: list[tuple[str, object, object]] = []


def _note_solution(tag, pamp, plan):
    _SOLUTIONS.append((tag, pamp, plan))


def _makespan(plan):
    return max(e.start + e.duration for e in plan.entries)


def _work_separation_ok(plan):
    """Consecutive work stages either sit 10 apart or have a cooldown
    between them."""
    works = sorted(
        (e for e in plan.entries if e.action.startswith("Work_")),
        key=lambda e: e.start,
    )
    for w1, w2 in zip(works, works[1:]):
        w1_end = w1.start + w1.duration
        if w2.start - w1_end >= 10:
            continue
        if any(
            e.action == "Cool" and w1_end <= e.start and e.start + e.duration <= w2.start
            for e in plan.entries
        ):
            continue
        return False
    return True


@pytest.fixture(scope="module")
def running_example():
    return gen_factory(2, 50, 2, variant=1)


@pytest.fixture(scope="module")
def ref_solved(running_example):
    t0 = time.monotonic()
    result = solve_ref(
        running_example, EngineConfig(mode="ref", max_horizon=4, timeout=30.0)
    )
    return result, time.monotonic() - t0


@pytest.fixture(scope="module")
def enc_solved(running_example):
    t0 = time.monotonic()
    result = solve_enc(
        running_example, EngineConfig(mode="enc", max_horizon=4, timeout=1200.0)
    )
    return result, time.monotonic() - t0


def _check_running_example(pamp, result, wall, limit, tag):
    assert result.verdict == "SOLUTION", result.detail
    assert wall < limit
    plan = result.plan
    assert _makespan(plan) <= 50
    assert _work_separation_ok(plan)
    outcome = validate_plan(pamp, plan)
    assert outcome.verdict == "SOLUTION"
    _note_solution(tag, pamp, plan)


def test_running_example_ref(running_example, ref_solved):
    result, wall = ref_solved
    _check_running_example(running_example, result, wall, 30.0, "example-ref")


def test_running_example_enc(running_example, enc_solved):
    result, wall = enc_solved
    _check_running_example(running_example, result, wall, 1200.0, "example-enc")


def test_late_schedule_is_unsafe(running_example):
    outcome = validate_plan(running_example, factory_plan_late(2))
    assert outcome.verdict == "UNSAFE"
    w = outcome.witness
    assert w is not None and w.kind == "unsafe"
    assert w.state.location == "BAD"
    assert w.time <= 55
    assert w.time == F(107, 2)
    seq = plan_to_snap_sequence(factory_plan_late(2))
    assert replay_run(running_example.automaton, w.run, seq)


def test_rushed_schedule_is_non_executable(running_example):
    outcome = validate_plan(running_example, factory_plan_rushed(2))
    assert outcome.verdict == "NON-EXECUTABLE"
    w = outcome.witness
    assert w is not None and w.kind == "non-executable"
    assert w.event == "start:Work_2"
    assert w.time == 22
    clocks = dict(w.state.valuation)
    assert clocks["c"] == 1
    assert clocks["g"] == 22
    seq = plan_to_snap_sequence(factory_plan_rushed(2))
    assert replay_run(running_example.automaton, w.run, seq)


def test_check_queries_match_zone_oracle():
    cfg = SolverConfig(timeout=60.0)
    t0 = time.monotonic()
    mismatches = []
    for seed in range(1000, 1200):
        rng = random.Random(seed)
        plan, automaton, bad, kappa = random_check_triple(rng)
        seq = plan_to_snap_sequence(plan)
        q = build_plan_check(automaton, bad, kappa, seq)
        w_exec = texec.check_executability(automaton, seq, kappa)
        w_safe = texec.check_safety(automaton, seq, bad, kappa)
        for asserts, witness in (
            ([q.trace_ok, q.exec_violation], w_exec),
            ([q.trace_ok, q.safety_violation], w_safe),
        ):
            res = solve_terms(asserts, list(q.bool_names), list(q.real_names), cfg)
            expected = SAT if witness is not None else UNSAT
            if res.status != expected:
                mismatches.append((seed, res.status, expected))
    elapsed = time.monotonic() - t0
    assert not mismatches, mismatches[:5]
    assert elapsed < 600.0


def test_modes_agree_on_random_instances():
    disagreements = []
    for seed in range(200, 250):
        rng = random.Random(seed)
        pamp = random_pamp_instance(rng)
        config = dict(max_horizon=3, timeout=60.0)
        r_enc = solve_enc(pamp, EngineConfig(mode="enc", **config))
        r_ref = solve_ref(pamp, EngineConfig(mode="ref", **config))
        if r_enc.verdict != r_ref.verdict:
            disagreements.append((seed, r_enc.verdict, r_ref.verdict))
            continue
        for tag, res in (("agree-enc", r_enc), ("agree-ref", r_ref)):
            if res.verdict == "SOLUTION":
                assert validate_plan(pamp, res.plan).verdict == "SOLUTION"
                _note_solution(f"{tag}-{seed}", pamp, res.plan)
    assert not disagreements, disagreements


@pytest.mark.parametrize(
    "tag,pamp,max_h",
    [
        ("factory-tight", gen_factory(2, 45, 2, variant=1), 4),
        ("rover-3", gen_rover(3, (1,), 2), 4),
    ],
)
def test_refinement_terminates_quickly(tag, pamp, max_h):
    result = solve_ref(pamp, EngineConfig(mode="ref", max_horizon=max_h, timeout=60.0))
    assert result.verdict == "SOLUTION", result.detail
    assert 1 <= result.stats["iterations"] <= 10
    assert validate_plan(pamp, result.plan).verdict == "SOLUTION"
    # candidate skeletons are tried at most once
    seqs = [tokens for tokens, _ in result.stats["prefix_queries"]]
    assert len(seqs) == len(set(seqs))
    _note_solution(tag, pamp, result.plan)


@pytest.fixture(scope="module")
def desk_records():
    return run_suite(desk_suite(), modes=("enc", "ref"), timeout=120.0)


def test_desk_suite_counterexample_mode_solves_more(desk_records):
    assert len(desk_records) == 36
    enc_solved_count = sum(1 for r in desk_records if r.mode == "enc" and solved(r))
    ref_solved_count = sum(1 for r in desk_records if r.mode == "ref" and solved(r))
    assert ref_solved_count >= enc_solved_count
    assert ref_solved_count >= 1


def test_desk_suite_counterexample_mode_is_faster(desk_records):
    by_instance = {}
    for r in desk_records:
        by_instance.setdefault(r.instance, {})[r.mode] = r
    common = [
        pair
        for pair in by_instance.values()
        if len(pair) == 2 and solved(pair["enc"]) and solved(pair["ref"])
    ]
    assert common, "no commonly solved instances"
    enc_median = statistics.median(pair["enc"].wall for pair in common)
    ref_median = statistics.median(pair["ref"].wall for pair in common)
    assert ref_median <= enc_median


def test_every_solution_survives_revalidation():
    assert _SOLUTIONS, "earlier tests produced no plans"
    failures = [
        tag
        for tag, pamp, plan in _SOLUTIONS
        if validate_plan(pamp, plan).verdict != "SOLUTION"
    ]
    assert failures == []
