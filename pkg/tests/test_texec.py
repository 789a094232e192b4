"""Execution-check oracle: paper-and-pencil cases on the factory family,
hand-built automata probing the step budget, and witness replay."""

from fractions import Fraction

import pytest

from pamp.generators import (
    factory_plan_cooled,
    factory_plan_late,
    factory_plan_rushed,
    gen_factory,
    random_check_triple,
)
from pamp.model import (
    BadStateSpec,
    ClockAtom,
    ClockConstraint,
    PlanEntry,
    TRUE_CONSTRAINT,
    TimeTriggeredPlan,
    TimedAutomaton,
    Transition,
    plan_to_snap_sequence,
)
from pamp.texec import (
    VERDICT_INVALID_PLAN,
    VERDICT_NON_EXECUTABLE,
    VERDICT_SOLUTION,
    VERDICT_UNSAFE,
    check_executability,
    check_plan_validity,
    check_safety,
    final_locations,
    replay_run,
    slot_budget,
    validate_plan,
)


@pytest.fixture(scope="module")
def factory():
    return gen_factory(2, 50, 2)


def _cc(clock, op, bound):
    return ClockConstraint(atoms=(ClockAtom(clock=clock, op=op, bound=bound),))


def test_final_locations_include_fault_branch(factory):
    seq = plan_to_snap_sequence(factory_plan_rushed()).prefix(3)
    locs = final_locations(
        factory.automaton,
        seq,
        max_discrete=slot_budget(factory.kappa, len(seq)),
        snap_labels=factory.problem.snap_labels(),
    )
    assert locs == frozenset({"W_ENDED", "BAD"})


def test_late_plan_is_unsafe(factory):
    seq = plan_to_snap_sequence(factory_plan_late())
    snaps = factory.problem.snap_labels()
    assert check_executability(factory.automaton, seq, factory.kappa, snap_labels=snaps) is None
    w = check_safety(factory.automaton, seq, factory.bad, factory.kappa, snap_labels=snaps)
    assert w is not None
    assert w.kind == "unsafe"
    assert w.state.location == "BAD"
    assert Fraction(50) < w.time <= Fraction(55)
    assert replay_run(factory.automaton, w.run, seq, snap_labels=snaps)
    # the violating run still finishes the whole plan
    assert sum(1 for s in w.run if s.matched is not None) == len(seq)


def test_rushed_plan_is_non_executable(factory):
    seq = plan_to_snap_sequence(factory_plan_rushed())
    snaps = factory.problem.snap_labels()
    w = check_executability(factory.automaton, seq, factory.kappa, snap_labels=snaps)
    assert w is not None
    assert w.kind == "non-executable"
    assert w.prefix == 3
    assert w.event == "start:Work_2"
    assert w.time == Fraction(22)
    assert w.state.location == "W_ENDED"
    assert w.state.clocks()["c"] == Fraction(1)
    assert replay_run(factory.automaton, w.run, seq, snap_labels=snaps)
    # no completing run exists, so the safety check is vacuously clean
    assert check_safety(factory.automaton, seq, factory.bad, factory.kappa, snap_labels=snaps) is None


def test_cooled_plan_is_clean(factory):
    seq = plan_to_snap_sequence(factory_plan_cooled())
    snaps = factory.problem.snap_labels()
    assert check_executability(factory.automaton, seq, factory.kappa, snap_labels=snaps) is None
    assert check_safety(factory.automaton, seq, factory.bad, factory.kappa, snap_labels=snaps) is None


def test_validate_plan_verdicts(factory):
    assert validate_plan(factory, factory_plan_late()).verdict == VERDICT_UNSAFE
    assert validate_plan(factory, factory_plan_rushed()).verdict == VERDICT_NON_EXECUTABLE
    assert validate_plan(factory, factory_plan_cooled()).verdict == VERDICT_SOLUTION


def test_plan_validity_defects(factory):
    problem = factory.problem
    bad_duration = TimeTriggeredPlan(
        entries=(
            PlanEntry("Process", Fraction(0), Fraction(30)),
            PlanEntry("Work_1", Fraction(1), Fraction(19)),
        )
    )
    assert "duration" in check_plan_validity(problem, bad_duration)
    missing_pre = TimeTriggeredPlan(
        entries=(
            PlanEntry("Process", Fraction(0), Fraction(30)),
            PlanEntry("Work_2", Fraction(1), Fraction(20)),
        )
    )
    assert "precondition" in check_plan_validity(problem, missing_pre)
    no_goal = TimeTriggeredPlan(entries=(PlanEntry("Process", Fraction(0), Fraction(5)),))
    assert "goal" in check_plan_validity(problem, no_goal)
    # holding condition: work must stay inside the processing window
    broken_overall = TimeTriggeredPlan(
        entries=(
            PlanEntry("Process", Fraction(0), Fraction(10)),
            PlanEntry("Work_1", Fraction(1), Fraction(20)),
            PlanEntry("Work_2", Fraction(22), Fraction(20)),
        )
    )
    assert "holding" in check_plan_validity(problem, broken_overall)
    assert validate_plan(factory, no_goal).verdict == VERDICT_INVALID_PLAN
    assert check_plan_validity(problem, factory_plan_cooled()) is None


def _chain_automaton(*, guard_depth1=TRUE_CONSTRAINT):
    """L0 --i1--> L1 --i2--> L2; start:A runs from L0 and L1 only, end:A
    everywhere; a plan event observed after reaching L2 has nothing to fire."""
    transitions = [
        Transition("L0", TRUE_CONSTRAINT, "i1", frozenset(), "L1"),
        Transition("L1", guard_depth1, "i2", frozenset(), "L2"),
        Transition("L0", TRUE_CONSTRAINT, "start:A", frozenset(), "L0"),
        Transition("L1", TRUE_CONSTRAINT, "start:A", frozenset(), "L1"),
        Transition("L0", TRUE_CONSTRAINT, "end:A", frozenset(), "L0"),
        Transition("L1", TRUE_CONSTRAINT, "end:A", frozenset(), "L1"),
        Transition("L2", TRUE_CONSTRAINT, "end:A", frozenset(), "L2"),
    ]
    return TimedAutomaton(
        alphabet=frozenset({"i1", "i2", "start:A", "end:A"}),
        locations=("L0", "L1", "L2"),
        init_location="L0",
        clocks=("g",),
        global_clock="g",
        transitions=tuple(transitions),
        invariants={},
    )


def test_step_budget_gates_deep_violations():
    aut = _chain_automaton()
    plan = TimeTriggeredPlan(entries=(PlanEntry("A", Fraction(1), Fraction(1)),))
    seq = plan_to_snap_sequence(plan)
    # reaching L2 takes two internal steps; kappa=1 allows only one
    assert check_executability(aut, seq, 1) is None
    w = check_executability(aut, seq, 2)
    assert w is not None and w.state.location == "L2" and w.event == "start:A"


def test_mid_delay_observation_costs_a_step():
    # the chain stalls at L1 before t=1; seeing the event time needs a delay
    aut = _chain_automaton(guard_depth1=_cc("g", ">=", 3))
    plan = TimeTriggeredPlan(entries=(PlanEntry("A", Fraction(4), Fraction(1)),))
    seq = plan_to_snap_sequence(plan)
    w2 = check_executability(aut, seq, 2)
    assert w2 is not None and w2.state.location == "L2"
    aut_tight = _chain_automaton(guard_depth1=_cc("g", ">", 4))
    # now L2 is only reachable after the first event time has passed
    assert check_executability(aut_tight, seq, 2) is None


def test_safety_requires_run_completion():
    # a bad sink without the event labels cannot finish the plan
    transitions = [
        Transition("L0", TRUE_CONSTRAINT, "start:A", frozenset(), "L0"),
        Transition("L0", TRUE_CONSTRAINT, "end:A", frozenset(), "L0"),
        Transition("L0", _cc("g", "<", 2), "dive", frozenset(), "L1"),
    ]
    aut = TimedAutomaton(
        alphabet=frozenset({"start:A", "end:A", "dive"}),
        locations=("L0", "L1"),
        init_location="L0",
        clocks=("g",),
        global_clock="g",
        transitions=tuple(transitions),
        invariants={},
    )
    plan = TimeTriggeredPlan(entries=(PlanEntry("A", Fraction(1), Fraction(1)),))
    seq = plan_to_snap_sequence(plan)
    bad_sink = BadStateSpec(entries=(("L1", TRUE_CONSTRAINT),))
    # the sink opens only before the last event, stranding the rest of the plan
    assert check_safety(aut, seq, bad_sink, 2) is None
    bad_home = BadStateSpec(entries=(("L0", _cc("g", ">=", 2)),))
    w = check_safety(aut, seq, bad_home, 2)
    assert w is not None and w.time == Fraction(2)


def test_safety_window_excludes_late_visits():
    transitions = [
        Transition("L0", TRUE_CONSTRAINT, "start:A", frozenset(), "L0"),
        Transition("L0", TRUE_CONSTRAINT, "end:A", frozenset(), "L0"),
    ]
    aut = TimedAutomaton(
        alphabet=frozenset({"start:A", "end:A"}),
        locations=("L0",),
        init_location="L0",
        clocks=("g",),
        global_clock="g",
        transitions=tuple(transitions),
        invariants={},
    )
    plan = TimeTriggeredPlan(entries=(PlanEntry("A", Fraction(1), Fraction(1)),))
    seq = plan_to_snap_sequence(plan)
    late_bad = BadStateSpec(entries=(("L0", _cc("g", ">", 2)),))
    # bad states exist only after the last event time, outside the window
    assert check_safety(aut, seq, late_bad, 3) is None
    edge_bad = BadStateSpec(entries=(("L0", _cc("g", ">=", 2)),))
    assert check_safety(aut, seq, edge_bad, 3) is not None


def test_random_witnesses_replay():
    import random

    rng = random.Random(20260822)
    checked = 0
    for _ in range(120):
        plan, aut, bad, kappa = random_check_triple(rng)
        try:
            seq = plan_to_snap_sequence(plan)
        except Exception:
            continue
        w = check_executability(aut, seq, kappa)
        if w is not None:
            assert replay_run(aut, w.run, seq)
            checked += 1
        ws = check_safety(aut, seq, bad, kappa)
        if ws is not None:
            assert replay_run(aut, ws.run, seq)
            assert ws.time <= seq.events[-1][0]
            checked += 1
    assert checked >= 20
