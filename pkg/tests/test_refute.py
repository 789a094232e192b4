"""Witness generalization: lemmas must exclude the defeated schedule.

Each lemma replays a concrete violation run with free delays and times,
then projects the delays away.  The defeated schedule has to fall inside
the excluded region, the excluded region must only contain schedules the
oracle also rejects, and the budget accounting must keep a lemma from
touching sequences too short to afford its run.
"""

from fractions import Fraction as F

from pamp.encoding import v_t
from pamp.generators import factory_plan_late, factory_plan_rushed, gen_factory
from pamp.minismt.generalize import implicant
from pamp.model import PlanEntry, TimeTriggeredPlan, plan_to_snap_sequence
from pamp.refute import witness_lemma
from pamp.texec import validate_plan


def _times_of(plan):
    seq = plan_to_snap_sequence(plan)
    return [F(0)] + [t for t, _ in seq.events]


def _lemma_for(pamp, plan):
    outcome = validate_plan(pamp, plan)
    assert outcome.witness is not None
    times = _times_of(plan)
    return outcome, witness_lemma(
        pamp.automaton, pamp.bad, outcome.witness, times, pamp.kappa
    ), times


def _holds_at(term, times):
    rats = {v_t(j): times[j] for j in range(1, len(times))}
    try:
        implicant(term, True, {}, rats)
        return True
    except ValueError:
        return False


def test_unsafe_schedule_is_excluded():
    pamp = gen_factory(2, 50, 2, variant=1)
    outcome, lemma, times = _lemma_for(pamp, factory_plan_late(2))
    assert outcome.verdict == "UNSAFE"
    assert lemma.kind == "unsafe"
    assert lemma.scope == len(times) - 1
    assert not _holds_at(lemma.term, times)


def test_rushed_schedule_is_excluded():
    pamp = gen_factory(2, 50, 2, variant=1)
    outcome, lemma, times = _lemma_for(pamp, factory_plan_rushed(2))
    assert outcome.verdict == "NON-EXECUTABLE"
    assert lemma.kind == "non-executable"
    # the violation hits the second work's start, the fourth event
    assert lemma.scope == outcome.witness.prefix + 1
    assert lemma.scope <= len(times) - 1
    assert not _holds_at(lemma.term, times)


def test_exec_lemma_excludes_nearby_rushed_schedules_only():
    pamp = gen_factory(2, 50, 2, variant=1)
    _, lemma, _ = _lemma_for(pamp, factory_plan_rushed(2))

    def shifted(gap):
        return TimeTriggeredPlan(
            (
                PlanEntry("Process", F(0), F(45)),
                PlanEntry("Work_1", F(1), F(20)),
                PlanEntry("Work_2", F(21) + gap, F(20)),
            )
        )

    # same skeleton, same too-small work gap: still inside the region
    worse = _times_of(shifted(F(1, 2)))
    assert not _holds_at(lemma.term, worse)
    # a gap wide enough to let the platform recover escapes the region
    fine = _times_of(shifted(F(12)))
    assert _holds_at(lemma.term, fine)


def test_excluded_region_is_sound():
    # sample schedules on both sides of the lemma; everything excluded
    # must genuinely fail validation
    pamp = gen_factory(2, 50, 2, variant=1)
    _, lemma, _ = _lemma_for(pamp, factory_plan_rushed(2))
    # half-integer gaps keep every event timestamp distinct
    for gap_num in range(1, 25, 2):
        gap = F(gap_num, 2)
        plan = TimeTriggeredPlan(
            (
                PlanEntry("Process", F(0), F(45)),
                PlanEntry("Work_1", F(1), F(20)),
                PlanEntry("Work_2", F(21) + gap, F(20)),
            )
        )
        times = _times_of(plan)
        if not _holds_at(lemma.term, times):
            assert validate_plan(pamp, plan).verdict != "SOLUTION"


def test_budget_accounting_bounds_min_length():
    pamp = gen_factory(2, 50, 2, variant=1)
    for plan in (factory_plan_late(2), factory_plan_rushed(2)):
        outcome, lemma, times = _lemma_for(pamp, plan)
        n = len(times) - 1
        assert 1 <= lemma.min_length <= n
        used = outcome.witness.steps
        assert used is not None and used <= pamp.kappa * n - 1


def test_lemma_is_about_event_times_only():
    from pamp.terms import free_vars

    pamp = gen_factory(2, 50, 2, variant=1)
    _, lemma, times = _lemma_for(pamp, factory_plan_late(2))
    bools, rats = free_vars(lemma.term)
    assert not bools
    assert rats
    assert rats <= {v_t(j) for j in range(1, len(times))}
