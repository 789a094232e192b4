"""Round-trips and diagnostics for the YAML problem/plan/report formats."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from pamp.formats import (
    Report,
    atom_to_text,
    parse_plan,
    parse_problem_bundle,
    parse_report,
    rat_to_text,
    serialize_plan,
    serialize_problem_bundle,
    serialize_report,
    text_to_atom,
    text_to_rat,
    witness_run_from_data,
)
from pamp.generators import factory_plan_cooled, gen_factory, gen_rover
from pamp.model import ClockAtom, plan_to_snap_sequence
from pamp.texec import check_safety, replay_run
from pamp.generators import factory_plan_late


rationals = st.fractions(
    min_value=Fraction(-1000), max_value=Fraction(1000), max_denominator=64
)


@given(rationals)
def test_rational_text_round_trip(q):
    assert text_to_rat(rat_to_text(q)) == q


def test_rational_text_accepts_ints_and_rejects_junk():
    assert text_to_rat(7) == 7
    assert text_to_rat("45/1") == 45
    assert text_to_rat("-3/2") == Fraction(-3, 2)
    for bad in ("x", "1/0", "1.5", True, None, [1]):
        with pytest.raises(ValueError):
            text_to_rat(bad)


@given(
    st.sampled_from(["c", "c_W", "x.y-z"]),
    st.sampled_from(["<", "<=", "=", ">=", ">"]),
    st.integers(-99, 99),
    st.one_of(st.none(), st.just("g")),
)
def test_atom_text_round_trip(clock, op, bound, other):
    atom = ClockAtom(clock=clock, op=op, bound=bound, other=other)
    assert text_to_atom(atom_to_text(atom)) == atom


def test_bundle_round_trip_factory():
    for pamp in (gen_factory(2, 50, 2), gen_factory(1, 30, 3, variant=2)):
        text = serialize_problem_bundle(pamp)
        back, diags = parse_problem_bundle(text)
        assert diags == []
        assert back is not None
        assert back.problem == pamp.problem
        assert back.kappa == pamp.kappa
        assert back.bad == pamp.bad
        assert back.automaton.alphabet == pamp.automaton.alphabet
        assert set(back.automaton.transitions) == set(pamp.automaton.transitions)
        assert back.automaton.invariants == pamp.automaton.invariants


def test_bundle_round_trip_rover():
    pamp = gen_rover(3, (1,), 2)
    back, diags = parse_problem_bundle(serialize_problem_bundle(pamp))
    assert diags == [] and back is not None
    assert back.problem == pamp.problem
    assert set(back.automaton.transitions) == set(pamp.automaton.transitions)


def test_bundle_diagnostics_have_paths():
    bundle, diags = parse_problem_bundle("problem: {}\nplatform: {}\nkappa: 0\n")
    assert bundle is None
    paths = {d.path for d in diags}
    assert "problem.actions" in paths
    assert "kappa" in paths
    assert any(p.startswith("platform") for p in paths)


def test_bundle_bad_guard_pinpointed():
    pamp = gen_factory(1, 30, 2)
    text = serialize_problem_bundle(pamp).replace("c_W = 20", "c_W == ")
    bundle, diags = parse_problem_bundle(text)
    assert bundle is None
    assert any("guard[0]" in d.path for d in diags)


def test_plan_round_trip():
    plan = factory_plan_cooled()
    back, diags = parse_plan(serialize_plan(plan))
    assert diags == [] and back == plan


def test_plan_rejects_overlap_and_bad_numbers():
    bad, diags = parse_plan("plan:\n- {action: A, start: 0, duration: x}\n")
    assert bad is None and any("duration" in d.path for d in diags)
    overlapping = (
        "plan:\n"
        "- {action: A, start: 0, duration: 5}\n"
        "- {action: A, start: 2, duration: 5}\n"
    )
    bad, diags = parse_plan(overlapping)
    assert bad is None and diags


def test_report_round_trip_with_witness():
    pamp = gen_factory(2, 50, 2)
    plan = factory_plan_late()
    seq = plan_to_snap_sequence(plan)
    w = check_safety(
        pamp.automaton, seq, pamp.bad, pamp.kappa, snap_labels=pamp.problem.snap_labels()
    )
    report = Report(
        verdict="UNSAFE", plan=plan, witness=w.to_data(), stats={"solver_calls": 3}
    )
    back, diags = parse_report(serialize_report(report))
    assert diags == [] and back is not None
    assert back.verdict == "UNSAFE"
    assert back.plan == plan
    assert back.stats == {"solver_calls": 3}
    run = witness_run_from_data(back.witness)
    assert replay_run(pamp.automaton, run, seq, snap_labels=pamp.problem.snap_labels())
