"""Zone engine: canonical closure, delay/constrain/reset/sample, subtraction.

The hypothesis suites compare symbolic operations against pointwise
semantics, which is the independent oracle for the DBM algebra.
"""

from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from pamp.model import ClockAtom, ClockConstraint, ModelError
from pamp.zones import (
    Zone,
    bound_add,
    bound_lt,
    bound_min,
    bound_neg,
    constraint_after_reset,
    zone_constrain,
    zone_equal_const,
    zone_init,
    zone_reset,
    zone_sample,
    zone_subtract,
    zone_universe,
    zone_up,
)

CLOCKS = ("g", "c")


def test_bound_algebra():
    assert bound_add((F(1), False), (F(2), True)) == (F(3), True)
    assert bound_lt((F(1), True), (F(1), False))
    assert not bound_lt((F(1), False), (F(1), False))
    assert bound_min((F(2), False), (F(1), True)) == (F(1), True)
    assert bound_neg((F(5), False)) == (F(-5), True)


def test_init_and_membership():
    z = zone_init(CLOCKS)
    assert z.contains({"g": F(0), "c": F(0)})
    assert not z.contains({"g": F(1), "c": F(0)})


def test_up_allows_uniform_delay_only():
    z = zone_up(zone_init(CLOCKS))
    assert z.contains({"g": F(5), "c": F(5)})
    assert not z.contains({"g": F(5), "c": F(4)})  # differences preserved


def test_constrain_and_pin():
    z = zone_up(zone_init(CLOCKS))
    z = zone_constrain(z, ClockConstraint((ClockAtom("c", ">=", 10),)))
    assert z.contains({"g": F(10), "c": F(10)})
    assert not z.contains({"g": F(9), "c": F(9)})
    z = zone_equal_const(z, "g", F(12))
    assert z.contains({"g": F(12), "c": F(12)})
    assert not z.contains({"g": F(13), "c": F(13)})


def test_reset():
    z = zone_up(zone_init(CLOCKS))
    z = zone_equal_const(z, "g", F(7))
    z = zone_reset(z, {"c"})
    assert z.contains({"g": F(7), "c": F(0)})
    assert not z.contains({"g": F(7), "c": F(7)})


def test_strict_interval_sampling_midpoint():
    # 1 < c < 2 must sample to 3/2 under the midpoint rule
    z = zone_up(zone_init(("c",)))
    z = zone_constrain(z, ClockConstraint((ClockAtom("c", ">", 1), ClockAtom("c", "<", 2))))
    assert zone_sample(z) == {"c": F(3, 2)}


def test_sample_empty_raises():
    z = zone_constrain(
        zone_init(CLOCKS), ClockConstraint((ClockAtom("g", ">", 0),))
    )
    assert z.is_empty()
    with pytest.raises(ModelError):
        zone_sample(z)


def test_subtract_basic():
    # c in [0, 10], remove [3, 5]: two pieces remain
    z = zone_constrain(zone_up(zone_init(("c",))), ClockConstraint((ClockAtom("c", "<=", 10),)))
    mid = zone_constrain(
        zone_universe(("c",)),
        ClockConstraint((ClockAtom("c", ">=", 3), ClockAtom("c", "<=", 5))),
    )
    pieces = zone_subtract(z, [mid])
    assert pieces
    for v in (F(0), F(2), F(6), F(10)):
        assert any(p.contains({"c": v}) for p in pieces)
    for v in (F(3), F(4), F(5)):
        assert not any(p.contains({"c": v}) for p in pieces)
    # removing everything leaves nothing
    assert zone_subtract(z, [zone_universe(("c",))]) == []


def test_constraint_after_reset():
    cc = ClockConstraint((ClockAtom("c", "<=", 2), ClockAtom("g", ">", 5)))
    # resetting c: the c-atom becomes vacuous (0 <= 2), g survives
    out = constraint_after_reset(cc, {"c"})
    assert out is not None and len(out.atoms) == 1
    assert out.atoms[0].clock == "g"
    # resetting g makes 0 > 5 impossible
    assert constraint_after_reset(cc, {"g"}) is None
    # difference atom with one side reset flips into a unary atom
    d = ClockConstraint((ClockAtom("g", ">=", 3, other="c"),))
    out = constraint_after_reset(d, {"g"})
    assert out is not None and out.atoms[0] == ClockAtom("c", "<=", -3)


# ---------------------------------------------------------------------------
# property suites: symbolic ops agree with pointwise semantics


atom_st = st.builds(
    ClockAtom,
    clock=st.sampled_from(CLOCKS),
    op=st.sampled_from(["<", "<=", "=", ">=", ">"]),
    bound=st.integers(min_value=-4, max_value=8),
    other=st.one_of(st.none(), st.sampled_from(CLOCKS)),
).filter(lambda a: a.other != a.clock)

cc_st = st.builds(lambda ats: ClockConstraint(tuple(ats)), st.lists(atom_st, max_size=4))

point_st = st.fixed_dictionaries(
    {
        "g": st.fractions(min_value=F(0), max_value=F(10), max_denominator=4),
        "c": st.fractions(min_value=F(0), max_value=F(10), max_denominator=4),
    }
)


def build_zone(ccs):
    z = zone_up(zone_init(CLOCKS))
    for cc in ccs:
        z = zone_constrain(z, cc)
    return z


@settings(max_examples=200, deadline=None)
@given(st.lists(cc_st, max_size=3), point_st)
def test_constrain_matches_pointwise(ccs, point):
    z = zone_up(zone_init(CLOCKS))
    # membership in the constrained zone == base membership and every atom
    zc = build_zone(ccs)
    expected = z.contains(point) and all(cc.holds(point) for cc in ccs)
    assert zc.contains(point) == expected


@settings(max_examples=200, deadline=None)
@given(st.lists(cc_st, max_size=2), st.fractions(min_value=F(0), max_value=F(6), max_denominator=4), point_st)
def test_up_matches_pointwise(ccs, d, point):
    z = build_zone(ccs)
    if z.contains(point):
        shifted = {k: v + d for k, v in point.items()}
        assert zone_up(z).contains(shifted)


@settings(max_examples=200, deadline=None)
@given(st.lists(cc_st, max_size=2), point_st)
def test_reset_matches_pointwise(ccs, point):
    z = build_zone(ccs)
    if z.contains(point):
        out = dict(point, c=F(0))
        assert zone_reset(z, {"c"}).contains(out)


@settings(max_examples=150, deadline=None)
@given(st.lists(cc_st, max_size=3))
def test_sample_member_of_zone(ccs):
    z = build_zone(ccs)
    if not z.is_empty():
        assert z.contains(zone_sample(z))


@settings(max_examples=150, deadline=None)
@given(st.lists(cc_st, max_size=2), st.lists(cc_st, min_size=1, max_size=2), point_st)
def test_subtract_matches_pointwise(base, removed, point):
    z = build_zone(base)
    removes = [build_zone([cc]) for cc in removed]
    pieces = zone_subtract(z, removes)
    in_pieces = any(p.contains(point) for p in pieces)
    expected = z.contains(point) and not any(r.contains(point) for r in removes)
    assert in_pieces == expected


@settings(max_examples=100, deadline=None)
@given(st.lists(cc_st, max_size=3), st.lists(cc_st, max_size=3))
def test_subset_matches_pointwise_on_samples(a_ccs, b_ccs):
    a, b = build_zone(a_ccs), build_zone(b_ccs)
    if a.is_subset(b) and not a.is_empty():
        assert b.contains(zone_sample(a))
