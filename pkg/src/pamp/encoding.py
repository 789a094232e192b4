"""Formula encodings of plan validity and platform compliance.

The trace side describes every compliant behavior of the platform over a
bounded slot budget: slot 1 is the initial state, each of the remaining
slots is reached by one delay-plus-step, and a step either takes an
automaton transition, matching the next timed snap event when its label
is one, or stutters in place to absorb unused budget and to realize
mid-delay observations.  The same constraint builders serve two callers:
the one-shot query quantifies the trace universally around an
existentially chosen plan, while plan checking fixes the events and asks
for a violating trace directly.  Keeping a single implementation is what
makes the two answers comparable point for point.

Variable layout (all names deterministic):
  plan side   t{j} act_{A}_{e} dur_{A}_{e} st_{e} en_{e} lnk_s_{e}_{j}
              lnk_e_{e}_{j} fire_s_{A}_{j} fire_e_{A}_{j} p_{q}_{j} actv_{e}_{j}
  trace side  at_{L}_{k} c_{x}_{k} delta_{k} ch_{k}_{m} mc_{k}_{j}
with e an entry index, j an event index, k a slot index, m a transition
index (the last m is the stutter), A an action, q a proposition, L a
location, and x a clock.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .model import (
    END,
    START,
    BadStateSpec,
    ClockConstraint,
    PAMPProblem,
    TemporalPlanningProblem,
    TimeTriggeredPlan,
    TimedAutomaton,
    TimedSnapSequence,
    PlanEntry,
    parse_snap_label,
    snap_label,
)
from .terms import (
    BOOL,
    REAL,
    BoolVar,
    LinExpr,
    Term,
    exactly_one,
    mk_and,
    mk_bool,
    mk_eq,
    mk_forall,
    mk_ge,
    mk_gt,
    mk_iff,
    mk_implies,
    mk_le,
    mk_lt,
    mk_not,
    mk_or,
)
from .zones import constraint_after_reset

_OPS = {"<": mk_lt, "<=": mk_le, ">=": mk_ge, ">": mk_gt, "=": mk_eq}


def cc_term(cc: ClockConstraint, env: dict[str, LinExpr]) -> Term:
    parts = []
    for a in cc.atoms:
        lhs = env[a.clock]
        if a.other is not None:
            lhs = lhs - env[a.other]
        parts.append(_OPS[a.op](lhs, LinExpr.const_of(a.bound)))
    return mk_and(*parts)


# ---------------------------------------------------------------------------
# Event interface: times and labels of the n snap events a trace matches


@dataclass(frozen=True)
class Events:
    n: int
    time: Callable[[int], LinExpr]  # 1-based event index
    label: Callable[[str, int], Term]  # does event j carry this snap label

    def window_end(self) -> LinExpr:
        if self.n == 0:
            return LinExpr.const_of(0)
        return self.time(self.n)


def fixed_events(labels: Sequence[str], times: Sequence[Fraction]) -> Events:
    """Events with known labels and concrete times."""
    n = len(labels)
    if len(times) != n:
        raise ValueError("labels and times must align")

    def time(j: int) -> LinExpr:
        return LinExpr.const_of(times[j - 1])

    def label(lab: str, j: int) -> Term:
        return mk_bool(labels[j - 1] == lab)

    return Events(n, time, label)


def sequence_events(sequence: TimedSnapSequence) -> Events:
    labels = [ref.label for _, ref in sequence.events]
    times = [t for t, _ in sequence.events]
    return fixed_events(labels, times)


# ---------------------------------------------------------------------------
# Trace side


@dataclass(frozen=True)
class TraceShape:
    automaton: TimedAutomaton
    bad: BadStateSpec
    kappa: int
    n: int
    snap_labels: frozenset[str]

    @property
    def slots(self) -> int:
        return max(self.kappa * self.n, 1)

    @property
    def locations(self) -> tuple[str, ...]:
        return tuple(sorted(self.automaton.locations))

    @property
    def stay(self) -> int:
        return len(self.automaton.transitions)

    def live_mc(self, k: int) -> range:
        # matching an event costs a step, so slot k caps the count at k - 1
        return range(0, min(k - 1, self.n) + 1)

    def mc(self, k: int, j: int) -> Term:
        if j > k - 1:
            return mk_bool(False)
        return BoolVar(v_mc(k, j))


def v_at(loc: str, k: int) -> str:
    return f"at_{loc}_{k}"


def v_clock(clock: str, k: int) -> str:
    return f"c_{clock}_{k}"


def v_delta(k: int) -> str:
    return f"delta_{k}"


def v_ch(k: int, m: int) -> str:
    return f"ch_{k}_{m}"


def v_mc(k: int, j: int) -> str:
    return f"mc_{k}_{j}"


def trace_bool_names(shape: TraceShape) -> list[str]:
    names = []
    for k in range(1, shape.slots + 1):
        names.extend(v_at(loc, k) for loc in shape.locations)
        names.extend(v_mc(k, j) for j in shape.live_mc(k))
    for k in range(1, shape.slots):
        names.extend(v_ch(k, m) for m in range(shape.stay + 1))
    return names


def trace_real_names(shape: TraceShape) -> list[str]:
    names = []
    for k in range(1, shape.slots + 1):
        names.extend(v_clock(x, k) for x in shape.automaton.clocks)
    for k in range(1, shape.slots):
        names.append(v_delta(k))
    return names


def _clock_env(shape: TraceShape, k: int) -> dict[str, LinExpr]:
    return {x: LinExpr.var(v_clock(x, k)) for x in shape.automaton.clocks}


def _delayed_env(shape: TraceShape, k: int) -> dict[str, LinExpr]:
    d = LinExpr.var(v_delta(k))
    return {
        x: LinExpr.var(v_clock(x, k)) + d for x in shape.automaton.clocks
    }


def trace_valid(shape: TraceShape, ev: Events) -> Term:
    ta = shape.automaton
    parts: list[Term] = []
    gamma = ta.global_clock

    # initial slot: initial location, all clocks zero, nothing matched
    parts.append(BoolVar(v_at(ta.init_location, 1)))
    for x in ta.clocks:
        parts.append(mk_eq(LinExpr.var(v_clock(x, 1)), LinExpr.const_of(0)))
    parts.append(shape.mc(1, 0))

    for k in range(1, shape.slots + 1):
        parts.append(exactly_one([BoolVar(v_at(loc, k)) for loc in shape.locations]))
        parts.append(exactly_one([shape.mc(k, j) for j in shape.live_mc(k)]))
        env = _clock_env(shape, k)
        for loc in shape.locations:
            inv = ta.invariant(loc)
            if not inv.is_true:
                parts.append(mk_implies(BoolVar(v_at(loc, k)), cc_term(inv, env)))

    for k in range(1, shape.slots):
        delta = LinExpr.var(v_delta(k))
        parts.append(mk_ge(delta, LinExpr.const_of(0)))
        parts.append(
            exactly_one([BoolVar(v_ch(k, m)) for m in range(shape.stay + 1)])
        )
        env = _clock_env(shape, k)
        env_d = _delayed_env(shape, k)
        gamma_after = env_d[gamma]

        # no step may pass the next pending event time (the final one for
        # completed traces, which pins trailing behavior to the window end)
        for j in shape.live_mc(k):
            bound = ev.time(min(j + 1, shape.n)) if shape.n else LinExpr.const_of(0)
            parts.append(
                mk_implies(
                    shape.mc(k, j), mk_le(gamma_after, bound)
                )
            )

        stay = BoolVar(v_ch(k, shape.stay))
        for loc in shape.locations:
            parts.append(
                mk_implies(
                    mk_and(stay, BoolVar(v_at(loc, k))), BoolVar(v_at(loc, k + 1))
                )
            )
        for x in ta.clocks:
            parts.append(
                mk_implies(
                    stay, mk_eq(LinExpr.var(v_clock(x, k + 1)), env_d[x])
                )
            )
        for j in shape.live_mc(k):
            parts.append(
                mk_implies(
                    mk_and(stay, shape.mc(k, j)), shape.mc(k + 1, j)
                )
            )

        for m, tr in enumerate(ta.transitions):
            take = BoolVar(v_ch(k, m))
            post: list[Term] = [BoolVar(v_at(tr.src, k))]
            if not tr.guard.is_true:
                post.append(cc_term(tr.guard, env_d))
            src_inv = ta.invariant(tr.src)
            if not src_inv.is_true:
                post.append(cc_term(src_inv, env_d))
            post.append(BoolVar(v_at(tr.dst, k + 1)))
            for x in ta.clocks:
                after = LinExpr.var(v_clock(x, k + 1))
                if x in tr.resets:
                    post.append(mk_eq(after, LinExpr.const_of(0)))
                else:
                    post.append(mk_eq(after, env_d[x]))
            parts.append(mk_implies(take, mk_and(*post)))

            if tr.label in shape.snap_labels:
                for j in shape.live_mc(k):
                    pre = mk_and(take, shape.mc(k, j))
                    if j >= shape.n:
                        parts.append(mk_implies(pre, mk_bool(False)))
                        continue
                    parts.append(
                        mk_implies(
                            pre,
                            mk_and(
                                ev.label(tr.label, j + 1),
                                mk_eq(gamma_after, ev.time(j + 1)),
                                shape.mc(k + 1, j + 1),
                            ),
                        )
                    )
            else:
                for j in shape.live_mc(k):
                    parts.append(
                        mk_implies(
                            mk_and(take, shape.mc(k, j)),
                            shape.mc(k + 1, j),
                        )
                    )

    return mk_and(*parts)


def exec_ok(shape: TraceShape, ev: Events) -> Term:
    """Wherever a trace sits at a pending event's time, the event can fire."""
    ta = shape.automaton
    gamma = ta.global_clock
    parts: list[Term] = []
    snap_transitions = [t for t in ta.transitions if t.label in shape.snap_labels]
    for k in range(1, shape.slots + 1):
        env = _clock_env(shape, k)
        for i in shape.live_mc(k):
            if i >= shape.n:
                continue
            here = mk_and(
                shape.mc(k, i),
                mk_eq(env[gamma], ev.time(i + 1)),
            )
            options: list[Term] = []
            for tr in snap_transitions:
                fits: list[Term] = [
                    ev.label(tr.label, i + 1),
                    BoolVar(v_at(tr.src, k)),
                ]
                if not tr.guard.is_true:
                    fits.append(cc_term(tr.guard, env))
                landing = constraint_after_reset(ta.invariant(tr.dst), tr.resets)
                if landing is None:
                    continue
                if not landing.is_true:
                    fits.append(cc_term(landing, env))
                options.append(mk_and(*fits))
            parts.append(mk_implies(here, mk_or(*options)))
    return mk_and(*parts)


def safe_ok(shape: TraceShape, ev: Events) -> Term:
    """No completing trace touches a bad state inside the plan window."""
    ta = shape.automaton
    gamma = ta.global_clock
    window = ev.window_end()
    visits: list[Term] = []
    for k in range(1, shape.slots + 1):
        env = _clock_env(shape, k)
        for loc, cc in shape.bad.entries:
            if loc not in ta.locations:
                continue
            hit = [BoolVar(v_at(loc, k))]
            if not cc.is_true:
                hit.append(cc_term(cc, env))
            hit.append(mk_le(env[gamma], window))
            visits.append(mk_and(*hit))
    completed = shape.mc(shape.slots, shape.n)
    return mk_not(mk_and(completed, mk_or(*visits)))


# ---------------------------------------------------------------------------
# Plan side


@dataclass(frozen=True)
class PlanSpace:
    problem: TemporalPlanningProblem
    horizon: int

    @property
    def n(self) -> int:
        return 2 * self.horizon

    @property
    def entries(self) -> range:
        return range(1, self.horizon + 1)

    @property
    def events(self) -> range:
        return range(1, self.n + 1)


def v_t(j: int) -> str:
    return f"t{j}"


def v_act(action: str, e: int) -> str:
    return f"act_{action}_{e}"


def v_dur(action: str, e: int) -> str:
    return f"dur_{action}_{e}"


def v_start(e: int) -> str:
    return f"st_{e}"


def v_end(e: int) -> str:
    return f"en_{e}"


def v_lnk(kind: str, e: int, j: int) -> str:
    return f"lnk_{'s' if kind == START else 'e'}_{e}_{j}"


def v_fire(kind: str, action: str, j: int) -> str:
    return f"fire_{'s' if kind == START else 'e'}_{action}_{j}"


def v_prop(q: str, j: int) -> str:
    return f"p_{q}_{j}"


def v_active(e: int, j: int) -> str:
    return f"actv_{e}_{j}"


def plan_bool_names(space: PlanSpace) -> list[str]:
    names = []
    for e in space.entries:
        names.extend(v_act(a.name, e) for a in space.problem.actions)
        for j in space.events:
            names.append(v_lnk(START, e, j))
            names.append(v_lnk(END, e, j))
            names.append(v_active(e, j))
    for j in space.events:
        for a in space.problem.actions:
            names.append(v_fire(START, a.name, j))
            names.append(v_fire(END, a.name, j))
    for q in sorted(space.problem.propositions):
        names.extend(v_prop(q, j) for j in range(space.n + 1))
    return names


def plan_real_names(space: PlanSpace) -> list[str]:
    names = [v_t(j) for j in space.events]
    for e in space.entries:
        names.append(v_start(e))
        names.append(v_end(e))
        names.extend(v_dur(a.name, e) for a in space.problem.actions)
    return names


def plan_events(space: PlanSpace) -> Events:
    def time(j: int) -> LinExpr:
        return LinExpr.var(v_t(j))

    def label(lab: str, j: int) -> Term:
        ref = parse_snap_label(lab)
        if ref is None or ref.action not in set(space.problem.action_names()):
            return mk_bool(False)
        return BoolVar(v_fire(ref.kind, ref.action, j))

    return Events(space.n, time, label)


def plan_valid(space: PlanSpace) -> Term:
    prob = space.problem
    parts: list[Term] = []
    actions = prob.actions

    for e in space.entries:
        parts.append(exactly_one([BoolVar(v_act(a.name, e)) for a in actions]))
        for a in actions:
            chosen = BoolVar(v_act(a.name, e))
            dur = LinExpr.var(v_dur(a.name, e))
            window = [mk_ge(dur, LinExpr.const_of(a.lower))]
            if a.upper is not None:
                window.append(mk_le(dur, LinExpr.const_of(a.upper)))
            parts.append(mk_implies(chosen, mk_and(*window)))
            parts.append(
                mk_implies(
                    chosen,
                    mk_eq(
                        LinExpr.var(v_end(e)),
                        LinExpr.var(v_start(e)) + dur,
                    ),
                )
            )
        parts.append(exactly_one([BoolVar(v_lnk(START, e, j)) for j in space.events]))
        parts.append(exactly_one([BoolVar(v_lnk(END, e, j)) for j in space.events]))
        for j in space.events:
            parts.append(
                mk_implies(
                    BoolVar(v_lnk(START, e, j)),
                    mk_eq(LinExpr.var(v_t(j)), LinExpr.var(v_start(e))),
                )
            )
            parts.append(
                mk_implies(
                    BoolVar(v_lnk(END, e, j)),
                    mk_eq(LinExpr.var(v_t(j)), LinExpr.var(v_end(e))),
                )
            )

    for j in space.events:
        sources = []
        for e in space.entries:
            sources.append(BoolVar(v_lnk(START, e, j)))
            sources.append(BoolVar(v_lnk(END, e, j)))
        parts.append(exactly_one(sources))

    if space.n:
        parts.append(mk_ge(LinExpr.var(v_t(1)), LinExpr.const_of(0)))
    for j in range(1, space.n):
        parts.append(mk_lt(LinExpr.var(v_t(j)), LinExpr.var(v_t(j + 1))))
    for e in range(1, space.horizon):
        parts.append(mk_lt(LinExpr.var(v_start(e)), LinExpr.var(v_start(e + 1))))
    # repeats of one action must not overlap themselves
    for a in actions:
        for e in space.entries:
            for f in range(e + 1, space.horizon + 1):
                parts.append(
                    mk_implies(
                        mk_and(BoolVar(v_act(a.name, e)), BoolVar(v_act(a.name, f))),
                        mk_lt(LinExpr.var(v_end(e)), LinExpr.var(v_start(f))),
                    )
                )

    for j in space.events:
        for a in actions:
            for kind in (START, END):
                fire = BoolVar(v_fire(kind, a.name, j))
                witness = [
                    mk_and(BoolVar(v_lnk(kind, e, j)), BoolVar(v_act(a.name, e)))
                    for e in space.entries
                ]
                parts.append(mk_iff(fire, mk_or(*witness)))
                pre = a.snap(kind).pre
                if pre:
                    parts.append(
                        mk_implies(
                            fire,
                            mk_and(*(BoolVar(v_prop(q, j - 1)) for q in sorted(pre))),
                        )
                    )

    for q in sorted(prob.propositions):
        parts.append(
            BoolVar(v_prop(q, 0)) if q in prob.init else mk_not(BoolVar(v_prop(q, 0)))
        )
    for j in space.events:
        for q in sorted(prob.propositions):
            outcomes = []
            for a in actions:
                for kind in (START, END):
                    snap = a.snap(kind)
                    if q in snap.add:
                        effect: Term = mk_bool(True)
                    elif q in snap.delete:
                        effect = mk_bool(False)
                    else:
                        effect = BoolVar(v_prop(q, j - 1))
                    outcomes.append(
                        mk_and(BoolVar(v_fire(kind, a.name, j)), effect)
                    )
            parts.append(mk_iff(BoolVar(v_prop(q, j)), mk_or(*outcomes)))

    for e in space.entries:
        for j in space.events:
            was = (
                mk_bool(False) if j == 1 else BoolVar(v_active(e, j - 1))
            )
            parts.append(
                mk_iff(
                    BoolVar(v_active(e, j)),
                    mk_and(
                        mk_or(BoolVar(v_lnk(START, e, j)), was),
                        mk_not(BoolVar(v_lnk(END, e, j))),
                    ),
                )
            )
        for a in actions:
            if not a.overall:
                continue
            for j in space.events:
                parts.append(
                    mk_implies(
                        mk_and(BoolVar(v_active(e, j)), BoolVar(v_act(a.name, e))),
                        mk_and(
                            *(BoolVar(v_prop(q, j)) for q in sorted(a.overall))
                        ),
                    )
                )

    for g in sorted(prob.goal):
        parts.append(BoolVar(v_prop(g, space.n)))

    return mk_and(*parts)


def extract_plan(
    space: PlanSpace, bools: dict[str, bool], rats: dict[str, Fraction]
) -> TimeTriggeredPlan:
    entries = []
    for e in space.entries:
        name = None
        for a in space.problem.actions:
            if bools.get(v_act(a.name, e)):
                name = a.name
                break
        if name is None:
            raise ValueError(f"entry {e} has no selected action in the model")
        start = rats[v_start(e)]
        duration = rats[v_dur(name, e)]
        entries.append(PlanEntry(name, start, duration))
    return TimeTriggeredPlan(tuple(entries))


# ---------------------------------------------------------------------------
# Assembled queries


@dataclass(frozen=True)
class PhiQuery:
    asserts: tuple[Term, ...]
    bool_names: tuple[str, ...]
    real_names: tuple[str, ...]
    space: PlanSpace
    shape: TraceShape


def _binders(shape: TraceShape) -> tuple[tuple[str, str], ...]:
    bools = tuple((n, BOOL) for n in trace_bool_names(shape))
    reals = tuple((n, REAL) for n in trace_real_names(shape))
    return bools + reals


def build_phi(pamp: PAMPProblem, horizon: int) -> PhiQuery:
    space = PlanSpace(pamp.problem, horizon)
    shape = TraceShape(
        pamp.automaton,
        pamp.bad,
        pamp.kappa,
        space.n,
        pamp.problem.snap_labels(),
    )
    ev = plan_events(space)
    matrix = mk_implies(
        trace_valid(shape, ev), mk_and(exec_ok(shape, ev), safe_ok(shape, ev))
    )
    asserts = (plan_valid(space), mk_forall(_binders(shape), matrix))
    return PhiQuery(
        asserts,
        tuple(plan_bool_names(space)),
        tuple(plan_real_names(space)),
        space,
        shape,
    )


@dataclass(frozen=True)
class CheckQuery:
    trace_ok: Term
    exec_violation: Term
    safety_violation: Term
    bool_names: tuple[str, ...]
    real_names: tuple[str, ...]
    shape: TraceShape


def build_plan_check(
    automaton: TimedAutomaton,
    bad: BadStateSpec,
    kappa: int,
    sequence: TimedSnapSequence,
    *,
    snap_labels: frozenset[str] | None = None,
) -> CheckQuery:
    """Ground queries over trace variables for one concrete event sequence."""
    if snap_labels is None:
        snap_labels = automaton.snap_event_labels()
    shape = TraceShape(
        automaton,
        bad,
        kappa,
        len(sequence.events),
        snap_labels,
    )
    ev = sequence_events(sequence)
    return CheckQuery(
        trace_valid(shape, ev),
        mk_not(exec_ok(shape, ev)),
        mk_not(safe_ok(shape, ev)),
        tuple(trace_bool_names(shape)),
        tuple(trace_real_names(shape)),
        shape,
    )


