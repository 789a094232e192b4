"""Core model: temporal planning problems, timed automata, plans, and the
exact-rational semantics shared by every other layer.

All quantities are `fractions.Fraction`; nothing in the semantics touches
floats.  Types validate their own invariants on construction and raise
ModelError (or a subclass) when violated.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

Rational = Fraction

_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_.\-]*$")

START = "start"
END = "end"

COMPARISONS = ("<", "<=", "=", ">=", ">")


class ModelError(Exception):
    """A model-level invariant was violated."""


class SimultaneousEvents(ModelError):
    """Two snap events of a plan share a timestamp."""


class SelfOverlap(ModelError):
    """Two instances of the same action overlap in time."""


class Inapplicable(ModelError):
    """A snap action's precondition does not hold in the given state."""


def check_ident(name: str, what: str) -> str:
    if not isinstance(name, str) or not _IDENT.match(name):
        raise ModelError(f"{what} {name!r} is not a valid identifier")
    return name


def as_rational(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise ModelError(f"expected an exact rational, got {value!r}")


# ---------------------------------------------------------------------------
# Planning side


@dataclass(frozen=True)
class SnapActionSpec:
    """Instantaneous action half: positive preconditions and add/delete effects."""

    pre: frozenset[str] = frozenset()
    add: frozenset[str] = frozenset()
    delete: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "pre", frozenset(self.pre))
        object.__setattr__(self, "add", frozenset(self.add))
        object.__setattr__(self, "delete", frozenset(self.delete))
        if self.add & self.delete:
            raise ModelError(
                f"add and delete effects overlap: {sorted(self.add & self.delete)}"
            )


@dataclass(frozen=True)
class DurativeAction:
    """Durative action with snap start/end, an over-all condition, and
    rational duration bounds [lower, upper]; upper may be None for unbounded."""

    name: str
    start: SnapActionSpec
    end: SnapActionSpec
    overall: frozenset[str] = frozenset()
    lower: Fraction = Fraction(1)
    upper: Fraction | None = None

    def __post_init__(self):
        check_ident(self.name, "action name")
        object.__setattr__(self, "overall", frozenset(self.overall))
        object.__setattr__(self, "lower", as_rational(self.lower))
        if self.upper is not None:
            object.__setattr__(self, "upper", as_rational(self.upper))
        if self.lower <= 0:
            raise ModelError(f"action {self.name}: lower duration bound must be > 0")
        if self.upper is not None and self.upper < self.lower:
            raise ModelError(f"action {self.name}: empty duration window")

    def snap(self, kind: str) -> SnapActionSpec:
        if kind == START:
            return self.start
        if kind == END:
            return self.end
        raise ModelError(f"unknown snap kind {kind!r}")


@dataclass(frozen=True)
class SnapEventRef:
    """Reference to one half of a durative action."""

    action: str
    kind: str  # START or END

    def __post_init__(self):
        if self.kind not in (START, END):
            raise ModelError(f"snap kind must be 'start' or 'end', got {self.kind!r}")

    @property
    def label(self) -> str:
        return f"{self.kind}:{self.action}"


def snap_label(action: str, kind: str) -> str:
    return SnapEventRef(action, kind).label


def parse_snap_label(label: str) -> SnapEventRef | None:
    """Inverse of snap_label; None for internal (non snap-event) labels."""
    if ":" not in label:
        return None
    kind, _, action = label.partition(":")
    if kind not in (START, END):
        return None
    return SnapEventRef(action, kind)


@dataclass(frozen=True)
class TemporalPlanningProblem:
    propositions: frozenset[str]
    actions: tuple[DurativeAction, ...]
    init: frozenset[str]
    goal: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "propositions", frozenset(self.propositions))
        object.__setattr__(self, "actions", tuple(self.actions))
        object.__setattr__(self, "init", frozenset(self.init))
        object.__setattr__(self, "goal", frozenset(self.goal))
        for p in self.propositions:
            check_ident(p, "proposition")
        names = [a.name for a in self.actions]
        if len(names) != len(set(names)):
            raise ModelError("duplicate action names")
        for a in self.actions:
            used = a.start.pre | a.start.add | a.start.delete
            used |= a.end.pre | a.end.add | a.end.delete | a.overall
            unknown = used - self.propositions
            if unknown:
                raise ModelError(
                    f"action {a.name} references unknown propositions {sorted(unknown)}"
                )
        if not self.init <= self.propositions:
            raise ModelError("init references unknown propositions")
        if not self.goal <= self.propositions:
            raise ModelError("goal references unknown propositions")

    def action(self, name: str) -> DurativeAction:
        for a in self.actions:
            if a.name == name:
                return a
        raise ModelError(f"unknown action {name!r}")

    def action_names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.actions)

    def snap_labels(self) -> frozenset[str]:
        out = set()
        for a in self.actions:
            out.add(snap_label(a.name, START))
            out.add(snap_label(a.name, END))
        return frozenset(out)


def apply_snap_action(state: frozenset[str], snap: SnapActionSpec) -> frozenset[str]:
    """Apply one snap action to a propositional state (set of true atoms)."""
    missing = snap.pre - state
    if missing:
        raise Inapplicable(f"precondition not satisfied: {sorted(missing)}")
    return (state - snap.delete) | snap.add


# ---------------------------------------------------------------------------
# Plans


@dataclass(frozen=True)
class PlanEntry:
    action: str
    start: Fraction
    duration: Fraction

    def __post_init__(self):
        object.__setattr__(self, "start", as_rational(self.start))
        object.__setattr__(self, "duration", as_rational(self.duration))
        if self.start < 0:
            raise ModelError(f"plan entry {self.action}: negative start time")
        if self.duration <= 0:
            raise ModelError(f"plan entry {self.action}: duration must be > 0")

    @property
    def end(self) -> Fraction:
        return self.start + self.duration


@dataclass(frozen=True)
class TimeTriggeredPlan:
    entries: tuple[PlanEntry, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        by_action: dict[str, list[PlanEntry]] = {}
        for e in self.entries:
            by_action.setdefault(e.action, []).append(e)
        for action, group in by_action.items():
            group.sort(key=lambda e: e.start)
            for a, b in zip(group, group[1:]):
                # no self-overlap: a later instance may not start inside [start, end)
                if b.start < a.end:
                    raise SelfOverlap(
                        f"action {action}: instance at {b.start} overlaps the one at {a.start}"
                    )

    @property
    def size(self) -> int:
        """Number of snap actions (two per entry)."""
        return 2 * len(self.entries)

    def makespan(self) -> Fraction:
        if not self.entries:
            return Fraction(0)
        return max(e.end for e in self.entries)


@dataclass(frozen=True)
class TimedSnapSequence:
    """Ordered snap events with strictly increasing rational timestamps."""

    events: tuple[tuple[Fraction, SnapEventRef], ...]

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        for (t1, _), (t2, _) in zip(self.events, self.events[1:]):
            if t1 >= t2:
                raise SimultaneousEvents(
                    f"snap events at {t1} and {t2} are not strictly ordered"
                )

    def __len__(self) -> int:
        return len(self.events)

    def times(self) -> tuple[Fraction, ...]:
        return tuple(t for t, _ in self.events)

    def prefix(self, i: int) -> "TimedSnapSequence":
        return TimedSnapSequence(self.events[:i])


def plan_to_snap_sequence(plan: TimeTriggeredPlan) -> TimedSnapSequence:
    """Order the start/end snaps of a plan by time.

    Raises SimultaneousEvents when two snap events collide (the execution
    semantics requires pairwise-distinct timestamps).
    """
    raw: list[tuple[Fraction, SnapEventRef]] = []
    for e in plan.entries:
        raw.append((e.start, SnapEventRef(e.action, START)))
        raw.append((e.end, SnapEventRef(e.action, END)))
    raw.sort(key=lambda te: te[0])
    for (t1, r1), (t2, r2) in zip(raw, raw[1:]):
        if t1 == t2:
            raise SimultaneousEvents(
                f"{r1.label} and {r2.label} both scheduled at t={t1}"
            )
    return TimedSnapSequence(tuple(raw))


def check_plan_against_problem(
    problem: TemporalPlanningProblem, plan: TimeTriggeredPlan
) -> None:
    """Duration-bounds and action-existence checks that need the problem."""
    for e in plan.entries:
        a = problem.action(e.action)
        if e.duration < a.lower or (a.upper is not None and e.duration > a.upper):
            upper = "inf" if a.upper is None else str(a.upper)
            raise ModelError(
                f"plan entry {e.action}: duration {e.duration} outside [{a.lower}, {upper}]"
            )


# ---------------------------------------------------------------------------
# Timed automata


@dataclass(frozen=True)
class ClockAtom:
    """x ~ n or x - y ~ n with integer constant n."""

    clock: str
    op: str
    bound: int
    other: str | None = None  # difference atom when set

    def __post_init__(self):
        if self.op not in COMPARISONS:
            raise ModelError(f"unknown comparison {self.op!r}")
        if not isinstance(self.bound, int):
            raise ModelError(f"clock-constraint constants must be integers, got {self.bound!r}")

    def holds(self, valuation: Mapping[str, Fraction]) -> bool:
        lhs = valuation[self.clock]
        if self.other is not None:
            lhs = lhs - valuation[self.other]
        if self.op == "<":
            return lhs < self.bound
        if self.op == "<=":
            return lhs <= self.bound
        if self.op == "=":
            return lhs == self.bound
        if self.op == ">=":
            return lhs >= self.bound
        return lhs > self.bound


@dataclass(frozen=True)
class ClockConstraint:
    """Conjunction of clock atoms; the empty conjunction is `true`."""

    atoms: tuple[ClockAtom, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))

    def holds(self, valuation: Mapping[str, Fraction]) -> bool:
        return all(a.holds(valuation) for a in self.atoms)

    def clocks(self) -> frozenset[str]:
        out = set()
        for a in self.atoms:
            out.add(a.clock)
            if a.other is not None:
                out.add(a.other)
        return frozenset(out)

    @property
    def is_true(self) -> bool:
        return not self.atoms


TRUE_CONSTRAINT = ClockConstraint()


@dataclass(frozen=True)
class Transition:
    src: str
    guard: ClockConstraint
    label: str
    resets: frozenset[str]
    dst: str

    def __post_init__(self):
        object.__setattr__(self, "resets", frozenset(self.resets))


@dataclass(frozen=True)
class TimedAutomaton:
    alphabet: frozenset[str]
    locations: frozenset[str]
    init_location: str
    clocks: tuple[str, ...]
    global_clock: str
    transitions: tuple[Transition, ...]
    invariants: Mapping[str, ClockConstraint] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "alphabet", frozenset(self.alphabet))
        object.__setattr__(self, "locations", frozenset(self.locations))
        object.__setattr__(self, "clocks", tuple(self.clocks))
        object.__setattr__(self, "transitions", tuple(self.transitions))
        object.__setattr__(self, "invariants", dict(self.invariants))
        if len(set(self.clocks)) != len(self.clocks):
            raise ModelError("duplicate clock names")
        if self.global_clock not in self.clocks:
            raise ModelError("the designated global clock must be declared")
        if self.init_location not in self.locations:
            raise ModelError(f"unknown initial location {self.init_location!r}")
        clockset = set(self.clocks)
        for loc, inv in self.invariants.items():
            if loc not in self.locations:
                raise ModelError(f"invariant on unknown location {loc!r}")
            if not inv.clocks() <= clockset:
                raise ModelError(f"invariant on {loc!r} uses unknown clocks")
        for t in self.transitions:
            if t.src not in self.locations or t.dst not in self.locations:
                raise ModelError(f"transition {t.label!r} touches unknown locations")
            if t.label not in self.alphabet:
                raise ModelError(f"transition label {t.label!r} not in alphabet")
            if not t.guard.clocks() <= clockset:
                raise ModelError(f"transition {t.label!r} guards unknown clocks")
            if not t.resets <= clockset:
                raise ModelError(f"transition {t.label!r} resets unknown clocks")
            if self.global_clock in t.resets:
                raise ModelError("the global clock must never be reset")

    def invariant(self, location: str) -> ClockConstraint:
        return self.invariants.get(location, TRUE_CONSTRAINT)

    def outgoing(self, location: str) -> tuple[Transition, ...]:
        return tuple(t for t in self.transitions if t.src == location)

    def snap_event_labels(self) -> frozenset[str]:
        return frozenset(l for l in self.alphabet if parse_snap_label(l) is not None)

    def internal_labels(self) -> frozenset[str]:
        return frozenset(l for l in self.alphabet if parse_snap_label(l) is None)

    def initial_valuation(self) -> dict[str, Fraction]:
        return {c: Fraction(0) for c in self.clocks}


@dataclass(frozen=True)
class TAState:
    location: str
    valuation: tuple[tuple[str, Fraction], ...]

    @staticmethod
    def make(location: str, valuation: Mapping[str, Fraction]) -> "TAState":
        items = tuple(sorted((k, as_rational(v)) for k, v in valuation.items()))
        return TAState(location, items)

    def clocks(self) -> dict[str, Fraction]:
        return dict(self.valuation)


def delay_valuation(valuation: Mapping[str, Fraction], d: Fraction) -> dict[str, Fraction]:
    d = as_rational(d)
    if d < 0:
        raise ModelError("negative delay")
    return {c: v + d for c, v in valuation.items()}


def apply_reset(valuation: Mapping[str, Fraction], resets: Iterable[str]) -> dict[str, Fraction]:
    resets = set(resets)
    return {c: (Fraction(0) if c in resets else v) for c, v in valuation.items()}


def eval_clock_constraint(cc: ClockConstraint, valuation: Mapping[str, Fraction]) -> bool:
    return cc.holds(valuation)


# ---------------------------------------------------------------------------
# The combined problem


@dataclass(frozen=True)
class BadStateSpec:
    """Bad platform states: pairs of (location, clock constraint)."""

    entries: tuple[tuple[str, ClockConstraint], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))

    def matches(self, state: TAState) -> bool:
        val = state.clocks()
        return any(
            loc == state.location and cc.holds(val) for loc, cc in self.entries
        )

    def constraints_for(self, location: str) -> tuple[ClockConstraint, ...]:
        return tuple(cc for loc, cc in self.entries if loc == location)


@dataclass(frozen=True)
class PAMPProblem:
    """A planning problem, its execution platform, and the bad-state spec."""

    problem: TemporalPlanningProblem
    automaton: TimedAutomaton
    bad: BadStateSpec
    kappa: int = 2

    def __post_init__(self):
        if not isinstance(self.kappa, int) or self.kappa < 1:
            raise ModelError("kappa must be a positive integer")
        missing = self.problem.snap_labels() - self.automaton.alphabet
        if missing:
            raise ModelError(
                f"platform alphabet misses snap-event labels {sorted(missing)}"
            )
        for loc, _ in self.bad.entries:
            if loc not in self.automaton.locations:
                raise ModelError(f"bad-state entry on unknown location {loc!r}")
        init_val = self.automaton.initial_valuation()
        if not self.automaton.invariant(self.automaton.init_location).holds(init_val):
            raise ModelError("initial location invariant fails at the zero valuation")
