"""Benchmark families and random instance generators.

Three scalable families: a factory line whose deadline lives in the platform
bad states (variant 1), a factory line without the wrapping process action
where the deadline is enforced by guards alone (variant 2), and a rover whose
platform is the product of a task unit and a communication unit that falls
into standby after long silences.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .model import (
    BadStateSpec,
    ClockAtom,
    ClockConstraint,
    DurativeAction,
    PAMPProblem,
    PlanEntry,
    SnapActionSpec,
    TRUE_CONSTRAINT,
    TemporalPlanningProblem,
    TimeTriggeredPlan,
    TimedAutomaton,
    Transition,
    snap_label,
)

# ---------------------------------------------------------------------------
# Factory family


def _cc(*atoms: ClockAtom) -> ClockConstraint:
    return ClockConstraint(atoms=tuple(atoms))


def _atom(clock: str, op: str, bound: int) -> ClockAtom:
    return ClockAtom(clock=clock, op=op, bound=bound)


def factory_problem(width: int, with_process: bool) -> TemporalPlanningProblem:
    # level counter kept unary: one proposition per completed stage
    props = [f"steps_{k}" for k in range(width + 1)]
    actions: list[DurativeAction] = []
    if with_process:
        props.append("processing")
        actions.append(
            DurativeAction(
                name="Process",
                start=SnapActionSpec(add=frozenset({"processing"})),
                end=SnapActionSpec(delete=frozenset({"processing"})),
                overall=frozenset(),
                lower=Fraction(1),
                upper=None,
            )
        )
    for k in range(1, width + 1):
        actions.append(
            DurativeAction(
                name=f"Work_{k}",
                start=SnapActionSpec(pre=frozenset({f"steps_{k - 1}"})),
                end=SnapActionSpec(
                    add=frozenset({f"steps_{k}"}), delete=frozenset({f"steps_{k - 1}"})
                ),
                overall=frozenset({"processing"}) if with_process else frozenset(),
                lower=Fraction(20),
                upper=Fraction(20),
            )
        )
    actions.append(
        DurativeAction(
            name="Cool",
            start=SnapActionSpec(),
            end=SnapActionSpec(),
            overall=frozenset(),
            lower=Fraction(2),
            upper=Fraction(2),
        )
    )
    return TemporalPlanningProblem(
        propositions=frozenset(props),
        actions=tuple(actions),
        init=frozenset({"steps_0"}),
        goal=frozenset({f"steps_{width}"}),
    )


def factory_platform_1(width: int, deadline: int) -> tuple[TimedAutomaton, BadStateSpec]:
    """Process wrapper present; exceeding the deadline reaches a bad location."""
    work_starts = [snap_label(f"Work_{k}", "start") for k in range(1, width + 1)]
    work_ends = [snap_label(f"Work_{k}", "end") for k in range(1, width + 1)]
    labels = (
        ["start:Process", "end:Process", "start:Cool", "end:Cool"]
        + work_starts
        + work_ends
        + ["work_ready", "resume_ready", "fault"]
    )
    locations = (
        "OFF",
        "P_STARTED",
        "W_STARTING",
        "W_STARTED",
        "W_RESUMING",
        "W_ENDED",
        "C_STARTED",
        "BAD",
        "P_ENDED",
    )
    transitions = [
        Transition("OFF", TRUE_CONSTRAINT, "start:Process", frozenset({"c_P"}), "P_STARTED"),
    ]
    for ws in work_starts:
        transitions.append(
            Transition("P_STARTED", TRUE_CONSTRAINT, ws, frozenset({"c_W"}), "W_STARTING")
        )
        transitions.append(
            Transition(
                "W_ENDED", _cc(_atom("c", ">=", 10)), ws, frozenset({"c_W"}), "W_RESUMING"
            )
        )
    transitions.append(
        Transition("W_STARTING", TRUE_CONSTRAINT, "work_ready", frozenset(), "W_STARTED")
    )
    transitions.append(
        Transition("W_RESUMING", TRUE_CONSTRAINT, "resume_ready", frozenset(), "W_STARTED")
    )
    for we in work_ends:
        transitions.append(
            Transition(
                "W_STARTED", _cc(_atom("c_W", "=", 20)), we, frozenset({"c"}), "W_ENDED"
            )
        )
    transitions.extend(
        [
            Transition(
                "W_ENDED", _cc(_atom("c_P", ">", deadline)), "fault", frozenset(), "BAD"
            ),
            Transition("W_ENDED", TRUE_CONSTRAINT, "end:Process", frozenset(), "P_ENDED"),
            Transition("W_ENDED", TRUE_CONSTRAINT, "start:Cool", frozenset({"c_C"}), "C_STARTED"),
            Transition(
                "C_STARTED", _cc(_atom("c_C", "=", 2)), "end:Cool", frozenset(), "P_STARTED"
            ),
            Transition("BAD", TRUE_CONSTRAINT, "end:Process", frozenset(), "P_ENDED"),
        ]
    )
    automaton = TimedAutomaton(
        alphabet=frozenset(labels),
        locations=locations,
        init_location="OFF",
        clocks=("g", "c_P", "c_W", "c_C", "c"),
        global_clock="g",
        transitions=tuple(transitions),
        invariants={
            "W_STARTING": _cc(_atom("c_W", "<=", 2)),
            "W_STARTED": _cc(_atom("c_W", "<=", 20)),
            "W_RESUMING": _cc(_atom("c_W", "<=", 2)),
            "C_STARTED": _cc(_atom("c_C", "<=", 2)),
        },
    )
    bad = BadStateSpec(entries=(("BAD", TRUE_CONSTRAINT),))
    return automaton, bad


def factory_platform_2(width: int, deadline: int) -> tuple[TimedAutomaton, BadStateSpec]:
    """No process wrapper; the deadline sits in guards, so late plans fail
    executability instead of safety."""
    work_starts = [snap_label(f"Work_{k}", "start") for k in range(1, width + 1)]
    work_ends = [snap_label(f"Work_{k}", "end") for k in range(1, width + 1)]
    labels = (
        ["start:Cool", "end:Cool"]
        + work_starts
        + work_ends
        + ["work_ready", "resume_ready"]
    )
    locations = (
        "IDLE",
        "W_STARTING",
        "W_STARTED",
        "W_RESUMING",
        "W_ENDED",
        "C_STARTED",
    )
    transitions = []
    for ws in work_starts:
        transitions.append(
            Transition(
                "IDLE", _cc(_atom("g", "<=", deadline)), ws, frozenset({"c_W"}), "W_STARTING"
            )
        )
        transitions.append(
            Transition(
                "W_ENDED",
                _cc(_atom("c", ">=", 10), _atom("g", "<=", deadline)),
                ws,
                frozenset({"c_W"}),
                "W_RESUMING",
            )
        )
    transitions.append(
        Transition("W_STARTING", TRUE_CONSTRAINT, "work_ready", frozenset(), "W_STARTED")
    )
    transitions.append(
        Transition("W_RESUMING", TRUE_CONSTRAINT, "resume_ready", frozenset(), "W_STARTED")
    )
    for we in work_ends:
        transitions.append(
            Transition(
                "W_STARTED",
                _cc(_atom("c_W", "=", 20), _atom("g", "<=", deadline)),
                we,
                frozenset({"c"}),
                "W_ENDED",
            )
        )
    transitions.extend(
        [
            Transition("W_ENDED", TRUE_CONSTRAINT, "start:Cool", frozenset({"c_C"}), "C_STARTED"),
            Transition("C_STARTED", _cc(_atom("c_C", "=", 2)), "end:Cool", frozenset(), "IDLE"),
        ]
    )
    automaton = TimedAutomaton(
        alphabet=frozenset(labels),
        locations=locations,
        init_location="IDLE",
        clocks=("g", "c_W", "c_C", "c"),
        global_clock="g",
        transitions=tuple(transitions),
        invariants={
            "W_STARTING": _cc(_atom("c_W", "<=", 2)),
            "W_STARTED": _cc(_atom("c_W", "<=", 20)),
            "W_RESUMING": _cc(_atom("c_W", "<=", 2)),
            "C_STARTED": _cc(_atom("c_C", "<=", 2)),
        },
    )
    return automaton, BadStateSpec(entries=())


def gen_factory(width: int, deadline: int, kappa: int, variant: int = 1) -> PAMPProblem:
    if variant == 1:
        problem = factory_problem(width, with_process=True)
        automaton, bad = factory_platform_1(width, deadline)
    elif variant == 2:
        problem = factory_problem(width, with_process=False)
        automaton, bad = factory_platform_2(width, deadline)
    else:
        raise ValueError(f"unknown factory variant {variant!r}")
    return PAMPProblem(problem=problem, automaton=automaton, bad=bad, kappa=kappa)


def factory_plan_late(width: int = 2) -> TimeTriggeredPlan:
    """Back-to-back work with the resume gap; misses deadline 50 at width 2."""
    entries = [PlanEntry("Process", Fraction(0), Fraction(55))]
    t = Fraction(1)
    for k in range(1, width + 1):
        entries.append(PlanEntry(f"Work_{k}", t, Fraction(20)))
        t += Fraction(31)  # 20 of work plus the shortest admissible resume gap
    return TimeTriggeredPlan(entries=tuple(entries))


def factory_plan_rushed(width: int = 2) -> TimeTriggeredPlan:
    """Starts the next work stage one time unit after the previous one ends,
    inside the platform's mandatory gap."""
    entries = [PlanEntry("Process", Fraction(0), Fraction(45))]
    t = Fraction(1)
    for k in range(1, width + 1):
        entries.append(PlanEntry(f"Work_{k}", t, Fraction(20)))
        t += Fraction(21)
    return TimeTriggeredPlan(entries=tuple(entries))


def factory_plan_cooled(width: int = 2) -> TimeTriggeredPlan:
    """Interleaves cooling pauses so every stage restarts from a fresh state."""
    entries = []
    t = Fraction(1)
    for k in range(1, width + 1):
        entries.append(PlanEntry(f"Work_{k}", t, Fraction(20)))
        t += Fraction(20)
        if k < width:
            entries.append(PlanEntry("Cool", t + 1, Fraction(2)))
            t += Fraction(4)
    entries.insert(0, PlanEntry("Process", Fraction(0), t + 1))
    return TimeTriggeredPlan(entries=tuple(entries))


# ---------------------------------------------------------------------------
# Rover family


@dataclass(frozen=True)
class _Component:
    locations: tuple[str, ...]
    init: str
    clocks: tuple[str, ...]
    transitions: tuple[Transition, ...]
    invariants: dict[str, ClockConstraint] = field(default_factory=dict)

    def alphabet(self) -> frozenset[str]:
        return frozenset(t.label for t in self.transitions)


def _compose(
    left: _Component,
    right: _Component,
    *,
    global_clock: str,
    extra_labels: frozenset[str] = frozenset(),
) -> TimedAutomaton:
    """Synchronous product on shared labels; interleaving elsewhere."""
    shared = left.alphabet() & right.alphabet()
    locations = tuple(f"{a}.{b}" for a in left.locations for b in right.locations)
    transitions: list[Transition] = []
    for a in left.locations:
        for b in right.locations:
            src = f"{a}.{b}"
            for ta in left.transitions:
                if ta.src != a:
                    continue
                if ta.label in shared:
                    for tb in right.transitions:
                        if tb.src != b or tb.label != ta.label:
                            continue
                        guard = ClockConstraint(atoms=ta.guard.atoms + tb.guard.atoms)
                        transitions.append(
                            Transition(
                                src,
                                guard,
                                ta.label,
                                ta.resets | tb.resets,
                                f"{ta.dst}.{tb.dst}",
                            )
                        )
                else:
                    transitions.append(
                        Transition(src, ta.guard, ta.label, ta.resets, f"{ta.dst}.{b}")
                    )
            for tb in right.transitions:
                if tb.src != b or tb.label in shared:
                    continue
                transitions.append(
                    Transition(src, tb.guard, tb.label, tb.resets, f"{a}.{tb.dst}")
                )
    invariants: dict[str, ClockConstraint] = {}
    for a in left.locations:
        for b in right.locations:
            atoms = left.invariants.get(a, TRUE_CONSTRAINT).atoms
            atoms = atoms + right.invariants.get(b, TRUE_CONSTRAINT).atoms
            if atoms:
                invariants[f"{a}.{b}"] = ClockConstraint(atoms=atoms)
    return TimedAutomaton(
        alphabet=left.alphabet() | right.alphabet() | extra_labels,
        locations=locations,
        init_location=f"{left.init}.{right.init}",
        clocks=(global_clock,) + left.clocks + right.clocks,
        global_clock=global_clock,
        transitions=tuple(transitions),
        invariants=invariants,
    )


def rover_problem(n: int, comm: tuple[int, ...]) -> TemporalPlanningProblem:
    props = [f"at_{i}" for i in range(n)] + [f"sent_{j}" for j in comm]
    actions: list[DurativeAction] = []
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            dur = Fraction(1) if abs(i - j) == 1 else Fraction(100)
            actions.append(
                DurativeAction(
                    name=f"Move_{i}_{j}",
                    start=SnapActionSpec(
                        pre=frozenset({f"at_{i}"}), delete=frozenset({f"at_{i}"})
                    ),
                    end=SnapActionSpec(add=frozenset({f"at_{j}"})),
                    overall=frozenset(),
                    lower=dur,
                    upper=dur,
                )
            )
    for j in comm:
        actions.append(
            DurativeAction(
                name=f"Comm_{j}",
                start=SnapActionSpec(pre=frozenset({f"at_{j}"})),
                end=SnapActionSpec(add=frozenset({f"sent_{j}"})),
                overall=frozenset({f"at_{j}"}),
                lower=Fraction(1),
                upper=Fraction(1),
            )
        )
    goal = {f"sent_{j}" for j in comm} | {f"at_{n - 1}"}
    return TemporalPlanningProblem(
        propositions=frozenset(props),
        actions=tuple(actions),
        init=frozenset({"at_0"}),
        goal=frozenset(goal),
    )


def rover_platform(
    problem: TemporalPlanningProblem, comm: tuple[int, ...]
) -> tuple[TimedAutomaton, BadStateSpec]:
    """Task unit (frozen while the radio resumes) times a communication unit
    that may drop to standby 30 time units after the last message."""
    snaps = sorted(problem.snap_labels())
    comm_ends = [snap_label(f"Comm_{j}", "end") for j in comm]
    task_transitions = [
        Transition("T_RUN", TRUE_CONSTRAINT, lab, frozenset(), "T_RUN") for lab in snaps
    ]
    task_transitions.append(
        Transition("T_RUN", TRUE_CONSTRAINT, "rs", frozenset(), "T_RESUMING")
    )
    task_transitions.append(
        Transition("T_RESUMING", TRUE_CONSTRAINT, "re", frozenset(), "T_RUN")
    )
    task = _Component(
        locations=("T_RUN", "T_RESUMING"),
        init="T_RUN",
        clocks=(),
        transitions=tuple(task_transitions),
    )
    comm_transitions = []
    for lab in comm_ends:
        comm_transitions.append(
            Transition("CU_IDLE", TRUE_CONSTRAINT, lab, frozenset({"c_m"}), "CU_ACTIVE")
        )
        comm_transitions.append(
            Transition("CU_ACTIVE", TRUE_CONSTRAINT, lab, frozenset({"c_m"}), "CU_ACTIVE")
        )
    comm_transitions.extend(
        [
            Transition(
                "CU_ACTIVE", _cc(_atom("c_m", ">=", 30)), "sb", frozenset(), "CU_STANDBY"
            ),
            Transition("CU_STANDBY", TRUE_CONSTRAINT, "rs", frozenset({"c_r"}), "CU_RESUMING"),
            Transition(
                "CU_RESUMING", _cc(_atom("c_r", "=", 2)), "re", frozenset({"c_m"}), "CU_ACTIVE"
            ),
        ]
    )
    unit = _Component(
        locations=("CU_IDLE", "CU_ACTIVE", "CU_STANDBY", "CU_RESUMING"),
        init="CU_IDLE",
        clocks=("c_m", "c_r"),
        transitions=tuple(comm_transitions),
    )
    automaton = _compose(task, unit, global_clock="g")
    bad = BadStateSpec(
        entries=tuple(
            (f"T_RESUMING.{b}", TRUE_CONSTRAINT) for b in unit.locations
        )
    )
    return automaton, bad


def gen_rover(n: int, comm: tuple[int, ...], kappa: int) -> PAMPProblem:
    problem = rover_problem(n, comm)
    automaton, bad = rover_platform(problem, comm)
    return PAMPProblem(problem=problem, automaton=automaton, bad=bad, kappa=kappa)


# ---------------------------------------------------------------------------
# Random instances for differential testing


_DENOMS = (1, 1, 2, 4)


def _rand_time(rng: random.Random, lo: int = 0, hi: int = 8) -> Fraction:
    return Fraction(rng.randint(lo * 4, hi * 4), rng.choice(_DENOMS))


def random_check_triple(
    rng: random.Random,
) -> tuple[TimeTriggeredPlan, TimedAutomaton, BadStateSpec, int]:
    """A small plan, platform, and bad-state set for oracle-vs-solver runs.

    At most three actions (six snap events), six locations, three clocks,
    and kappa up to three.  The plan is never empty.
    """
    n_actions = rng.randint(1, 3)
    entries = []
    used: set[Fraction] = set()
    for idx in range(n_actions):
        for _ in range(64):
            start = _rand_time(rng)
            dur = _rand_time(rng, 1, 6)
            if dur == 0:
                continue
            if start in used or (start + dur) in used or start + dur == start:
                continue
            used.add(start)
            used.add(start + dur)
            entries.append(PlanEntry(f"A{idx}", start, dur))
            break
    plan = TimeTriggeredPlan(entries=tuple(entries))
    labels = [snap_label(e.action, kind) for e in entries for kind in ("start", "end")]
    n_locs = rng.randint(2, 6)
    locations = tuple(f"L{i}" for i in range(n_locs))
    clocks = ("g",) + tuple(f"x{i}" for i in range(rng.randint(0, 2)))
    resettable = clocks[1:]

    def rand_guard() -> ClockConstraint:
        atoms = []
        for _ in range(rng.randint(0, 2)):
            clock = rng.choice(clocks)
            op = rng.choice(("<", "<=", "=", ">=", ">"))
            atoms.append(_atom(clock, op, rng.randint(0, 9)))
        return ClockConstraint(atoms=tuple(atoms))

    def rand_resets() -> frozenset[str]:
        return frozenset(c for c in resettable if rng.random() < 0.3)

    transitions = []
    for lab in labels:
        for _ in range(rng.randint(1, 2)):
            transitions.append(
                Transition(
                    rng.choice(locations), rand_guard(), lab, rand_resets(), rng.choice(locations)
                )
            )
    internal = [f"i{k}" for k in range(rng.randint(0, 2))]
    for lab in internal:
        transitions.append(
            Transition(
                rng.choice(locations), rand_guard(), lab, rand_resets(), rng.choice(locations)
            )
        )
    invariants = {}
    for loc in locations:
        if rng.random() < 0.25 and resettable:
            invariants[loc] = _cc(_atom(rng.choice(resettable), "<=", rng.randint(1, 9)))
    automaton = TimedAutomaton(
        alphabet=frozenset(labels) | frozenset(internal),
        locations=locations,
        init_location=locations[0],
        clocks=clocks,
        global_clock="g",
        transitions=tuple(transitions),
        invariants=invariants,
    )
    bad_entries = []
    for _ in range(rng.randint(0, 2)):
        cc = rand_guard() if rng.random() < 0.5 else TRUE_CONSTRAINT
        bad_entries.append((rng.choice(locations), cc))
    bad = BadStateSpec(entries=tuple(bad_entries))
    kappa = rng.randint(1, 3)
    return plan, automaton, bad, kappa


def plan_actions(plan: TimeTriggeredPlan) -> tuple[DurativeAction, ...]:
    """Free durative actions matching a plan's entries, for checks that need
    an action table but no planning problem."""
    out = []
    for name in sorted({e.action for e in plan.entries}):
        durs = [e.duration for e in plan.entries if e.action == name]
        out.append(
            DurativeAction(
                name=name,
                start=SnapActionSpec(),
                end=SnapActionSpec(),
                overall=frozenset(),
                lower=min(durs),
                upper=max(durs),
            )
        )
    return tuple(out)


def random_pamp_instance(rng: random.Random) -> PAMPProblem:
    """A full planning-with-platform instance small enough for both solver
    modes to finish quickly."""
    n_props = rng.randint(1, 3)
    props = [f"p{i}" for i in range(n_props)]
    n_actions = rng.randint(1, 2)
    actions = []
    for idx in range(n_actions):
        pre = frozenset(p for p in props if rng.random() < 0.3)
        add = frozenset(p for p in props if rng.random() < 0.5)
        delete = frozenset(p for p in props if p not in add and rng.random() < 0.2)
        lower = Fraction(rng.randint(1, 3))
        actions.append(
            DurativeAction(
                name=f"A{idx}",
                start=SnapActionSpec(pre=pre),
                end=SnapActionSpec(add=add, delete=delete),
                overall=frozenset(),
                lower=lower,
                upper=lower if rng.random() < 0.7 else None,
            )
        )
    init = frozenset(p for p in props if rng.random() < 0.5)
    adds = {p for a in actions for p in a.end.add} | init
    goal_pool = sorted(adds) or props
    goal = frozenset({rng.choice(goal_pool)})
    problem = TemporalPlanningProblem(
        propositions=frozenset(props),
        actions=tuple(actions),
        init=init,
        goal=goal,
    )
    labels = sorted(problem.snap_labels())
    n_locs = rng.randint(1, 3)
    locations = tuple(f"L{i}" for i in range(n_locs))
    clocks = ("g",) + (("x",) if rng.random() < 0.5 else ())

    transitions = []
    for lab in labels:
        for _ in range(rng.randint(1, 2)):
            atoms = []
            if rng.random() < 0.4:
                atoms.append(_atom(rng.choice(clocks), rng.choice(("<=", ">=")), rng.randint(0, 6)))
            resets = frozenset(c for c in clocks[1:] if rng.random() < 0.4)
            transitions.append(
                Transition(
                    rng.choice(locations),
                    ClockConstraint(atoms=tuple(atoms)),
                    lab,
                    resets,
                    rng.choice(locations),
                )
            )
    automaton = TimedAutomaton(
        alphabet=frozenset(labels),
        locations=locations,
        init_location=locations[0],
        clocks=clocks,
        global_clock="g",
        transitions=tuple(transitions),
        invariants={},
    )
    bad_entries = []
    if rng.random() < 0.4:
        loc = rng.choice(locations)
        cc = (
            _cc(_atom("g", ">", rng.randint(2, 8)))
            if rng.random() < 0.6
            else TRUE_CONSTRAINT
        )
        bad_entries.append((loc, cc))
    return PAMPProblem(
        problem=problem,
        automaton=automaton,
        bad=BadStateSpec(entries=tuple(bad_entries)),
        kappa=rng.randint(1, 2),
    )
