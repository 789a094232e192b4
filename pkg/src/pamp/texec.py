"""Plan execution semantics on the platform: symbolic exploration of every
compliant run of the timed automaton, executability and safety checks, and
replayable concrete witnesses.

Step accounting mirrors the bounded trace encoding exactly: a budget of
kappa * |sequence| state slots admits at most kappa*|sequence| - 1 discrete
steps after the initial state, and checks on states that need a further
delay (mid-delay observations) cost one extra slot.  Matched events pin the
global clock to their timestamps; unmatched steps may only take labels that
are not snap-event labels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from .model import (
    BadStateSpec,
    ModelError,
    TAState,
    TimedAutomaton,
    TimedSnapSequence,
    Transition,
    parse_snap_label,
)
from .zones import (
    INF,
    Bound,
    Zone,
    bound_le,
    zone_constrain,
    zone_constrain_bound,
    zone_equal_const,
    zone_init,
    zone_reset,
    zone_sample,
    zone_subtract,
    zone_up,
)
from .zones import constraint_after_reset

VERDICT_SOLUTION = "SOLUTION"
VERDICT_NO_SOLUTION = "NO-SOLUTION-WITHIN-BOUND"
VERDICT_UNSAFE = "UNSAFE"
VERDICT_NON_EXECUTABLE = "NON-EXECUTABLE"
VERDICT_INVALID_PLAN = "INVALID-PLAN"
VERDICT_UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class RunStep:
    """One concrete step: a delay, then a transition (label None = pure delay)."""

    delay: Fraction
    label: str | None
    location: str
    clocks: dict[str, Fraction]
    matched: int | None = None  # 1-based plan-event index for matched steps
    note: str | None = None

    def to_data(self) -> dict:
        from .formats import rat_to_text

        out = {
            "delay": rat_to_text(self.delay),
            "label": self.label,
            "location": self.location,
            "clocks": {c: rat_to_text(v) for c, v in sorted(self.clocks.items())},
        }
        if self.matched is not None:
            out["matched"] = self.matched
        if self.note:
            out["note"] = self.note
        return out


@dataclass(frozen=True)
class Witness:
    """Replayable evidence for an executability or safety violation."""

    kind: str  # "non-executable" | "unsafe"
    run: tuple[RunStep, ...]
    state: TAState
    time: Fraction
    prefix: int
    event: str | None = None  # the snap label that is not applicable
    detail: str = ""
    steps: int | None = None  # discrete steps the run charges against the budget

    def to_data(self) -> dict:
        from .formats import rat_to_text

        out = {
            "kind": self.kind,
            "time": rat_to_text(self.time),
            "prefix": self.prefix,
            "state": {
                "location": self.state.location,
                "clocks": {c: rat_to_text(v) for c, v in sorted(self.state.clocks().items())},
            },
            "run": [s.to_data() for s in self.run],
        }
        if self.event is not None:
            out["event"] = self.event
        if self.detail:
            out["detail"] = self.detail
        if self.steps is not None:
            out["steps"] = self.steps
        return out


@dataclass
class Node:
    """Search node: a set of clock valuations at a location after consuming a
    prefix of the snap sequence with a known number of discrete steps."""

    location: str
    zone: Zone
    matched: int
    steps: int
    tagged: bool = False
    parent: "Node | None" = None
    via_kind: str = "init"  # init | internal | event | tag | observe
    via_transition: Transition | None = None
    pre_reset_zone: Zone | None = None  # zone after delay+guard, before reset

    def depth_path(self) -> list["Node"]:
        path: list[Node] = []
        n: Node | None = self
        while n is not None:
            path.append(n)
            n = n.parent
        path.reverse()
        return path


def _snapset(automaton: TimedAutomaton, snap_labels) -> frozenset[str]:
    if snap_labels is None:
        return automaton.snap_event_labels()
    return frozenset(snap_labels)


def _delayed(automaton: TimedAutomaton, node: Node) -> Zone:
    z = zone_up(node.zone)
    return zone_constrain(z, automaton.invariant(node.location))


def _gamma_upper(z: Zone, automaton: TimedAutomaton, t: Fraction, strict: bool = False) -> Zone:
    return zone_constrain_bound(z, automaton.global_clock, None, (t, strict))


class _Search:
    """Shared successor generation with zone-inclusion subsumption."""

    def __init__(
        self,
        automaton: TimedAutomaton,
        sequence: TimedSnapSequence,
        snap_labels: frozenset[str],
        max_discrete: int,
        trailing_bound: Fraction | None,
    ):
        self.automaton = automaton
        self.sequence = sequence
        self.snaps = snap_labels
        self.max_discrete = max_discrete
        self.trailing_bound = trailing_bound
        self.seen: dict[tuple[str, int, bool], list[tuple[Zone, int]]] = {}

    def root(self) -> Node | None:
        aut = self.automaton
        z = zone_constrain(zone_init(aut.clocks), aut.invariant(aut.init_location))
        if z.is_empty():
            return None
        return Node(aut.init_location, z, matched=0, steps=0)

    def subsumed(self, node: Node) -> bool:
        key = (node.location, node.matched, node.tagged)
        entries = self.seen.setdefault(key, [])
        for zone, steps in entries:
            if steps <= node.steps and node.zone.is_subset(zone):
                return True
        entries[:] = [
            (zone, steps)
            for zone, steps in entries
            if not (node.steps <= steps and zone.is_subset(node.zone))
        ]
        entries.append((node.zone, node.steps))
        return False

    def successors(self, node: Node) -> Iterator[Node]:
        if node.steps >= self.max_discrete:
            return
        aut = self.automaton
        zd = _delayed(aut, node)
        if zd.is_empty():
            return
        n_events = len(self.sequence)
        if node.matched < n_events:
            t_next, ref = self.sequence.events[node.matched]
            bound: Fraction | None = t_next
        else:
            ref = None
            bound = self.trailing_bound
        zd_int = zd if bound is None else _gamma_upper(zd, aut, bound)
        for tr in aut.outgoing(node.location):
            if tr.label in self.snaps:
                if ref is not None and tr.label == ref.label:
                    base = zone_equal_const(zd, aut.global_clock, t_next)
                    child = self._fire(node, tr, base, matched=node.matched + 1, kind="event")
                    if child is not None:
                        yield child
                continue
            if zd_int.is_empty():
                continue
            child = self._fire(node, tr, zd_int, matched=node.matched, kind="internal")
            if child is not None:
                yield child

    def _fire(self, node: Node, tr: Transition, base: Zone, matched: int, kind: str) -> Node | None:
        if base.is_empty():
            return None
        z = zone_constrain(base, tr.guard)
        if z.is_empty():
            return None
        inv_dst = self.automaton.invariant(tr.dst)
        pre = constraint_after_reset(inv_dst, tr.resets)
        if pre is None:
            return None
        z = zone_constrain(z, pre)
        if z.is_empty():
            return None
        pre_reset = z
        z = zone_reset(z, tr.resets)
        z = zone_constrain(z, inv_dst)
        if z.is_empty():
            return None
        return Node(
            tr.dst,
            z,
            matched=matched,
            steps=node.steps + 1,
            tagged=node.tagged,
            parent=node,
            via_kind=kind,
            via_transition=tr,
            pre_reset_zone=pre_reset,
        )


def slot_budget(kappa: int, size: int) -> int:
    """Discrete-step budget for a sequence of `size` snap events."""
    return max(kappa * size - 1, 0)


def enumerate_compliant_runs(
    automaton: TimedAutomaton,
    sequence: TimedSnapSequence,
    *,
    max_discrete: int,
    snap_labels=None,
    trailing_bound: Fraction | None = None,
) -> Iterator[Node]:
    """Depth-first enumeration of symbolic nodes of compliant runs.

    Yields every non-subsumed node (including the root).  `max_discrete`
    bounds the number of discrete steps; `trailing_bound` optionally caps the
    global clock for internal steps taken after the last event matched.
    """
    search = _Search(
        automaton, sequence, _snapset(automaton, snap_labels), max_discrete, trailing_bound
    )
    root = search.root()
    if root is None:
        return
    stack = [root]
    while stack:
        node = stack.pop()
        if search.subsumed(node):
            continue
        yield node
        stack.extend(search.successors(node))


def final_locations(
    automaton: TimedAutomaton,
    sequence: TimedSnapSequence,
    *,
    max_discrete: int,
    snap_labels=None,
) -> frozenset[str]:
    """Locations reachable by runs that matched the whole sequence."""
    out = set()
    for node in enumerate_compliant_runs(
        automaton, sequence, max_discrete=max_discrete, snap_labels=snap_labels
    ):
        if node.matched == len(sequence):
            out.add(node.location)
    return frozenset(out)


# ---------------------------------------------------------------------------
# Witness construction


def _pick_delay(zone: Zone, point: dict[str, Fraction]) -> Fraction:
    """Pick d >= 0 with point - d inside zone (zone canonical, must exist)."""
    lo: Bound = (Fraction(0), False)
    hi: Bound = (INF, True)
    for i, clock in enumerate(zone.clocks):
        idx = i + 1
        ub = zone.m[idx][0]  # x <= ub
        lb = zone.m[0][idx]  # -x <= lb  =>  x >= -lb
        v = point[clock]
        if ub[0] != INF:
            cand = (v - ub[0], ub[1])  # d >= v - ub (strict when ub strict)
            if cand[0] > lo[0] or (cand[0] == lo[0] and cand[1] and not lo[1]):
                lo = cand
        if lb[0] != INF:
            cand2 = (v + lb[0], lb[1])  # d <= v + lb
            if cand2[0] < hi[0] or (cand2[0] == hi[0] and cand2[1] and not hi[1]):
                hi = cand2
    if hi[0] == INF:
        return lo[0] + 1 if lo[1] else lo[0]
    if lo[0] == hi[0]:
        if lo[1] or hi[1]:
            raise ModelError("empty delay interval during witness extraction")
        return lo[0]
    if lo[0] > hi[0]:
        raise ModelError("inverted delay interval during witness extraction")
    return (lo[0] + hi[0]) / 2


def _concretize(
    automaton: TimedAutomaton,
    path: list[Node],
    final_point: dict[str, Fraction],
) -> list[tuple[Fraction, dict[str, Fraction]]]:
    """Assign concrete pre/post valuations to every node on the path.

    Returns, per node, the (delay-before, valuation-after) pair.  The root
    gets delay 0 and the zero valuation.
    """
    points: list[dict[str, Fraction] | None] = [None] * len(path)
    points[-1] = dict(final_point)
    delays: list[Fraction] = [Fraction(0)] * len(path)
    for i in range(len(path) - 1, 0, -1):
        node = path[i]
        parent = path[i - 1]
        v_after = points[i]
        assert v_after is not None
        if node.via_kind in ("internal", "event"):
            tr = node.via_transition
            assert tr is not None and node.pre_reset_zone is not None
            fixed = {
                c: v_after[c] for c in automaton.clocks if c not in tr.resets
            }
            w = node.pre_reset_zone
            for c, val in fixed.items():
                w = zone_equal_const(w, c, val)
            if w.is_empty():
                raise ModelError("witness concretization lost feasibility")
            v_mid = zone_sample(w)
        else:  # tag / observe: pure delay, valuation unchanged
            v_mid = dict(v_after)
        d = _pick_delay(parent.zone, v_mid)
        delays[i] = d
        points[i - 1] = {c: v_mid[c] - d for c in automaton.clocks}
        points[i] = v_after if node.via_kind in ("internal", "event") else v_mid
    out = []
    for i, node in enumerate(path):
        assert points[i] is not None
        out.append((delays[i], points[i]))
    return out


def _witness_run(
    automaton: TimedAutomaton,
    path: list[Node],
    final_point: dict[str, Fraction],
) -> tuple[RunStep, ...]:
    concrete = _concretize(automaton, path, final_point)
    steps: list[RunStep] = []
    for node, (delay, vals) in zip(path, concrete):
        label = node.via_transition.label if node.via_transition is not None else None
        matched = None
        if node.via_kind == "event":
            matched = node.matched
        note = None
        if node.via_kind == "tag":
            note = "bad-state"
        elif node.via_kind == "observe":
            note = "observation"
        elif node.via_kind == "init":
            note = "initial"
        steps.append(
            RunStep(
                delay=delay,
                label=label,
                location=node.location,
                clocks=dict(vals),
                matched=matched,
                note=note,
            )
        )
    return tuple(steps)


# ---------------------------------------------------------------------------
# Checks


def check_executability(
    automaton: TimedAutomaton,
    sequence: TimedSnapSequence,
    kappa: int,
    *,
    snap_labels=None,
) -> Witness | None:
    """None when every event is applicable in every reachable state at its
    timestamp; otherwise a witness pinning the inapplicable state."""
    snaps = _snapset(automaton, snap_labels)
    max_discrete = slot_budget(kappa, len(sequence))
    search = _Search(automaton, sequence, snaps, max_discrete, trailing_bound=None)
    root = search.root()
    if root is None:
        return None
    stack = [root]
    while stack:
        node = stack.pop()
        if search.subsumed(node):
            continue
        w = _exec_violation(automaton, search, node)
        if w is not None:
            return w
        stack.extend(search.successors(node))
    return None


def _exec_violation(automaton: TimedAutomaton, search: _Search, node: Node) -> Witness | None:
    if node.matched >= len(search.sequence):
        return None
    t_next, ref = search.sequence.events[node.matched]
    candidates: list[tuple[Zone, bool]] = []
    instant = zone_equal_const(node.zone, automaton.global_clock, t_next)
    if not instant.is_empty():
        candidates.append((instant, False))
    if node.steps < search.max_discrete:
        delayed = zone_equal_const(_delayed(automaton, node), automaton.global_clock, t_next)
        if not delayed.is_empty():
            candidates.append((delayed, True))
    for obs, is_delayed in candidates:
        enabled: list[Zone] = []
        for tr in automaton.outgoing(node.location):
            if tr.label != ref.label:
                continue
            pre = constraint_after_reset(automaton.invariant(tr.dst), tr.resets)
            if pre is None:
                continue
            region = zone_constrain(zone_constrain(obs, tr.guard), pre)
            if not region.is_empty():
                enabled.append(region)
        uncovered = zone_subtract(obs, enabled)
        if not uncovered:
            continue
        bad_zone = uncovered[0]
        point = zone_sample(bad_zone)
        observe = Node(
            node.location,
            bad_zone,
            matched=node.matched,
            steps=node.steps + (1 if is_delayed else 0),
            parent=node,
            via_kind="observe",
        )
        run = _witness_run(automaton, observe.depth_path(), point)
        return Witness(
            kind="non-executable",
            run=run,
            state=TAState.make(node.location, point),
            time=t_next,
            prefix=node.matched,
            event=ref.label,
            detail=(
                f"event {ref.label} is not applicable at t={t_next} in a reachable state"
            ),
            steps=observe.steps,
        )
    return None


def check_safety(
    automaton: TimedAutomaton,
    sequence: TimedSnapSequence,
    bad: BadStateSpec,
    kappa: int,
    *,
    snap_labels=None,
) -> Witness | None:
    """None when no compliant run visits a bad state at or before the last
    timestamp; otherwise a witness whose run completes the whole sequence."""
    snaps = _snapset(automaton, snap_labels)
    max_discrete = slot_budget(kappa, len(sequence))
    t_n = sequence.events[-1][0] if len(sequence) else Fraction(0)
    search = _Search(automaton, sequence, snaps, max_discrete, trailing_bound=t_n)
    root = search.root()
    if root is None:
        return None
    stack = [root]
    while stack:
        node = stack.pop()
        if search.subsumed(node):
            continue
        if node.tagged and node.matched == len(sequence):
            return _safety_witness(automaton, node, t_n)
        if not node.tagged:
            for tagged in _tag_steps(automaton, search, node, bad, t_n):
                stack.append(tagged)
        stack.extend(search.successors(node))
    return None


def _tag_steps(
    automaton: TimedAutomaton,
    search: _Search,
    node: Node,
    bad: BadStateSpec,
    t_n: Fraction,
) -> Iterator[Node]:
    constraints = bad.constraints_for(node.location)
    if not constraints:
        return
    if node.matched < len(search.sequence):
        next_bound = search.sequence.events[node.matched][0]
    else:
        next_bound = None
    for cc in constraints:
        instant = _gamma_upper(zone_constrain(node.zone, cc), automaton, t_n)
        if not instant.is_empty():
            yield Node(
                node.location,
                instant,
                matched=node.matched,
                steps=node.steps,
                tagged=True,
                parent=node,
                via_kind="tag",
            )
        if node.steps < search.max_discrete:
            z = _gamma_upper(zone_constrain(_delayed(automaton, node), cc), automaton, t_n)
            if next_bound is not None:
                z = _gamma_upper(z, automaton, next_bound)
            if not z.is_empty():
                yield Node(
                    node.location,
                    z,
                    matched=node.matched,
                    steps=node.steps + 1,
                    tagged=True,
                    parent=node,
                    via_kind="tag",
                )


def _safety_witness(automaton: TimedAutomaton, node: Node, t_n: Fraction) -> Witness:
    path = node.depth_path()
    point = zone_sample(node.zone)
    run = _witness_run(automaton, path, point)
    tag_index = max(i for i, n in enumerate(path) if n.via_kind == "tag")
    tag_step = run[tag_index]
    state = TAState.make(tag_step.location, tag_step.clocks)
    return Witness(
        kind="unsafe",
        run=run,
        state=state,
        time=tag_step.clocks[automaton.global_clock],
        prefix=path[tag_index].matched,
        detail=(
            f"a compliant run visits a bad state at t={tag_step.clocks[automaton.global_clock]}"
            f" (window ends at {t_n})"
        ),
        steps=node.steps,
    )


# ---------------------------------------------------------------------------
# Plan validity against the planning problem alone


def check_plan_validity(problem, plan) -> str | None:
    """None when the plan satisfies the planning-problem semantics; otherwise
    a human-readable defect: durations, simultaneity, preconditions, holding
    conditions between the snaps of an instance, or a missed goal."""
    from .model import (
        Inapplicable,
        SimultaneousEvents,
        check_plan_against_problem,
        apply_snap_action,
        plan_to_snap_sequence,
    )

    try:
        check_plan_against_problem(problem, plan)
        sequence = plan_to_snap_sequence(plan)
    except ModelError as exc:
        return str(exc)
    state = problem.init
    for t, ref in sequence.events:
        action = problem.action(ref.action)
        try:
            state = apply_snap_action(state, action.snap(ref.kind))
        except Inapplicable as exc:
            return f"{ref.label} at t={t}: {exc}"
        for e in plan.entries:
            if e.start <= t < e.end:
                overall = problem.action(e.action).overall
                missing = overall - state
                if missing:
                    return (
                        f"holding condition of {e.action} broken at t={t}:"
                        f" {sorted(missing)} not true"
                    )
    missing_goal = problem.goal - state
    if missing_goal:
        return f"goal not reached: {sorted(missing_goal)} not true at the end"
    return None


@dataclass(frozen=True)
class ValidationOutcome:
    verdict: str
    witness: Witness | None = None
    detail: str = ""


def validate_plan(pamp, plan) -> ValidationOutcome:
    """Full plan check: problem semantics first, then executability on the
    platform, then safety.  The verdict reflects the first failure."""
    defect = check_plan_validity(pamp.problem, plan)
    if defect is not None:
        return ValidationOutcome(VERDICT_INVALID_PLAN, detail=defect)
    from .model import plan_to_snap_sequence

    sequence = plan_to_snap_sequence(plan)
    snaps = pamp.problem.snap_labels()
    w = check_executability(pamp.automaton, sequence, pamp.kappa, snap_labels=snaps)
    if w is not None:
        return ValidationOutcome(VERDICT_NON_EXECUTABLE, witness=w, detail=w.detail)
    w = check_safety(pamp.automaton, sequence, pamp.bad, pamp.kappa, snap_labels=snaps)
    if w is not None:
        return ValidationOutcome(VERDICT_UNSAFE, witness=w, detail=w.detail)
    return ValidationOutcome(VERDICT_SOLUTION)


# ---------------------------------------------------------------------------
# Replay: re-execute a witness run under the concrete semantics


def replay_run(
    automaton: TimedAutomaton,
    run: tuple[RunStep, ...] | list[RunStep],
    sequence: TimedSnapSequence,
    *,
    snap_labels=None,
) -> bool:
    """Check a witness run step-by-step: delays respect invariants, guards
    hold, resets and label matching are consistent with the snap sequence."""
    snaps = _snapset(automaton, snap_labels)
    if not run or run[0].note != "initial":
        return False
    loc = automaton.init_location
    vals = {c: Fraction(0) for c in automaton.clocks}
    if run[0].location != loc or run[0].clocks != vals:
        return False
    matched = 0
    for step in run[1:]:
        if step.delay < 0:
            return False
        mid = {c: v + step.delay for c, v in vals.items()}
        inv = automaton.invariant(loc)
        if not inv.holds(vals) or not inv.holds(mid):
            return False
        if step.label is None:
            if step.location != loc:
                return False
            vals = mid
            if step.clocks != vals:
                return False
            continue
        found = None
        for tr in automaton.outgoing(loc):
            if tr.label != step.label or tr.dst != step.location:
                continue
            if not tr.guard.holds(mid):
                continue
            after = {c: (Fraction(0) if c in tr.resets else mid[c]) for c in mid}
            if after != step.clocks:
                continue
            if not automaton.invariant(tr.dst).holds(after):
                continue
            found = tr
            break
        if found is None:
            return False
        if step.label in snaps:
            if matched >= len(sequence):
                return False
            t_ev, ref = sequence.events[matched]
            if step.label != ref.label or mid[automaton.global_clock] != t_ev:
                return False
            matched += 1
        loc = step.location
        vals = step.clocks
    return True
