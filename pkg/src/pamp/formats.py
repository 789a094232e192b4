"""Canonical on-disk formats: problem bundles, plan files, and reports.

YAML carrier with exact rationals written as integers or "p/q" strings.
Parsers return (value, diagnostics); the value is None whenever any
diagnostic was raised, and diagnostic paths are dotted (platform.
transitions[3].guard[0]) so errors point into the document.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

import yaml

from .model import (
    BadStateSpec,
    ClockAtom,
    ClockConstraint,
    DurativeAction,
    ModelError,
    PAMPProblem,
    PlanEntry,
    SnapActionSpec,
    TRUE_CONSTRAINT,
    TemporalPlanningProblem,
    TimeTriggeredPlan,
    TimedAutomaton,
    Transition,
)


@dataclass(frozen=True)
class Diagnostic:
    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.path}: {self.message}"


def rat_to_text(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def text_to_rat(raw) -> Fraction:
    if isinstance(raw, bool):
        raise ValueError(f"not a rational: {raw!r}")
    if isinstance(raw, int):
        return Fraction(raw)
    if isinstance(raw, str):
        m = re.fullmatch(r"\s*(-?\d+)\s*(?:/\s*([1-9]\d*)\s*)?", raw)
        if m:
            return Fraction(int(m.group(1)), int(m.group(2)) if m.group(2) else 1)
    raise ValueError(f"not a rational: {raw!r}")


# identifiers may contain '-', so a difference needs spaces around the minus
_ATOM_RE = re.compile(
    r"\s*([A-Za-z_][A-Za-z0-9_.\-]*?)"
    r"(?:\s+-\s+([A-Za-z_][A-Za-z0-9_.\-]*?))?"
    r"\s*(<=|>=|=|<|>)\s*(-?\d+)\s*"
)


def atom_to_text(atom: ClockAtom) -> str:
    lhs = atom.clock if atom.other is None else f"{atom.clock} - {atom.other}"
    return f"{lhs} {atom.op} {atom.bound}"


def text_to_atom(raw: str) -> ClockAtom:
    m = _ATOM_RE.fullmatch(raw)
    if not m:
        raise ValueError(f"bad clock constraint {raw!r}")
    clock, other, op, bound = m.groups()
    return ClockAtom(clock=clock, op=op, bound=int(bound), other=other)


class _Ctx:
    def __init__(self) -> None:
        self.diags: list[Diagnostic] = []

    def error(self, path: str, message: str) -> None:
        self.diags.append(Diagnostic(path, message))

    @property
    def ok(self) -> bool:
        return not self.diags


def _req(ctx: _Ctx, data: dict, path: str, key: str, kind=None):
    if not isinstance(data, dict) or key not in data:
        ctx.error(f"{path}.{key}" if path else key, "missing required key")
        return None
    value = data[key]
    if kind is not None and not isinstance(value, kind):
        ctx.error(f"{path}.{key}" if path else key, f"expected {kind.__name__}")
        return None
    return value


def _str_list(ctx: _Ctx, raw, path: str) -> list[str]:
    if raw is None:
        return []
    if not isinstance(raw, list):
        ctx.error(path, "expected a list")
        return []
    out = []
    for i, item in enumerate(raw):
        if not isinstance(item, str):
            ctx.error(f"{path}[{i}]", "expected a string")
            continue
        out.append(item)
    return out


def _rat(ctx: _Ctx, raw, path: str) -> Fraction | None:
    try:
        return text_to_rat(raw)
    except ValueError as exc:
        ctx.error(path, str(exc))
        return None


def _constraint(ctx: _Ctx, raw, path: str) -> ClockConstraint:
    atoms = []
    for i, item in enumerate(_str_list(ctx, raw, path)):
        try:
            atoms.append(text_to_atom(item))
        except ValueError as exc:
            ctx.error(f"{path}[{i}]", str(exc))
    return ClockConstraint(atoms=tuple(atoms))


# ---------------------------------------------------------------------------
# Problem bundle


def _parse_snap(ctx: _Ctx, raw, path: str) -> SnapActionSpec:
    if raw is None:
        return SnapActionSpec()
    if not isinstance(raw, dict):
        ctx.error(path, "expected a mapping")
        return SnapActionSpec()
    return SnapActionSpec(
        pre=frozenset(_str_list(ctx, raw.get("pre"), f"{path}.pre")),
        add=frozenset(_str_list(ctx, raw.get("add"), f"{path}.add")),
        delete=frozenset(_str_list(ctx, raw.get("delete"), f"{path}.delete")),
    )


def _parse_action(ctx: _Ctx, raw, path: str) -> DurativeAction | None:
    name = _req(ctx, raw, path, "name", str)
    lower_raw = _req(ctx, raw, path, "lower")
    if name is None or lower_raw is None:
        return None
    lower = _rat(ctx, lower_raw, f"{path}.lower")
    upper_raw = raw.get("upper")
    upper = None if upper_raw is None else _rat(ctx, upper_raw, f"{path}.upper")
    start = _parse_snap(ctx, raw.get("start"), f"{path}.start")
    end = _parse_snap(ctx, raw.get("end"), f"{path}.end")
    overall = frozenset(_str_list(ctx, raw.get("overall"), f"{path}.overall"))
    if lower is None or not ctx.ok:
        return None
    try:
        return DurativeAction(
            name=name, start=start, end=end, overall=overall, lower=lower, upper=upper
        )
    except ModelError as exc:
        ctx.error(path, str(exc))
        return None


def _parse_problem(ctx: _Ctx, raw, path: str) -> TemporalPlanningProblem | None:
    if not isinstance(raw, dict):
        ctx.error(path, "expected a mapping")
        return None
    props = frozenset(_str_list(ctx, raw.get("propositions"), f"{path}.propositions"))
    actions_raw = _req(ctx, raw, path, "actions", list)
    actions = []
    for i, a in enumerate(actions_raw or []):
        action = _parse_action(ctx, a, f"{path}.actions[{i}]")
        if action is not None:
            actions.append(action)
    init = frozenset(_str_list(ctx, raw.get("init"), f"{path}.init"))
    goal = frozenset(_str_list(ctx, raw.get("goal"), f"{path}.goal"))
    if not ctx.ok:
        return None
    try:
        return TemporalPlanningProblem(
            propositions=props, actions=tuple(actions), init=init, goal=goal
        )
    except ModelError as exc:
        ctx.error(path, str(exc))
        return None


def _parse_platform(ctx: _Ctx, raw, path: str) -> TimedAutomaton | None:
    if not isinstance(raw, dict):
        ctx.error(path, "expected a mapping")
        return None
    clocks = _str_list(ctx, _req(ctx, raw, path, "clocks", list), f"{path}.clocks")
    global_clock = _req(ctx, raw, path, "global_clock", str)
    locations = _str_list(ctx, _req(ctx, raw, path, "locations", list), f"{path}.locations")
    init_location = _req(ctx, raw, path, "init_location", str)
    invariants = {}
    inv_raw = raw.get("invariants") or {}
    if not isinstance(inv_raw, dict):
        ctx.error(f"{path}.invariants", "expected a mapping")
        inv_raw = {}
    for loc, cc in inv_raw.items():
        invariants[loc] = _constraint(ctx, cc, f"{path}.invariants.{loc}")
    transitions = []
    trans_raw = _req(ctx, raw, path, "transitions", list) or []
    alphabet: set[str] = set(_str_list(ctx, raw.get("alphabet"), f"{path}.alphabet"))
    for i, t in enumerate(trans_raw):
        tp = f"{path}.transitions[{i}]"
        if not isinstance(t, dict):
            ctx.error(tp, "expected a mapping")
            continue
        src = _req(ctx, t, tp, "src", str)
        label = _req(ctx, t, tp, "label", str)
        dst = _req(ctx, t, tp, "dst", str)
        guard = _constraint(ctx, t.get("guard"), f"{tp}.guard")
        resets = frozenset(_str_list(ctx, t.get("resets"), f"{tp}.resets"))
        if src is None or label is None or dst is None:
            continue
        alphabet.add(label)
        transitions.append(Transition(src, guard, label, resets, dst))
    if not ctx.ok or global_clock is None or init_location is None:
        return None
    try:
        return TimedAutomaton(
            alphabet=frozenset(alphabet),
            locations=tuple(locations),
            init_location=init_location,
            clocks=tuple(clocks),
            global_clock=global_clock,
            transitions=tuple(transitions),
            invariants=invariants,
        )
    except ModelError as exc:
        ctx.error(path, str(exc))
        return None


def parse_problem_bundle(text: str) -> tuple[PAMPProblem | None, list[Diagnostic]]:
    ctx = _Ctx()
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        ctx.error("", f"invalid yaml: {exc}")
        return None, ctx.diags
    if not isinstance(data, dict):
        ctx.error("", "document must be a mapping")
        return None, ctx.diags
    problem = _parse_problem(ctx, _req(ctx, data, "", "problem"), "problem")
    automaton = _parse_platform(ctx, _req(ctx, data, "", "platform"), "platform")
    bad_entries = []
    bad_raw = data.get("bad") or []
    if not isinstance(bad_raw, list):
        ctx.error("bad", "expected a list")
        bad_raw = []
    for i, b in enumerate(bad_raw):
        bp = f"bad[{i}]"
        if not isinstance(b, dict):
            ctx.error(bp, "expected a mapping")
            continue
        loc = _req(ctx, b, bp, "location", str)
        cc = (
            _constraint(ctx, b.get("constraint"), f"{bp}.constraint")
            if b.get("constraint")
            else TRUE_CONSTRAINT
        )
        if loc is not None:
            bad_entries.append((loc, cc))
    kappa = data.get("kappa")
    if not isinstance(kappa, int) or isinstance(kappa, bool) or kappa < 1:
        ctx.error("kappa", "expected a positive integer")
    if not ctx.ok or problem is None or automaton is None:
        return None, ctx.diags
    try:
        pamp = PAMPProblem(
            problem=problem,
            automaton=automaton,
            bad=BadStateSpec(entries=tuple(bad_entries)),
            kappa=kappa,
        )
    except ModelError as exc:
        ctx.error("", str(exc))
        return None, ctx.diags
    return pamp, ctx.diags


def _snap_data(snap: SnapActionSpec) -> dict:
    return {
        "pre": sorted(snap.pre),
        "add": sorted(snap.add),
        "delete": sorted(snap.delete),
    }


def serialize_problem_bundle(pamp: PAMPProblem) -> str:
    problem = pamp.problem
    aut = pamp.automaton
    data = {
        "problem": {
            "propositions": sorted(problem.propositions),
            "actions": [
                {
                    "name": a.name,
                    "lower": rat_to_text(a.lower),
                    "upper": None if a.upper is None else rat_to_text(a.upper),
                    "start": _snap_data(a.start),
                    "end": _snap_data(a.end),
                    "overall": sorted(a.overall),
                }
                for a in problem.actions
            ],
            "init": sorted(problem.init),
            "goal": sorted(problem.goal),
        },
        "platform": {
            "clocks": list(aut.clocks),
            "global_clock": aut.global_clock,
            "locations": list(aut.locations),
            "init_location": aut.init_location,
            "alphabet": sorted(aut.alphabet),
            "invariants": {
                loc: [atom_to_text(at) for at in aut.invariants[loc].atoms]
                for loc in aut.locations
                if loc in aut.invariants and aut.invariants[loc].atoms
            },
            "transitions": [
                {
                    "src": t.src,
                    "label": t.label,
                    "guard": [atom_to_text(at) for at in t.guard.atoms],
                    "resets": sorted(t.resets),
                    "dst": t.dst,
                }
                for t in aut.transitions
            ],
        },
        "bad": [
            {"location": loc, "constraint": [atom_to_text(at) for at in cc.atoms]}
            for loc, cc in pamp.bad.entries
        ],
        "kappa": pamp.kappa,
    }
    return yaml.safe_dump(data, sort_keys=False, default_flow_style=False)


# ---------------------------------------------------------------------------
# Plans


def serialize_plan(plan: TimeTriggeredPlan) -> str:
    data = {
        "plan": [
            {
                "action": e.action,
                "start": rat_to_text(e.start),
                "duration": rat_to_text(e.duration),
            }
            for e in plan.entries
        ]
    }
    return yaml.safe_dump(data, sort_keys=False, default_flow_style=False)


def parse_plan(text: str) -> tuple[TimeTriggeredPlan | None, list[Diagnostic]]:
    ctx = _Ctx()
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        ctx.error("", f"invalid yaml: {exc}")
        return None, ctx.diags
    if not isinstance(data, dict) or not isinstance(data.get("plan"), list):
        ctx.error("plan", "expected a mapping with a plan list")
        return None, ctx.diags
    entries = []
    for i, e in enumerate(data["plan"]):
        ep = f"plan[{i}]"
        if not isinstance(e, dict):
            ctx.error(ep, "expected a mapping")
            continue
        action = _req(ctx, e, ep, "action", str)
        start_raw = _req(ctx, e, ep, "start")
        dur_raw = _req(ctx, e, ep, "duration")
        if action is None or start_raw is None or dur_raw is None:
            continue
        start = _rat(ctx, start_raw, f"{ep}.start")
        duration = _rat(ctx, dur_raw, f"{ep}.duration")
        if start is None or duration is None:
            continue
        try:
            entries.append(PlanEntry(action, start, duration))
        except ModelError as exc:
            ctx.error(ep, str(exc))
    if not ctx.ok:
        return None, ctx.diags
    try:
        return TimeTriggeredPlan(entries=tuple(entries)), ctx.diags
    except ModelError as exc:
        ctx.error("plan", str(exc))
        return None, ctx.diags


# ---------------------------------------------------------------------------
# Reports


@dataclass(frozen=True)
class Report:
    verdict: str
    plan: TimeTriggeredPlan | None = None
    witness: dict | None = None
    stats: dict | None = None


def serialize_report(report: Report) -> str:
    data: dict = {"verdict": report.verdict}
    if report.plan is not None:
        data["plan"] = [
            {
                "action": e.action,
                "start": rat_to_text(e.start),
                "duration": rat_to_text(e.duration),
            }
            for e in report.plan.entries
        ]
    if report.witness is not None:
        data["witness"] = report.witness
    if report.stats is not None:
        data["stats"] = report.stats
    return yaml.safe_dump(data, sort_keys=False, default_flow_style=False)


def parse_report(text: str) -> tuple[Report | None, list[Diagnostic]]:
    ctx = _Ctx()
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        ctx.error("", f"invalid yaml: {exc}")
        return None, ctx.diags
    if not isinstance(data, dict):
        ctx.error("", "document must be a mapping")
        return None, ctx.diags
    verdict = _req(ctx, data, "", "verdict", str)
    plan = None
    if isinstance(data.get("plan"), list):
        plan, plan_diags = parse_plan(yaml.safe_dump({"plan": data["plan"]}))
        ctx.diags.extend(Diagnostic(f"plan>{d.path}", d.message) for d in plan_diags)
    witness = data.get("witness") if isinstance(data.get("witness"), dict) else None
    stats = data.get("stats") if isinstance(data.get("stats"), dict) else None
    if not ctx.ok or verdict is None:
        return None, ctx.diags
    return Report(verdict=verdict, plan=plan, witness=witness, stats=stats), ctx.diags


def witness_run_from_data(data: dict):
    """Rebuild replayable run steps from a report's witness mapping."""
    from .texec import RunStep

    steps = []
    for raw in data.get("run", []):
        steps.append(
            RunStep(
                delay=text_to_rat(raw["delay"]),
                label=raw.get("label"),
                location=raw["location"],
                clocks={c: text_to_rat(v) for c, v in raw.get("clocks", {}).items()},
                matched=raw.get("matched"),
                note=raw.get("note"),
            )
        )
    return tuple(steps)
