"""Top-level solving: find a plan that is valid, executable, and safe.

Two interchangeable modes.  The one-shot mode poses, per horizon, a
single exists-forall query over plan variables with the trace
universally quantified.  The refinement mode searches for candidate
event skeletons with a temporal planner and schedules each one by
counterexample refinement: a model of the skeleton's temporal network
is validated against the reference execution semantics, a violation
witness generalizes into a lemma over event times, and when the
network plus lemmas closes up, the search bans the shortest prefix the
lemmas refute for every extension, or failing that the one sequence.
Banned work is never revisited.

Every plan either mode reports is re-validated against the reference
execution semantics before it leaves this module.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .backend import SAT, UNKNOWN, UNSAT, SolverConfig, solve_terms
from .encoding import build_phi, extract_plan, v_t
from .model import PAMPProblem, TimeTriggeredPlan
from .planner import Candidate, PrefixTrie, iter_candidates, prefix_stn
from .refute import Lemma, LemmaError, witness_lemma
from .stn import INF_VALUE, STN
from .terms import LinExpr, Term, mk_le, mk_lt
from .texec import (
    VERDICT_NO_SOLUTION,
    VERDICT_SOLUTION,
    VERDICT_UNKNOWN,
    validate_plan,
)

MODE_ENC = "enc"
MODE_REF = "ref"


class EngineError(RuntimeError):
    """A mode produced a plan the reference semantics rejects."""


@dataclass(frozen=True)
class EngineConfig:
    mode: str = MODE_ENC
    max_horizon: int = 4
    solver: SolverConfig = field(default_factory=SolverConfig)
    timeout: float | None = None
    validate: bool = True
    ref_rounds: int = 200  # refinement rounds per candidate before giving up


@dataclass
class SolveResult:
    verdict: str
    plan: TimeTriggeredPlan | None = None
    stats: dict = field(default_factory=dict)
    detail: str = ""


def _min_horizon(pamp: PAMPProblem) -> int:
    return 0 if pamp.problem.goal <= pamp.problem.init else 1


class _Budget:
    def __init__(self, timeout: float | None):
        self.deadline = None if timeout is None else time.monotonic() + timeout

    def spent(self) -> bool:
        return self.deadline is not None and time.monotonic() >= self.deadline

    def solver(self, base: SolverConfig) -> SolverConfig:
        if self.deadline is None:
            return base
        left = max(self.deadline - time.monotonic(), 0.01)
        if base.timeout is None or base.timeout > left:
            return replace(base, timeout=left)
        return base


def _anchor_at_zero(pamp: PAMPProblem, plan: TimeTriggeredPlan) -> TimeTriggeredPlan:
    """Shift the schedule so the first event fires at time zero.

    Dead time before the first event is never useful, but dropping it can
    interact with guards on the global clock, so the shifted plan is kept
    only when the reference validator still accepts it.
    """
    if not plan.entries:
        return plan
    offset = min(e.start for e in plan.entries)
    if offset <= 0:
        return plan
    shifted = TimeTriggeredPlan(
        entries=tuple(replace(e, start=e.start - offset) for e in plan.entries)
    )
    if validate_plan(pamp, shifted).verdict == VERDICT_SOLUTION:
        return shifted
    return plan


def _checked(pamp: PAMPProblem, plan: TimeTriggeredPlan, config: EngineConfig) -> None:
    if not config.validate:
        return
    outcome = validate_plan(pamp, plan)
    if outcome.verdict != VERDICT_SOLUTION:
        raise EngineError(
            f"produced plan fails reference validation: {outcome.verdict} "
            f"({outcome.detail})"
        )


def solve(pamp: PAMPProblem, config: EngineConfig | None = None) -> SolveResult:
    config = config or EngineConfig()
    if config.mode == MODE_ENC:
        return solve_enc(pamp, config)
    if config.mode == MODE_REF:
        return solve_ref(pamp, config)
    raise ValueError(f"unknown mode {config.mode!r}")


# ---------------------------------------------------------------------------
# One-shot mode


def solve_enc(pamp: PAMPProblem, config: EngineConfig) -> SolveResult:
    budget = _Budget(config.timeout)
    horizons = []
    for h in range(_min_horizon(pamp), config.max_horizon + 1):
        if budget.spent():
            return SolveResult(VERDICT_UNKNOWN, stats={"horizons": horizons})
        query = build_phi(pamp, h)
        t0 = time.monotonic()
        res = solve_terms(
            list(query.asserts),
            list(query.bool_names),
            list(query.real_names),
            budget.solver(config.solver),
        )
        horizons.append((h, res.status, round(time.monotonic() - t0, 3), res.rounds))
        if res.status == SAT:
            plan = extract_plan(query.space, res.bools, res.rats)
            plan = _anchor_at_zero(pamp, plan)
            _checked(pamp, plan, config)
            return SolveResult(
                VERDICT_SOLUTION,
                plan=plan,
                stats={"mode": MODE_ENC, "horizon": h, "horizons": horizons},
            )
        if res.status == UNKNOWN:
            return SolveResult(
                VERDICT_UNKNOWN,
                stats={"mode": MODE_ENC, "horizons": horizons},
                detail=f"solver gave up at horizon {h}",
            )
    return SolveResult(
        VERDICT_NO_SOLUTION, stats={"mode": MODE_ENC, "horizons": horizons}
    )


# ---------------------------------------------------------------------------
# Refinement mode


def _stn_terms(stn: STN, upto: int) -> list[Term]:
    big = INF_VALUE / 2

    def point(i: int) -> LinExpr:
        return LinExpr.const_of(0) if i == 0 else LinExpr.var(v_t(i))

    out = []
    for a in range(upto + 1):
        for b in range(upto + 1):
            if a == b:
                continue
            value, strict = stn.d[a][b]
            if value >= big:
                continue
            expr = point(b) - point(a)
            bound = LinExpr.const_of(value)
            out.append(mk_lt(expr, bound) if strict else mk_le(expr, bound))
    return out


def solve_ref(pamp: PAMPProblem, config: EngineConfig) -> SolveResult:
    budget = _Budget(config.timeout)
    problem = pamp.problem
    trie = PrefixTrie()
    # executability lemmas bind every sequence sharing the key prefix
    # (subject to min_length); safety lemmas bind one exact sequence
    exec_lemmas: dict[tuple, list[Lemma]] = {}
    full_lemmas: dict[tuple, list[Lemma]] = {}
    stats: dict = {
        "mode": MODE_REF,
        "iterations": 0,
        "rounds": 0,
        "bans": 0,
        "lemmas": 0,
        "prefix_queries": [],
    }
    saw_unknown = False

    def ground(asserts, upto):
        names = [v_t(j) for j in range(1, upto + 1)]
        return solve_terms(list(asserts), [], names, budget.solver(config.solver))

    def applicable(tokens, upto):
        out = []
        for i in range(1, upto + 1):
            for lm in exec_lemmas.get(tokens[:i], ()):
                if lm.min_length <= upto:
                    out.append(lm.term)
        return out

    def refute_scan(cand: Candidate) -> str:
        # the candidate is closed; ban the shortest prefix whose network
        # plus prefix-scoped lemmas is already closed, since that holds
        # for every extension too, else ban the one sequence
        tokens = cand.tokens
        for i in range(1, cand.n + 1):
            stn = cand.stn if i == cand.n else prefix_stn(problem, tokens[:i])
            res = ground(_stn_terms(stn, i) + applicable(tokens, i), i)
            if res.status == UNSAT:
                trie.ban(tokens[:i])
                return f"ban[:{i}]"
            if res.status != SAT:
                break
        trie.ban_exact(tokens)
        return "dead"

    def check_candidate(cand: Candidate):
        nonlocal saw_unknown
        tokens, n = cand.tokens, cand.n
        base = _stn_terms(cand.stn, n)
        extra = [lm.term for lm in full_lemmas.get(tokens, ())]
        rounds = 0
        while True:
            if budget.spent() or rounds >= config.ref_rounds:
                saw_unknown = True
                return None, "unknown"
            rounds += 1
            stats["rounds"] += 1
            res = ground(base + applicable(tokens, n) + extra, n)
            if res.status == UNSAT:
                outcome = refute_scan(cand)
                stats["bans"] += 1
                return None, outcome
            if res.status != SAT:
                saw_unknown = True
                return None, "unknown"
            times = [Fraction(0)]
            times.extend(res.rats.get(v_t(j), Fraction(0)) for j in range(1, n + 1))
            plan = cand.plan(times)
            checked = validate_plan(pamp, plan)
            if checked.verdict == VERDICT_SOLUTION:
                return plan, "solution"
            if checked.witness is None:
                raise EngineError(
                    f"refinement produced an inconsistent candidate: {checked.detail}"
                )
            try:
                lemma = witness_lemma(
                    pamp.automaton, pamp.bad, checked.witness, times, pamp.kappa
                )
            except LemmaError as exc:
                stats.setdefault("lemma_failures", []).append(str(exc))
                saw_unknown = True
                return None, "unknown"
            stats["lemmas"] += 1
            if lemma.kind == "non-executable":
                exec_lemmas.setdefault(tokens[: lemma.scope], []).append(lemma)
            else:
                full_lemmas.setdefault(tokens, []).append(lemma)
                extra.append(lemma.term)

    for h in range(_min_horizon(pamp), config.max_horizon + 1):
        for cand in iter_candidates(problem, h, trie):
            if budget.spent():
                return SolveResult(VERDICT_UNKNOWN, stats=stats)
            stats["iterations"] += 1
            plan, resolution = check_candidate(cand)
            stats["prefix_queries"].append((cand.tokens, resolution))
            if plan is not None:
                plan = _anchor_at_zero(pamp, plan)
                _checked(pamp, plan, config)
                stats["horizon"] = h
                return SolveResult(VERDICT_SOLUTION, plan=plan, stats=stats)
    if saw_unknown:
        return SolveResult(VERDICT_UNKNOWN, stats=stats)
    return SolveResult(VERDICT_NO_SOLUTION, stats=stats)
