"""Solver access for quantified and ground queries.

Queries run either in process on the bundled solver (the default) or
through a one-process-per-query pipe to any SMT-LIB 2 command.  Two
strategies handle exists-forall formulas: "native" hands the quantified
assertion to the solver whole, "cegis" refines candidates client-side
against counterexamples, so it only ever needs ground queries and works
with solvers that lack quantifier support.
"""

from __future__ import annotations

import shlex
import subprocess
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .minismt import cnf, quant
from .minismt.generalize import generalize_bad_candidate
from .smtlib import assert_lines, declarations, parse_get_value
from .terms import BOOL, Forall, Term, free_vars, mk_not, subst_term

SAT = "sat"
UNSAT = "unsat"
UNKNOWN = "unknown"

NATIVE = "native"
CEGIS = "cegis"


@dataclass(frozen=True)
class SolverConfig:
    """How to discharge SMT queries.

    cmd None runs the bundled solver in process; a command string runs
    one subprocess per query over the pipe protocol.
    """

    cmd: str | None = None
    strategy: str = NATIVE
    timeout: float | None = None

    def argv(self) -> list[str]:
        if self.cmd is None:
            return default_solver_argv()
        return shlex.split(self.cmd)


def default_solver_argv() -> list[str]:
    return [sys.executable, "-m", "pamp.minismt"]


@dataclass
class SmtResult:
    status: str
    bools: dict[str, bool] = field(default_factory=dict)
    rats: dict[str, Fraction] = field(default_factory=dict)
    rounds: int = 1  # candidate rounds when refining client-side


class SolverError(RuntimeError):
    pass


def solve_terms(
    asserts: list[Term],
    bool_names: list[str],
    real_names: list[str],
    config: SolverConfig | None = None,
) -> SmtResult:
    config = config or SolverConfig()
    deadline = None
    if config.timeout is not None:
        deadline = time.monotonic() + config.timeout
    if config.strategy == CEGIS:
        return _solve_cegis(asserts, bool_names, real_names, config, deadline)
    if config.cmd is None:
        try:
            status, bools, rats = quant.solve(asserts, bool_names, real_names, deadline)
        except quant.UnsupportedQuantifier as exc:
            raise SolverError(str(exc)) from exc
        return SmtResult(status, bools or {}, rats or {})
    return _pipe_query(asserts, bool_names, real_names, config, deadline)


# ---------------------------------------------------------------------------
# Pipe transport


def _script(asserts: list[Term], bool_names: list[str], real_names: list[str]) -> str:
    lines = ["(set-logic ALL)"]
    lines.extend(declarations(bool_names, real_names))
    lines.extend(assert_lines(asserts))
    lines.append("(check-sat)")
    names = list(bool_names) + list(real_names)
    if names:
        lines.append("(get-value (" + " ".join(names) + "))")
    lines.append("(exit)")
    return "\n".join(lines) + "\n"


def _pipe_query(
    asserts: list[Term],
    bool_names: list[str],
    real_names: list[str],
    config: SolverConfig,
    deadline: float | None,
) -> SmtResult:
    budget = None
    if deadline is not None:
        budget = deadline - time.monotonic()
        if budget <= 0:
            return SmtResult(UNKNOWN)
    script = _script(asserts, bool_names, real_names)
    try:
        proc = subprocess.run(
            config.argv(),
            input=script,
            capture_output=True,
            text=True,
            timeout=None if budget is None else budget + 2.0,
        )
    except subprocess.TimeoutExpired:
        return SmtResult(UNKNOWN)
    except OSError as exc:
        raise SolverError(f"cannot run solver {config.argv()!r}: {exc}") from exc
    lines = [l.strip() for l in proc.stdout.splitlines() if l.strip()]
    if not lines:
        raise SolverError(
            f"solver produced no output (stderr: {proc.stderr.strip()[:500]!r})"
        )
    status = lines[0]
    if status not in (SAT, UNSAT, UNKNOWN):
        raise SolverError(f"unexpected solver status {status!r}")
    if status != SAT:
        return SmtResult(status)
    bools = {n: False for n in bool_names}
    rats = {n: Fraction(0) for n in real_names}
    value_text = next((l for l in lines[1:] if l.startswith("((")), None)
    if value_text is not None:
        for name, value in parse_get_value(value_text).items():
            if name in bools and isinstance(value, bool):
                bools[name] = value
            elif name in rats and not isinstance(value, bool):
                rats[name] = Fraction(value)
    return SmtResult(SAT, bools, rats)


# ---------------------------------------------------------------------------
# Client-side refinement


def _flatten_forall(t: Forall) -> tuple[tuple[tuple[str, str], ...], Term]:
    bound = list(t.bound)
    body = t.body
    while isinstance(body, Forall):
        bound.extend(body.bound)
        body = body.body
    return tuple(bound), body


def _ground_query(
    asserts: list[Term],
    bool_names: list[str],
    real_names: list[str],
    config: SolverConfig,
    deadline: float | None,
) -> SmtResult:
    if config.cmd is None:
        status, bools, rats = cnf.solve_ground(asserts, deadline)
        if status != SAT:
            return SmtResult(status)
        out_b = {n: False for n in bool_names}
        out_r = {n: Fraction(0) for n in real_names}
        out_b.update({k: v for k, v in (bools or {}).items() if k in out_b})
        out_r.update({k: v for k, v in (rats or {}).items() if k in out_r})
        return SmtResult(SAT, out_b, out_r)
    return _pipe_query(asserts, bool_names, real_names, config, deadline)


def _solve_cegis(
    asserts: list[Term],
    bool_names: list[str],
    real_names: list[str],
    config: SolverConfig,
    deadline: float | None,
) -> SmtResult:
    ground: list[Term] = []
    quants: list[tuple[tuple[tuple[str, str], ...], Term]] = []
    for t in asserts:
        if isinstance(t, Forall):
            quants.append(_flatten_forall(t))
        else:
            ground.append(t)
    if not quants:
        result = _ground_query(ground, bool_names, real_names, config, deadline)
        return result

    lemmas: list[Term] = []
    rounds = 0
    while True:
        rounds += 1
        if deadline is not None and time.monotonic() > deadline:
            return SmtResult(UNKNOWN, rounds=rounds)
        cand = _ground_query(
            ground + lemmas, bool_names, real_names, config, deadline
        )
        if cand.status != SAT:
            cand.rounds = rounds
            return cand
        failed = None
        for bound, body in quants:
            y_bools = sorted(n for n, s in bound if s == BOOL)
            y_reals = sorted(n for n, s in bound if s != BOOL)
            sub = subst_term(body, cand.bools, cand.rats)
            verdict = _ground_query(
                [mk_not(sub)], y_bools, y_reals, config, deadline
            )
            if verdict.status == UNKNOWN:
                return SmtResult(UNKNOWN, rounds=rounds)
            if verdict.status == SAT:
                full_b = dict(cand.bools)
                full_r = dict(cand.rats)
                full_b.update(verdict.bools)
                full_r.update(verdict.rats)
                failed = generalize_bad_candidate(
                    body, full_b, full_r, set(y_bools), set(y_reals)
                )
                break
        if failed is None:
            return SmtResult(SAT, cand.bools, cand.rats, rounds=rounds)
        lemmas.append(failed)
