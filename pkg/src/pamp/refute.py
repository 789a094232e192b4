"""Generalize concrete violation witnesses into schedule-space lemmas.

A witness run fixes one discrete skeleton on the platform: which
transitions fire, where the run dwells, where it observes an event or
goes bad.  Replaying the skeleton with free delays and free event times
gives a conjunction that holds exactly when some run with this skeleton
realizes the violation.  Projecting the delays out leaves a region over
event times alone, and its negation is a sound refinement lemma: every
schedule inside the region is defeated by a real compliant run, so a
checker may exclude the whole region at once.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .encoding import cc_term, v_t
from .minismt.generalize import implicant, lits_to_term, project
from .model import BadStateSpec, TimedAutomaton, Transition
from .terms import LinExpr, Term, mk_and, mk_eq, mk_ge, mk_le, mk_not
from .texec import RunStep, Witness
from .zones import constraint_after_reset


class LemmaError(RuntimeError):
    """The witness run could not be replayed symbolically."""


@dataclass(frozen=True)
class Lemma:
    """A refinement lemma over event-time variables.

    `scope` counts the leading events the lemma mentions, so it binds
    only sequences that agree on those events.  `min_length` is the
    shortest sequence whose discrete budget still admits the underlying
    run; the lemma must not be used against anything shorter.
    """

    term: Term
    scope: int
    min_length: int
    kind: str  # "non-executable" | "unsafe"


def _delay_name(p: int) -> str:
    return f"wd{p}"


def _resolve_transition(
    automaton: TimedAutomaton,
    src: str,
    step: RunStep,
    before: dict[str, Fraction],
) -> Transition:
    for tr in automaton.outgoing(src):
        if tr.label != step.label or tr.dst != step.location:
            continue
        if not tr.guard.holds(before):
            continue
        consistent = all(
            step.clocks[c] == (Fraction(0) if c in tr.resets else before[c])
            for c in automaton.clocks
        )
        # ties on clocks that are zero either way: any consistent
        # transition is sound to follow symbolically
        if consistent:
            return tr
    raise LemmaError(
        f"no transition matches witness step {step.label!r} into {step.location!r}"
    )


def _resolve_bad(
    bad: BadStateSpec, location: str, point: dict[str, Fraction]
) -> object:
    for cc in bad.constraints_for(location):
        if cc.holds(point):
            return cc
    raise LemmaError(
        f"no bad-state constraint holds at the tagged point in {location!r}"
    )


def witness_lemma(
    automaton: TimedAutomaton,
    bad: BadStateSpec,
    witness: Witness,
    times: list[Fraction],
    kappa: int,
) -> Lemma:
    """Turn one violation witness into a lemma excluding its schedule.

    `times` is the defeated schedule with the origin at index 0.  The
    returned term is over the event-time variables and is false at that
    schedule, so adding it to a scheduling query forces progress.
    """
    steps = witness.run
    if not steps or steps[0].note != "initial":
        raise LemmaError("witness run must open with the initial step")
    n = len(times) - 1
    zero = LinExpr.const_of(0)
    gclock = automaton.global_clock
    t_last = zero if n == 0 else LinExpr.var(v_t(n))
    vals: dict[str, LinExpr] = {c: zero for c in automaton.clocks}
    point = dict(steps[0].clocks)
    loc = steps[0].location
    conj: list[Term] = []
    rats: dict[str, Fraction] = {v_t(j): times[j] for j in range(1, n + 1)}
    for p, step in enumerate(steps[1:], start=1):
        dn = _delay_name(p)
        rats[dn] = step.delay
        d = LinExpr.var(dn)
        conj.append(mk_ge(d, zero))
        before = {c: vals[c] + d for c in vals}
        before_point = {c: point[c] + step.delay for c in point}
        inv = automaton.invariant(loc)
        if not inv.is_true:
            # the run dwells here; convexity closes the interior
            conj.append(cc_term(inv, before))
        if step.note == "bad-state":
            cc = _resolve_bad(bad, loc, before_point)
            conj.append(cc_term(cc, before))
            conj.append(mk_le(before[gclock], t_last))
            vals = before
        elif step.note == "observation":
            conj.append(mk_eq(before[gclock], LinExpr.var(v_t(witness.prefix + 1))))
            for tr in automaton.outgoing(loc):
                if tr.label != witness.event:
                    continue
                landing = constraint_after_reset(
                    automaton.invariant(tr.dst), tr.resets
                )
                if landing is None:
                    continue
                gate = mk_and(cc_term(tr.guard, before), cc_term(landing, before))
                conj.append(mk_not(gate))
            vals = before
        elif step.label is not None:
            tr = _resolve_transition(automaton, loc, step, before_point)
            if not tr.guard.is_true:
                conj.append(cc_term(tr.guard, before))
            if step.matched is not None:
                conj.append(mk_eq(before[gclock], LinExpr.var(v_t(step.matched))))
            after = {c: zero if c in tr.resets else before[c] for c in before}
            dst_inv = automaton.invariant(tr.dst)
            if not dst_inv.is_true:
                conj.append(cc_term(dst_inv, after))
            vals = after
        else:
            raise LemmaError(f"witness step {p} is neither transition nor marker")
        loc = step.location
        point = dict(step.clocks)
    try:
        lits = implicant(mk_and(*conj), True, {}, rats)
    except ValueError as exc:
        raise LemmaError(f"witness replay disagrees with its schedule: {exc}") from exc
    drops = {_delay_name(p) for p in range(1, len(steps))}
    psi = lits_to_term(project(lits, set(), drops))
    scope = witness.prefix + 1 if witness.kind == "non-executable" else n
    if witness.steps is None:
        min_length = max(n, 1)
    else:
        min_length = max(1, -(-(witness.steps + 1) // kappa))
    return Lemma(term=mk_not(psi), scope=scope, min_length=min_length, kind=witness.kind)
