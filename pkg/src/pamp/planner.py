"""Search for candidate snap-event sequences of a temporal planning problem.

Candidates are produced by iterative-deepening DFS over the number of
action instances.  A search node tracks the proposition state, the open
instances, and a simple temporal network of the event times so far;
branches with an inconsistent network are cut immediately, as are
sequences whose running instances lose a holding condition.  A shared
trie of banned prefixes lets a caller rule out whole subtrees between
candidates, which is how platform-level refutations feed back into the
search.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .model import (
    END,
    START,
    DurativeAction,
    TemporalPlanningProblem,
    PlanEntry,
    TimeTriggeredPlan,
    apply_snap_action,
    Inapplicable,
)
from .stn import STN, Bound, InconsistentSTN

Token = tuple[str, str]  # (kind, action)


class PrefixTrie:
    """Refuted event sequences, in two strengths.

    A prefix ban covers every extension: no sequence continuing it can
    work, whatever the schedule.  An exact ban kills one complete
    sequence only; longer sequences that happen to pass through it are
    different plans and stay open.
    """

    _SUB = 0  # marker keys; tokens are tuples, so ints cannot collide
    _EXACT = 1

    def __init__(self) -> None:
        self._root: dict = {}

    def ban(self, tokens: tuple[Token, ...]) -> None:
        node = self._root
        for tok in tokens:
            node = node.setdefault(tok, {})
        node[self._SUB] = True

    def ban_exact(self, tokens: tuple[Token, ...]) -> None:
        node = self._root
        for tok in tokens:
            node = node.setdefault(tok, {})
        node[self._EXACT] = True

    def is_banned(self, tokens: tuple[Token, ...]) -> bool:
        node = self._root
        if node.get(self._SUB):
            return True
        for tok in tokens:
            node = node.get(tok)
            if node is None:
                return False
            if node.get(self._SUB):
                return True
        return False

    def is_dead(self, tokens: tuple[Token, ...]) -> bool:
        node = self._root
        if node.get(self._SUB):
            return True
        for tok in tokens:
            node = node.get(tok)
            if node is None:
                return False
            if node.get(self._SUB):
                return True
        return bool(node.get(self._EXACT))


@dataclass(frozen=True)
class Candidate:
    """A complete discrete plan skeleton: who fires when, but not the clock."""

    tokens: tuple[Token, ...]
    pairing: tuple[tuple[str, int, int], ...]  # (action, start event, end event)
    stn: STN

    @property
    def n(self) -> int:
        return len(self.tokens)

    def plan(self, times: list[Fraction]) -> TimeTriggeredPlan:
        """Instantiate with event times (index 0 is the origin)."""
        entries = []
        for action, s, e in self.pairing:
            entries.append(PlanEntry(action, times[s], times[e] - times[s]))
        return TimeTriggeredPlan(tuple(entries))


def _duration_edges(stn: STN, action: DurativeAction, s: int, e: int) -> None:
    if action.upper is not None:
        stn.add_edge(s, e, (Fraction(action.upper), False))
    stn.add_edge(e, s, (-Fraction(action.lower), False))


def _append_event(stn: STN, i: int) -> None:
    stn.add_node()
    if i == 1:
        stn.add_edge(1, 0, (Fraction(0), False))  # t_1 >= 0
    else:
        stn.add_edge(i, i - 1, (Fraction(0), True))  # strictly later


def prefix_stn(
    problem: TemporalPlanningProblem, tokens: tuple[Token, ...]
) -> STN:
    """The scheduling constraints any plan with this event prefix obeys:
    event ordering, duration windows for instances closed inside the
    prefix, and for still-open instances the fact that their end lies
    strictly beyond the last event yet within the duration cap."""
    stn = STN.origin()
    open_at: dict[str, int] = {}
    n = len(tokens)
    for i, (kind, action) in enumerate(tokens, start=1):
        _append_event(stn, i)
        a = problem.action(action)
        if kind == START:
            open_at[action] = i
        else:
            s = open_at.pop(action)
            _duration_edges(stn, a, s, i)
    for action, s in open_at.items():
        a = problem.action(action)
        if a.upper is not None and n:
            stn.add_edge(s, n, (Fraction(a.upper), True))
    return stn


def _move_order(
    problem: TemporalPlanningProblem,
    moves: list[tuple[Token, frozenset[str]]],
) -> list[tuple[Token, frozenset[str]]]:
    goal = problem.goal

    def score(item):
        (kind, action), after = item
        return (len(goal - after), 0 if kind == END else 1, action)

    return sorted(moves, key=score)


def iter_candidates(
    problem: TemporalPlanningProblem,
    horizon: int,
    trie: PrefixTrie,
) -> Iterator[Candidate]:
    """All goal-reaching sequences with exactly `horizon` instances, best
    first per the unmet-goal heuristic, skipping banned prefixes."""
    n = 2 * horizon

    if horizon == 0:
        if problem.goal <= problem.init and not trie.is_dead(()):
            yield Candidate((), (), STN.origin())
        return

    tokens: list[Token] = []
    entries: list[list] = []  # [action, start_idx, end_idx|None]

    def walk(
        props: frozenset[str],
        open_at: dict[str, int],
        starts: int,
        stn: STN,
    ) -> Iterator[Candidate]:
        depth = len(tokens)
        if depth == n:
            if problem.goal <= props and not trie.is_dead(tuple(tokens)):
                pairing = tuple((a, s, e) for a, s, e in entries)
                yield Candidate(tuple(tokens), pairing, stn.copy())
            return

        moves: list[tuple[Token, frozenset[str]]] = []
        for a in problem.actions:
            if a.name in open_at:
                try:
                    after = apply_snap_action(props, a.end)
                except Inapplicable:
                    continue
                held = all(
                    problem.action(o).overall <= after
                    for o in open_at
                    if o != a.name
                )
                if held:
                    moves.append(((END, a.name), after))
            elif starts < horizon:
                try:
                    after = apply_snap_action(props, a.start)
                except Inapplicable:
                    continue
                held = a.overall <= after and all(
                    problem.action(o).overall <= after for o in open_at
                )
                if held:
                    moves.append(((START, a.name), after))

        for (kind, action), after in _move_order(problem, moves):
            tokens.append((kind, action))
            if trie.is_banned(tuple(tokens)):
                tokens.pop()
                continue
            child = stn.copy()
            i = len(tokens)
            try:
                _append_event(child, i)
                if kind == END:
                    s = open_at[action]
                    _duration_edges(child, problem.action(action), s, i)
            except InconsistentSTN:
                tokens.pop()
                continue
            if kind == START:
                open_at2 = dict(open_at)
                open_at2[action] = i
                entries.append([action, i, None])
                yield from walk(after, open_at2, starts + 1, child)
                entries.pop()
            else:
                open_at2 = {k: v for k, v in open_at.items() if k != action}
                slot = next(
                    r for r in entries if r[0] == action and r[2] is None
                )
                slot[2] = i
                yield from walk(after, open_at2, starts, child)
                slot[2] = None
            tokens.pop()

    yield from walk(problem.init, {}, 0, STN.origin())
