"""CDCL SAT solver with a lazy theory hook.

Two-watched-literal propagation, VSIDS decisions with phase saving, first-UIP
conflict learning, and Luby restarts.  Entirely deterministic: ties break on
variable index, no randomization anywhere.  A theory object receives bound
assertions for designated variables and reports conflicts as explanation
cores (lists of true literals); those become conflict clauses.
"""

from __future__ import annotations

import heapq
import time
from typing import Callable

SAT = "sat"
UNSAT = "unsat"
UNKNOWN = "unknown"


def _luby(i: int) -> int:
    k = 1
    while (1 << (k + 1)) - 1 <= i:
        k += 1
    while i != (1 << k) - 1:
        i = i - (1 << k) + 1
        k = 1
        while (1 << (k + 1)) - 1 <= i:
            k += 1
    return 1 << (k - 1)


class SatSolver:
    def __init__(self) -> None:
        self.nvars = 0
        self.clauses: list[list[int]] = []
        self.watches: dict[int, list[int]] = {}
        self.assign: list[int] = [0]  # 1 true, -1 false, 0 unassigned; 1-based
        self.level: list[int] = [0]
        self.reason: list[int] = [-1]
        self.trail: list[int] = []
        self.theory_head = 0  # trail prefix already pushed to the theory
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.activity: list[float] = [0.0]
        self.var_inc = 1.0
        self.heap: list[tuple[float, int]] = []
        self.phase: list[bool] = [False]
        self.theory_vars: set[int] = set()
        self.theory_assign: Callable[[int], list[int] | None] | None = None
        self.theory_unassign: Callable[[int], None] | None = None
        self.theory_check: Callable[[], list[int] | None] | None = None
        self.ok = True

    def new_var(self) -> int:
        self.nvars += 1
        self.assign.append(0)
        self.level.append(0)
        self.reason.append(-1)
        self.activity.append(0.0)
        self.phase.append(False)
        v = self.nvars
        heapq.heappush(self.heap, (0.0, v))
        return v

    # -- clauses -----------------------------------------------------------

    def _value(self, lit: int) -> int:
        v = self.assign[abs(lit)]
        return v if lit > 0 else -v

    def add_clause(self, lits: list[int]) -> bool:
        if not self.ok:
            return False
        seen = set()
        out = []
        for lit in lits:
            if -lit in seen:
                return True  # tautology
            if lit in seen:
                continue
            if self._value(lit) == 1 and self.level[abs(lit)] == 0:
                return True
            if self._value(lit) == -1 and self.level[abs(lit)] == 0:
                continue
            seen.add(lit)
            out.append(lit)
        if not out:
            self.ok = False
            return False
        if len(out) == 1:
            if not self._enqueue(out[0], -1):
                self.ok = False
            return self.ok
        idx = len(self.clauses)
        self.clauses.append(out)
        self.watches.setdefault(out[0], []).append(idx)
        self.watches.setdefault(out[1], []).append(idx)
        return True

    # -- assignment --------------------------------------------------------

    def _enqueue(self, lit: int, reason: int) -> bool:
        val = self._value(lit)
        if val == 1:
            return True
        if val == -1:
            return False
        v = abs(lit)
        self.assign[v] = 1 if lit > 0 else -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)
        return True

    def _propagate(self) -> list[int] | None:
        """Returns a conflict clause (list of false literals) or None."""
        while True:
            while self.qhead < len(self.trail):
                lit = self.trail[self.qhead]
                self.qhead += 1
                falsified = -lit
                watch_list = self.watches.get(falsified, [])
                kept: list[int] = []
                i = 0
                while i < len(watch_list):
                    ci = watch_list[i]
                    i += 1
                    clause = self.clauses[ci]
                    if clause[0] == falsified:
                        clause[0], clause[1] = clause[1], clause[0]
                    first = clause[0]
                    if self._value(first) == 1:
                        kept.append(ci)
                        continue
                    moved = False
                    for j in range(2, len(clause)):
                        if self._value(clause[j]) != -1:
                            clause[1], clause[j] = clause[j], clause[1]
                            self.watches.setdefault(clause[1], []).append(ci)
                            moved = True
                            break
                    if moved:
                        continue
                    kept.append(ci)
                    if not self._enqueue(first, ci):
                        kept.extend(watch_list[i:])
                        self.watches[falsified] = kept
                        self.qhead = len(self.trail)
                        return clause
                self.watches[falsified] = kept
            conflict = self._theory_flush()
            if conflict is not None:
                return conflict
            if self.qhead >= len(self.trail):
                return None

    def _theory_flush(self) -> list[int] | None:
        if self.theory_assign is None:
            self.theory_head = len(self.trail)
            return None
        progressed = False
        while self.theory_head < len(self.trail):
            lit = self.trail[self.theory_head]
            self.theory_head += 1
            if abs(lit) in self.theory_vars:
                progressed = True
                core = self.theory_assign(lit)
                if core is not None:
                    return [-l for l in core]
        if progressed and self.theory_check is not None:
            core = self.theory_check()
            if core is not None:
                return [-l for l in core]
        return None

    # -- conflict analysis -------------------------------------------------

    def _bump(self, v: int) -> None:
        self.activity[v] += self.var_inc
        if self.activity[v] > 1e100:
            for u in range(1, self.nvars + 1):
                self.activity[u] *= 1e-100
            self.var_inc *= 1e-100
        heapq.heappush(self.heap, (-self.activity[v], v))

    def _analyze(self, conflict: list[int]) -> tuple[list[int], int]:
        cur_level = len(self.trail_lim)
        seen = [False] * (self.nvars + 1)
        learned: list[int] = []
        counter = 0
        lits = list(conflict)
        idx = len(self.trail) - 1
        uip = 0
        while True:
            for lit in lits:
                v = abs(lit)
                if seen[v] or self.level[v] == 0:
                    continue
                seen[v] = True
                self._bump(v)
                if self.level[v] == cur_level:
                    counter += 1
                else:
                    learned.append(lit)
            while idx >= 0 and not seen[abs(self.trail[idx])]:
                idx -= 1
            if idx < 0:
                break
            lit = self.trail[idx]
            v = abs(lit)
            seen[v] = False
            counter -= 1
            idx -= 1
            if counter == 0:
                uip = -lit
                break
            reason = self.reason[v]
            lits = [l for l in self.clauses[reason] if abs(l) != v] if reason >= 0 else []
        learned.insert(0, uip)
        if len(learned) == 1:
            return learned, 0
        back = max(self.level[abs(l)] for l in learned[1:])
        return learned, back

    def _backjump(self, target: int) -> None:
        limit = self.trail_lim[target]
        while len(self.trail) > limit:
            lit = self.trail.pop()
            v = abs(lit)
            if len(self.trail) < self.theory_head:
                self.theory_head = len(self.trail)
                if v in self.theory_vars and self.theory_unassign:
                    self.theory_unassign(lit)
            self.phase[v] = lit > 0
            self.assign[v] = 0
            self.reason[v] = -1
            heapq.heappush(self.heap, (-self.activity[v], v))
        del self.trail_lim[target:]
        self.qhead = len(self.trail)

    def _decide(self) -> int | None:
        while self.heap:
            _, v = heapq.heappop(self.heap)
            if self.assign[v] == 0:
                return v
        for v in range(1, self.nvars + 1):
            if self.assign[v] == 0:
                return v
        return None

    # -- main loop ---------------------------------------------------------

    def solve(self, deadline: float | None = None) -> str:
        if not self.ok:
            return UNSAT
        restarts = 0
        conflicts_here = 0
        budget = 100 * _luby(1)
        ticks = 0
        while True:
            conflict = self._propagate()
            if conflict is not None:
                if not self.trail_lim:
                    self.ok = False
                    return UNSAT
                # theory cores may sit entirely below the current level
                top = max((self.level[abs(l)] for l in conflict), default=0)
                if top == 0:
                    self.ok = False
                    return UNSAT
                if top < len(self.trail_lim):
                    self._backjump(top)
                learned, back = self._analyze(conflict)
                self._backjump(back)
                if len(learned) == 1:
                    if not self._enqueue(learned[0], -1):
                        self.ok = False
                        return UNSAT
                else:
                    idx = len(self.clauses)
                    self.clauses.append(learned)
                    self.watches.setdefault(learned[0], []).append(idx)
                    self.watches.setdefault(learned[1], []).append(idx)
                    if not self._enqueue(learned[0], idx):
                        self.ok = False
                        return UNSAT
                self.var_inc /= 0.95
                conflicts_here += 1
                ticks += 1
                if deadline is not None and ticks % 64 == 0 and time.monotonic() > deadline:
                    return UNKNOWN
                if conflicts_here >= budget:
                    restarts += 1
                    conflicts_here = 0
                    budget = 100 * _luby(restarts + 1)
                    if self.trail_lim:
                        self._backjump(0)
                continue
            v = self._decide()
            if v is None:
                return SAT
            ticks += 1
            if deadline is not None and ticks % 64 == 0 and time.monotonic() > deadline:
                return UNKNOWN
            self.trail_lim.append(len(self.trail))
            lit = v if self.phase[v] else -v
            self._enqueue(lit, -1)
