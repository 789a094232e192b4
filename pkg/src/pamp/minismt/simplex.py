"""Incremental simplex for linear rational arithmetic with strict bounds.

General simplex over bound constraints: structural variables plus one slack
variable per distinct linear form.  Values and bounds are (value, delta)
pairs, the delta coordinate standing for an infinitesimal that realizes
strict inequalities exactly.  Bounds carry the literal that asserted them so
conflicts come back as explanations; assertion order is checkpointed and
popped in reverse when the SAT solver backtracks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

Delta = tuple[Fraction, Fraction]

D_ZERO: Delta = (Fraction(0), Fraction(0))


def d_add(a: Delta, b: Delta) -> Delta:
    return (a[0] + b[0], a[1] + b[1])

def d_sub(a: Delta, b: Delta) -> Delta:
    return (a[0] - b[0], a[1] - b[1])

def d_scale(a: Delta, k: Fraction) -> Delta:
    return (a[0] * k, a[1] * k)


@dataclass
class _VarState:
    value: Delta = D_ZERO
    lower: Delta | None = None
    upper: Delta | None = None
    lower_reason: int | None = None
    upper_reason: int | None = None


class Conflict(Exception):
    def __init__(self, reasons: list[int]):
        super().__init__("theory conflict")
        self.reasons = reasons


class Simplex:
    def __init__(self) -> None:
        self.vars: list[_VarState] = []
        self.rows: dict[int, dict[int, Fraction]] = {}  # basic -> nonbasic coeffs
        self.cols: dict[int, set[int]] = {}  # nonbasic -> basics using it
        self.trail: list[tuple[int, str, Delta | None, int | None]] = []
        self.marks: list[int] = []

    # -- construction ------------------------------------------------------

    def new_var(self) -> int:
        self.vars.append(_VarState())
        idx = len(self.vars) - 1
        self.cols[idx] = set()
        return idx

    def add_row(self, slack: int, coeffs: dict[int, Fraction]) -> None:
        """Define slack = sum of coeffs over structural variables."""
        row = {v: Fraction(c) for v, c in coeffs.items() if c != 0}
        # substitute any basic variables already defined by rows
        changed = True
        while changed:
            changed = False
            for v in list(row):
                if v in self.rows:
                    c = row.pop(v)
                    for w, cw in self.rows[v].items():
                        row[w] = row.get(w, Fraction(0)) + c * cw
                        if row[w] == 0:
                            del row[w]
                    changed = True
                    break
        self.rows[slack] = row
        for v in row:
            self.cols[v].add(slack)
        value = D_ZERO
        for v, c in row.items():
            value = d_add(value, d_scale(self.vars[v].value, c))
        self.vars[slack].value = value

    # -- assertion and backtracking ---------------------------------------

    def mark(self) -> None:
        self.marks.append(len(self.trail))

    def pop_mark(self) -> None:
        target = self.marks.pop()
        while len(self.trail) > target:
            var, kind, bound, reason = self.trail.pop()
            st = self.vars[var]
            if kind == "U":
                st.upper, st.upper_reason = bound, reason
            else:
                st.lower, st.lower_reason = bound, reason

    def assert_upper(self, var: int, bound: Delta, reason: int) -> None:
        st = self.vars[var]
        if st.upper is not None and st.upper <= bound:
            return
        if st.lower is not None and bound < st.lower:
            raise Conflict([r for r in (st.lower_reason, reason) if r is not None])
        self.trail.append((var, "U", st.upper, st.upper_reason))
        st.upper, st.upper_reason = bound, reason
        if var not in self.rows and st.value > bound:
            self._update(var, bound)

    def assert_lower(self, var: int, bound: Delta, reason: int) -> None:
        st = self.vars[var]
        if st.lower is not None and st.lower >= bound:
            return
        if st.upper is not None and bound > st.upper:
            raise Conflict([r for r in (st.upper_reason, reason) if r is not None])
        self.trail.append((var, "L", st.lower, st.lower_reason))
        st.lower, st.lower_reason = bound, reason
        if var not in self.rows and st.value < bound:
            self._update(var, bound)

    def _update(self, var: int, value: Delta) -> None:
        delta = d_sub(value, self.vars[var].value)
        self.vars[var].value = value
        for basic in self.cols[var]:
            c = self.rows[basic][var]
            self.vars[basic].value = d_add(self.vars[basic].value, d_scale(delta, c))

    # -- check -------------------------------------------------------------

    def check(self) -> None:
        """Repair basic variables outside their bounds; raise Conflict with
        an explanation when impossible.  Bland's rule keeps it terminating
        and deterministic."""
        while True:
            broken = None
            for b in sorted(self.rows):
                st = self.vars[b]
                if st.lower is not None and st.value < st.lower:
                    broken = (b, True, st.lower)
                    break
                if st.upper is not None and st.value > st.upper:
                    broken = (b, False, st.upper)
                    break
            if broken is None:
                return
            b, need_up, target = broken
            row = self.rows[b]
            pivot_var = None
            for n in sorted(row):
                c = row[n]
                st = self.vars[n]
                if need_up:
                    ok = (c > 0 and (st.upper is None or st.value < st.upper)) or (
                        c < 0 and (st.lower is None or st.value > st.lower)
                    )
                else:
                    ok = (c > 0 and (st.lower is None or st.value > st.lower)) or (
                        c < 0 and (st.upper is None or st.value < st.upper)
                    )
                if ok:
                    pivot_var = n
                    break
            if pivot_var is None:
                reasons = []
                own = self.vars[b].lower_reason if need_up else self.vars[b].upper_reason
                if own is not None:
                    reasons.append(own)
                for n in sorted(row):
                    c = row[n]
                    st = self.vars[n]
                    if (need_up and c > 0) or (not need_up and c < 0):
                        if st.upper_reason is not None:
                            reasons.append(st.upper_reason)
                    else:
                        if st.lower_reason is not None:
                            reasons.append(st.lower_reason)
                raise Conflict(reasons)
            self._pivot_and_update(b, pivot_var, target)

    def _pivot_and_update(self, basic: int, nonbasic: int, target: Delta) -> None:
        row = self.rows[basic]
        coef = row[nonbasic]
        theta = d_scale(d_sub(target, self.vars[basic].value), Fraction(1) / coef)
        # move values
        self.vars[basic].value = target
        self.vars[nonbasic].value = d_add(self.vars[nonbasic].value, theta)
        for other in self.cols[nonbasic]:
            if other == basic:
                continue
            c = self.rows[other][nonbasic]
            self.vars[other].value = d_add(self.vars[other].value, d_scale(theta, c))
        # pivot: express nonbasic from basic's row
        new_row: dict[int, Fraction] = {basic: Fraction(1) / coef}
        for v, c in row.items():
            if v != nonbasic:
                new_row[v] = -c / coef
        # detach old row
        for v in row:
            self.cols[v].discard(basic)
        del self.rows[basic]
        # substitute into every row that used nonbasic
        for other in list(self.cols[nonbasic]):
            orow = self.rows[other]
            c = orow.pop(nonbasic)
            for v, cv in new_row.items():
                nv = orow.get(v, Fraction(0)) + c * cv
                if nv == 0:
                    orow.pop(v, None)
                    self.cols[v].discard(other)
                else:
                    orow[v] = nv
                    self.cols[v].add(other)
        self.cols[nonbasic] = set()
        self.rows[nonbasic] = new_row
        for v in new_row:
            self.cols[v].add(nonbasic)

    # -- models ------------------------------------------------------------

    def concrete_model(self) -> list[Fraction]:
        """Concretize delta values with one epsilon small enough for every
        asserted bound."""
        eps = Fraction(1)
        for st in self.vars:
            for bound, is_upper in ((st.upper, True), (st.lower, False)):
                if bound is None:
                    continue
                va, vb = st.value
                ba, bb = bound
                if is_upper:
                    gap_a, gap_b = ba - va, vb - bb
                else:
                    gap_a, gap_b = va - ba, bb - vb
                # need gap_a + (-gap_b) * eps ... positive: eps < gap_a/gap_b
                if gap_a > 0 and gap_b > 0:
                    eps = min(eps, Fraction(gap_a, gap_b) / 2)
        return [st.value[0] + st.value[1] * eps for st in self.vars]
