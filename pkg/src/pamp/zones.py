"""Difference-bound zones over exact rationals.

A zone is a conjunction of constraints x_i - x_j <= b or < b over the clock
set plus a reference point 0.  Bounds are (value, strict) pairs where value is
a Fraction or +inf; canonical form is the all-pairs shortest-path closure.
Strictness is tracked exactly so super-dense semantics stay faithful.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .model import ClockAtom, ClockConstraint, ModelError

INF = math.inf

# A bound is (value, strict): value Fraction or INF, strict means "<".
Bound = tuple[Fraction | float, bool]

BOUND_INF: Bound = (INF, True)
BOUND_ZERO: Bound = (Fraction(0), False)


def bound_add(a: Bound, b: Bound) -> Bound:
    if a[0] is INF or b[0] is INF or a[0] == INF or b[0] == INF:
        return BOUND_INF
    return (a[0] + b[0], a[1] or b[1])


def bound_lt(a: Bound, b: Bound) -> bool:
    """Strictly tighter-than ordering."""
    if a[0] == b[0]:
        return a[1] and not b[1]
    return a[0] < b[0]


def bound_le(a: Bound, b: Bound) -> bool:
    return not bound_lt(b, a)


def bound_min(a: Bound, b: Bound) -> Bound:
    return a if bound_lt(a, b) else b


def bound_neg(a: Bound) -> Bound:
    """Negation of the constraint 'x <= b' is 'x > b', i.e. '-x < -b'."""
    if a[0] == INF:
        raise ModelError("cannot negate an infinite bound")
    return (-a[0], not a[1])


def _sat(point_diff: Fraction, bound: Bound) -> bool:
    if bound[0] == INF:
        return True
    return point_diff < bound[0] if bound[1] else point_diff <= bound[0]


@dataclass(frozen=True)
class Zone:
    """Canonical DBM.  clocks is the ordered clock tuple; index 0 is the
    reference, clock i lives at matrix index i+1."""

    clocks: tuple[str, ...]
    m: tuple[tuple[Bound, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.clocks) + 1

    def index(self, clock: str) -> int:
        return self.clocks.index(clock) + 1

    def is_empty(self) -> bool:
        return bound_lt(self.m[0][0], BOUND_ZERO)

    def bound(self, i: int, j: int) -> Bound:
        return self.m[i][j]

    def contains(self, valuation: Mapping[str, Fraction]) -> bool:
        vals = [Fraction(0)] + [valuation[c] for c in self.clocks]
        n = self.dim
        for i in range(n):
            for j in range(n):
                if not _sat(vals[i] - vals[j], self.m[i][j]):
                    return False
        return True

    def is_subset(self, other: "Zone") -> bool:
        if self.is_empty():
            return True
        if other.is_empty():
            return False
        n = self.dim
        return all(
            bound_le(self.m[i][j], other.m[i][j]) for i in range(n) for j in range(n)
        )

    def __str__(self) -> str:
        if self.is_empty():
            return "Zone(empty)"
        parts = []
        names = ("0",) + self.clocks
        for i in range(self.dim):
            for j in range(self.dim):
                b = self.m[i][j]
                if i != j and b[0] != INF:
                    op = "<" if b[1] else "<="
                    parts.append(f"{names[i]}-{names[j]} {op} {b[0]}")
        return "Zone(" + ", ".join(parts) + ")"


def _close(mat: list[list[Bound]]) -> list[list[Bound]]:
    n = len(mat)
    for k in range(n):
        mk = mat[k]
        for i in range(n):
            mik = mat[i][k]
            if mik[0] == INF:
                continue
            mi = mat[i]
            for j in range(n):
                cand = bound_add(mik, mk[j])
                if bound_lt(cand, mi[j]):
                    mi[j] = cand
    return mat


def _freeze(mat: Sequence[Sequence[Bound]]) -> tuple[tuple[Bound, ...], ...]:
    return tuple(tuple(row) for row in mat)


def _thaw(z: Zone) -> list[list[Bound]]:
    return [list(row) for row in z.m]


_EMPTY_MARK: Bound = (Fraction(-1), True)


def _mk(clocks: tuple[str, ...], mat: list[list[Bound]]) -> Zone:
    n = len(mat)
    mat = _close(mat)
    for i in range(n):
        if bound_lt(mat[i][i], BOUND_ZERO):
            empty = [[_EMPTY_MARK] * n for _ in range(n)]
            return Zone(clocks, _freeze(empty))
        mat[i][i] = BOUND_ZERO
    return Zone(clocks, _freeze(mat))


def zone_init(clocks: Sequence[str]) -> Zone:
    """All clocks exactly 0."""
    clocks = tuple(clocks)
    n = len(clocks) + 1
    mat = [[BOUND_ZERO] * n for _ in range(n)]
    return _mk(clocks, mat)


def zone_universe(clocks: Sequence[str]) -> Zone:
    """All nonnegative valuations."""
    clocks = tuple(clocks)
    n = len(clocks) + 1
    mat = [[BOUND_INF] * n for _ in range(n)]
    for i in range(n):
        mat[i][i] = BOUND_ZERO
        mat[0][i] = BOUND_ZERO  # 0 - x <= 0
    return _mk(clocks, mat)


def zone_up(z: Zone) -> Zone:
    """Arbitrary delay: drop upper bounds on every clock."""
    if z.is_empty():
        return z
    mat = _thaw(z)
    for i in range(1, z.dim):
        mat[i][0] = BOUND_INF
    # closure is preserved by up on canonical zones, but re-close for safety
    return _mk(z.clocks, mat)


def _atom_bounds(z: Zone, atom: ClockAtom) -> list[tuple[int, int, Bound]]:
    """Translate a clock atom into DBM bound updates (i, j, bound)."""
    i = z.index(atom.clock)
    j = z.index(atom.other) if atom.other is not None else 0
    n = Fraction(atom.bound)
    out: list[tuple[int, int, Bound]] = []
    if atom.op in ("<", "<="):
        out.append((i, j, (n, atom.op == "<")))
    elif atom.op in (">", ">="):
        out.append((j, i, (-n, atom.op == ">")))
    else:  # equality
        out.append((i, j, (n, False)))
        out.append((j, i, (-n, False)))
    return out


def zone_constrain(z: Zone, cc: ClockConstraint | Iterable[ClockAtom]) -> Zone:
    if z.is_empty():
        return z
    atoms = cc.atoms if isinstance(cc, ClockConstraint) else tuple(cc)
    if not atoms:
        return z
    mat = _thaw(z)
    for atom in atoms:
        for i, j, b in _atom_bounds(z, atom):
            if bound_lt(b, mat[i][j]):
                mat[i][j] = b
    return _mk(z.clocks, mat)


def zone_constrain_bound(z: Zone, clock: str, other: str | None, b: Bound) -> Zone:
    """Constrain clock - other <= / < b (other None means the reference)."""
    if z.is_empty():
        return z
    i = z.index(clock)
    j = z.index(other) if other is not None else 0
    mat = _thaw(z)
    if bound_lt(b, mat[i][j]):
        mat[i][j] = b
        return _mk(z.clocks, mat)
    return z


def zone_equal_const(z: Zone, clock: str, value: Fraction) -> Zone:
    """Pin a clock to an exact rational value."""
    if z.is_empty():
        return z
    i = z.index(clock)
    mat = _thaw(z)
    up_b: Bound = (value, False)
    lo_b: Bound = (-value, False)
    if bound_lt(up_b, mat[i][0]):
        mat[i][0] = up_b
    if bound_lt(lo_b, mat[0][i]):
        mat[0][i] = lo_b
    return _mk(z.clocks, mat)


def zone_reset(z: Zone, resets: Iterable[str]) -> Zone:
    """Reset the given clocks to 0 (canonical input assumed)."""
    if z.is_empty():
        return z
    mat = _thaw(z)
    for clock in resets:
        x = z.index(clock)
        for j in range(z.dim):
            mat[x][j] = mat[0][j]
            mat[j][x] = mat[j][0]
        mat[x][x] = BOUND_ZERO
        mat[x][0] = BOUND_ZERO
        mat[0][x] = BOUND_ZERO
    return _mk(z.clocks, mat)


def zone_sample(z: Zone) -> dict[str, Fraction]:
    """Deterministic member of a non-empty zone.

    Clocks are fixed in declaration order; each gets the midpoint of its
    current feasible interval (lower bound when exact, lower+1 when unbounded
    above).  Canonicity makes sequential assignment complete.
    """
    if z.is_empty():
        raise ModelError("cannot sample an empty zone")
    vals: dict[int, Fraction] = {0: Fraction(0)}
    for pos in range(1, z.dim):
        lo: Bound = (Fraction(0), False)  # x >= 0
        hi: Bound = BOUND_INF
        lo_strict = False
        for j, vj in vals.items():
            # x - j <= b  =>  x <= vj + b
            b = z.m[pos][j]
            if b[0] != INF:
                cand: Bound = (vj + b[0], b[1])
                if bound_lt(cand, hi):
                    hi = cand
            # j - x <= b  =>  x >= vj - b
            b2 = z.m[j][pos]
            if b2[0] != INF:
                lo_val = vj - b2[0]
                if lo_val > lo[0] or (lo_val == lo[0] and b2[1] and not lo[1]):
                    lo = (lo_val, b2[1])
        if hi[0] == INF:
            value = lo[0] + 1 if lo[1] else lo[0]
        elif lo[0] == hi[0]:
            if lo[1] or hi[1]:
                raise ModelError("inconsistent zone bounds during sampling")
            value = lo[0]
        else:
            value = (lo[0] + hi[0]) / 2
        vals[pos] = value
    return {c: vals[i + 1] for i, c in enumerate(z.clocks)}


def zone_subtract(z: Zone, others: Sequence[Zone]) -> list[Zone]:
    """Zones covering z minus the union of others (pieces may overlap)."""
    remainder = [z] if not z.is_empty() else []
    for r in others:
        if r.is_empty():
            continue
        nxt: list[Zone] = []
        for piece in remainder:
            if piece.is_subset(r):
                continue
            n = piece.dim
            for i in range(n):
                for j in range(n):
                    if i == j:
                        continue
                    rb = r.m[i][j]
                    if rb[0] == INF:
                        continue
                    if bound_lt(rb, piece.m[i][j]):
                        # piece ∧ not(xi - xj <= rb) = piece ∧ (xj - xi < -rb);
                        # kept even when it does not shrink the piece, since a
                        # piece disjoint from r survives through such a cut
                        neg = bound_neg(rb)
                        mat = _thaw(piece)
                        mat[j][i] = bound_min(neg, mat[j][i])
                        cut = _mk(piece.clocks, mat)
                        if not cut.is_empty():
                            nxt.append(cut)
            # pieces with no active facet are inside r and contribute nothing
        remainder = nxt
        if not remainder:
            break
    return remainder


def constraint_after_reset(
    cc: ClockConstraint, resets: frozenset[str] | set[str]
) -> ClockConstraint | None:
    """Rewrite a constraint to be evaluated before the reset [r -> 0].

    Returns None when the constraint is unsatisfiable after the reset
    regardless of the pre-reset valuation.
    """
    atoms: list[ClockAtom] = []
    for a in cc.atoms:
        x_reset = a.clock in resets
        y_reset = a.other is not None and a.other in resets
        if a.other is None:
            if x_reset:
                # constant comparison 0 ~ n
                if not a.holds({a.clock: Fraction(0)}):
                    return None
            else:
                atoms.append(a)
        else:
            if x_reset and y_reset:
                if not a.holds({a.clock: Fraction(0), a.other: Fraction(0)}):
                    return None
            elif x_reset:
                # 0 - y ~ n  =>  y ~' -n  with the comparison flipped
                flip = {"<": ">", "<=": ">=", "=": "=", ">=": "<=", ">": "<"}
                atoms.append(ClockAtom(a.other, flip[a.op], -a.bound))
            elif y_reset:
                atoms.append(ClockAtom(a.clock, a.op, a.bound))
            else:
                atoms.append(a)
    return ClockConstraint(tuple(atoms))
