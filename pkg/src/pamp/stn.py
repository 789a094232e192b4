"""Simple temporal networks over rational time points with strict bounds.

Node 0 is the time origin.  An edge (i, j, bound) encodes
t_j - t_i <= v (or < v when the bound is strict).  The distance matrix is
kept all-pairs closed after every edge insertion, so feasibility checks,
projections onto a node subset, and window lookups are constant time.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

# a bound is (value, strict); None plays infinity
Bound = tuple[Fraction, bool]

INF_VALUE = Fraction(10**12)


def bound_add(a: Bound, b: Bound) -> Bound:
    return (a[0] + b[0], a[1] or b[1])


def bound_lt(a: Bound, b: Bound) -> bool:
    """Is a tighter than b as an upper bound?"""
    if a[0] != b[0]:
        return a[0] < b[0]
    return a[1] and not b[1]


def _violates(diag: Bound) -> bool:
    # a cycle of negative length, or zero length with a strict edge
    return diag[0] < 0 or (diag[0] == 0 and diag[1])


class InconsistentSTN(ValueError):
    pass


@dataclass
class STN:
    """Grows one node at a time; raises InconsistentSTN on a negative cycle."""

    d: list[list[Bound]]

    @staticmethod
    def origin() -> "STN":
        return STN([[(Fraction(0), False)]])

    @property
    def size(self) -> int:
        return len(self.d)

    def copy(self) -> "STN":
        return STN([row[:] for row in self.d])

    def add_node(self) -> int:
        n = self.size
        for row in self.d:
            row.append((INF_VALUE, False))
        self.d.append([(INF_VALUE, False)] * n + [(Fraction(0), False)])
        return n

    def add_edge(self, i: int, j: int, bound: Bound) -> None:
        if not bound_lt(bound, self.d[i][j]):
            return
        d = self.d
        n = self.size
        # tighten every path that can route through the new edge
        for u in range(n):
            to_i = d[u][i]
            if to_i[0] >= INF_VALUE:
                continue
            head = bound_add(to_i, bound)
            row_u = d[u]
            row_j = d[j]
            for v in range(n):
                tail = row_j[v]
                if tail[0] >= INF_VALUE:
                    continue
                cand = bound_add(head, tail)
                if bound_lt(cand, row_u[v]):
                    row_u[v] = cand
        for u in range(n):
            if _violates(d[u][u]):
                raise InconsistentSTN(f"negative cycle through node {u}")

    def upper(self, i: int, j: int) -> Bound:
        return self.d[i][j]

    def feasible_point(self) -> list[Fraction]:
        """One satisfying assignment, origin pinned to zero."""
        big = INF_VALUE / 2
        times: list[Fraction] = [Fraction(0)] * self.size
        for j in range(1, self.size):
            lo: Bound = (-INF_VALUE, False)
            hi: Bound = (INF_VALUE, False)
            for i in range(j):
                # t_j - t_i <= d[i][j] and t_i - t_j <= d[j][i]
                if self.d[i][j][0] < big:
                    cap = (times[i] + self.d[i][j][0], self.d[i][j][1])
                    if bound_lt(cap, hi):
                        hi = cap
                if self.d[j][i][0] < big:
                    floor: Bound = (times[i] - self.d[j][i][0], self.d[j][i][1])
                    if floor[0] > lo[0] or (floor[0] == lo[0] and floor[1]):
                        lo = floor
            if lo[0] > hi[0] or (lo[0] == hi[0] and (lo[1] or hi[1])):
                raise InconsistentSTN("window collapsed during extraction")
            if lo[0] <= -big:
                if hi[0] >= big:
                    times[j] = Fraction(0)
                else:
                    times[j] = hi[0] - 1 if hi[1] else hi[0]
            elif not lo[1]:
                times[j] = lo[0]
            elif hi[0] >= big:
                times[j] = lo[0] + 1
            else:
                times[j] = (lo[0] + hi[0]) / 2
        return times
