"""Ground solving: Tseitin encoding over a SAT core plus the simplex theory.

Linear atoms are canonicalized (first nonzero coefficient positive) and
deduplicated; each canonical linear form gets one simplex slack row, and
each (form, constant, strictness) triple one SAT variable.  Equalities
split into a nonstrict-and-not-strict pair.
"""

from __future__ import annotations

from fractions import Fraction

from ..terms import (
    EQ,
    LE,
    LT,
    Atom,
    BoolLit,
    BoolVar,
    Conn,
    LinExpr,
    Not,
    Term,
)
from .sat import SAT, SatSolver
from .simplex import Conflict, Simplex

ZERO = Fraction(0)


class GroundSolver:
    """One-shot solver for a conjunction of quantifier-free assertions."""

    def __init__(self) -> None:
        self.sat = SatSolver()
        self.simplex = Simplex()
        self.true_lit = self.sat.new_var()
        self.sat.add_clause([self.true_lit])
        self.bool_vars: dict[str, int] = {}
        self.real_vars: dict[str, int] = {}
        self.slack_of: dict[tuple, int] = {}
        self.atom_lit: dict[tuple, int] = {}
        self.eq_lit: dict[tuple, int] = {}
        self.node_lit: dict[int, int] = {}
        self.sat.theory_assign = self._theory_assign
        self.sat.theory_unassign = self._theory_unassign
        self.sat.theory_check = self._theory_check
        self._info: dict[int, tuple[int, Fraction, str]] = {}
        self._pinned: list[Term] = []  # node cache keys by id, keep terms alive

    # -- variables ---------------------------------------------------------

    def bool_var(self, name: str) -> int:
        v = self.bool_vars.get(name)
        if v is None:
            v = self.sat.new_var()
            self.bool_vars[name] = v
        return v

    def _real(self, name: str) -> int:
        v = self.real_vars.get(name)
        if v is None:
            v = self.simplex.new_var()
            self.real_vars[name] = v
        return v

    def _slack(self, coeffs: tuple) -> int:
        s = self.slack_of.get(coeffs)
        if s is None:
            s = self.simplex.new_var()
            row = {self._real(name): c for name, c in coeffs}
            self.simplex.add_row(s, row)
            self.slack_of[coeffs] = s
        return s

    def _ineq_lit(self, expr: LinExpr, strict: bool) -> int:
        """Literal meaning expr <= 0 (or < 0 when strict)."""
        if not expr.coeffs:
            if strict:
                hold = expr.const < 0
            else:
                hold = expr.const <= 0
            return self.true_lit if hold else -self.true_lit
        neg = expr.coeffs[0][1] < 0
        canon = expr.scale(Fraction(-1)) if neg else expr
        # -e <= 0 is not(e < 0); -e < 0 is not(e <= 0)
        kind = ("st" if not strict else "ns") if neg else ("st" if strict else "ns")
        key = (canon.coeffs, canon.const, kind)
        var = self.atom_lit.get(key)
        if var is None:
            var = self.sat.new_var()
            self.atom_lit[key] = var
            slack = self._slack(canon.coeffs)
            self._info[var] = (slack, canon.const, kind)
            self.sat.theory_vars.add(var)
        return -var if neg else var

    def _atom_lit(self, atom: Atom) -> int:
        if atom.op == LE:
            return self._ineq_lit(atom.expr, False)
        if atom.op == LT:
            return self._ineq_lit(atom.expr, True)
        expr = atom.expr
        if not expr.coeffs:
            return self.true_lit if expr.const == 0 else -self.true_lit
        if expr.coeffs[0][1] < 0:
            expr = expr.scale(Fraction(-1))
        key = (expr.coeffs, expr.const)
        e = self.eq_lit.get(key)
        if e is None:
            le = self._ineq_lit(expr, False)
            lt = self._ineq_lit(expr, True)
            e = self.sat.new_var()
            self.eq_lit[key] = e
            # e holds exactly on the boundary: le and not lt
            self.sat.add_clause([-e, le])
            self.sat.add_clause([-e, -lt])
            self.sat.add_clause([e, -le, lt])
        return e

    # -- tseitin -----------------------------------------------------------

    def _lit(self, t: Term) -> int:
        if isinstance(t, BoolLit):
            return self.true_lit if t.value else -self.true_lit
        if isinstance(t, BoolVar):
            return self.bool_var(t.name)
        if isinstance(t, Not):
            return -self._lit(t.arg)
        cached = self.node_lit.get(id(t))
        if cached is not None:
            return cached
        if isinstance(t, Atom):
            lit = self._atom_lit(t)
        elif isinstance(t, Conn):
            args = [self._lit(a) for a in t.args]
            lit = self.sat.new_var()
            if t.op == "and":
                for a in args:
                    self.sat.add_clause([-lit, a])
                self.sat.add_clause([lit] + [-a for a in args])
            else:
                for a in args:
                    self.sat.add_clause([lit, -a])
                self.sat.add_clause([-lit] + args)
        else:
            raise TypeError(f"cannot ground {type(t).__name__}")
        self.node_lit[id(t)] = lit
        return lit

    def add(self, t: Term) -> None:
        self._pinned.append(t)
        self.sat.add_clause([self._lit(t)])

    # -- theory callbacks --------------------------------------------------

    def _theory_assign(self, lit: int) -> list[int] | None:
        slack, const, kind = self._info[abs(lit)]
        self.simplex.mark()
        try:
            if lit > 0:
                if kind == "ns":
                    self.simplex.assert_upper(slack, (-const, ZERO), lit)
                else:
                    self.simplex.assert_upper(slack, (-const, Fraction(-1)), lit)
            else:
                if kind == "ns":
                    self.simplex.assert_lower(slack, (-const, Fraction(1)), lit)
                else:
                    self.simplex.assert_lower(slack, (-const, ZERO), lit)
        except Conflict as c:
            return sorted(set(c.reasons), key=abs)
        return None

    def _theory_unassign(self, lit: int) -> None:
        self.simplex.pop_mark()

    def _theory_check(self) -> list[int] | None:
        try:
            self.simplex.check()
        except Conflict as c:
            return sorted(set(c.reasons), key=abs)
        return None

    # -- results -----------------------------------------------------------

    def check(self, deadline: float | None = None) -> str:
        return self.sat.solve(deadline)

    def model(self) -> tuple[dict[str, bool], dict[str, Fraction]]:
        bools = {
            name: self.sat.assign[var] == 1 for name, var in self.bool_vars.items()
        }
        values = self.simplex.concrete_model()
        rats = {name: values[var] for name, var in self.real_vars.items()}
        return bools, rats


def solve_ground(
    terms: list[Term], deadline: float | None = None
) -> tuple[str, dict[str, bool] | None, dict[str, Fraction] | None]:
    gs = GroundSolver()
    for t in terms:
        gs.add(t)
    status = gs.check(deadline)
    if status != SAT:
        return status, None, None
    bools, rats = gs.model()
    return status, bools, rats
