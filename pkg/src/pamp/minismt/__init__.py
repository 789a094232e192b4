"""Exact-arithmetic SMT solving for linear real arithmetic.

Quantifier-free conjunctions go through a CDCL SAT core coupled to an
incremental simplex over rationals; universally quantified assertions go
through counterexample-guided refinement.  Runs in process through
solve / solve_ground or as a pipe server via  python3 -m pamp.minismt.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .cnf import GroundSolver, solve_ground
from .quant import UnsupportedQuantifier, solve

SAT = "sat"
UNSAT = "unsat"
UNKNOWN = "unknown"


@dataclass
class Result:
    status: str
    bools: dict[str, bool] = field(default_factory=dict)
    rats: dict[str, Fraction] = field(default_factory=dict)


def check(asserts, bool_names=(), real_names=(), deadline=None) -> Result:
    status, bools, rats = solve(list(asserts), bool_names, real_names, deadline)
    return Result(status, bools or {}, rats or {})


__all__ = [
    "GroundSolver",
    "Result",
    "SAT",
    "UNKNOWN",
    "UNSAT",
    "UnsupportedQuantifier",
    "check",
    "solve",
    "solve_ground",
]
