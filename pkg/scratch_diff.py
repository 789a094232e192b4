"""Differential smoke: oracle verdicts vs ground check-query SAT results."""

import random
import sys
import time

sys.path.insert(0, "src")

from pamp import texec
from pamp.backend import SAT, UNSAT, SolverConfig, solve_terms
from pamp.encoding import build_plan_check
from pamp.generators import random_check_triple
from pamp.model import plan_to_snap_sequence

cfg = SolverConfig(timeout=60.0)
bad_cases = []
t0 = time.time()
n = int(sys.argv[1]) if len(sys.argv) > 1 else 30
for seed in range(n):
    rng = random.Random(1000 + seed)
    plan, ta, bad, kappa = random_check_triple(rng)
    seq = plan_to_snap_sequence(plan)
    w_exec = texec.check_executability(ta, seq, kappa)
    w_safe = texec.check_safety(ta, seq, bad, kappa)
    q = build_plan_check(ta, bad, kappa, seq)
    t1 = time.time()
    r_exec = solve_terms(
        [q.trace_ok, q.exec_violation], list(q.bool_names), list(q.real_names), cfg
    )
    r_safe = solve_terms(
        [q.trace_ok, q.safety_violation], list(q.bool_names), list(q.real_names), cfg
    )
    dt = time.time() - t1
    exp_exec = SAT if w_exec is not None else UNSAT
    exp_safe = SAT if w_safe is not None else UNSAT
    mark = ""
    if r_exec.status != exp_exec or r_safe.status != exp_safe:
        mark = "  <-- MISMATCH"
        bad_cases.append(seed)
    print(
        f"seed {seed:3d}: n={len(seq)} kappa={kappa} slots={q.shape.slots} "
        f"oracle=({exp_exec[:5]:5s},{exp_safe[:5]:5s}) "
        f"smt=({r_exec.status[:5]:5s},{r_safe.status[:5]:5s}) {dt:5.2f}s{mark}"
    )

print(f"\n{n - len(bad_cases)}/{n} agree in {time.time() - t0:.1f}s")
if bad_cases:
    print("mismatches:", bad_cases)
    sys.exit(1)
