import cProfile, pstats, random, sys, io
sys.path.insert(0, "src")
from pamp import texec
from pamp.backend import SolverConfig, solve_terms
from pamp.encoding import build_plan_check
from pamp.generators import random_check_triple
from pamp.model import plan_to_snap_sequence
import time

rng = random.Random(1000)
plan, ta, bad, kappa = random_check_triple(rng)
seq = plan_to_snap_sequence(plan)
print(f"n={len(seq)} kappa={kappa} locs={len(ta.locations)} trans={len(ta.transitions)} clocks={len(ta.clocks)}")
t0=time.time()
q = build_plan_check(ta, bad, kappa, seq)
print(f"build: {time.time()-t0:.2f}s")
from pamp.terms import term_size
print(f"trace_ok size: {term_size(q.trace_ok)}, exec_viol: {term_size(q.exec_violation)}, safety_viol: {term_size(q.safety_violation)}")
cfg = SolverConfig(timeout=30.0)
pr = cProfile.Profile()
pr.enable()
r = solve_terms([q.trace_ok, q.exec_violation], list(q.bool_names), list(q.real_names), cfg)
pr.disable()
print("exec query:", r.status)
s = io.StringIO()
pstats.Stats(pr, stream=s).sort_stats("cumulative").print_stats(18)
print(s.getvalue())
