#!/usr/bin/env python3
"""Solve the two-stage factory instance in both modes and print the plans.

Usage: python3 scripts/run_example.py [--enc-timeout 1200]
"""

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from pamp.engine import EngineConfig, solve
from pamp.generators import gen_factory
from pamp.texec import validate_plan


def show(tag, pamp, result, wall):
    print(f"{tag}: {result.verdict} in {wall:.2f}s")
    if result.plan is None:
        print(f"  detail: {result.detail or result.stats}")
        return
    for e in sorted(result.plan.entries, key=lambda e: e.start):
        print(f"  {e.action:10s} start={str(e.start):6s} duration={e.duration}")
    makespan = max(e.start + e.duration for e in result.plan.entries)
    print(f"  makespan {makespan}, validator {validate_plan(pamp, result.plan).verdict}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--enc-timeout", type=float, default=1200.0)
    args = parser.parse_args()

    pamp = gen_factory(2, 50, 2, variant=1)

    t0 = time.monotonic()
    res = solve(pamp, EngineConfig(mode="ref", max_horizon=4, timeout=30.0))
    show("ref", pamp, res, time.monotonic() - t0)

    t0 = time.monotonic()
    res = solve(pamp, EngineConfig(mode="enc", max_horizon=4, timeout=args.enc_timeout))
    show("enc", pamp, res, time.monotonic() - t0)


if __name__ == "__main__":
    main()
