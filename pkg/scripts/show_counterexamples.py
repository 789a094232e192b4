#!/usr/bin/env python3
"""Validate the two canonical failing factory plans and print their witnesses.

Usage: python3 scripts/show_counterexamples.py
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from pamp.generators import factory_plan_late, factory_plan_rushed, gen_factory
from pamp.texec import validate_plan


def show(tag, pamp, plan):
    outcome = validate_plan(pamp, plan)
    print(f"{tag}: {outcome.verdict}")
    print(f"  {outcome.detail}")
    w = outcome.witness
    if w is None:
        return
    print(f"  violation at time {w.time}, after {w.prefix} plan events")
    for step in w.run:
        clocks = ", ".join(f"{c}={v}" for c, v in sorted(step.clocks.items()))
        label = step.label or f"({step.note or 'wait'})"
        print(f"    +{str(step.delay):>6} {label:16s} -> {step.location:12s} [{clocks}]")


def main() -> None:
    pamp = gen_factory(2, 50, 2, variant=1)
    show("late schedule", pamp, factory_plan_late(2))
    print()
    show("rushed schedule", pamp, factory_plan_rushed(2))


if __name__ == "__main__":
    main()
