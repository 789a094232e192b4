#!/usr/bin/env python3
"""Run the desk-scale benchmark suite and write record + table CSVs.

Usage: python3 scripts/run_suite.py [--modes enc ref] [--timeout 120]
                                    [--out-dir results]
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from pamp.bench import desk_suite, emit_results, records_to_csv, run_suite


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--modes", nargs="+", default=["enc", "ref"])
    parser.add_argument("--timeout", type=float, default=120.0)
    parser.add_argument("--out-dir", default="results")
    args = parser.parse_args()

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    def progress(record):
        print(
            f"{record.instance:26s} {record.mode:3s} {record.verdict:26s}"
            f" {record.wall:8.2f}s",
            flush=True,
        )

    records = run_suite(
        desk_suite(), modes=tuple(args.modes), timeout=args.timeout, progress=progress
    )
    (out_dir / "records.csv").write_text(records_to_csv(records))
    for name, text in emit_results(records).items():
        (out_dir / f"{name}.csv").write_text(text)
    print(f"\nwrote {out_dir}/records.csv and coverage/cactus/scatter tables")


if __name__ == "__main__":
    main()
