"""Command-line surface.

Subcommands: ``solve`` runs a mode on a bundle and writes a report,
``validate`` checks a plan file against a bundle, ``gen`` writes bundle
files, ``report`` turns run records into the CSV tables.

Exit codes: 0 solution or clean validation, 1 no solution or violation
found, 2 usage or input error, 3 timeout or solver give-up.
"""

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .backend import CEGIS, NATIVE, SolverConfig
from .bench import desk_suite, emit_results, records_from_csv, records_to_csv, run_suite
from .engine import EngineConfig, solve
from .formats import (
    Report,
    parse_plan,
    parse_problem_bundle,
    serialize_plan,
    serialize_problem_bundle,
    serialize_report,
)
from .generators import gen_factory, gen_rover
from .texec import validate_plan

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_UNKNOWN = 3

_NEGATIVE_VERDICTS = {
    "NO-SOLUTION-WITHIN-BOUND",
    "UNSAFE",
    "NON-EXECUTABLE",
    "INVALID-PLAN",
}


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_USAGE


def _load_bundle(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValueError(f"cannot read {path}: {exc}") from exc
    pamp, diags = parse_problem_bundle(text)
    if pamp is None:
        lines = "; ".join(f"{d.path}: {d.message}" for d in diags)
        raise ValueError(f"bad bundle {path}: {lines}")
    return pamp


def _load_plan(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValueError(f"cannot read {path}: {exc}") from exc
    plan, diags = parse_plan(text)
    if plan is None:
        lines = "; ".join(f"{d.path}: {d.message}" for d in diags)
        raise ValueError(f"bad plan {path}: {lines}")
    return plan


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _engine_config(args) -> EngineConfig:
    solver = SolverConfig(cmd=args.solver_cmd, strategy=args.strategy)
    return EngineConfig(
        mode=args.mode,
        max_horizon=args.max_h,
        solver=solver,
        timeout=args.timeout,
    )


def _cmd_solve(args) -> int:
    pamp = _load_bundle(args.bundle)
    if args.kappa is not None:
        pamp = replace(pamp, kappa=args.kappa)
    result = solve(pamp, _engine_config(args))
    report = Report(verdict=result.verdict, plan=result.plan, stats=result.stats)
    _write(args.out, serialize_report(report))
    if result.verdict == "SOLUTION":
        if args.plan_out is not None:
            _write(args.plan_out, serialize_plan(result.plan))
        return EXIT_OK
    if result.verdict in _NEGATIVE_VERDICTS:
        return EXIT_NEGATIVE
    return EXIT_UNKNOWN


def _cmd_validate(args) -> int:
    pamp = _load_bundle(args.bundle)
    if args.kappa is not None:
        pamp = replace(pamp, kappa=args.kappa)
    plan = _load_plan(args.plan)
    outcome = validate_plan(pamp, plan)
    witness = outcome.witness.to_data() if outcome.witness is not None else None
    report = Report(verdict=outcome.verdict, plan=plan, witness=witness)
    _write(args.out, serialize_report(report))
    return EXIT_OK if outcome.verdict == "SOLUTION" else EXIT_NEGATIVE


def _cmd_gen(args) -> int:
    if args.family in ("factory1", "factory2"):
        variant = 1 if args.family == "factory1" else 2
        pamp = gen_factory(args.works, args.deadline, args.kappa, variant=variant)
    elif args.family == "rover":
        comm = tuple(args.comm or ())
        pamp = gen_rover(args.locations, comm, args.kappa)
    else:
        raise ValueError(f"unknown family {args.family!r}")
    _write(args.out, serialize_problem_bundle(pamp))
    return EXIT_OK


def _cmd_report(args) -> int:
    try:
        text = Path(args.records).read_text()
    except OSError as exc:
        raise ValueError(f"cannot read {args.records}: {exc}") from exc
    records = records_from_csv(text)
    if not records:
        raise ValueError("record file is empty")
    tables = emit_results(records)
    out_dir = Path(args.out or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, csv_text in tables.items():
        (out_dir / f"{name}.csv").write_text(csv_text)
        print(out_dir / f"{name}.csv")
    return EXIT_OK


def _cmd_bench(args) -> int:
    def progress(record):
        print(
            f"{record.instance} {record.mode} {record.verdict} {record.wall}s",
            file=sys.stderr,
        )

    records = run_suite(
        desk_suite(), modes=tuple(args.modes), timeout=args.timeout, progress=progress
    )
    _write(args.out, records_to_csv(records))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pamp",
        description="Plan synthesis and validation against timed-automaton platforms.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve_p = sub.add_parser("solve", help="solve a bundle and write a report")
    solve_p.add_argument("bundle")
    solve_p.add_argument("--mode", choices=("enc", "ref"), default="ref")
    solve_p.add_argument("--kappa", type=int, default=None)
    solve_p.add_argument("--max-h", type=int, default=6, dest="max_h")
    solve_p.add_argument(
        "--max-path-len",
        type=int,
        default=None,
        help="alias for --max-h, the skeleton length bound",
    )
    solve_p.add_argument("--solver-cmd", default=None)
    solve_p.add_argument("--strategy", choices=(NATIVE, CEGIS), default=NATIVE)
    solve_p.add_argument("--timeout", type=float, default=None)
    solve_p.add_argument("--out", default=None, help="report destination")
    solve_p.add_argument("--plan-out", default=None, help="also write the bare plan")
    solve_p.set_defaults(fn=_cmd_solve)

    val_p = sub.add_parser("validate", help="check a plan file against a bundle")
    val_p.add_argument("bundle")
    val_p.add_argument("plan")
    val_p.add_argument("--kappa", type=int, default=None)
    val_p.add_argument("--out", default=None)
    val_p.set_defaults(fn=_cmd_validate)

    gen_p = sub.add_parser("gen", help="write a benchmark bundle")
    gen_p.add_argument("--family", choices=("factory1", "factory2", "rover"), required=True)
    gen_p.add_argument("--works", type=int, default=2)
    gen_p.add_argument("--deadline", type=int, default=50)
    gen_p.add_argument("--locations", type=int, default=3)
    gen_p.add_argument("--comm", type=int, nargs="*", default=None)
    gen_p.add_argument("--kappa", type=int, default=2)
    gen_p.add_argument("--out", default=None)
    gen_p.set_defaults(fn=_cmd_gen)

    rep_p = sub.add_parser("report", help="emit coverage/cactus/scatter CSV tables")
    rep_p.add_argument("records", help="run-record CSV file")
    rep_p.add_argument("--out", default=None, help="output directory")
    rep_p.set_defaults(fn=_cmd_report)

    bench_p = sub.add_parser("bench", help="run the desk-scale suite")
    bench_p.add_argument("--modes", nargs="+", default=["enc", "ref"])
    bench_p.add_argument("--timeout", type=float, default=120.0)
    bench_p.add_argument("--out", default=None)
    bench_p.set_defaults(fn=_cmd_bench)

    return parser


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    if args.command == "solve" and args.max_path_len is not None:
        args.max_h = args.max_path_len
    try:
        return args.fn(args)
    except ValueError as exc:
        return _fail(str(exc))


def main() -> None:
    raise SystemExit(run_cli())


if __name__ == "__main__":
    main()
