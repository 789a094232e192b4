"""Command-line behavior: subcommands, exit codes, file round trips."""

import pytest

from pamp.cli import run_cli
from pamp.formats import parse_problem_bundle, parse_report, serialize_plan
from pamp.generators import factory_plan_rushed


@pytest.fixture()
def bundle_path(tmp_path):
    path = tmp_path / "factory.bundle"
    code = run_cli(
        [
            "gen",
            "--family", "factory1",
            "--works", "2",
            "--deadline", "50",
            "--kappa", "2",
            "--out", str(path),
        ]
    )
    assert code == 0
    return path


def test_gen_writes_parseable_bundle(bundle_path):
    pamp, diags = parse_problem_bundle(bundle_path.read_text())
    assert pamp is not None
    assert not diags
    assert pamp.kappa == 2
    assert {a.name for a in pamp.problem.actions} >= {"Process", "Work_1", "Work_2"}


def test_gen_is_deterministic(tmp_path):
    texts = []
    for name in ("a", "b"):
        path = tmp_path / name
        run_cli(["gen", "--family", "rover", "--locations", "3",
                 "--comm", "1", "--out", str(path)])
        texts.append(path.read_text())
    assert texts[0] == texts[1]


def test_solve_writes_report_and_plan(bundle_path, tmp_path):
    report_path = tmp_path / "report.yaml"
    plan_path = tmp_path / "sol.plan"
    code = run_cli(
        [
            "solve", str(bundle_path),
            "--mode", "ref",
            "--max-h", "4",
            "--timeout", "30",
            "--out", str(report_path),
            "--plan-out", str(plan_path),
        ]
    )
    assert code == 0
    report, diags = parse_report(report_path.read_text())
    assert not diags
    assert report.verdict == "SOLUTION"
    assert report.plan is not None
    assert plan_path.exists()


def test_validate_rejects_rushed_plan(bundle_path, tmp_path):
    plan_path = tmp_path / "pi2.plan"
    plan_path.write_text(serialize_plan(factory_plan_rushed(2)))
    out_path = tmp_path / "val.yaml"
    code = run_cli(["validate", str(bundle_path), str(plan_path),
                    "--out", str(out_path)])
    assert code == 1
    report, _ = parse_report(out_path.read_text())
    assert report.verdict == "NON-EXECUTABLE"
    assert report.witness is not None


def test_missing_input_is_usage_error(bundle_path, tmp_path):
    assert run_cli(["validate", str(bundle_path), str(tmp_path / "nope.plan")]) == 2
    assert run_cli(["solve", str(tmp_path / "nope.bundle")]) == 2


def test_unknown_subcommand_is_usage_error(capsys):
    assert run_cli(["frobnicate"]) == 2
    capsys.readouterr()


def test_timeout_exit_code(bundle_path, tmp_path):
    code = run_cli(
        [
            "solve", str(bundle_path),
            "--mode", "enc",
            "--timeout", "0.05",
            "--out", str(tmp_path / "r.yaml"),
        ]
    )
    assert code == 3


def test_report_tables(tmp_path):
    records = tmp_path / "records.csv"
    records.write_text(
        "instance,family,kappa,mode,verdict,wall,solver_calls,iterations,horizon\n"
        "rover_n3_c1_k2,rover,2,enc,SOLUTION,24.0,3,0,3\n"
        "rover_n3_c1_k2,rover,2,ref,SOLUTION,0.2,1,1,3\n"
        "rover_n4_c1_k2,rover,2,enc,UNKNOWN,120.0,4,0,\n"
        "rover_n4_c1_k2,rover,2,ref,SOLUTION,1.5,6,4,4\n"
    )
    out_dir = tmp_path / "tables"
    assert run_cli(["report", str(records), "--out", str(out_dir)]) == 0
    coverage = (out_dir / "coverage.csv").read_text().splitlines()
    assert coverage[0] == "family,kappa,mode,solved,total"
    # timeouts count as unsolved
    assert "rover,2,enc,1,2" in coverage
    assert "rover,2,ref,2,2" in coverage
    scatter = (out_dir / "scatter.csv").read_text().splitlines()
    assert len(scatter) == 3  # header plus one row per paired instance
