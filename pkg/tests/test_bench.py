"""Benchmark plumbing: spec validation, record tables, CSV round trips."""

import pytest

from pamp.bench import (
    BenchSpec,
    RunRecord,
    cactus_rows,
    coverage_rows,
    desk_suite,
    emit_results,
    records_from_csv,
    records_to_csv,
    run_one,
    scatter_rows,
    solved,
)


def _rec(instance, mode, verdict, wall, family="rover", kappa=2):
    return RunRecord(
        instance=instance,
        family=family,
        kappa=kappa,
        mode=mode,
        verdict=verdict,
        wall=wall,
        solver_calls=1,
        iterations=1,
        horizon=3,
    )


def test_spec_validation():
    with pytest.raises(ValueError):
        BenchSpec("warehouse", 2, n_work=1, deadline=10)
    with pytest.raises(ValueError):
        BenchSpec("factory1", 0, n_work=1, deadline=10)
    with pytest.raises(ValueError):
        BenchSpec("factory1", 2, n_work=0, deadline=10)
    with pytest.raises(ValueError):
        BenchSpec("rover", 2, n_locations=3, comm=(3,))


def test_desk_suite_grid():
    suite = desk_suite()
    assert len(suite) == 18
    assert len({s.instance_id for s in suite}) == 18
    assert {s.kappa for s in suite} == {2, 3}
    assert {s.family for s in suite} == {"factory1", "factory2", "rover"}


def test_specs_build_problem_bundles():
    for spec in desk_suite():
        pamp = spec.build()
        assert pamp.kappa == spec.kappa
        assert pamp.problem.actions


def test_coverage_counts_timeouts_as_unsolved():
    records = [
        _rec("a", "enc", "SOLUTION", 1.0),
        _rec("b", "enc", "UNKNOWN", 120.0),
        _rec("a", "ref", "SOLUTION", 0.1),
        _rec("b", "ref", "NO-SOLUTION-WITHIN-BOUND", 0.2),
    ]
    assert not solved(records[1])
    rows = coverage_rows(records)
    assert rows == [
        {"family": "rover", "kappa": 2, "mode": "enc", "solved": 1, "total": 2},
        {"family": "rover", "kappa": 2, "mode": "ref", "solved": 2, "total": 2},
    ]


def test_cactus_ranks_are_cumulative():
    records = [
        _rec("a", "ref", "SOLUTION", 0.5),
        _rec("b", "ref", "SOLUTION", 0.1),
        _rec("c", "ref", "UNKNOWN", 9.0),
    ]
    rows = cactus_rows(records)
    assert rows == [
        {"mode": "ref", "rank": 1, "wall": 0.1},
        {"mode": "ref", "rank": 2, "wall": 0.5},
    ]


def test_scatter_pairs_modes_per_instance():
    records = [
        _rec("a", "enc", "SOLUTION", 2.0),
        _rec("a", "ref", "SOLUTION", 0.1),
        _rec("lonely", "ref", "SOLUTION", 0.3),
    ]
    rows = scatter_rows(records)
    assert len(rows) == 1
    assert rows[0]["instance"] == "a"


def test_emit_results_rejects_empty():
    with pytest.raises(ValueError):
        emit_results([])


def test_csv_round_trip():
    records = [
        _rec("a", "enc", "SOLUTION", 2.0),
        RunRecord("b", "factory1", 3, "ref", "UNKNOWN", 120.0, 9, 4, None),
    ]
    assert records_from_csv(records_to_csv(records)) == records


def test_run_one_records_stats():
    record = run_one(
        BenchSpec("rover", 2, n_locations=3, comm=(1,)), "ref", timeout=30.0
    )
    assert record.verdict == "SOLUTION"
    assert record.solver_calls >= 1
    assert record.iterations >= 1
    assert record.wall >= 0
