"""Benchmark instances, batch runs, and CSV result tables.

Instance families:

``factory1``
    Work stages wrapped in a deadline-carrying Process action; the
    platform reaches a fault location when the deadline passes.
``factory2``
    Same stages without the wrapper; the deadline sits in the platform's
    guards, so late schedules become non-executable instead of unsafe.
``rover``
    A line of locations with slow long moves, periodic communication,
    and a standby component that forbids resuming at the wrong spot.

A batch run produces one append-only record per (instance, mode).  The
emitters turn a record set into three tables: coverage per family and
kappa, cactus data (rank vs wall time of solved runs), and an enc-vs-ref
scatter per instance.
"""

import csv
import io
import time
from dataclasses import dataclass

from .engine import EngineConfig, solve
from .model import PAMPProblem
from .generators import gen_factory, gen_rover

FAMILIES = ("factory1", "factory2", "rover")

# deadlines that leave the wider factories solvable but not slack
FACTORY_DEADLINES = {1: 30, 2: 50, 3: 70}


@dataclass(frozen=True)
class BenchSpec:
    """One benchmark instance: a family plus its scale parameters."""

    family: str
    kappa: int
    n_work: int = 0  # factory families
    deadline: int = 0
    n_locations: int = 0  # rover family
    comm: tuple[int, ...] = ()

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.kappa < 1:
            raise ValueError("kappa must be at least 1")
        if self.family.startswith("factory"):
            if self.n_work < 1 or self.deadline <= 0:
                raise ValueError("factory needs n_work >= 1 and deadline > 0")
        else:
            if self.n_locations < 2:
                raise ValueError("rover needs at least two locations")
            if any(c < 0 or c >= self.n_locations for c in self.comm):
                raise ValueError("comm location out of range")

    @property
    def instance_id(self) -> str:
        if self.family.startswith("factory"):
            return f"{self.family}_w{self.n_work}_d{self.deadline}_k{self.kappa}"
        comm = "".join(str(c) for c in self.comm)
        return f"rover_n{self.n_locations}_c{comm}_k{self.kappa}"

    def build(self) -> PAMPProblem:
        if self.family == "factory1":
            return gen_factory(self.n_work, self.deadline, self.kappa, variant=1)
        if self.family == "factory2":
            return gen_factory(self.n_work, self.deadline, self.kappa, variant=2)
        return gen_rover(self.n_locations, self.comm, self.kappa)

    def max_horizon(self) -> int:
        """Skeleton length that comfortably fits this instance's solutions."""
        if self.family.startswith("factory"):
            return 2 * self.n_work  # works, interleaved cools, the wrapper
        return self.n_locations + len(self.comm)


@dataclass(frozen=True)
class RunRecord:
    instance: str
    family: str
    kappa: int
    mode: str
    verdict: str
    wall: float
    solver_calls: int
    iterations: int
    horizon: int | None


def desk_suite() -> list[BenchSpec]:
    """Small grid runnable on one machine: both factories at widths 1..3,
    the rover at 3..5 locations, kappa 2 and 3 throughout."""
    specs = []
    for kappa in (2, 3):
        for width in (1, 2, 3):
            deadline = FACTORY_DEADLINES[width]
            specs.append(BenchSpec("factory1", kappa, n_work=width, deadline=deadline))
            specs.append(BenchSpec("factory2", kappa, n_work=width, deadline=deadline))
        for n in (3, 4, 5):
            specs.append(BenchSpec("rover", kappa, n_locations=n, comm=(1,)))
    return specs


def _solver_calls(stats: dict) -> int:
    if "rounds" in stats:
        return stats["rounds"]
    return sum(rounds for _, _, _, rounds in stats.get("horizons", ()))


def run_one(spec: BenchSpec, mode: str, timeout: float) -> RunRecord:
    pamp = spec.build()
    config = EngineConfig(mode=mode, max_horizon=spec.max_horizon(), timeout=timeout)
    t0 = time.monotonic()
    result = solve(pamp, config)
    wall = time.monotonic() - t0
    return RunRecord(
        instance=spec.instance_id,
        family=spec.family,
        kappa=spec.kappa,
        mode=mode,
        verdict=result.verdict,
        wall=round(wall, 3),
        solver_calls=_solver_calls(result.stats),
        iterations=result.stats.get("iterations", 0),
        horizon=result.stats.get("horizon"),
    )


def run_suite(
    specs, modes=("enc", "ref"), timeout: float = 120.0, progress=None
) -> list[RunRecord]:
    records = []
    for spec in specs:
        for mode in modes:
            record = run_one(spec, mode, timeout)
            records.append(record)
            if progress is not None:
                progress(record)
    return records


def solved(record: RunRecord) -> bool:
    """A run counts as solved when it returns a definite verdict; timeouts
    and solver give-ups do not."""
    return record.verdict in ("SOLUTION", "NO-SOLUTION-WITHIN-BOUND")


def coverage_rows(records) -> list[dict]:
    keys = sorted({(r.family, r.kappa, r.mode) for r in records})
    rows = []
    for family, kappa, mode in keys:
        batch = [r for r in records if (r.family, r.kappa, r.mode) == (family, kappa, mode)]
        rows.append(
            {
                "family": family,
                "kappa": kappa,
                "mode": mode,
                "solved": sum(1 for r in batch if solved(r)),
                "total": len(batch),
            }
        )
    return rows


def cactus_rows(records) -> list[dict]:
    rows = []
    for mode in sorted({r.mode for r in records}):
        walls = sorted(r.wall for r in records if r.mode == mode and solved(r))
        for rank, wall in enumerate(walls, start=1):
            rows.append({"mode": mode, "rank": rank, "wall": wall})
    return rows


def scatter_rows(records) -> list[dict]:
    by_instance: dict[str, dict[str, RunRecord]] = {}
    for r in records:
        by_instance.setdefault(r.instance, {})[r.mode] = r
    rows = []
    for instance in sorted(by_instance):
        pair = by_instance[instance]
        if "enc" not in pair or "ref" not in pair:
            continue
        rows.append(
            {
                "instance": instance,
                "enc_verdict": pair["enc"].verdict,
                "enc_wall": pair["enc"].wall,
                "ref_verdict": pair["ref"].verdict,
                "ref_wall": pair["ref"].wall,
            }
        )
    return rows


_TABLES = {
    "coverage": (coverage_rows, ["family", "kappa", "mode", "solved", "total"]),
    "cactus": (cactus_rows, ["mode", "rank", "wall"]),
    "scatter": (
        scatter_rows,
        ["instance", "enc_verdict", "enc_wall", "ref_verdict", "ref_wall"],
    ),
}


def emit_results(records) -> dict[str, str]:
    """CSV documents keyed by table name, with fixed column order."""
    if not records:
        raise ValueError("no records to report")
    out = {}
    for name, (build, columns) in _TABLES.items():
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        writer.writerows(build(records))
        out[name] = buf.getvalue()
    return out


def records_to_csv(records) -> str:
    columns = [
        "instance",
        "family",
        "kappa",
        "mode",
        "verdict",
        "wall",
        "solver_calls",
        "iterations",
        "horizon",
    ]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for r in records:
        row = {c: getattr(r, c) for c in columns}
        row["horizon"] = "" if r.horizon is None else r.horizon
        writer.writerow(row)
    return buf.getvalue()


def records_from_csv(text: str) -> list[RunRecord]:
    records = []
    for row in csv.DictReader(io.StringIO(text)):
        records.append(
            RunRecord(
                instance=row["instance"],
                family=row["family"],
                kappa=int(row["kappa"]),
                mode=row["mode"],
                verdict=row["verdict"],
                wall=float(row["wall"]),
                solver_calls=int(row["solver_calls"]),
                iterations=int(row["iterations"]),
                horizon=int(row["horizon"]) if row["horizon"] else None,
            )
        )
    return records
