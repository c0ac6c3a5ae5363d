"""Parameter sweeps: tether length or controller configuration set, several
wave-phase seeds per cell, median aggregation."""

from __future__ import annotations

import csv
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from statistics import median

from .engine import run
from .errors import InvalidParams, TetherSimError
from .metrics import RunMetrics
from .scenario import Scenario, with_updates

AXES = {
    "tether-length": "tether.length",
    "tether_lengths": "tether.length",
    "config-set": "controller.config_set",
    "config_sets": "controller.config_set",
}
DEFAULT_SEED_COUNT = 5
SUMMARY_COLUMNS = (
    "cell_id", "axis_value", "seed_count", "median_combined_err",
    "median_asv_err", "median_auv_err", "max_link_dev_pct",
)
RUN_COLUMNS = ("cell_id", "axis_value", "seed", "status", *RunMetrics.__dataclass_fields__)


def worker_count(requested: int | None = None) -> int:
    """Requested count, capped by TETHERSIM_WORKERS and the CPU count."""
    n = requested or os.cpu_count() or 1
    cap = os.environ.get("TETHERSIM_WORKERS")
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, n)


def cell_scenario(base: Scenario, axis: str, value) -> Scenario:
    try:
        key = AXES[axis]
    except KeyError:
        raise InvalidParams(f"unknown sweep axis {axis!r}; expected one of {sorted(AXES)}") from None
    if key == "tether.length":
        value = float(value)
    return with_updates(base, **{key: value})


@dataclass
class SweepCell:
    cell_id: int
    axis_value: object
    results: dict = field(default_factory=dict)  # seed -> RunMetrics
    failures: dict = field(default_factory=dict)  # seed -> message

    def _median(self, attr):
        values = [getattr(m, attr) for _, m in sorted(self.results.items())]
        return median(values) if values else float("nan")

    def summary_row(self) -> dict:
        devs = [m.max_link_dev_pct for m in self.results.values()]
        return {
            "cell_id": self.cell_id,
            "axis_value": self.axis_value,
            "seed_count": len(self.results),
            "median_combined_err": self._median("combined_err"),
            "median_asv_err": self._median("asv_mean_err"),
            "median_auv_err": self._median("auv_mean_err"),
            "max_link_dev_pct": max(devs) if devs else float("nan"),
        }


@dataclass
class SweepResult:
    axis: str
    seeds: tuple
    cells: list

    def summary(self) -> list[dict]:
        return [c.summary_row() for c in self.cells]

    def median_combined(self) -> dict:
        return {c.axis_value: c.summary_row()["median_combined_err"] for c in self.cells}

    @property
    def failed(self) -> bool:
        return any(c.failures for c in self.cells)

    def write(self, directory) -> Path:
        out = Path(directory)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "sweep_summary.csv", "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=SUMMARY_COLUMNS)
            writer.writeheader()
            for row in self.summary():
                writer.writerow({k: _fmt(v) for k, v in row.items()})
        with open(out / "sweep_runs.csv", "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=RUN_COLUMNS)
            writer.writeheader()
            for cell in self.cells:
                for seed in self.seeds:
                    row = {"cell_id": cell.cell_id, "axis_value": cell.axis_value, "seed": seed}
                    if seed in cell.results:
                        row["status"] = "ok"
                        row.update({k: _fmt(v) for k, v in cell.results[seed].as_dict().items()})
                    else:
                        row["status"] = "failed: " + cell.failures.get(seed, "not run")
                    writer.writerow(row)
        return out


def _fmt(v):
    return f"{v:.9g}" if isinstance(v, float) else v


def _run_one(args):
    scenario, seed = args
    try:
        return seed, run(scenario, seed).metrics, None
    except TetherSimError as exc:
        step = getattr(exc, "step_index", None)
        where = f" at step {step}" if step is not None else ""
        return seed, None, f"{type(exc).__name__}{where}: {exc}"


def run_sweep(base: Scenario, axis: str, values, seeds=None, workers: int | None = None) -> SweepResult:
    """One run per (value, seed); results are keyed by cell so completion order
    never affects the output."""
    values = list(values)
    if not values:
        raise InvalidParams("sweep needs at least one value")
    if seeds is None:
        seeds = [base.sim.seed + i for i in range(DEFAULT_SEED_COUNT)]
    seeds = tuple(int(s) for s in seeds)
    cells = [SweepCell(i, v) for i, v in enumerate(values)]
    scenarios = [cell_scenario(base, axis, v) for v in values]
    jobs = [(ci, (scenarios[ci], seed)) for ci in range(len(cells)) for seed in seeds]

    n_workers = min(worker_count(workers), len(jobs))
    if n_workers > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            outcomes = list(pool.map(_run_one, [job for _, job in jobs]))
    else:
        outcomes = [_run_one(job) for _, job in jobs]

    for (ci, _), (seed, metrics, failure) in zip(jobs, outcomes):
        if metrics is None:
            cells[ci].failures[seed] = failure
        else:
            cells[ci].results[seed] = metrics
    return SweepResult(axis, seeds, cells)
