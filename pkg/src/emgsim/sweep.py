"""Parameter-grid orchestration and bit-exact CSV serialization.

Grid cells are executed independently (runs may be spread over a worker
pool) and written in grid order after completion, so output bytes never
depend on scheduling. Floats are serialized with 9 significant digits.

Output schema (stable, consumed by downstream plotting):

* ``summary.csv``: one row per grid cell with columns
  ``beta, gamma_B, omega_th, mean_N_B, sigma_P_A, sigma_P_B, mean_W_A,
  mean_W_B, n_runs, master_seed``;
* ``hist_<cell>.csv``: per-cell gene histograms with columns
  ``bin_low, bin_high, mass_A, mass_B``.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path

from .engine import run_ensemble
from .observables import SweepResult, aggregate
from .params import CONFIG_KEYS, ModelParams, sweepable_keys

SUMMARY_COLUMNS = (
    "beta",
    "gamma_B",
    "omega_th",
    "mean_N_B",
    "sigma_P_A",
    "sigma_P_B",
    "mean_W_A",
    "mean_W_B",
    "n_runs",
    "master_seed",
)
HIST_COLUMNS = ("bin_low", "bin_high", "mass_A", "mass_B")


@dataclass(frozen=True)
class SweepSpec:
    """A one- or two-axis parameter grid around a base configuration."""

    base: ModelParams
    axis1_name: str
    axis1_values: tuple
    axis2_name: str | None = None
    axis2_values: tuple | None = None
    output_dir: str | None = None

    def __post_init__(self):
        for name, values in ((self.axis1_name, self.axis1_values),
                             (self.axis2_name, self.axis2_values)):
            if name is None:
                continue
            if name not in sweepable_keys():
                raise ValueError(f"{name!r} is not a sweepable parameter")
            if not values:
                raise ValueError(f"empty value list for axis {name!r}")
            for v in values:
                replace(self.base, **{CONFIG_KEYS[name]: v})  # domain check
        if self.axis2_name is not None and self.axis2_name == self.axis1_name:
            raise ValueError("axis2 must differ from axis1")

    def cells(self) -> list[ModelParams]:
        """Grid cells in output order: axis1 outer, axis2 inner."""
        out = []
        for v1 in self.axis1_values:
            cell = replace(self.base, **{CONFIG_KEYS[self.axis1_name]: v1})
            if self.axis2_name is None:
                out.append(cell)
            else:
                for v2 in self.axis2_values:
                    out.append(replace(cell, **{CONFIG_KEYS[self.axis2_name]: v2}))
        return out


def fmt(value) -> str:
    """Serialize one CSV value: ints verbatim, floats at 9 significant digits."""
    if isinstance(value, bool):
        raise TypeError("bool is not a CSV value")
    if isinstance(value, int):
        return str(value)
    return format(float(value), ".9g")


def write_summary_csv(results: list[SweepResult], path: Path | str) -> None:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SUMMARY_COLUMNS)
        for r in results:
            writer.writerow([
                fmt(r.beta),
                fmt(r.gamma_b),
                fmt(r.omega_th),
                fmt(r.mean_n_b),
                fmt(r.sigma_p_a),
                fmt(r.sigma_p_b),
                fmt(r.mean_w_a),
                fmt(r.mean_w_b),
                fmt(r.n_runs),
                fmt(r.master_seed),
            ])


def write_hist_csv(result: SweepResult, path: Path | str) -> None:
    path = Path(path)
    edges = result.histogram_a.bin_edges
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(HIST_COLUMNS)
        for i in range(len(edges) - 1):
            writer.writerow([
                fmt(float(edges[i])),
                fmt(float(edges[i + 1])),
                fmt(float(result.histogram_a.mass[i])),
                fmt(float(result.histogram_b.mass[i])),
            ])


def hist_filename(cell_index: int) -> str:
    return f"hist_{cell_index:03d}.csv"


def run_cell(params: ModelParams, workers: int | None = None, engine: str = "auto") -> SweepResult:
    """Run one grid cell's ensemble and aggregate it."""
    stats = run_ensemble(params, workers=workers, engine=engine)
    return aggregate(stats, params)


def run_sweep(spec: SweepSpec, out_dir: Path | str | None = None,
              workers: int | None = None, engine: str = "auto") -> list[SweepResult]:
    """Execute every grid cell and serialize summary plus histogram CSVs.

    Returns the per-cell results in grid order. Any cell failure aborts the
    sweep with the failing cell index attached.
    """
    out = Path(out_dir if out_dir is not None else (spec.output_dir or "."))
    out.mkdir(parents=True, exist_ok=True)
    results = []
    for idx, cell in enumerate(spec.cells()):
        try:
            results.append(run_cell(cell, workers=workers, engine=engine))
        except Exception as exc:
            raise RuntimeError(f"sweep cell {idx} failed: {exc}") from exc
    write_summary_csv(results, out / "summary.csv")
    for idx, result in enumerate(results):
        write_hist_csv(result, out / hist_filename(idx))
    return results
