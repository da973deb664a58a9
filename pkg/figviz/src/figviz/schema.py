"""Validation and loading of the simulator's CSV output schema.

The plotting layer talks to the simulator only through these files:

* ``summary.csv`` with columns ``beta, gamma_B, omega_th, mean_N_B,
  sigma_P_A, sigma_P_B, mean_W_A, mean_W_B, n_runs, master_seed``;
* ``hist_*.csv`` with columns ``bin_low, bin_high, mass_A, mass_B``.

Any deviation is rejected before plotting, naming the offending column.
"""
from __future__ import annotations

import csv
from pathlib import Path

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


class SchemaError(ValueError):
    """Input CSV does not match the simulator's documented schema."""


def _check_header(path: Path, header: list[str] | None, expected: tuple[str, ...]) -> None:
    if header is None:
        raise SchemaError(f"{path.name}: empty file")
    for want in expected:
        if want not in header:
            raise SchemaError(f"{path.name}: missing column '{want}'")
    for got in header:
        if got not in expected:
            raise SchemaError(f"{path.name}: unexpected column '{got}'")
    for got, want in zip(header, expected):
        if got != want:
            raise SchemaError(f"{path.name}: column '{got}' out of order (expected '{want}')")


def _read_rows(path: Path, expected: tuple[str, ...]) -> list[dict[str, float]]:
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        _check_header(path, header, expected)
        rows = []
        for line_no, row in enumerate(reader, start=2):
            if len(row) != len(expected):
                raise SchemaError(f"{path.name}: row {line_no} has {len(row)} fields")
            parsed = {}
            for col, cell in zip(expected, row):
                try:
                    parsed[col] = float(cell)
                except ValueError:
                    raise SchemaError(
                        f"{path.name}: column '{col}' has non-numeric value {cell!r}"
                    ) from None
            rows.append(parsed)
    if not rows:
        raise SchemaError(f"{path.name}: no data rows")
    return rows


def read_summary(path: Path | str) -> list[dict[str, float]]:
    """Load and validate a sweep summary CSV."""
    return _read_rows(Path(path), SUMMARY_COLUMNS)


def read_hist(path: Path | str) -> list[dict[str, float]]:
    """Load and validate a gene-histogram CSV."""
    rows = _read_rows(Path(path), HIST_COLUMNS)
    for col in ("mass_A", "mass_B"):
        for row in rows:
            if not 0.0 <= row[col] <= 1.0 + 1e-9:
                raise SchemaError(f"{Path(path).name}: column '{col}' outside [0, 1]")
    return rows
