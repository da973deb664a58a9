"""Regenerates every figure family from the simulator's acceptance sweeps.

Needs the CSVs exported by the simulator's acceptance suite (run
`pytest tests/test_acceptance.py` in the repository root first, or point
EMGSIM_ACCEPTANCE_OUT at a directory holding beta02/ and beta08/ sweeps).
"""
import hashlib
import os
from pathlib import Path

import pytest

from figviz import FigureSpec, plot_figure

DATA_ROOT = Path(os.environ.get(
    "EMGSIM_ACCEPTANCE_OUT",
    Path(__file__).resolve().parents[2] / "out" / "acceptance"))

needs_data = pytest.mark.skipif(
    not (DATA_ROOT / "beta02" / "summary.csv").is_file()
    or not (DATA_ROOT / "beta08" / "summary.csv").is_file(),
    reason=f"acceptance sweep CSVs not found under {DATA_ROOT}; "
           "run the simulator acceptance suite first",
)


def tree_hashes(root: Path) -> dict:
    return {p: hashlib.sha256(p.read_bytes()).hexdigest()
            for p in sorted(root.rglob("*.csv"))}


@needs_data
def test_all_figure_families_from_acceptance_sweeps(tmp_path):
    before = tree_hashes(DATA_ROOT)
    rendered = []
    for sweep in ("beta02", "beta08"):
        sweep_dir = DATA_ROOT / sweep
        hists = tuple(sorted(sweep_dir.glob("hist_*.csv")))
        for fig_id in ("fig1", "fig2", "fig3", "fig4"):
            inputs = hists if fig_id == "fig2" else (sweep_dir / "summary.csv",)
            out = tmp_path / f"{sweep}_{fig_id}.png"
            plot_figure(FigureSpec(fig_id, inputs, out))
            assert out.stat().st_size > 5_000
            rendered.append(out)
    assert len(rendered) == 8
    # inputs untouched
    assert tree_hashes(DATA_ROOT) == before
    print(f"regenerated {len(rendered)} figures from {DATA_ROOT}")


@needs_data
def test_reinvocation_is_byte_stable(tmp_path):
    sweep_dir = DATA_ROOT / "beta08"
    first = tmp_path / "one.png"
    second = tmp_path / "two.png"
    for out in (first, second):
        plot_figure(FigureSpec("fig4", (sweep_dir / "summary.csv",), out))
    assert first.read_bytes() == second.read_bytes()
