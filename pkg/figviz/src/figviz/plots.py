"""The four figure families, regenerated from sweep CSVs.

Rendering is deterministic: a fixed style, fixed canvas sizes, constant PNG
metadata and no timestamps, so identical inputs give identical bytes.
Inputs are opened read-only and never modified.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .schema import SchemaError, read_hist, read_summary

FIGURE_IDS = ("fig1", "fig2", "fig3", "fig4")
_PNG_METADATA = {"Software": "figviz"}
_DPI = 120

_MARKERS = ("o", "s", "D", "^", "+", "x", "v")


@dataclass(frozen=True)
class FigureSpec:
    """One figure to render: which family, which CSVs, where to write."""

    figure_id: str
    inputs: tuple[Path, ...]
    output: Path

    def __post_init__(self):
        if self.figure_id not in FIGURE_IDS:
            raise ValueError(f"figure_id must be one of {FIGURE_IDS}, got {self.figure_id!r}")
        if not self.inputs:
            raise ValueError("no input CSVs given")


def plot_figure(spec: FigureSpec) -> Path:
    """Render the figure family named by the spec and return the output path."""
    render = {
        "fig1": _render_population,
        "fig2": _render_histograms,
        "fig3": _render_volatility,
        "fig4": _render_wealth,
    }[spec.figure_id]
    fig = render(spec)
    spec.output.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(spec.output, dpi=_DPI, metadata=_PNG_METADATA)
    plt.close(fig)
    return spec.output


def _load_summaries(spec: FigureSpec) -> list[dict[str, float]]:
    rows = []
    for path in spec.inputs:
        rows.extend(read_summary(path))
    return rows


def _series_by(rows, key):
    """Group rows by one column, each group sorted by the other axis."""
    groups: dict[float, list[dict]] = {}
    for row in rows:
        groups.setdefault(row[key], []).append(row)
    return dict(sorted(groups.items()))


def _render_population(spec: FigureSpec):
    """Mean market-B population against impact and against confidence."""
    rows = _load_summaries(spec)
    betas = sorted({r["beta"] for r in rows})
    gammas = sorted({r["gamma_B"] for r in rows})
    panels = []
    if len(betas) > 1 or len(gammas) == 1:
        panels.append("beta")
    if len(gammas) > 1 or not panels:
        panels.append("gamma_B")

    fig, axes = plt.subplots(1, len(panels), figsize=(5.0 * len(panels), 3.6))
    axes = np.atleast_1d(axes)
    for ax, axis_key in zip(axes, panels):
        other = "gamma_B" if axis_key == "beta" else "beta"
        for i, (other_value, group) in enumerate(_series_by(rows, other).items()):
            group = sorted(group, key=lambda r: r[axis_key])
            ax.plot([r[axis_key] for r in group], [r["mean_N_B"] for r in group],
                    marker=_MARKERS[i % len(_MARKERS)], ms=4, lw=1,
                    label=f"{other}={other_value:g}")
        if axis_key == "gamma_B":
            ax.set_xscale("log")
        ax.set_xlabel("market impact beta" if axis_key == "beta" else "confidence gamma_B")
        ax.set_ylabel("mean N_B")
        ax.legend(fontsize=7)
    fig.suptitle("Population in market B", fontsize=10)
    fig.tight_layout()
    return fig


def _render_histograms(spec: FigureSpec):
    """Gene distributions per market, one panel per histogram CSV."""
    n = len(spec.inputs)
    cols = min(n, 4)
    rows_n = (n + cols - 1) // cols
    fig, axes = plt.subplots(rows_n, cols, figsize=(3.4 * cols, 2.8 * rows_n),
                             squeeze=False)
    for ax in axes.flat[n:]:
        ax.set_visible(False)
    for ax, path in zip(axes.flat, spec.inputs):
        rows = read_hist(path)
        centers = [0.5 * (r["bin_low"] + r["bin_high"]) for r in rows]
        ax.plot(centers, [r["mass_A"] for r in rows], marker="o", ms=2.5, lw=0.8,
                label="P(g_A)")
        ax.plot(centers, [r["mass_B"] for r in rows], marker="s", ms=2.5, lw=0.8,
                label="P(g_B)")
        ax.set_xlim(0.0, 1.0)
        ax.set_xlabel("gene g")
        ax.set_ylabel("mass")
        ax.set_title(Path(path).stem, fontsize=8)
        ax.legend(fontsize=7)
    fig.suptitle("Strategy distributions", fontsize=10)
    fig.tight_layout()
    return fig


def _render_per_market_curves(spec: FigureSpec, column_a: str, column_b: str,
                              ylabel: str, title: str):
    """Shared layout of the volatility and wealth families.

    One panel per market impact value, both markets' curves against
    confidence on a log axis, one marker style per exit threshold.
    """
    rows = _load_summaries(spec)
    betas = sorted({r["beta"] for r in rows})
    fig, axes = plt.subplots(1, len(betas), figsize=(5.0 * len(betas), 3.6),
                             squeeze=False)
    for ax, beta in zip(axes.flat, betas):
        subset = [r for r in rows if r["beta"] == beta]
        for i, (omega_th, group) in enumerate(_series_by(subset, "omega_th").items()):
            group = sorted(group, key=lambda r: r["gamma_B"])
            g = [r["gamma_B"] for r in group]
            marker = _MARKERS[i % len(_MARKERS)]
            ax.plot(g, [r[column_a] for r in group], marker=marker, ms=4, lw=1,
                    label=f"A, omega_th={omega_th:g}")
            ax.plot(g, [r[column_b] for r in group], marker=marker, ms=4, lw=1,
                    ls="--", label=f"B, omega_th={omega_th:g}")
        ax.set_xscale("log")
        ax.set_xlabel("confidence gamma_B")
        ax.set_ylabel(ylabel)
        ax.set_title(f"beta={beta:g}", fontsize=9)
        ax.legend(fontsize=7)
    fig.suptitle(title, fontsize=10)
    fig.tight_layout()
    return fig


def _render_volatility(spec: FigureSpec):
    return _render_per_market_curves(spec, "sigma_P_A", "sigma_P_B",
                                     "price volatility", "Price volatility")


def _render_wealth(spec: FigureSpec):
    return _render_per_market_curves(spec, "mean_W_A", "mean_W_B",
                                     "mean wealth", "Mean wealth")
