"""Statistics over recorded runs: populations, volatility, wealth, gene shapes.

All functions are pure reductions over :class:`~emgsim.engine.RunResult`
data (or plain arrays) and over lists of per-run summaries, so they can be
evaluated concurrently and re-evaluated without touching simulation state.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_BINS = 50
_EPS = 1e-9


@dataclass(frozen=True)
class GeneHistogram:
    """Normalized distribution of gene values for one market."""

    bin_edges: np.ndarray  # length bins + 1, uniform on [0, 1]
    mass: np.ndarray  # per-bin fraction, sums to 1 when any agent present
    market: str

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])


@dataclass
class RunStats:
    """Per-run summary: the reduction shipped back from ensemble workers."""

    run_index: int
    mean_n_b: float
    sigma_p_a: float
    sigma_p_b: float
    var_from_excess_a: float
    var_from_excess_b: float
    mean_w_a: float
    mean_w_b: float
    trade_count_a: int
    trade_count_b: int
    trade_sum_a: float
    trade_sum_b: float
    hist_counts_a: np.ndarray
    hist_counts_b: np.ndarray
    mutations_a: int
    mutations_b: int
    switches: int

    @property
    def mean_attainment(self) -> float:
        """Mean settled round-trip attainment over the window, both markets."""
        total = self.trade_count_a + self.trade_count_b
        if total == 0:
            return math.nan
        return (self.trade_sum_a + self.trade_sum_b) / total


@dataclass
class SweepResult:
    """Ensemble aggregate for one parameter-grid cell."""

    beta: float
    gamma_b: float
    omega_th: float
    mean_n_b: float
    sigma_p_a: float
    sigma_p_b: float
    mean_w_a: float
    mean_w_b: float
    histogram_a: GeneHistogram
    histogram_b: GeneHistogram
    n_runs: int
    master_seed: int


def mean_population_b(n_b: np.ndarray) -> float:
    """Time average of the market-B population over the window."""
    if len(n_b) == 0:
        raise ValueError("empty measurement window")
    return float(np.mean(n_b))


def price_volatility(prices: np.ndarray, centered: bool = False) -> float:
    """Volatility of a price series as the RMS one-step move.

    sigma^2 = (1/dt) * sum (P(t+1) - P(t))^2 over the window. Because each
    squared move equals the absolute excess demand, this matches
    `variance_from_excess` on simulated data. `centered=True` subtracts the
    mean move first (for comparison only).
    """
    prices = np.asarray(prices, dtype=float)
    if prices.size < 2:
        raise ValueError("need at least two prices")
    diffs = np.diff(prices)
    if centered:
        diffs = diffs - diffs.mean()
    return float(math.sqrt(np.mean(diffs * diffs)))


def variance_from_excess(excess: np.ndarray) -> float:
    """Price variance via the excess-demand identity: mean |A(t)|."""
    excess = np.asarray(excess)
    if excess.size == 0:
        raise ValueError("empty excess series")
    return float(np.mean(np.abs(excess)))


def mean_wealth_over_window(wealth_sum: np.ndarray, population: np.ndarray) -> float:
    """Per-snapshot mean wealth in a market, averaged over the window.

    Snapshots with an empty market are skipped; NaN marks a market that was
    empty for the whole window (undefined, not zero).
    """
    wealth_sum = np.asarray(wealth_sum, dtype=float)
    population = np.asarray(population, dtype=float)
    occupied = population > 0
    if not occupied.any():
        return math.nan
    return float(np.mean(wealth_sum[occupied] / population[occupied]))


def census_mean_wealth(census, market: str) -> float:
    """Mean wealth of agents currently in a market; NaN if nobody is there."""
    mask = census.market == (0 if market == "A" else 1)
    if not mask.any():
        return math.nan
    return float(census.wealth[mask].mean())


def gene_histogram(genes: np.ndarray, market: str = "A", bins: int = DEFAULT_BINS) -> GeneHistogram:
    """Normalized histogram of gene values on uniform [0, 1] bins."""
    counts, edges = np.histogram(np.asarray(genes, dtype=float), bins=bins, range=(0.0, 1.0))
    total = counts.sum()
    mass = counts / total if total > 0 else np.zeros(bins)
    return GeneHistogram(bin_edges=edges, mass=mass, market=market)


def histogram_from_counts(counts: np.ndarray, market: str = "A") -> GeneHistogram:
    """Histogram from raw bin counts (e.g. pooled across an ensemble)."""
    counts = np.asarray(counts, dtype=float)
    edges = np.linspace(0.0, 1.0, len(counts) + 1)
    total = counts.sum()
    mass = counts / total if total > 0 else np.zeros(len(counts))
    return GeneHistogram(bin_edges=edges, mass=mass, market=market)


def ushape_score(hist: GeneHistogram) -> float:
    """Tail mass near g=0 and g=1 relative to the central band.

    (mass in g<0.1 plus g>0.9) / (mass in 0.4<=g<=0.6 + eps); ~1 for a
    uniform distribution, large for self-segregated populations, ~0 for a
    central cluster.
    """
    lo = hist.bin_edges[:-1]
    hi = hist.bin_edges[1:]
    tails = float(hist.mass[(hi <= 0.1) | (lo >= 0.9)].sum())
    center = float(hist.mass[(lo >= 0.4) & (hi <= 0.6)].sum())
    return tails / (center + _EPS)


def histogram_mode(hist: GeneHistogram) -> float:
    """Center of the heaviest bin."""
    return float(hist.centers[int(np.argmax(hist.mass))])


def summarize_run(result, bins: int = DEFAULT_BINS) -> RunStats:
    """Reduce one RunResult to the per-run statistics used everywhere else."""
    prices_a = np.concatenate(([result.start_price_a], result.price_a))
    prices_b = np.concatenate(([result.start_price_b], result.price_b))
    genes = result.census.gene
    in_b = result.census.market == 1
    counts_a, _ = np.histogram(genes[~in_b], bins=bins, range=(0.0, 1.0))
    counts_b, _ = np.histogram(genes[in_b], bins=bins, range=(0.0, 1.0))
    return RunStats(
        run_index=result.run_index,
        mean_n_b=mean_population_b(result.n_b),
        sigma_p_a=price_volatility(prices_a),
        sigma_p_b=price_volatility(prices_b),
        var_from_excess_a=variance_from_excess(result.excess_a),
        var_from_excess_b=variance_from_excess(result.excess_b),
        mean_w_a=mean_wealth_over_window(result.wealth_sum_a, result.n_a),
        mean_w_b=mean_wealth_over_window(result.wealth_sum_b, result.n_b),
        trade_count_a=int(result.trade_count_a.sum()),
        trade_count_b=int(result.trade_count_b.sum()),
        trade_sum_a=float(result.trade_sum_a.sum()),
        trade_sum_b=float(result.trade_sum_b.sum()),
        hist_counts_a=counts_a.astype(np.int64),
        hist_counts_b=counts_b.astype(np.int64),
        mutations_a=result.mutations_a,
        mutations_b=result.mutations_b,
        switches=result.switches,
    )


def aggregate(stats: list[RunStats], params) -> SweepResult:
    """Ensemble aggregate of per-run summaries for one grid cell.

    Scalar statistics are averaged over runs (NaN-skipping for wealth, which
    is undefined in runs whose market stayed empty); gene histograms pool the
    raw counts across runs before normalizing.
    """
    if not stats:
        raise ValueError("empty ensemble")
    counts_a = np.sum([s.hist_counts_a for s in stats], axis=0)
    counts_b = np.sum([s.hist_counts_b for s in stats], axis=0)
    with np.errstate(invalid="ignore"):
        mean_w_a = float(np.nanmean([s.mean_w_a for s in stats]))
        mean_w_b = float(np.nanmean([s.mean_w_b for s in stats]))
    return SweepResult(
        beta=params.beta,
        gamma_b=params.gamma_b,
        omega_th=params.exit_threshold,
        mean_n_b=float(np.mean([s.mean_n_b for s in stats])),
        sigma_p_a=float(np.mean([s.sigma_p_a for s in stats])),
        sigma_p_b=float(np.mean([s.sigma_p_b for s in stats])),
        mean_w_a=mean_w_a,
        mean_w_b=mean_w_b,
        histogram_a=histogram_from_counts(counts_a, "A"),
        histogram_b=histogram_from_counts(counts_b, "B"),
        n_runs=len(stats),
        master_seed=params.master_seed,
    )
