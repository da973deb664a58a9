"""Analytical steady-state oracles for the two-market population gap.

The closed form treats the population difference N_A - N_B as a geometric
series: a first withdrawal wave N0 out of the under-confident market,
contracted by a factor q each round as the migrating cohort re-splits into
good and bad strategies and partially bounces back. The recursion rebuilds
the same series from the underlying flow probabilities so the two routes
can be checked against each other.

The round-trip sign law gives the sign of the mean buy-sell attainment as
a function of market impact: proportional to (1 - 2*beta).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

_CONV_TOL = 1e-12
_MAX_ROUNDS = 10**6

REGIME_BELOW = "below"  # beta < 0.5: majority effect, half of strategies bad
REGIME_ABOVE = "above"  # beta > 0.5: minority effect, a third of strategies bad


@dataclass(frozen=True)
class FlowParams:
    """Per-round flow probabilities for the withdrawal recursion.

    Bad-strategy holders in market A update in place with probability
    `rho_a` and withdraw to the other market with probability
    `rho_a_prime` (likewise `rho_b`, `rho_b_prime` for market B).
    `bad_fraction` is the share of strategies that are bad in the given
    impact regime. A market with any in-place updating (rho > 0) is taken
    to start internally equilibrated; a market with rho == 0 retains its
    initial stock of bad strategies. `n_rounds=None` means iterate to the
    steady state.

    The derived fields `n0` (first-wave size) and `q` (contraction ratio)
    parameterize the equivalent geometric series.
    """

    n_agents: float
    rho_a: float
    rho_a_prime: float
    rho_b: float
    rho_b_prime: float
    bad_fraction: float
    n_rounds: int | None = None
    n0: float = field(init=False)
    q: float = field(init=False)

    def __post_init__(self):
        for name in ("rho_a", "rho_a_prime", "rho_b", "rho_b_prime", "bad_fraction"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")
        if self.n_agents <= 0:
            raise ValueError(f"n_agents must be positive, got {self.n_agents}")
        if self.n_rounds is not None and self.n_rounds < 1:
            raise ValueError("n_rounds must be >= 1 or None")
        half = 0.5 * self.n_agents * self.bad_fraction
        seed_a = half if self.rho_a == 0.0 else 0.0
        seed_b = half if self.rho_b == 0.0 else 0.0
        n0 = seed_b * self.rho_b_prime - seed_a * self.rho_a_prime
        q = self.bad_fraction**2 * self.rho_a_prime * self.rho_b_prime
        if q >= 1.0:
            raise ValueError(f"contraction ratio must be < 1, got {q}")
        object.__setattr__(self, "n0", n0)
        object.__setattr__(self, "q", q)

    @classmethod
    def for_regime(cls, regime: str, n_agents: float, n_rounds: int | None = None) -> "FlowParams":
        """Flow probabilities of the two impact regimes.

        Below the 0.5 impact point the majority effect makes half of the
        strategies bad and bad holders in A update or withdraw with equal
        probability; above it the minority effect makes a third bad, with
        updating twice as likely as withdrawal. In the under-confident
        market B, bad holders never update and always withdraw.
        """
        if regime == REGIME_BELOW:
            return cls(n_agents, 0.5, 0.5, 0.0, 1.0, 0.5, n_rounds)
        if regime == REGIME_ABOVE:
            return cls(n_agents, 2.0 / 3.0, 1.0 / 3.0, 0.0, 1.0, 1.0 / 3.0, n_rounds)
        raise ValueError(f"regime must be '{REGIME_BELOW}' or '{REGIME_ABOVE}', got {regime!r}")


def population_gap_closed_form(n0: float, q: float, n: int | float | None = None) -> float:
    """Geometric-series gap: n0 * (1 - q**n) / (1 - q); n0 / (1 - q) at n=inf."""
    if not 0.0 <= q < 1.0:
        raise ValueError(f"q must be in [0, 1), got {q}")
    if n is None or n == math.inf:
        return n0 / (1.0 - q)
    if n < 1:
        raise ValueError(f"n must be >= 1 or infinite, got {n}")
    return n0 * (1.0 - q**n) / (1.0 - q)


def population_gap_series(n0: float, q: float, n: int | float | None = None) -> float:
    """Gap by explicit term-wise summation (numerical route, no formula).

    Iterates wave_1 = n0, wave_{k+1} = q * wave_k and accumulates; the
    infinite case stops once a wave falls below the convergence tolerance.
    """
    if not 0.0 <= q < 1.0:
        raise ValueError(f"q must be in [0, 1), got {q}")
    infinite = n is None or n == math.inf
    if not infinite and n < 1:
        raise ValueError(f"n must be >= 1 or infinite, got {n}")
    gap = 0.0
    wave = n0
    rounds = 0
    while True:
        gap += wave
        wave *= q
        rounds += 1
        if infinite:
            if abs(wave) < _CONV_TOL:
                break
            if rounds >= _MAX_ROUNDS:
                raise RuntimeError(f"no convergence within {_MAX_ROUNDS} rounds")
        elif rounds >= n:
            break
    return gap


def population_gap_recursion(flow: FlowParams) -> float:
    """Gap from the per-round flow bookkeeping.

    Each round the withdrawing share of bad-strategy holders moves to the
    other market; arrivals re-split into good and bad per `bad_fraction`,
    and the bad part keeps flowing. The net wave toward A therefore starts
    at seed_B * rho_b' - seed_A * rho_a' and contracts by
    bad_fraction^2 * rho_a' * rho_b' per completed bounce cycle.
    """
    half = 0.5 * flow.n_agents * flow.bad_fraction
    seed_a = half if flow.rho_a == 0.0 else 0.0
    seed_b = half if flow.rho_b == 0.0 else 0.0
    wave = seed_b * flow.rho_b_prime - seed_a * flow.rho_a_prime
    shrink = flow.bad_fraction * flow.rho_a_prime * flow.bad_fraction * flow.rho_b_prime
    gap = 0.0
    rounds = 0
    while True:
        gap += wave
        wave *= shrink
        rounds += 1
        if flow.n_rounds is None:
            if abs(wave) < _CONV_TOL:
                break
            if rounds >= _MAX_ROUNDS:
                raise RuntimeError(f"no convergence within {_MAX_ROUNDS} rounds")
        elif rounds >= flow.n_rounds:
            break
    return gap


def gap_consistency_check(n_agents: float,
                          below: FlowParams | None = None,
                          above: FlowParams | None = None) -> bool:
    """True when the high-impact regime's steady gap is below the low-impact one."""
    if n_agents <= 0:
        raise ValueError(f"n_agents must be positive, got {n_agents}")
    below = below or FlowParams.for_regime(REGIME_BELOW, n_agents)
    above = above or FlowParams.for_regime(REGIME_ABOVE, n_agents)
    gap_below = population_gap_closed_form(below.n0, below.q)
    gap_above = population_gap_closed_form(above.n0, above.q)
    return gap_above < gap_below


def round_trip_sign(beta: float) -> str:
    """Sign of the mean settled round-trip attainment: sign of (1 - 2*beta)."""
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta must be in [0, 1], got {beta}")
    diff = 1.0 - 2.0 * beta
    if diff > 0.0:
        return "positive"
    if diff < 0.0:
        return "negative"
    return "zero"
