"""Tick loop, run schedule and deterministic parallel ensembles.

State is kept in flat numpy arrays (one slot per agent) and updated
synchronously: all decisions in a tick are made against the pre-tick state.
Two implementations of the same tick exist and are cross-checked in the
test suite: a readable numpy/Python one behind :meth:`World.step`, and a
numba kernel used by :func:`run` for long horizons. Both consume random
numbers on an identical schedule, so they produce bit-identical
trajectories.

RNG schedule (per run, one PCG64 stream seeded from the derived seed):

* init: ``random(N)`` genes, ``random(N)`` market assignment,
  ``integers(0, 2**m, 2)`` histories, ``integers(0, 2, (2, 2**m))`` tables;
* each tick: one block of ``2N + 2`` uniforms laid out as
  ``[decision draws (N) | mutation draws (N) | tie-break draws (2)]``.
  The mutation draw of agent ``i`` is slot ``N + i``; tie-break slots are
  used only when a market's excess demand is exactly zero.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .core import TradeOutcome
from .params import ModelParams

_CHUNK = 256  # ticks per kernel call; partitioning does not affect the RNG stream

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    _HAVE_NUMBA = False

    def njit(*a, **k):
        def deco(f):
            return f

        return deco


def derive_seed(master_seed: int, run_index: int) -> int:
    """128-bit run seed, a pure function of (master_seed, run_index)."""
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(run_index,))
    lo, hi = (int(w) for w in ss.generate_state(2, np.uint64))
    return lo | (hi << 64)


@dataclass(frozen=True)
class RunPlan:
    """One run of the ensemble: parameters plus its derived seed."""

    params: ModelParams
    run_index: int = 0
    derived_seed: int = field(init=False)

    def __post_init__(self):
        if self.run_index < 0:
            raise ValueError(f"run_index must be >= 0, got {self.run_index}")
        object.__setattr__(
            self, "derived_seed", derive_seed(self.params.master_seed, self.run_index)
        )


@dataclass
class StepObservation:
    """Everything recorded about one tick."""

    tick: int
    excess_a: int
    excess_b: int
    price_a: float
    price_b: float
    n_a: int
    n_b: int
    settled_trades: list[TradeOutcome]
    wealth_sum_a: float
    wealth_sum_b: float


@dataclass
class Census:
    """Per-agent state snapshot at the end of a run."""

    gene: np.ndarray
    market: np.ndarray  # int8, 0 = A, 1 = B
    long_: np.ndarray  # int8, 1 = holding one unit
    open_price: np.ndarray
    s_plus: np.ndarray
    s_minus: np.ndarray
    omega: np.ndarray
    wealth: np.ndarray
    t_in: np.ndarray


@dataclass
class RunResult:
    """Measurement-window records (columnar, one slot per tick) plus census."""

    params: ModelParams
    run_index: int
    derived_seed: int
    start_price_a: float
    start_price_b: float
    excess_a: np.ndarray
    excess_b: np.ndarray
    price_a: np.ndarray
    price_b: np.ndarray
    n_b: np.ndarray
    wealth_sum_a: np.ndarray
    wealth_sum_b: np.ndarray
    trade_count_a: np.ndarray
    trade_count_b: np.ndarray
    trade_sum_a: np.ndarray
    trade_sum_b: np.ndarray
    census: Census
    mutations_a: int
    mutations_b: int
    switches: int

    @property
    def n_a(self) -> np.ndarray:
        return self.params.n_agents - self.n_b


class World:
    """Full mutable state of one simulation run."""

    def __init__(self, params: ModelParams, run_index: int = 0):
        self.plan = RunPlan(params=params, run_index=run_index)
        self.params = params
        self.rng = np.random.Generator(np.random.PCG64(self.plan.derived_seed))
        self.tick_count = 0
        n = params.n_agents
        m = params.memory

        self.gene = self.rng.random(n)
        side = self.rng.random(n)
        self.market = (side < params.p_init_b).astype(np.int8)
        self.hist = self.rng.integers(0, 2**m, size=2).astype(np.int64)
        self.table = (2 * self.rng.integers(0, 2, size=(2, 2**m)) - 1).astype(np.int8)

        self.long_ = np.zeros(n, np.int8)
        self.open_price = np.zeros(n)
        self.s_plus = np.zeros(n)
        self.s_minus = np.zeros(n)
        self.omega = np.zeros(n)
        self.wealth = np.zeros(n)
        self.t_in = np.zeros(n, np.int64)
        self.price = np.zeros(2)
        self.wealth_sum = np.zeros(2)
        # counters: mutations in A, mutations in B, switches, current N_B
        self.counters = np.zeros(4, np.int64)
        self.counters[3] = int(self.market.sum())

        self._draws = np.empty(2 * n + 2)
        self._act = np.empty(n, np.int8)
        self._pred_sign = 1 if params.predictor == "repeat" else -1
        self._mask = (1 << m) - 1

    @classmethod
    def from_plan(cls, plan: RunPlan) -> "World":
        return cls(plan.params, plan.run_index)

    @property
    def n_b(self) -> int:
        return int(self.counters[3])

    def step(self) -> StepObservation:
        """Advance one tick and return the observation (readable path)."""
        a_a, a_b, seller_ids, seller_attain, *_ = self._tick_python()
        trades = [
            TradeOutcome(agent_id=int(i), attainment=float(b), closed_at=self.tick_count - 1)
            for i, b in zip(seller_ids, seller_attain)
        ]
        n_b = self.n_b
        return StepObservation(
            tick=self.tick_count - 1,
            excess_a=a_a,
            excess_b=a_b,
            price_a=float(self.price[0]),
            price_b=float(self.price[1]),
            n_a=self.params.n_agents - n_b,
            n_b=n_b,
            settled_trades=trades,
            wealth_sum_a=float(self.wealth_sum[0]),
            wealth_sum_b=float(self.wealth_sum[1]),
        )

    def _tick_python(self):
        """One synchronous tick; mirrors the numba kernel op for op."""
        p = self.params
        n = p.n_agents
        self.rng.random(out=self._draws)
        u_dec = self._draws[:n]
        u_mut = self._draws[n : 2 * n]
        u_tie = self._draws[2 * n :]

        pred_a = int(self.table[0, self.hist[0]])
        pred_b = int(self.table[1, self.hist[1]])
        pred = np.where(self.market == 0, np.int8(pred_a), np.int8(pred_b))
        intended = np.where(u_dec < self.gene, pred, -pred)
        buy = (intended == 1) & (self.long_ == 0)
        sell = (intended == -1) & (self.long_ == 1)
        act = buy.astype(np.int64) - sell.astype(np.int64)
        in_b = self.market == 1
        a_total = int(act.sum())
        a_b = int(act[in_b].sum())
        a_a = a_total - a_b

        price_new = np.empty(2)
        ptr = np.empty(2)
        for k, excess in ((0, a_a), (1, a_b)):
            sign = (excess > 0) - (excess < 0)
            price_new[k] = self.price[k] + sign * math.sqrt(abs(excess))
            ptr[k] = (1.0 - p.beta) * self.price[k] + p.beta * price_new[k]

        # buys: record entry price only
        ptr_per_agent = np.where(self.market == 0, ptr[0], ptr[1])
        self.open_price[buy] = ptr_per_agent[buy]
        self.long_[buy] = 1

        # settlements, then switch/mutation checks, agent id order
        seller_ids = np.flatnonzero(sell)
        seller_attain = np.empty(len(seller_ids))
        tick = self.tick_count
        tcount = [0, 0]
        tsum = [0.0, 0.0]
        for j, i in enumerate(seller_ids):
            mkt = int(self.market[i])
            b = ptr[mkt] - self.open_price[i]
            seller_attain[j] = b
            self.wealth[i] += b
            self.omega[i] += b
            if b > 0.0:
                self.s_plus[i] += b
            else:
                self.s_minus[i] += b
            self.long_[i] = 0
            self.wealth_sum[mkt] += b
            tcount[mkt] += 1
            tsum[mkt] += b
            if self.omega[i] < p.exit_threshold:
                other = 1 - mkt
                self.market[i] = other
                self.wealth_sum[mkt] -= self.wealth[i]
                self.wealth_sum[other] += self.wealth[i]
                self.counters[3] += 1 if other == 1 else -1
                self.omega[i] = 0.0
                self.s_plus[i] = 0.0
                self.s_minus[i] = 0.0
                self.t_in[i] = tick
                self.counters[2] += 1
            else:
                gamma = p.gamma_a if mkt == 0 else p.gamma_b
                if self.s_plus[i] + gamma * self.s_minus[i] < p.score_threshold:
                    cand = self.gene[i] + (u_mut[i] - 0.5) * p.mutation_width
                    if cand < 0.0:
                        cand = -cand
                    elif cand > 1.0:
                        cand = 2.0 - cand
                    self.gene[i] = cand
                    self.s_plus[i] = 0.0
                    self.s_minus[i] = 0.0
                    self.counters[mkt] += 1

        # prediction table (pre-shift history), then history shift
        for k, excess in ((0, a_a), (1, a_b)):
            if excess > 0:
                bit = 1
            elif excess < 0:
                bit = 0
            else:
                bit = 1 if u_tie[k] < 0.5 else 0
            self.table[k, self.hist[k]] = self._pred_sign * (2 * bit - 1)
            self.hist[k] = ((self.hist[k] << 1) | bit) & self._mask
            self.price[k] = price_new[k]

        self.tick_count += 1
        return a_a, a_b, seller_ids, seller_attain, tcount[0], tcount[1], tsum[0], tsum[1]

    def snapshot_census(self) -> Census:
        return Census(
            gene=self.gene.copy(),
            market=self.market.copy(),
            long_=self.long_.copy(),
            open_price=self.open_price.copy(),
            s_plus=self.s_plus.copy(),
            s_minus=self.s_minus.copy(),
            omega=self.omega.copy(),
            wealth=self.wealth.copy(),
            t_in=self.t_in.copy(),
        )


@njit(cache=True)
def _tick_kernel(
    n_ticks,
    t0,
    t_relax,
    gene,
    market,
    long_,
    open_price,
    s_plus,
    s_minus,
    omega,
    wealth,
    t_in,
    price,
    hist,
    table,
    wealth_sum,
    counters,
    draws,
    act,
    rec_excess_a,
    rec_excess_b,
    rec_price_a,
    rec_price_b,
    rec_n_b,
    rec_wsum_a,
    rec_wsum_b,
    rec_tcount_a,
    rec_tcount_b,
    rec_tsum_a,
    rec_tsum_b,
    beta,
    gamma_a,
    gamma_b,
    s_th,
    om_th,
    width,
    pred_sign,
    mask,
):  # pragma: no cover - exercised via run(); semantics tested against World.step
    n = gene.shape[0]
    for s in range(n_ticks):
        tick = t0 + s
        row = draws[s]
        pred_a = table[0, hist[0]]
        pred_b = table[1, hist[1]]
        a_a = 0
        a_b = 0
        for i in range(n):
            pred = pred_a if market[i] == 0 else pred_b
            intended = pred if row[i] < gene[i] else -pred
            if intended == 1 and long_[i] == 0:
                act[i] = 1
            elif intended == -1 and long_[i] == 1:
                act[i] = -1
            else:
                act[i] = 0
            if market[i] == 0:
                a_a += act[i]
            else:
                a_b += act[i]

        sign_a = (a_a > 0) - (a_a < 0)
        sign_b = (a_b > 0) - (a_b < 0)
        price_new_a = price[0] + sign_a * math.sqrt(abs(a_a))
        price_new_b = price[1] + sign_b * math.sqrt(abs(a_b))
        ptr_a = (1.0 - beta) * price[0] + beta * price_new_a
        ptr_b = (1.0 - beta) * price[1] + beta * price_new_b

        tcount_a = 0
        tcount_b = 0
        tsum_a = 0.0
        tsum_b = 0.0
        for i in range(n):
            if act[i] == 1:
                open_price[i] = ptr_a if market[i] == 0 else ptr_b
                long_[i] = 1
            elif act[i] == -1:
                mkt = market[i]
                ptr = ptr_a if mkt == 0 else ptr_b
                b = ptr - open_price[i]
                wealth[i] += b
                omega[i] += b
                if b > 0.0:
                    s_plus[i] += b
                else:
                    s_minus[i] += b
                long_[i] = 0
                wealth_sum[mkt] += b
                if mkt == 0:
                    tcount_a += 1
                    tsum_a += b
                else:
                    tcount_b += 1
                    tsum_b += b
                if omega[i] < om_th:
                    other = 1 - mkt
                    market[i] = other
                    wealth_sum[mkt] -= wealth[i]
                    wealth_sum[other] += wealth[i]
                    counters[3] += 1 if other == 1 else -1
                    omega[i] = 0.0
                    s_plus[i] = 0.0
                    s_minus[i] = 0.0
                    t_in[i] = tick
                    counters[2] += 1
                else:
                    gamma = gamma_a if mkt == 0 else gamma_b
                    if s_plus[i] + gamma * s_minus[i] < s_th:
                        cand = gene[i] + (row[n + i] - 0.5) * width
                        if cand < 0.0:
                            cand = -cand
                        elif cand > 1.0:
                            cand = 2.0 - cand
                        gene[i] = cand
                        s_plus[i] = 0.0
                        s_minus[i] = 0.0
                        counters[mkt] += 1

        if a_a > 0:
            bit_a = 1
        elif a_a < 0:
            bit_a = 0
        else:
            bit_a = 1 if row[2 * n] < 0.5 else 0
        if a_b > 0:
            bit_b = 1
        elif a_b < 0:
            bit_b = 0
        else:
            bit_b = 1 if row[2 * n + 1] < 0.5 else 0
        table[0, hist[0]] = pred_sign * (2 * bit_a - 1)
        table[1, hist[1]] = pred_sign * (2 * bit_b - 1)
        hist[0] = ((hist[0] << 1) | bit_a) & mask
        hist[1] = ((hist[1] << 1) | bit_b) & mask
        price[0] = price_new_a
        price[1] = price_new_b

        if tick >= t_relax:
            idx = tick - t_relax
            rec_excess_a[idx] = a_a
            rec_excess_b[idx] = a_b
            rec_price_a[idx] = price_new_a
            rec_price_b[idx] = price_new_b
            rec_n_b[idx] = counters[3]
            rec_wsum_a[idx] = wealth_sum[0]
            rec_wsum_b[idx] = wealth_sum[1]
            rec_tcount_a[idx] = tcount_a
            rec_tcount_b[idx] = tcount_b
            rec_tsum_a[idx] = tsum_a
            rec_tsum_b[idx] = tsum_b


def _select_engine(engine: str) -> str:
    if engine == "auto":
        return "numba" if _HAVE_NUMBA else "python"
    if engine == "numba" and not _HAVE_NUMBA:
        raise RuntimeError("numba requested but not importable")
    if engine not in ("numba", "python"):
        raise ValueError(f"unknown engine {engine!r}")
    return engine


def run(plan: RunPlan, engine: str = "auto") -> RunResult:
    """Execute t_relax unrecorded ticks then t_meas recorded ones.

    Deterministic given the plan's derived seed; the engine flag selects the
    numba kernel or the readable Python tick, which produce bit-identical
    trajectories.
    """
    mode = _select_engine(engine)
    p = plan.params
    w = World.from_plan(plan)
    t_meas = p.t_meas

    rec = {
        "excess_a": np.zeros(t_meas, np.int64),
        "excess_b": np.zeros(t_meas, np.int64),
        "price_a": np.zeros(t_meas),
        "price_b": np.zeros(t_meas),
        "n_b": np.zeros(t_meas, np.int64),
        "wealth_sum_a": np.zeros(t_meas),
        "wealth_sum_b": np.zeros(t_meas),
        "trade_count_a": np.zeros(t_meas, np.int64),
        "trade_count_b": np.zeros(t_meas, np.int64),
        "trade_sum_a": np.zeros(t_meas),
        "trade_sum_b": np.zeros(t_meas),
    }

    start_price_a = start_price_b = 0.0
    if mode == "python":
        total = p.t_relax + t_meas
        for t in range(total):
            if t == p.t_relax:
                start_price_a = float(w.price[0])
                start_price_b = float(w.price[1])
            a_a, a_b, _ids, _att, tc_a, tc_b, ts_a, ts_b = w._tick_python()
            if t >= p.t_relax:
                i = t - p.t_relax
                rec["excess_a"][i] = a_a
                rec["excess_b"][i] = a_b
                rec["price_a"][i] = w.price[0]
                rec["price_b"][i] = w.price[1]
                rec["n_b"][i] = w.counters[3]
                rec["wealth_sum_a"][i] = w.wealth_sum[0]
                rec["wealth_sum_b"][i] = w.wealth_sum[1]
                rec["trade_count_a"][i] = tc_a
                rec["trade_count_b"][i] = tc_b
                rec["trade_sum_a"][i] = ts_a
                rec["trade_sum_b"][i] = ts_b
    else:
        n = p.n_agents
        chunk_buf = np.empty((_CHUNK, 2 * n + 2))
        t = 0
        total = p.t_relax + t_meas
        while t < total:
            if t == p.t_relax:
                start_price_a = float(w.price[0])
                start_price_b = float(w.price[1])
            bound = p.t_relax if t < p.t_relax else total
            size = min(_CHUNK, bound - t)
            w.rng.random(out=chunk_buf[:size])
            _tick_kernel(
                size,
                t,
                p.t_relax,
                w.gene,
                w.market,
                w.long_,
                w.open_price,
                w.s_plus,
                w.s_minus,
                w.omega,
                w.wealth,
                w.t_in,
                w.price,
                w.hist,
                w.table,
                w.wealth_sum,
                w.counters,
                chunk_buf,
                w._act,
                rec["excess_a"],
                rec["excess_b"],
                rec["price_a"],
                rec["price_b"],
                rec["n_b"],
                rec["wealth_sum_a"],
                rec["wealth_sum_b"],
                rec["trade_count_a"],
                rec["trade_count_b"],
                rec["trade_sum_a"],
                rec["trade_sum_b"],
                p.beta,
                p.gamma_a,
                p.gamma_b,
                p.score_threshold,
                p.exit_threshold,
                p.mutation_width,
                w._pred_sign,
                w._mask,
            )
            t += size
            w.tick_count = t
    return RunResult(
        params=p,
        run_index=plan.run_index,
        derived_seed=plan.derived_seed,
        start_price_a=start_price_a,
        start_price_b=start_price_b,
        excess_a=rec["excess_a"],
        excess_b=rec["excess_b"],
        price_a=rec["price_a"],
        price_b=rec["price_b"],
        n_b=rec["n_b"],
        wealth_sum_a=rec["wealth_sum_a"],
        wealth_sum_b=rec["wealth_sum_b"],
        trade_count_a=rec["trade_count_a"],
        trade_count_b=rec["trade_count_b"],
        trade_sum_a=rec["trade_sum_a"],
        trade_sum_b=rec["trade_sum_b"],
        census=w.snapshot_census(),
        mutations_a=int(w.counters[0]),
        mutations_b=int(w.counters[1]),
        switches=int(w.counters[2]),
    )


def _run_and_summarize(job):
    params, run_index, engine = job
    from .observables import summarize_run

    return summarize_run(run(RunPlan(params=params, run_index=run_index), engine=engine))


def run_ensemble(params: ModelParams, workers: int | None = None, engine: str = "auto"):
    """Execute runs 0..n_runs-1 and return their summaries in run order.

    Each run owns a seed derived from (master_seed, run_index), so results
    are independent of the worker count and of scheduling order.
    """
    jobs = [(params, i, engine) for i in range(params.n_runs)]
    if workers is None or workers <= 1 or params.n_runs == 1:
        return [_run_and_summarize(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=min(workers, params.n_runs)) as pool:
        return list(pool.map(_run_and_summarize, jobs))
