"""Two-market evolutionary minority game with market impact and confidence."""

from .core import AgentState, MarketState, TradeOutcome
from .engine import RunPlan, RunResult, StepObservation, World, derive_seed, run, run_ensemble
from .meanfield import (
    FlowParams,
    gap_consistency_check,
    population_gap_closed_form,
    population_gap_recursion,
    population_gap_series,
    round_trip_sign,
)
from .observables import (
    GeneHistogram,
    RunStats,
    SweepResult,
    aggregate,
    gene_histogram,
    histogram_mode,
    mean_population_b,
    price_volatility,
    summarize_run,
    ushape_score,
    variance_from_excess,
)
from .params import ModelParams
from .config import ConfigError, parse_config, serialize_params
from .sweep import SweepSpec, run_cell, run_sweep

__version__ = "0.1.0"

__all__ = [
    "AgentState",
    "ConfigError",
    "FlowParams",
    "GeneHistogram",
    "MarketState",
    "ModelParams",
    "RunPlan",
    "RunResult",
    "RunStats",
    "StepObservation",
    "SweepResult",
    "SweepSpec",
    "TradeOutcome",
    "World",
    "aggregate",
    "derive_seed",
    "gap_consistency_check",
    "gene_histogram",
    "histogram_mode",
    "mean_population_b",
    "parse_config",
    "population_gap_closed_form",
    "population_gap_recursion",
    "population_gap_series",
    "price_volatility",
    "round_trip_sign",
    "run",
    "run_cell",
    "run_ensemble",
    "run_sweep",
    "serialize_params",
    "summarize_run",
    "ushape_score",
    "variance_from_excess",
]
