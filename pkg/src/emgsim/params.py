"""Experiment configuration for the two-market game."""
from __future__ import annotations

import math
from dataclasses import dataclass, fields

PREDICTORS = ("repeat", "oppose")

# Keys accepted in config files / sweep axes, mapped to ModelParams attributes.
CONFIG_KEYS = {
    "N": "n_agents",
    "m": "memory",
    "R": "mutation_width",
    "beta": "beta",
    "gamma_A": "gamma_a",
    "gamma_B": "gamma_b",
    "S_th": "score_threshold",
    "omega_th": "exit_threshold",
    "t_relax": "t_relax",
    "t_meas": "t_meas",
    "n_runs": "n_runs",
    "master_seed": "master_seed",
    "p_init_B": "p_init_b",
    "predictor": "predictor",
}

_INT_FIELDS = {"n_agents", "memory", "t_relax", "t_meas", "n_runs", "master_seed"}


@dataclass(frozen=True, slots=True)
class ModelParams:
    """Full configuration of one experiment.

    Defaults follow the reference setup: 1000 agents with rational
    confidence in market A, a 3-bit price memory, and a 0.2-wide
    mutation window, relaxed for 1e5 ticks before a 1e3-tick
    measurement window averaged over 100 runs.
    """

    n_agents: int = 1000
    memory: int = 3
    mutation_width: float = 0.2
    beta: float = 0.2
    gamma_a: float = 1.0
    gamma_b: float = 1.0
    score_threshold: float = -4.0
    exit_threshold: float = -200.0
    t_relax: int = 100_000
    t_meas: int = 1_000
    n_runs: int = 100
    master_seed: int = 1
    p_init_b: float = 0.5
    predictor: str = "repeat"

    def __post_init__(self):
        for f in fields(self):
            validate_field(f.name, getattr(self, f.name))


def validate_field(name: str, value) -> None:
    """Check a single parameter against its domain; raise ValueError if outside."""
    if name in _INT_FIELDS:
        if not isinstance(value, int) or isinstance(value, bool):
            raise ValueError(f"{name} must be an integer, got {value!r}")
    elif name != "predictor":
        if not isinstance(value, (int, float)) or isinstance(value, bool) or not math.isfinite(value):
            raise ValueError(f"{name} must be a finite number, got {value!r}")

    if name == "n_agents" and value < 2:
        raise ValueError(f"N must be >= 2, got {value}")
    elif name == "memory" and not 1 <= value <= 20:
        raise ValueError(f"m must be in [1, 20], got {value}")
    elif name == "mutation_width" and not 0.0 < value <= 1.0:
        raise ValueError(f"R must be in (0, 1], got {value}")
    elif name == "beta" and not 0.0 <= value <= 1.0:
        raise ValueError(f"beta must be in [0, 1], got {value}")
    elif name in ("gamma_a", "gamma_b") and value < 0.0:
        raise ValueError(f"{name} must be >= 0, got {value}")
    elif name == "t_relax" and value < 0:
        raise ValueError(f"t_relax must be >= 0, got {value}")
    elif name == "t_meas" and value < 1:
        raise ValueError(f"t_meas must be >= 1, got {value}")
    elif name == "n_runs" and value < 1:
        raise ValueError(f"n_runs must be >= 1, got {value}")
    elif name == "master_seed" and not 0 <= value < 2**64:
        raise ValueError(f"master_seed must be an unsigned 64-bit integer, got {value}")
    elif name == "p_init_b" and not 0.0 <= value <= 1.0:
        raise ValueError(f"p_init_B must be in [0, 1], got {value}")
    elif name == "predictor" and value not in PREDICTORS:
        raise ValueError(f"predictor must be one of {PREDICTORS}, got {value!r}")


def coerce_value(attr: str, raw: str):
    """Parse a config-file value string into the attribute's native type."""
    raw = raw.strip()
    if attr == "predictor":
        return raw
    if attr in _INT_FIELDS:
        try:
            return int(raw)  # exact, even beyond float precision
        except ValueError:
            pass
        try:
            num = float(raw)
        except ValueError:
            raise ValueError(f"expected a number, got {raw!r}") from None
        if not num.is_integer():
            raise ValueError(f"{attr} must be an integer, got {raw!r}")
        return int(num)
    try:
        return float(raw)
    except ValueError:
        raise ValueError(f"expected a number, got {raw!r}") from None


def sweepable_keys() -> tuple[str, ...]:
    """Config keys that may serve as sweep axes (numeric parameters only)."""
    return tuple(k for k, a in CONFIG_KEYS.items() if a != "predictor")
