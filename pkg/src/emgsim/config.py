"""Flat key=value experiment configuration files.

One `key = value` pair per line, `#` starts a comment, blank lines are
ignored. Keys are the documented parameter names (N, m, R, beta, gamma_A,
gamma_B, S_th, omega_th, t_relax, t_meas, n_runs, master_seed, p_init_B,
predictor); missing keys take the defaults baked into ModelParams. A file
additionally containing `axis1` / `axis1_values` (and optionally `axis2` /
`axis2_values`) describes a parameter sweep.
"""
from __future__ import annotations

from dataclasses import replace

from .params import CONFIG_KEYS, ModelParams, coerce_value, sweepable_keys
from .sweep import SweepSpec

_AXIS_KEYS = ("axis1", "axis1_values", "axis2", "axis2_values")


class ConfigError(ValueError):
    """Malformed or out-of-domain configuration, with a line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def parse_config(text: str) -> ModelParams | SweepSpec:
    """Parse a config file into validated parameters or a sweep description."""
    entries: dict[str, tuple[int, str]] = {}
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(line_no, f"expected key=value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in CONFIG_KEYS and key not in _AXIS_KEYS:
            raise ConfigError(line_no, f"unknown key {key!r}")
        if key in entries:
            raise ConfigError(line_no, f"duplicate key {key!r}")
        if not value:
            raise ConfigError(line_no, f"missing value for {key!r}")
        entries[key] = (line_no, value)

    values = {}
    for key, (line_no, raw) in entries.items():
        if key in _AXIS_KEYS:
            continue
        attr = CONFIG_KEYS[key]
        try:
            values[attr] = coerce_value(attr, raw)
        except ValueError as exc:
            raise ConfigError(line_no, str(exc)) from None

    try:
        base = ModelParams(**values)
    except ValueError as exc:
        raise ConfigError(_line_of_field(entries, str(exc)), str(exc)) from None

    if not any(k in entries for k in _AXIS_KEYS):
        return base
    return _parse_axes(entries, base)


def _line_of_field(entries, message: str) -> int:
    # validation messages start with the parameter name they refer to
    first = message.split(" ", 1)[0]
    for key, (line_no, _) in entries.items():
        attr = CONFIG_KEYS.get(key)
        if attr and first in (key, attr):
            return line_no
    return 0


def _parse_axes(entries, base: ModelParams) -> SweepSpec:
    axes = []
    for axis in ("axis1", "axis2"):
        has_name = axis in entries
        has_values = f"{axis}_values" in entries
        if not has_name and not has_values:
            continue
        if not (has_name and has_values):
            line_no = entries.get(axis, entries.get(f"{axis}_values"))[0]
            raise ConfigError(line_no, f"{axis} requires both {axis} and {axis}_values")
        name_line, name = entries[axis]
        values_line, raw_values = entries[f"{axis}_values"]
        if name not in sweepable_keys():
            raise ConfigError(name_line, f"{name!r} is not a sweepable parameter")
        attr = CONFIG_KEYS[name]
        parsed = []
        for piece in raw_values.split(","):
            piece = piece.strip()
            if not piece:
                raise ConfigError(values_line, "empty entry in value list")
            try:
                parsed.append(coerce_value(attr, piece))
            except ValueError as exc:
                raise ConfigError(values_line, str(exc)) from None
        # every cell value must satisfy the parameter's domain
        for v in parsed:
            try:
                replace(base, **{attr: v})
            except ValueError as exc:
                raise ConfigError(values_line, str(exc)) from None
        axes.append((name, tuple(parsed)))
    if "axis2" in entries and "axis1" not in entries:
        raise ConfigError(entries["axis2"][0], "axis2 given without axis1")

    axis1 = axes[0]
    axis2 = axes[1] if len(axes) > 1 else None
    return SweepSpec(
        base=base,
        axis1_name=axis1[0],
        axis1_values=axis1[1],
        axis2_name=axis2[0] if axis2 else None,
        axis2_values=axis2[1] if axis2 else None,
    )


def serialize_params(params: ModelParams) -> str:
    """Write parameters back out in the same flat format (round-trips)."""
    lines = []
    for key, attr in CONFIG_KEYS.items():
        value = getattr(params, attr)
        if isinstance(value, float):
            lines.append(f"{key} = {value!r}")
        else:
            lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"
