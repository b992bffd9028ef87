"""Experiment configuration: TOML files merged with CLI flags, validated.

Every subcommand declares its key schema below; unknown keys are a hard
validation error that names them, so a typo cannot silently fall back to
a default.  alpha accepts a rational string "p/q" (preferred: it keeps
resonance detection exact) or a float.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib as _toml
else:
    import tomli as _toml

__all__ = ["ConfigError", "ExperimentConfig", "load_config", "parse_alpha", "SCHEMAS"]


class ConfigError(ValueError):
    """Invalid or unknown configuration; maps to CLI exit code 2."""


def parse_alpha(value) -> tuple[float, Fraction | None]:
    """Accept 3/4, "3/4", "0.75" or 0.75; rational forms stay exact."""
    if isinstance(value, Fraction):
        frac = value
    elif isinstance(value, str):
        try:
            frac = Fraction(value)
        except (ValueError, ZeroDivisionError) as err:
            raise ConfigError(f"cannot parse alpha {value!r}: {err}") from err
    elif isinstance(value, int):
        frac = Fraction(value)
    elif isinstance(value, float):
        if not value > 0:
            raise ConfigError("alpha must be positive")
        return value, None
    else:
        raise ConfigError(f"cannot parse alpha of type {type(value).__name__}")
    if not frac > 0:
        raise ConfigError("alpha must be positive")
    return float(frac), frac


_COMMON = {
    "alpha": (str, "3/4"),
    "output_dir": (str, "runs"),
}

# key -> (type, default); None default means required
SCHEMAS: dict[str, dict[str, tuple]] = {
    "simulate": {
        **_COMMON,
        "N": (int, None),
        "dt": (float, 0.0),  # 0 -> default 0.5/N^2
        "t_end": (float, 1.0),
        "sample_stride": (float, 0.1),
        "s_list": (list, [1.0]),
        "s0": (float, 1.0),
        "s1": (float, 0.0),
        "seed": (int, 0),
        "amplitude": (float, 1.0),
        "zero_data": (bool, False),
        "nl_scale": (float, 1.0),
        "coupling": (str, "full"),
        "gamma": (float, 0.0),
        "forcing_h1": (float, 0.0),
        "forcing_max_mode": (int, 3),
        "forcing_modes": (list, []),  # explicit [k, re, im] rows
        "blowup_threshold": (float, 1e8),
    },
    "normalform-check": {
        **_COMMON,
        "N": (int, None),
        "seed": (int, 0),
        "s0": (float, 1.0),
        "s1": (float, 0.0),
        "with_rho": (bool, True),
        "interior_fraction": (float, 0.5),
        "amplitude": (float, 1.0),
    },
    "smoothing": {
        **_COMMON,
        "N": (int, None),
        "s0": (float, 1.0),
        "s1": (float, 0.0),
        "seeds": (list, [0, 1, 2, 3, 4, 5, 6, 7]),
        "ensemble_size": (int, 0),  # 0 -> use every listed seed
        "sample_times": (list, [0.5, 1.0, 2.0, 5.0, 10.0, 20.0]),
        "dt": (float, 0.0),
        "amplitude": (float, 1.0),
        "fit_kmin": (int, 16),
        "fit_kmax": (int, 0),  # 0 -> N
        "contrast_alpha": (str, ""),  # optional second alpha to compare
        "growth_s_list": (list, []),
    },
    "attractor": {
        **_COMMON,
        "N": (int, None),
        "gamma": (float, 0.1),
        "forcing_h1": (float, 1.0),
        "forcing_modes": (list, []),
        "seeds": (list, [0, 1, 2, 3]),
        "ensemble_size": (int, 0),
        "data_scale": (float, 1.0),
        "absorbing_t_end": (float, 120.0),
        "absorbing_data_scale": (float, 1.0),
        "fit_burn_in": (float, 0.0),
        "t_window": (list, [5.0, 50.0]),
        "sample_stride": (float, 0.25),
        "dt": (float, 0.0),
        "a_list": (list, [0.25, 0.5, 0.75]),
        "second_ensemble_offset": (int, 0),
        "control_run": (bool, False),
    },
    "bounds": {
        **_COMMON,
        "lemma_a": (list, []),      # entries {beta, gamma}
        "lemma_c_betas": (list, []),
        "lemma_b_betas": (list, []),
        "supsums": (list, []),      # entries {kind, s, s0, s1, b, alpha, K, ...}
        "slope_threshold": (float, 0.1),
        "lemma_slope_threshold": (float, 0.05),
        "convergence_check": (bool, False),
    },
    "gauge": {
        **_COMMON,
        "u0_csv": (str, ""),
        "n0_csv": (str, ""),
        "n1_csv": (str, ""),
        "N": (int, 0),
        "seed": (int, 0),
        "s0": (float, 1.0),
        "s1": (float, 0.0),
    },
}


@dataclass
class ExperimentConfig:
    """Validated key-value configuration for one subcommand."""

    subcommand: str
    values: dict = field(default_factory=dict)

    def __getitem__(self, key: str) -> Any:
        return self.values[key]

    def get(self, key: str, default=None):
        return self.values.get(key, default)

    def alpha(self) -> tuple[float, Fraction | None]:
        return parse_alpha(self.values["alpha"])


def _coerce(key: str, value, want: type):
    if want is float and isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if want is int and isinstance(value, int) and not isinstance(value, bool):
        return value
    if want is bool and isinstance(value, bool):
        return value
    if want is str and isinstance(value, str):
        return value
    if want is list and isinstance(value, list):
        return value
    raise ConfigError(f"key {key!r}: expected {want.__name__}, got {value!r}")


def validate(subcommand: str, raw: dict) -> ExperimentConfig:
    if subcommand not in SCHEMAS:
        raise ConfigError(f"unknown subcommand {subcommand!r}")
    schema = SCHEMAS[subcommand]
    unknown = sorted(set(raw) - set(schema))
    if unknown:
        raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")
    values = {}
    missing = []
    for key, (want, default) in schema.items():
        if key in raw:
            values[key] = _coerce(key, raw[key], want)
        elif default is None:
            missing.append(key)
        else:
            values[key] = default
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}")
    _check_invariants(subcommand, values)
    return ExperimentConfig(subcommand, values)


def _check_invariants(subcommand: str, values: dict) -> None:
    if "alpha" in values:
        parse_alpha(values["alpha"])
    n = values.get("N")
    if n is not None and n != 0 and n < 8:
        raise ConfigError("N must be at least 8")
    if "dt" in values and values["dt"] < 0:
        raise ConfigError("dt must be positive (or 0 for the default)")
    if "seeds" in values and len(values["seeds"]) == 0:
        raise ConfigError("seeds must be nonempty")
    if "gamma" in values and values["gamma"] < 0:
        raise ConfigError("gamma must be nonnegative")
    size = values.get("ensemble_size", 0)
    if size:
        if size < 0 or size > len(values["seeds"]):
            raise ConfigError("ensemble_size must be in 1..len(seeds)")
        values["seeds"] = values["seeds"][:size]
    for row in values.get("forcing_modes", []):
        if not (isinstance(row, list) and len(row) == 3):
            raise ConfigError("forcing_modes entries must be [k, re, im] rows")


def load_config(path: str) -> dict:
    with open(path, "rb") as fh:
        try:
            return _toml.load(fh)
        except _toml.TOMLDecodeError as err:
            raise ConfigError(f"cannot parse {path}: {err}") from err
