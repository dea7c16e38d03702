"""Experiment configuration: flat key=value text files with flag overrides."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

import numpy as np

from .chain import ChainConfig
from .errors import ConfigError

_GRID_KEYS = ("rabi_grid", "delta_omega_list")


@dataclass(frozen=True)
class ExperimentConfig:
    """Chain parameters plus sweep grids, engine and output options.

    `rabi_grid` accepts either an explicit list or an inclusive
    `min:max:step` range; `delta_omega_list` is an explicit list.
    `larmor`, when set, overrides the linear gradient built from
    `omega0` and `delta_omega`.
    """

    length: int = 2
    coupling: float = 1.0
    omega0: float = 100.0
    delta_omega: float = 50.0
    larmor: tuple[float, ...] | None = None
    rabi: float = 0.5
    engine: str = "exact"
    units: str = "J"
    rabi_grid: tuple[float, ...] = ()
    delta_omega_list: tuple[float, ...] = ()
    workers: int = 1

    def __post_init__(self) -> None:
        if self.engine not in ("rwa", "exact", "oracle"):
            raise ConfigError(f"unknown engine {self.engine!r}")
        if self.units not in ("J", "absolute"):
            raise ConfigError(f"units must be 'J' or 'absolute', got {self.units!r}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        for key in _GRID_KEYS:
            vals = getattr(self, key)
            if any(not np.isfinite(v) for v in vals):
                raise ConfigError(f"{key} contains non-finite values")

    def chain(self, delta_omega: float | None = None) -> ChainConfig:
        """Materialize the physical chain, optionally overriding the gradient."""
        try:
            if self.larmor is not None and delta_omega is None:
                return ChainConfig(
                    length=self.length,
                    coupling=self.coupling,
                    larmor=self.larmor,
                    rabi=self.rabi,
                )
            return ChainConfig.linear_gradient(
                length=self.length,
                coupling=self.coupling,
                omega0=self.omega0,
                delta_omega=self.delta_omega if delta_omega is None else delta_omega,
                rabi=self.rabi,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


def _parse_floats(text: str) -> tuple[float, ...]:
    text = text.strip()
    if not text:
        return ()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"range must be min:max:step, got {text!r}")
        lo, hi, step = (float(p) for p in parts)
        if step <= 0:
            raise ConfigError("range step must be positive")
        n = int(np.floor((hi - lo) / step + 1e-9)) + 1
        return tuple(float(lo + i * step) for i in range(n))
    return tuple(float(p) for p in text.split(","))


def parse_config(text: str) -> ExperimentConfig:
    """Parse the key=value format; unknown keys are errors."""
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        try:
            if key == "length":
                values[key] = int(val)
            elif key in ("coupling", "omega0", "delta_omega", "rabi"):
                values[key] = float(val)
            elif key == "larmor":
                values[key] = _parse_floats(val) or None
            elif key in _GRID_KEYS:
                values[key] = _parse_floats(val)
            elif key in ("engine", "units"):
                values[key] = val
            elif key == "workers":
                values[key] = int(val)
            else:
                raise ConfigError(f"unknown key {key!r}")
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from exc
    try:
        return ExperimentConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def serialize_config(cfg: ExperimentConfig) -> str:
    """Deterministic text form; parse(serialize(cfg)) == cfg."""
    lines = [
        f"length={cfg.length}",
        f"coupling={cfg.coupling!r}",
        f"omega0={cfg.omega0!r}",
        f"delta_omega={cfg.delta_omega!r}",
    ]
    if cfg.larmor is not None:
        lines.append("larmor=" + ",".join(repr(v) for v in cfg.larmor))
    lines += [
        f"rabi={cfg.rabi!r}",
        f"engine={cfg.engine}",
        f"units={cfg.units}",
    ]
    if cfg.rabi_grid:
        lines.append("rabi_grid=" + ",".join(repr(v) for v in cfg.rabi_grid))
    if cfg.delta_omega_list:
        lines.append("delta_omega_list=" + ",".join(repr(v) for v in cfg.delta_omega_list))
    lines.append(f"workers={cfg.workers}")
    return "\n".join(lines) + "\n"


def apply_overrides(cfg: ExperimentConfig, overrides: dict) -> ExperimentConfig:
    """Apply CLI flag overrides (flags win over file values)."""
    known = {f.name for f in fields(ExperimentConfig)}
    clean = {k: v for k, v in overrides.items() if v is not None}
    unknown = set(clean) - known
    if unknown:
        raise ConfigError(f"unknown config overrides: {sorted(unknown)}")
    try:
        return replace(cfg, **clean)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
