"""Simulation parameters, validation and the key=value config-file format.

Defaults reproduce the reference setup: natural units (m = omega = 1), a
harmonic potential V = (5/2) x^2, x0 = 0, p0 = 1, 25 ensemble members,
window prefactors 8 and 15, threshold 0.05 and a 50x50 Husimi grid.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .potentials import PARAM_KEYS, PotentialSpec, make_potential

DIVERGENCE_MODES = ("ensemble", "per_run")


class ConfigError(ValueError):
    """Raised with every violated invariant, one message per field."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


@dataclass(frozen=True)
class CoherentWidths:
    sigma_x: float
    sigma_p: float


def coherent_widths(hbar: float, m: float, omega: float) -> CoherentWidths:
    """Position and momentum widths of a coherent state.

    ``sigma_x = sqrt(hbar / (2 m omega))`` and ``sigma_p = hbar / (2 sigma_x)``,
    so that the product is ``hbar / 2``.
    """
    if not (hbar > 0 and m > 0 and omega > 0):
        raise ValueError("hbar, m and omega must be positive")
    sigma_x = math.sqrt(hbar / (2.0 * m * omega))
    return CoherentWidths(sigma_x=sigma_x, sigma_p=hbar / (2.0 * sigma_x))


@dataclass(frozen=True)
class SimConfig:
    hbar: float = 1e-3
    mass: float = 1.0
    omega: float = 1.0
    dt_meas: float = 0.055
    dt_classical: float = 0.01
    x0: float = 0.0
    p0: float = 1.0
    potential: PotentialSpec = field(default_factory=PotentialSpec)
    ensemble_size: int = 25
    momentum_prefactor: float = 8.0
    uncertainty_prefactor: float = 15.0
    divergence_threshold: float = 0.05
    husimi_resolution: int = 50
    t_max: float = 30.0
    base_seed: int = 0
    grid_points: int = 1024
    substep_max: float = 0.005
    # Husimi window half-width in coherent-state widths
    husimi_nsigma: float = 5.0
    # uniform jitter inside the sampled Husimi cell; False samples cell centres
    jitter: bool = True
    divergence_mode: str = "ensemble"
    stop_at_threshold: bool = True
    # diagnostic switch: False evolves without any measurement
    measure: bool = True
    # grid is enlarged (powers of two) until dx <= sigma_x / points_per_sigma;
    # 0 disables the enlargement and grid_points is used as is
    points_per_sigma: float = 8.0

    @property
    def widths(self) -> CoherentWidths:
        return coherent_widths(self.hbar, self.mass, self.omega)

    def replace(self, **changes: Any) -> "SimConfig":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class ValidatedConfig(SimConfig):
    """A :class:`SimConfig` whose invariants have been checked."""


def _is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def validate(config: SimConfig) -> ValidatedConfig:
    if isinstance(config, ValidatedConfig):
        return config
    problems = []

    def positive(name):
        if not getattr(config, name) > 0:
            problems.append(f"{name} must be positive")

    for name in ("hbar", "mass", "omega", "dt_meas", "dt_classical",
                 "divergence_threshold", "t_max", "substep_max", "husimi_nsigma"):
        positive(name)
    for name in ("hbar", "mass", "omega", "dt_meas", "dt_classical", "x0", "p0",
                 "momentum_prefactor", "uncertainty_prefactor", "t_max"):
        if not math.isfinite(getattr(config, name)):
            problems.append(f"{name} must be finite")
    if config.ensemble_size < 1:
        problems.append("ensemble_size must be at least 1")
    if config.husimi_resolution < 2:
        problems.append("husimi_resolution must be at least 2")
    if not _is_power_of_two(config.grid_points) or config.grid_points < 64:
        problems.append("grid_points must be power of two and at least 64")
    if config.momentum_prefactor < 1:
        problems.append("momentum_prefactor must be at least 1")
    if config.uncertainty_prefactor < 1:
        problems.append("uncertainty_prefactor must be at least 1")
    if config.points_per_sigma < 0:
        problems.append("points_per_sigma must be non-negative")
    if config.divergence_mode not in DIVERGENCE_MODES:
        problems.append(f"divergence_mode must be one of {DIVERGENCE_MODES}")
    if not isinstance(config.potential, PotentialSpec):
        problems.append("potential must be a PotentialSpec")
    if problems:
        raise ConfigError(problems)
    values = {f.name: getattr(config, f.name) for f in dataclasses.fields(SimConfig)}
    return ValidatedConfig(**values)


# --- key=value files -------------------------------------------------------

_BOOL_TRUE = {"1", "true", "yes", "on"}
_BOOL_FALSE = {"0", "false", "no", "off"}


def _coerce(name: str, text: str):
    kind = {f.name: f.type for f in dataclasses.fields(SimConfig)}[name]
    try:
        if kind == "int":
            return int(float(text)) if float(text).is_integer() else int(text)
        if kind == "float":
            return float(text)
        if kind == "bool":
            low = text.lower()
            if low in _BOOL_TRUE:
                return True
            if low in _BOOL_FALSE:
                return False
            raise ValueError(text)
    except ValueError:
        raise ConfigError([f"{name}: cannot parse {text!r} as {kind}"]) from None
    return text


def from_mapping(values: dict[str, str], base: SimConfig | None = None) -> SimConfig:
    """Build a config from string values; unknown keys are errors."""
    base = base or SimConfig()
    names = {f.name for f in dataclasses.fields(SimConfig)} - {"potential"}
    changes: dict[str, Any] = {}
    pot_kind = None
    pot_params: dict[str, str] = {}
    problems = []
    for key, text in values.items():
        if key == "potential":
            pot_kind = text
        elif key in PARAM_KEYS:
            pot_params[key] = text
        elif key in names:
            try:
                changes[key] = _coerce(key, text)
            except ConfigError as exc:
                problems.extend(exc.problems)
        else:
            problems.append(f"unknown config key {key!r}")
    if pot_kind is not None or pot_params:
        current = base.potential
        merged = {k: v for k, v in dataclasses.asdict(current).items() if k != "kind"}
        try:
            merged.update({PARAM_KEYS[k]: float(v) for k, v in pot_params.items()})
            changes["potential"] = make_potential(pot_kind or current.kind, **merged)
        except ValueError as exc:
            problems.append(f"potential: {exc}")
    if problems:
        raise ConfigError(problems)
    return dataclasses.replace(base, **changes)


def parse_config_text(text: str) -> dict[str, str]:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError([f"line {lineno}: expected key=value, got {raw.strip()!r}"])
        key, val = (part.strip() for part in line.split("=", 1))
        values[key] = val
    return values


def load_config(path: str | Path, base: SimConfig | None = None) -> SimConfig:
    return from_mapping(parse_config_text(Path(path).read_text()), base)


def dump_config(config: SimConfig) -> str:
    """Serialise every field, in a form :func:`load_config` reads back exactly."""
    lines = []
    for f in dataclasses.fields(SimConfig):
        val = getattr(config, f.name)
        if f.name == "potential":
            lines.append(f"potential = {val.kind}")
            for name, pval in dataclasses.asdict(val).items():
                if name != "kind":
                    lines.append(f"{name} = {pval!r}")
        elif isinstance(val, bool):
            lines.append(f"{f.name} = {str(val).lower()}")
        elif isinstance(val, str):
            lines.append(f"{f.name} = {val}")
        else:
            lines.append(f"{f.name} = {val!r}")
    return "\n".join(lines) + "\n"


def config_dict(config: SimConfig) -> dict[str, Any]:
    return dataclasses.asdict(config)
