"""Regime criteria in the (hbar, dt) plane.

Two dimensionless ratios must both be small for the measured particle to
follow its classical counterpart:

uncertainty
    ``hbar m / (2 omega p^2 dt^2)``: the measurement kick
    ``sqrt(hbar / 2 m omega)`` against the classical drift ``p dt / m``.
wavelike
    ``|(3 hbar m omega dp - 4 dp^3) V'''(x)| / |6 m^2 omega^2 (m omega^2 p dx - dp V'(x))|``:
    the leading hbar^2 Moyal correction against the Liouville terms for a
    Gaussian state, evaluated at displacement ``(dx, dp)`` from its centre.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

from .config import SimConfig, coherent_widths
from .potentials import PotentialSpec, derivative, third_derivative


class RegimeLabel(str, enum.Enum):
    UNCERTAINTY_DOMINATED = "uncertainty_dominated"
    WAVELIKE = "wavelike"
    SEMICLASSICAL = "semiclassical"
    INDETERMINATE = "indeterminate"

    def __str__(self):
        return self.value


class SingularCriterion(ZeroDivisionError):
    pass


@dataclass(frozen=True)
class RegimeInputs:
    hbar: float
    m: float
    omega: float
    dt_meas: float
    p: float
    x: float
    delta_x: float
    delta_p: float
    potential: PotentialSpec

    @classmethod
    def at(cls, hbar: float, dt_meas: float, p: float, x: float = 0.0,
           potential: PotentialSpec | None = None, m: float = 1.0, omega: float = 1.0,
           delta_x: Optional[float] = None, delta_p: Optional[float] = None) -> "RegimeInputs":
        """Inputs with one-sigma displacements unless given explicitly."""
        w = coherent_widths(hbar, m, omega)
        return cls(hbar, m, omega, dt_meas, p, x,
                   w.sigma_x if delta_x is None else delta_x,
                   w.sigma_p if delta_p is None else delta_p,
                   potential if potential is not None else PotentialSpec())

    @classmethod
    def from_config(cls, config: SimConfig, **overrides) -> "RegimeInputs":
        kwargs = dict(hbar=config.hbar, dt_meas=config.dt_meas, p=config.p0, x=config.x0,
                      potential=config.potential, m=config.mass, omega=config.omega)
        kwargs.update(overrides)
        return cls.at(**kwargs)


def uncertainty_lhs(inputs: RegimeInputs) -> float:
    if inputs.p == 0 or inputs.dt_meas == 0:
        raise SingularCriterion("uncertainty criterion needs nonzero momentum and timestep")
    # dividing by p and dt one factor at a time keeps the result correctly rounded
    return inputs.hbar * inputs.m / (2 * inputs.omega) / inputs.p / inputs.p / inputs.dt_meas / inputs.dt_meas


def wavelike_lhs(inputs: RegimeInputs) -> float:
    h, m, w = inputs.hbar, inputs.m, inputs.omega
    dx, dp = inputs.delta_x, inputs.delta_p
    v1 = float(derivative(inputs.potential, inputs.x))
    v3 = float(third_derivative(inputs.potential, inputs.x))
    denom = 6 * m**2 * w**2 * (m * w**2 * inputs.p * dx - dp * v1)
    if denom == 0:
        raise SingularCriterion("wavelike criterion has a vanishing denominator")
    if v3 == 0:
        return 0.0
    return abs((3 * h * m * w * dp - 4 * dp**3) * v3) / abs(denom)


def classify(inputs: RegimeInputs, tolerance: float = 0.1) -> RegimeLabel:
    """Label a parameter point; ``tolerance`` is the numeric meaning of "<< 1"."""
    try:
        unc = uncertainty_lhs(inputs)
        wav = wavelike_lhs(inputs)
    except SingularCriterion:
        return RegimeLabel.INDETERMINATE
    if unc >= tolerance:
        return RegimeLabel.UNCERTAINTY_DOMINATED
    if wav >= tolerance:
        return RegimeLabel.WAVELIKE
    return RegimeLabel.SEMICLASSICAL
