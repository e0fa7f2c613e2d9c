"""Newtonian reference trajectory, integrated with classic RK4."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .potentials import PotentialSpec, force, value


@dataclass(frozen=True)
class ClassicalState:
    t: float
    x: float
    p: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.t, self.x, self.p)):
            raise ValueError(f"non-finite classical state {self}")


def _f(spec, x):
    return float(force(spec, x))


def rk4_step(s: ClassicalState, spec: PotentialSpec, m: float, dt: float,
             t_new: float | None = None) -> ClassicalState:
    """One RK4 step of x' = p/m, p' = -V'(x).

    ``t_new`` overrides ``s.t + dt`` so callers can stamp times computed by
    step counting.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    x, p = s.x, s.p
    k1x, k1p = p / m, _f(spec, x)
    k2x, k2p = (p + 0.5 * dt * k1p) / m, _f(spec, x + 0.5 * dt * k1x)
    k3x, k3p = (p + 0.5 * dt * k2p) / m, _f(spec, x + 0.5 * dt * k2x)
    k4x, k4p = (p + dt * k3p) / m, _f(spec, x + dt * k3x)
    x_new = x + dt / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x)
    p_new = p + dt / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p)
    return ClassicalState(s.t + dt if t_new is None else t_new, x_new, p_new)


def evolve_to(s: ClassicalState, spec: PotentialSpec, m: float, t_target: float,
              dt_classical: float) -> ClassicalState:
    """Advance to exactly ``t_target`` with steps of ``dt_classical``.

    The final step is shortened to land on the target, and intermediate
    times are ``s.t + i * dt`` rather than a running sum.
    """
    if t_target < s.t:
        raise ValueError(f"cannot evolve backwards from t={s.t} to t={t_target}")
    span = t_target - s.t
    if span == 0:
        return s
    count = max(1, math.ceil(span / dt_classical * (1 - 1e-12)))
    t0 = s.t
    for i in range(1, count):
        s = rk4_step(s, spec, m, dt_classical, t_new=t0 + i * dt_classical)
    last = t_target - s.t
    return rk4_step(s, spec, m, last, t_new=t_target)


def energy(s: ClassicalState, spec: PotentialSpec, m: float) -> float:
    return s.p**2 / (2 * m) + float(value(spec, s.x))


def max_excursion(x: float, p: float, spec: PotentialSpec, m: float, duration: float,
                  dt: float) -> float:
    """Largest |x(t) - x| over ``duration`` along the classical orbit from (x, p).

    Never less than the free-flight distance ``|p| duration / m``.
    """
    s = ClassicalState(0.0, x, p)
    count = max(1, math.ceil(duration / dt * (1 - 1e-12)))
    h = duration / count
    reach = 0.0
    for i in range(1, count + 1):
        s = rk4_step(s, spec, m, h, t_new=i * h)
        reach = max(reach, abs(s.x - x))
    return max(reach, abs(p) / m * duration)
