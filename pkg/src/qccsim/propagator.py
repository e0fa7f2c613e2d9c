"""Split-operator (Strang) propagation of the Schrodinger equation.

One step applies half a potential phase in position space, the full
kinetic phase in momentum space, then the second potential half-step:

    psi' = e^{-i V dt / 2 hbar} F^-1[ e^{-i hbar k^2 dt / 2m} F[ e^{-i V dt / 2 hbar} psi ] ]

While in momentum space the envelope spectrum is recentred on whole FFT
bins and the shift is moved into the carrier wavenumber (see
:mod:`qccsim.grid`). The roll is exact, so the propagated state is the
same; only its representation changes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .grid import Grid, WaveFunction
from .potentials import PotentialSpec, value


@dataclass(frozen=True, eq=False)
class PropagatorPlan:
    grid: Grid
    hbar: float
    m: float
    dt: float
    half_potential: np.ndarray
    kinetic: np.ndarray


def make_plan(grid: Grid, potential: PotentialSpec, hbar: float, m: float, dt: float) -> PropagatorPlan:
    half = np.exp(-0.5j * value(potential, grid.x) * dt / hbar)
    kin = np.exp(-0.5j * hbar * dt / m * grid.k**2)
    return PropagatorPlan(grid, hbar, m, dt, half, kin)


@lru_cache(maxsize=16)
def _cached_plan(grid, potential, hbar, m, dt):
    return make_plan(grid, potential, hbar, m, dt)


def _kinetic_phase(plan: PropagatorPlan, k0: float) -> np.ndarray:
    if k0 == 0.0:
        return plan.kinetic
    k = plan.grid.k
    return np.exp(-0.5j * plan.hbar * plan.dt / plan.m * (k0 + k) ** 2)


def _advance(a: np.ndarray, k0: float, plan: PropagatorPlan, regauge: bool):
    grid = plan.grid
    a = a * plan.half_potential
    spec = np.fft.fft(a)
    if regauge:
        weight = spec.real**2 + spec.imag**2
        shift = round(float(np.dot(grid.k, weight) / weight.sum()) / grid.dk)
        if shift:
            spec = np.roll(spec, -shift) * np.exp(-1j * shift * grid.dk * grid.x_min)
            k0 = k0 + shift * grid.dk
    spec *= _kinetic_phase(plan, k0)
    a = np.fft.ifft(spec) * plan.half_potential
    return a, k0


def step(psi: WaveFunction, plan: PropagatorPlan, regauge: bool = True) -> WaveFunction:
    if psi.grid != plan.grid:
        raise ValueError("wavefunction grid does not match the propagator plan")
    if psi.hbar != plan.hbar:
        raise ValueError("wavefunction hbar does not match the propagator plan")
    a, k0 = _advance(psi.amplitudes, psi.k0, plan, regauge)
    return WaveFunction(psi.grid, a, psi.hbar, k0)


def substeps(duration: float, dt_max: float) -> tuple[int, float, float]:
    """(count, regular step, final step) covering ``duration`` exactly."""
    if not duration > 0:
        raise ValueError("duration must be positive")
    count = max(1, math.ceil(duration / dt_max * (1 - 1e-12)))
    last = duration - (count - 1) * dt_max
    return count, dt_max, last


def evolve_burst(psi: WaveFunction, potential: PotentialSpec, m: float,
                 duration: float, dt_max: float, regauge: bool = True) -> WaveFunction:
    """Evolve for exactly ``duration`` using steps of at most ``dt_max``.

    All steps but the last have length ``dt_max``; the last is shortened so
    the total lands on ``duration``.
    """
    count, dt, last = substeps(duration, dt_max)
    a, k0 = psi.amplitudes, psi.k0
    if count > 1:
        plan = _cached_plan(psi.grid, potential, psi.hbar, m, dt)
        for _ in range(count - 1):
            a, k0 = _advance(a, k0, plan, regauge)
    plan = _cached_plan(psi.grid, potential, psi.hbar, m, last)
    a, k0 = _advance(a, k0, plan, regauge)
    return WaveFunction(psi.grid, a, psi.hbar, k0)
