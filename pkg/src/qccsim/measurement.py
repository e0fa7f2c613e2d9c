"""Coherent-state POVM measurement via the Husimi Q distribution.

A measurement computes ``Q(x, p) = |<x, p|psi>|^2 / pi`` on a
``resolution x resolution`` lattice of cells around the packet, draws one
cell with probability proportional to its weight, and collapses the state
onto the coherent state centred at the drawn point.

Q is normalised against the coherent-state measure
``d^2 alpha = dx dp / (2 hbar)``, so a cell contributes
``value * dx_h * dp_h / (2 hbar)`` to the total probability.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classical import max_excursion
from .config import CoherentWidths, SimConfig, coherent_widths
from .grid import (
    PhasePoint,
    WaveFunction,
    WindowPolicy,
    expectation_p,
    expectation_x,
    make_coherent_state,
    plan_window,
    variance_p,
    variance_x,
)

# coherent-state overlap kernel is below 1e-15 beyond this many sigma_x
_KERNEL_REACH = 12.0


class EmptyField(ValueError):
    """The Husimi window holds (numerically) no probability."""


@dataclass(frozen=True, eq=False)
class HusimiField:
    x_centers: np.ndarray
    p_centers: np.ndarray
    values: np.ndarray  # indexed [ix, ip]
    hbar: float

    @property
    def dx(self) -> float:
        return float(self.x_centers[1] - self.x_centers[0])

    @property
    def dp(self) -> float:
        return float(self.p_centers[1] - self.p_centers[0])

    @property
    def cell_area(self) -> float:
        return self.dx * self.dp / (2.0 * self.hbar)

    @property
    def mass(self) -> float:
        return float(self.values.sum() * self.cell_area)

    @property
    def x_window(self) -> tuple[float, float, int]:
        half = 0.5 * self.dx
        return (float(self.x_centers[0] - half), float(self.x_centers[-1] + half), len(self.x_centers))

    @property
    def p_window(self) -> tuple[float, float, int]:
        half = 0.5 * self.dp
        return (float(self.p_centers[0] - half), float(self.p_centers[-1] + half), len(self.p_centers))


def _centers(lo: float, hi: float, count: int) -> np.ndarray:
    step = (hi - lo) / count
    return lo + step * (np.arange(count) + 0.5)


def husimi_values(psi: WaveFunction, xs: np.ndarray, ps: np.ndarray, m: float,
                  omega: float) -> np.ndarray:
    """Q at every pair ``(xs[i], ps[j])``, returned with shape ``(len(xs), len(ps))``.

    Each overlap <x0, p0|psi> is a direct quadrature over the grid of
    ``psi``, restricted to the points where the coherent-state kernel is
    non-negligible.
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    ps = np.atleast_1d(np.asarray(ps, dtype=float))
    hbar = psi.hbar
    widths = coherent_widths(hbar, m, omega)
    grid = psi.grid
    reach = _KERNEL_REACH * widths.sigma_x
    lo = max(0, math.floor((xs.min() - reach - grid.x_min) / grid.dx))
    hi = min(grid.n, math.ceil((xs.max() + reach - grid.x_min) / grid.dx) + 1)
    if hi <= lo:
        return np.zeros((len(xs), len(ps)))
    x = grid.x[lo:hi]
    a = psi.amplitudes[lo:hi]
    x_ref = 0.5 * (xs.min() + xs.max())

    norm = (m * omega / (math.pi * hbar)) ** 0.25
    kernel = norm * np.exp(-m * omega * (x[None, :] - xs[:, None]) ** 2 / (2 * hbar))
    # relative carrier between psi and each coherent state; global phases dropped
    phase = np.exp(1j * np.outer(psi.k0 - ps / hbar, x - x_ref))
    overlap = (kernel * a[None, :]) @ phase.T * grid.dx
    return (overlap.real**2 + overlap.imag**2) / math.pi


def compute_husimi(psi: WaveFunction, x_range: tuple[float, float], p_range: tuple[float, float],
                   resolution: int, m: float, omega: float) -> HusimiField:
    """Husimi Q of ``psi`` at the centres of a ``resolution`` square cell lattice."""
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    xs = _centers(*x_range, resolution)
    ps = _centers(*p_range, resolution)
    field = HusimiField(xs, ps, husimi_values(psi, xs, ps, m, omega), psi.hbar)
    if field.mass < 1e-6:
        raise EmptyField(f"Husimi window captures only {field.mass:.3g} of the state")
    return field


def sample_phase_point(field: HusimiField, rng: np.random.Generator, jitter: bool = True,
                       size: int | None = None):
    """Draw from the field: a cell by weight, then uniformly inside it.

    With ``jitter=False`` the cell centre is returned. ``size`` draws an
    array of shape ``(size, 2)`` instead of one :class:`PhasePoint`.
    """
    weights = field.values.ravel()
    total = weights.sum()
    if not total > 0:
        raise EmptyField("cannot sample a field with zero mass")
    cdf = np.cumsum(weights)
    count = 1 if size is None else size
    u = rng.random(count) * cdf[-1]
    idx = np.minimum(np.searchsorted(cdf, u, side="right"), weights.size - 1)
    ix, ip = np.unravel_index(idx, field.values.shape)
    x = field.x_centers[ix]
    p = field.p_centers[ip]
    if jitter:
        offsets = rng.random((count, 2)) - 0.5
        x = x + offsets[:, 0] * field.dx
        p = p + offsets[:, 1] * field.dp
    if size is None:
        return PhasePoint(float(x[0]), float(p[0]))
    return np.column_stack([x, p])


def husimi_window(psi: WaveFunction, widths: CoherentWidths, nsigma: float):
    """Rectangle around the packet centroid.

    For a coherent state the half-widths are ``nsigma * sigma_x`` and
    ``nsigma * sigma_p``. A state that has spread grows the window with the
    Husimi standard deviation, ``sqrt((var + sigma^2) / 2)`` per axis.
    """
    xc, pc = expectation_x(psi), expectation_p(psi)
    sx = math.sqrt(0.5 * (variance_x(psi) + widths.sigma_x**2))
    sp = math.sqrt(0.5 * (variance_p(psi) + widths.sigma_p**2))
    hx = nsigma * max(sx, widths.sigma_x)
    hp = nsigma * max(sp, widths.sigma_p)
    return (xc - hx, xc + hx), (pc - hp, pc + hp)


def measure(psi: WaveFunction, config: SimConfig, rng: np.random.Generator):
    """Sample an outcome from the Husimi distribution and collapse onto it.

    Returns ``(point, new_state)``: the new state is the coherent state at
    ``point`` on a freshly planned window (see :func:`collapse`).
    """
    widths = coherent_widths(psi.hbar, config.mass, config.omega)
    x_range, p_range = husimi_window(psi, widths, config.husimi_nsigma)
    field = compute_husimi(psi, x_range, p_range, config.husimi_resolution,
                           config.mass, config.omega)
    point = sample_phase_point(field, rng, jitter=config.jitter)
    return point, collapse(point, config)


def collapse(point: PhasePoint, config: SimConfig) -> WaveFunction:
    """Coherent state at ``point`` on a window sized for the next interval.

    The drift allowance is the largest excursion of the classical orbit
    from ``point`` over ``dt_meas``, so a packet that accelerates away from
    a turning point stays inside the grid.
    """
    drift = max_excursion(point.x, point.p, config.potential, config.mass,
                          config.dt_meas, config.dt_classical)
    widths = coherent_widths(config.hbar, config.mass, config.omega)
    policy = WindowPolicy(config.momentum_prefactor, config.uncertainty_prefactor)
    grid = plan_window(point, widths, policy, config.dt_meas, config.mass,
                       n=config.grid_points, points_per_sigma=config.points_per_sigma,
                       drift=drift)
    return make_coherent_state(point, widths, config.hbar, config.mass, config.omega, grid)
