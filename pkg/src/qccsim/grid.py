"""Spatial grids, wavefunctions and the moving-window policy.

A :class:`WaveFunction` stores a smooth envelope ``a_j`` together with a
carrier wavenumber ``k0``; the represented state is

    psi(x_j) = a_j * exp(1j * k0 * x_j)

For small hbar the de Broglie wavelength ``2 pi hbar / p`` is far below any
affordable grid spacing, while the envelope varies on the scale of the
packet width. Keeping the carrier analytic lets the grid resolve only the
envelope. With ``k0 = 0`` the amplitudes are the plain samples of psi.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import CoherentWidths

NORM_TOL = 1e-10
EDGE_MASS_MAX = 1e-8
EDGE_FRACTION = 0.02
SUPPORT_MIN = 0.999


class WindowTooNarrow(ValueError):
    """The packet reaches the edge of its grid."""


class SupportLoss(ValueError):
    """A regrid dropped a measurable part of the wavefunction."""


@dataclass(frozen=True)
class PhasePoint:
    x: float
    p: float


@dataclass(frozen=True)
class Grid:
    x_min: float
    dx: float
    n: int

    def __post_init__(self):
        if not self.dx > 0:
            raise ValueError("grid spacing must be positive")
        if self.n < 2 or self.n & (self.n - 1):
            raise ValueError("grid size must be a power of two")

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n)

    @property
    def x_max(self) -> float:
        return self.x_min + self.dx * (self.n - 1)

    @property
    def length(self) -> float:
        return self.dx * self.n

    @property
    def k(self) -> np.ndarray:
        """Angular wavenumbers in numpy FFT order."""
        return 2 * np.pi * np.fft.fftfreq(self.n, d=self.dx)

    @property
    def dk(self) -> float:
        return 2 * np.pi / (self.n * self.dx)

    @classmethod
    def centered(cls, center: float, half_width: float, n: int) -> "Grid":
        return cls(x_min=center - half_width, dx=2.0 * half_width / n, n=n)


@dataclass(frozen=True, eq=False)
class WaveFunction:
    grid: Grid
    amplitudes: np.ndarray
    hbar: float
    k0: float = 0.0

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} amplitudes, got shape {amps.shape}")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def psi(self) -> np.ndarray:
        """Samples of the full wavefunction, carrier included."""
        return self.amplitudes * np.exp(1j * self.k0 * self.grid.x)

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm2(self) -> float:
        return float(np.sum(self.density) * self.grid.dx)

    def normalized(self) -> "WaveFunction":
        return WaveFunction(self.grid, self.amplitudes / math.sqrt(self.norm2()), self.hbar, self.k0)

    def edge_mass(self) -> float:
        m = max(1, math.ceil(EDGE_FRACTION * self.grid.n / 2))
        rho = self.density
        return float((rho[:m].sum() + rho[-m:].sum()) * self.grid.dx)

    def inner(self, other: "WaveFunction") -> complex:
        """<self|other> by grid quadrature; both must share a grid."""
        if other.grid != self.grid:
            raise ValueError("inner product needs a common grid")
        phase = np.exp(1j * (other.k0 - self.k0) * self.grid.x)
        return complex(np.vdot(self.amplitudes, other.amplitudes * phase) * self.grid.dx)

    def boosted(self, q: float) -> "WaveFunction":
        """Multiply by exp(i q x / hbar)."""
        return WaveFunction(self.grid, self.amplitudes, self.hbar, self.k0 + q / self.hbar)

    def with_carrier(self, k0: float) -> "WaveFunction":
        """Same state, amplitudes re-expressed against carrier ``k0``."""
        amps = self.amplitudes * np.exp(1j * (self.k0 - k0) * self.grid.x)
        return WaveFunction(self.grid, amps, self.hbar, k0)


@dataclass(frozen=True)
class WindowPolicy:
    momentum_prefactor: float = 8.0
    uncertainty_prefactor: float = 15.0

    def __post_init__(self):
        if self.momentum_prefactor < 1 or self.uncertainty_prefactor < 1:
            raise ValueError("window prefactors must be at least 1")


def make_coherent_state(center: PhasePoint, widths: CoherentWidths, hbar: float,
                        m: float, omega: float, grid: Grid) -> WaveFunction:
    """Minimum-uncertainty Gaussian centred on ``center``, renormalised on ``grid``."""
    x = grid.x
    prefactor = (m * omega / (math.pi * hbar)) ** 0.25
    amps = prefactor * np.exp(-m * omega * (x - center.x) ** 2 / (2 * hbar))
    psi = WaveFunction(grid, amps, hbar, center.p / hbar).normalized()
    if psi.edge_mass() > EDGE_MASS_MAX:
        raise WindowTooNarrow(
            f"coherent state at x={center.x:.6g} leaves edge mass {psi.edge_mass():.3g} "
            f"on grid [{grid.x_min:.6g}, {grid.x_max:.6g}]")
    return psi


def expectation_x(psi: WaveFunction) -> float:
    rho = psi.density
    return float(np.sum(psi.grid.x * rho) / np.sum(rho))


def expectation_p(psi: WaveFunction) -> float:
    spec = np.abs(np.fft.fft(psi.amplitudes)) ** 2
    return psi.hbar * (psi.k0 + float(np.sum(psi.grid.k * spec) / np.sum(spec)))


def variance_x(psi: WaveFunction) -> float:
    rho = psi.density
    mean = np.sum(psi.grid.x * rho) / np.sum(rho)
    return float(np.sum((psi.grid.x - mean) ** 2 * rho) / np.sum(rho))


def variance_p(psi: WaveFunction) -> float:
    spec = np.abs(np.fft.fft(psi.amplitudes)) ** 2
    k = psi.grid.k
    mean = np.sum(k * spec) / np.sum(spec)
    return float(psi.hbar**2 * np.sum((k - mean) ** 2 * spec) / np.sum(spec))


def window_half_width(p: float, sigma_x: float, policy: WindowPolicy,
                      dt_meas: float, m: float, drift: float | None = None) -> float:
    if drift is None:
        drift = abs(p) / m * dt_meas
    return max(policy.momentum_prefactor * drift, policy.uncertainty_prefactor * sigma_x)


def plan_window(center: PhasePoint, widths: CoherentWidths, policy: WindowPolicy,
                dt_meas: float, m: float, n: int = 1024,
                points_per_sigma: float = 0.0, drift: float | None = None) -> Grid:
    """Grid of ``n`` points centred on ``center.x``.

    The half-width is whichever is larger of the drift allowance
    ``c_p * drift`` and the spreading allowance ``c_u sigma_x``. ``drift``
    defaults to the free-flight distance ``|p| dt / m``; callers that know
    the packet accelerates pass the largest expected excursion instead.
    When ``points_per_sigma`` is positive, ``n`` is doubled until the
    spacing resolves ``sigma_x`` with that many points.
    """
    half = window_half_width(center.p, widths.sigma_x, policy, dt_meas, m, drift)
    if points_per_sigma > 0:
        needed = 2 * half * points_per_sigma / widths.sigma_x
        if needed > n:
            n = 1 << math.ceil(math.log2(needed))
    return Grid.centered(center.x, half, n)


def rewindow(psi: WaveFunction, new_grid: Grid) -> WaveFunction:
    """Linearly interpolate the envelope onto ``new_grid`` and renormalise.

    Real and imaginary parts are interpolated independently; the carrier is
    kept, so only the smooth envelope is interpolated.
    """
    if new_grid == psi.grid:
        return psi
    old_x = psi.grid.x
    new_x = new_grid.x
    a = psi.amplitudes
    re = np.interp(new_x, old_x, a.real, left=0.0, right=0.0)
    im = np.interp(new_x, old_x, a.imag, left=0.0, right=0.0)
    out = WaveFunction(new_grid, re + 1j * im, psi.hbar, psi.k0)
    norm2 = out.norm2()
    if norm2 < SUPPORT_MIN:
        raise SupportLoss(f"regrid kept only {norm2:.6f} of the norm")
    return out.normalized()
