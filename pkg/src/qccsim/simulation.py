"""Measured quantum evolution alongside a classical reference.

Each measurement interval does, in order: evolve the wavefunction for
``dt_meas``, build its Husimi distribution, sample a phase-space point,
collapse onto the coherent state at that point on a freshly planned window,
advance the classical particle to the same instant, and record the
deviation. The loop ends when the deviation crosses the threshold (if
``stop_at_threshold``) or when ``t_max`` is reached.

Ensembles run in one of two modes:

``ensemble``
    all members advance in lock-step (time is the outer loop, member the
    inner one) and a single pooled RMS series decides divergence.
``per_run``
    members run independently, each with its own divergence time; the
    ensemble reports the mean, counting runs that never diverge as
    ``t_max``.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .classical import ClassicalState, evolve_to, max_excursion
from .config import SimConfig, ValidatedConfig, validate
from .divergence import DivergenceSeries, rms_deviation
from .grid import (
    PhasePoint,
    WaveFunction,
    WindowPolicy,
    WindowTooNarrow,
    expectation_p,
    expectation_x,
    plan_window,
    rewindow,
)
from .measurement import collapse, measure
from .propagator import evolve_burst

log = logging.getLogger(__name__)

# a packet leaving more than this much probability at the grid edges after
# a burst has been truncated or wrapped by the periodic transform
BURST_EDGE_MASS_MAX = 1e-6


class SimulationError(RuntimeError):
    def __init__(self, t: float, cause: Exception):
        self.t = t
        self.cause = cause
        super().__init__(f"at t={t:.6g}: {type(cause).__name__}: {cause}")


def member_seed(base_seed: int, *key: int) -> np.random.SeedSequence:
    """Independent RNG stream for ``key`` (member index, or cell and member)."""
    return np.random.SeedSequence(base_seed, spawn_key=tuple(int(k) for k in key))


def _seed_label(seed) -> tuple:
    if isinstance(seed, np.random.SeedSequence):
        return (seed.entropy, *seed.spawn_key)
    return (seed,)


@dataclass
class RunRecord:
    times: list = field(default_factory=list)
    quantum: list = field(default_factory=list)  # PhasePoint per time
    classical: list = field(default_factory=list)  # ClassicalState per time
    rms_series: DivergenceSeries = None
    seed: tuple = ()

    @property
    def divergence_time(self) -> Optional[float]:
        return self.rms_series.divergence_time if self.rms_series else None

    @property
    def quantum_trajectory(self) -> list[tuple[float, PhasePoint]]:
        return list(zip(self.times, self.quantum))

    @property
    def classical_trajectory(self) -> list[ClassicalState]:
        return list(self.classical)


@dataclass
class EnsembleRecord:
    runs: list
    mode: str
    mean_divergence_time: float
    n_censored: int
    config: SimConfig
    series: Optional[DivergenceSeries] = None  # pooled, ensemble mode only

    @property
    def censored(self) -> bool:
        return self.n_censored > 0


class _Member:
    """One quantum particle with its own RNG stream."""

    def __init__(self, cfg: ValidatedConfig, seed):
        self.cfg = cfg
        self.seed = seed
        self.rng = np.random.default_rng(seed)
        self.psi = collapse(PhasePoint(cfg.x0, cfg.p0), cfg)
        self.record = RunRecord(rms_series=DivergenceSeries(cfg.divergence_threshold),
                                seed=_seed_label(seed))

    def advance(self) -> PhasePoint:
        cfg = self.cfg
        psi = evolve_burst(self.psi, cfg.potential, cfg.mass, cfg.dt_meas, cfg.substep_max)
        edge = psi.edge_mass()
        if edge > BURST_EDGE_MASS_MAX:
            raise WindowTooNarrow(f"packet reached the window edge (edge mass {edge:.3g})")
        if cfg.measure:
            point, self.psi = measure(psi, cfg, self.rng)
        else:
            point = PhasePoint(expectation_x(psi), expectation_p(psi))
            self.psi = self._recenter(psi, point)
        return point

    def _recenter(self, psi: WaveFunction, point: PhasePoint) -> WaveFunction:
        """Follow an unmeasured packet, regridding only once it leaves the middle half."""
        grid = psi.grid
        half = 0.5 * grid.length
        if abs(point.x - (grid.x_min + half)) < 0.25 * half:
            return psi
        cfg = self.cfg
        policy = WindowPolicy(cfg.momentum_prefactor, cfg.uncertainty_prefactor)
        drift = max_excursion(point.x, point.p, cfg.potential, cfg.mass,
                              cfg.dt_meas, cfg.dt_classical)
        new_grid = plan_window(point, cfg.widths, policy, cfg.dt_meas, cfg.mass,
                               n=grid.n, points_per_sigma=cfg.points_per_sigma, drift=drift)
        return rewindow(psi, new_grid)


def _simulate(cfg: ValidatedConfig, seeds: Sequence, pooled: bool):
    """Advance members in lock-step; return (member records, pooled series)."""
    try:
        members = [_Member(cfg, s) for s in seeds]
    except Exception as exc:
        raise SimulationError(0.0, exc) from exc
    classical = ClassicalState(0.0, cfg.x0, cfg.p0)
    series = DivergenceSeries(cfg.divergence_threshold)
    active = list(members)
    k = 0
    while active:
        k += 1
        t = k * cfg.dt_meas
        points = []
        for member in active:
            try:
                points.append(member.advance())
            except Exception as exc:
                raise SimulationError(t, exc) from exc
        classical = evolve_to(classical, cfg.potential, cfg.mass, t, cfg.dt_classical)
        still = []
        for member, point in zip(active, points):
            rec = member.record
            rec.times.append(t)
            rec.quantum.append(point)
            rec.classical.append(classical)
            rec.rms_series.record(t, rms_deviation(classical, [point]))
            if not (cfg.stop_at_threshold and not pooled and rec.rms_series.diverged):
                still.append(member)
        active = still
        if pooled:
            series.record(t, rms_deviation(classical, points))
            if cfg.stop_at_threshold and series.diverged:
                break
        if t >= cfg.t_max * (1 - 1e-12):
            break
    return [m.record for m in members], (series if pooled else None)


def run_single(config: SimConfig, seed=None) -> RunRecord:
    """One measured trajectory; ``seed`` defaults to member 0's stream."""
    cfg = validate(config)
    if seed is None:
        seed = member_seed(cfg.base_seed, 0)
    records, _ = _simulate(cfg, [seed], pooled=False)
    return records[0]


def _run_member(args):
    cfg, index = args
    return run_single(cfg, member_seed(cfg.base_seed, index))


def run_ensemble(config: SimConfig, workers: int = 1) -> EnsembleRecord:
    cfg = validate(config)
    n = cfg.ensemble_size
    if cfg.divergence_mode == "ensemble":
        seeds = [member_seed(cfg.base_seed, i) for i in range(n)]
        runs, series = _simulate(cfg, seeds, pooled=True)
        t_div = series.divergence_time
        censored = int(t_div is None)
        mean = t_div if t_div is not None else cfg.t_max
        return EnsembleRecord(runs, "ensemble", mean, censored, cfg, series)

    jobs = [(cfg, i) for i in range(n)]
    if workers > 1 and n > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(_run_member, jobs))
    else:
        runs = [_run_member(job) for job in jobs]
    times = [r.divergence_time if r.divergence_time is not None else cfg.t_max for r in runs]
    censored = sum(r.divergence_time is None for r in runs)
    return EnsembleRecord(runs, "per_run", float(np.mean(times)), censored, cfg)
