"""Log-spaced (hbar, dt) parameter sweeps.

Every cell is an independent ensemble whose base seed is derived from its
position in the grid, so results do not depend on execution order or on
the number of workers. Completed cells can be streamed to an append-only
JSON-lines file, and a sweep pointed at an existing file skips the cells
already recorded there.
"""
from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .config import SimConfig, validate
from .regimes import RegimeInputs, classify
from .simulation import run_ensemble

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SweepSpec:
    hbar_min: float = 3.0e-6
    hbar_max: float = 1.0e-2
    hbar_count: int = 25
    dt_min: float = 0.01
    dt_max: float = 0.3
    dt_count: int = 25
    base: SimConfig = field(default_factory=lambda: SimConfig(divergence_mode="per_run"))
    workers: int = 1
    regime_tolerance: float = 0.1

    def __post_init__(self):
        for lo, hi, n, name in ((self.hbar_min, self.hbar_max, self.hbar_count, "hbar"),
                                (self.dt_min, self.dt_max, self.dt_count, "dt")):
            if not 0 < lo < hi:
                raise ValueError(f"{name} range must satisfy 0 < min < max")
            if n < 2:
                raise ValueError(f"{name} count must be at least 2")


@dataclass
class CellResult:
    i: int  # hbar index
    j: int  # dt index
    hbar: float
    dt: float
    divergence_time: float
    n_censored: int
    regime: str
    error: Optional[str] = None

    @property
    def censored(self) -> bool:
        return self.n_censored > 0

    @property
    def failed(self) -> bool:
        return self.error is not None


@dataclass
class SweepResult:
    hbar_values: np.ndarray
    dt_values: np.ndarray
    cells: dict  # (i, j) -> CellResult
    t_max: float
    base_seed: int

    def _matrix(self, attr, dtype=float):
        out = np.empty((len(self.dt_values), len(self.hbar_values)), dtype=dtype)
        for (i, j), cell in self.cells.items():
            out[j, i] = getattr(cell, attr)
        return out

    @property
    def divergence_times(self) -> np.ndarray:
        """Rows are dt values, columns hbar values; failed cells are NaN."""
        out = self._matrix("divergence_time")
        for (i, j), cell in self.cells.items():
            if cell.failed:
                out[j, i] = np.nan
        return out

    @property
    def censored(self) -> np.ndarray:
        return self._matrix("censored", bool)

    @property
    def regimes(self) -> np.ndarray:
        return self._matrix("regime", object)

    @property
    def complete(self) -> bool:
        return len(self.cells) == len(self.hbar_values) * len(self.dt_values)


def build_axes(spec: SweepSpec) -> tuple[np.ndarray, np.ndarray]:
    return (np.geomspace(spec.hbar_min, spec.hbar_max, spec.hbar_count),
            np.geomspace(spec.dt_min, spec.dt_max, spec.dt_count))


def cell_seed(base_seed: int, i: int, j: int) -> int:
    seq = np.random.SeedSequence(base_seed, spawn_key=(i, j))
    return int(seq.generate_state(1, dtype=np.uint32)[0])


def cell_config(spec: SweepSpec, hbar: float, dt: float, i: int, j: int) -> SimConfig:
    return replace(spec.base, hbar=float(hbar), dt_meas=float(dt),
                   base_seed=cell_seed(spec.base.base_seed, i, j))


def run_cell(args) -> CellResult:
    spec, i, j, hbar, dt = args
    cfg = cell_config(spec, hbar, dt, i, j)
    label = str(classify(RegimeInputs.from_config(cfg), spec.regime_tolerance))
    try:
        ens = run_ensemble(cfg)
    except Exception as exc:  # one bad cell must not sink the sweep
        log.warning("cell (%d, %d) failed: %s", i, j, exc)
        return CellResult(i, j, float(hbar), float(dt), math.nan, 0, label,
                          f"{type(exc).__name__}: {exc}")
    return CellResult(i, j, float(hbar), float(dt), float(ens.mean_divergence_time),
                      ens.n_censored, label)


def _load_checkpoint(path: Path) -> dict:
    done = {}
    if path.exists():
        for line in path.read_text().splitlines():
            if line.strip():
                row = json.loads(line)
                done[(row["i"], row["j"])] = CellResult(**row)
    return done


def _append(path: Path, cell: CellResult):
    row = cell.__dict__.copy()
    if math.isnan(row["divergence_time"]):
        row["divergence_time"] = None
    with path.open("a") as fh:
        fh.write(json.dumps(row) + "\n")
        fh.flush()


def run_sweep(spec: SweepSpec, checkpoint: str | Path | None = None, progress=None) -> SweepResult:
    """Run every cell of the sweep, optionally resuming from ``checkpoint``."""
    validate(spec.base)
    hbars, dts = build_axes(spec)
    path = Path(checkpoint) if checkpoint is not None else None
    cells = _load_checkpoint(path) if path is not None else {}
    for cell in cells.values():
        if cell.divergence_time is None:
            cell.divergence_time = math.nan

    todo = [(spec, i, j, h, d) for j, d in enumerate(dts) for i, h in enumerate(hbars)
            if (i, j) not in cells]

    def sink(cell: CellResult):
        cells[(cell.i, cell.j)] = cell
        if path is not None:
            _append(path, cell)
        if progress is not None:
            progress(cell)

    if spec.workers > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            futures = [pool.submit(run_cell, job) for job in todo]
            for fut in as_completed(futures):
                sink(fut.result())
    else:
        for job in todo:
            sink(run_cell(job))
    return SweepResult(hbars, dts, cells, spec.base.t_max, spec.base.base_seed)
