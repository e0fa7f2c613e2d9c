"""Phase-space RMS deviation between classical and quantum trajectories."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np


class EmptyEnsemble(ValueError):
    pass


def rms_deviation(classical, samples: Iterable) -> float:
    """sqrt(mean_i[(x_c - x_i)^2 + (p_c - p_i)^2]).

    ``classical`` and every sample need ``.x`` and ``.p`` attributes;
    samples may also be given as an ``(N, 2)`` array.
    """
    if isinstance(samples, np.ndarray):
        pts = np.asarray(samples, dtype=float).reshape(-1, 2)
    else:
        pts = np.array([(s.x, s.p) for s in samples], dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        raise EmptyEnsemble("rms deviation needs at least one sample")
    dx = classical.x - pts[:, 0]
    dp = classical.p - pts[:, 1]
    return math.sqrt(float(np.mean(dx * dx + dp * dp)))


@dataclass
class DivergenceSeries:
    threshold: float
    times: list = field(default_factory=list)
    values: list = field(default_factory=list)
    divergence_time: Optional[float] = None

    @property
    def samples(self) -> list[tuple[float, float]]:
        return list(zip(self.times, self.values))

    @property
    def diverged(self) -> bool:
        return self.divergence_time is not None

    def record(self, t: float, d: float) -> "DivergenceSeries":
        if self.times and not t > self.times[-1]:
            raise ValueError(f"time {t} does not follow {self.times[-1]}")
        if d < 0:
            raise ValueError("distance must be non-negative")
        self.times.append(float(t))
        self.values.append(float(d))
        # strict inequality: D equal to the threshold does not trigger
        if self.divergence_time is None and d > self.threshold:
            self.divergence_time = float(t)
        return self

    def max(self) -> float:
        return max(self.values) if self.values else 0.0


def record(series: DivergenceSeries, t: float, d: float) -> DivergenceSeries:
    return series.record(t, d)
