"""One-dimensional potential landscapes.

Each :class:`PotentialSpec` carries a ``kind`` tag plus every shape
parameter; only the parameters relevant to the kind are read.

    harmonic       (k/2) x^2
    free           0
    linear         g x
    quartic        lam x^4
    gaussian_well  -V0 exp(-x^2 / (2 w^2))
    double_well    a (x^2 - b^2)^2
"""
from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

KINDS = ("harmonic", "free", "linear", "quartic", "gaussian_well", "double_well")

# config-file key -> PotentialSpec field
PARAM_KEYS = {"k": "k", "g": "g", "lam": "lam", "lambda": "lam",
              "V0": "V0", "v0": "V0", "w": "w", "a": "a", "b": "b"}

_USED = {
    "harmonic": ("k",),
    "free": (),
    "linear": ("g",),
    "quartic": ("lam",),
    "gaussian_well": ("V0", "w"),
    "double_well": ("a", "b"),
}


@dataclass(frozen=True)
class PotentialSpec:
    kind: str = "harmonic"
    k: float = 5.0
    g: float = 1.0
    lam: float = 1.0
    V0: float = 1.0
    w: float = 1.0
    a: float = 1.0
    b: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown potential kind {self.kind!r}; expected one of {KINDS}")
        for name in ("k", "lam", "V0", "w", "a", "b"):
            if name in _USED[self.kind] and not getattr(self, name) > 0:
                raise ValueError(f"{self.kind} potential requires {name} > 0")

    @property
    def parameters(self) -> dict[str, float]:
        """The shape parameters this kind actually uses."""
        return {name: getattr(self, name) for name in _USED[self.kind]}

    def value(self, x):
        return value(self, x)

    def force(self, x):
        return force(self, x)

    def third_derivative(self, x):
        return third_derivative(self, x)


def make_potential(kind: str, **params: float) -> PotentialSpec:
    """Build a spec from a kind name and config-style parameter keys."""
    kwargs = {}
    for key, val in params.items():
        if key not in PARAM_KEYS:
            raise ValueError(f"unknown potential parameter {key!r}")
        kwargs[PARAM_KEYS[key]] = float(val)
    return PotentialSpec(kind=kind, **kwargs)


def spec_fields() -> tuple[str, ...]:
    return tuple(f.name for f in fields(PotentialSpec) if f.name != "kind")


def value(spec: PotentialSpec, x):
    x = np.asarray(x, dtype=float)
    kind = spec.kind
    if kind == "harmonic":
        return 0.5 * spec.k * x**2
    if kind == "free":
        return np.zeros_like(x)
    if kind == "linear":
        return spec.g * x
    if kind == "quartic":
        return spec.lam * x**4
    if kind == "gaussian_well":
        return -spec.V0 * np.exp(-(x**2) / (2 * spec.w**2))
    return spec.a * (x**2 - spec.b**2) ** 2


def derivative(spec: PotentialSpec, x):
    """dV/dx."""
    x = np.asarray(x, dtype=float)
    kind = spec.kind
    if kind == "harmonic":
        return spec.k * x
    if kind == "free":
        return np.zeros_like(x)
    if kind == "linear":
        return np.full_like(x, spec.g)
    if kind == "quartic":
        return 4 * spec.lam * x**3
    if kind == "gaussian_well":
        w2 = spec.w**2
        return spec.V0 * x / w2 * np.exp(-(x**2) / (2 * w2))
    return 4 * spec.a * x * (x**2 - spec.b**2)


def force(spec: PotentialSpec, x):
    """F(x) = -dV/dx."""
    return -derivative(spec, x)


def second_derivative(spec: PotentialSpec, x):
    x = np.asarray(x, dtype=float)
    kind = spec.kind
    if kind == "harmonic":
        return np.full_like(x, spec.k)
    if kind in ("free", "linear"):
        return np.zeros_like(x)
    if kind == "quartic":
        return 12 * spec.lam * x**2
    if kind == "gaussian_well":
        w2 = spec.w**2
        return spec.V0 / w2 * (1 - x**2 / w2) * np.exp(-(x**2) / (2 * w2))
    return spec.a * (12 * x**2 - 4 * spec.b**2)


def third_derivative(spec: PotentialSpec, x):
    x = np.asarray(x, dtype=float)
    kind = spec.kind
    if kind in ("harmonic", "free", "linear"):
        return np.zeros_like(x)
    if kind == "quartic":
        return 24 * spec.lam * x
    if kind == "gaussian_well":
        w2 = spec.w**2
        return spec.V0 * x / w2**2 * (x**2 / w2 - 3) * np.exp(-(x**2) / (2 * w2))
    return 24 * spec.a * x
