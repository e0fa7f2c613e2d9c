"""Quantum-classical correspondence under repeated coherent-state measurement.

A 1D wavepacket is propagated with a split-operator spectral method and
measured at fixed intervals by sampling its Husimi Q distribution and
collapsing onto a coherent state. The sampled trajectory is compared with
the Newtonian trajectory from the same initial point.
"""
__version__ = "0.1.0"

from .config import CoherentWidths, ConfigError, SimConfig, coherent_widths, load_config, validate
from .grid import Grid, PhasePoint, WaveFunction, make_coherent_state
from .potentials import PotentialSpec
from .regimes import RegimeInputs, RegimeLabel, classify
from .simulation import run_ensemble, run_single
from .sweep import SweepSpec, run_sweep

__all__ = [
    "CoherentWidths", "ConfigError", "SimConfig", "coherent_widths", "load_config", "validate",
    "Grid", "PhasePoint", "WaveFunction", "make_coherent_state", "PotentialSpec",
    "RegimeInputs", "RegimeLabel", "classify", "run_ensemble", "run_single",
    "SweepSpec", "run_sweep",
]
