# ---
# jupyter:
#   jupytext:
#     text_representation:
#       extension: .py
#       format_name: percent
#       format_version: '1.3'
#   kernelspec:
#     display_name: Python 3
#     language: python
#     name: python3
# ---

# %% [markdown]
# # Husimi Q and the measurement step
#
# Here we build a coherent state, evolve it through an anharmonic potential,
# then look at its Husimi distribution and the draws taken from it.

# %%
import math

import numpy as np

from qccsim import PhasePoint, coherent_widths, make_coherent_state
from qccsim.grid import Grid, expectation_p, expectation_x, variance_x
from qccsim.measurement import compute_husimi, husimi_window, sample_phase_point
from qccsim.potentials import make_potential
from qccsim.propagator import evolve_burst

hbar, m, omega = 1e-3, 1.0, 1.0
w = coherent_widths(hbar, m, omega)
print(w)

# %% [markdown]
# The wavefunction keeps an analytic carrier $e^{ik_0x}$, so the grid only has
# to resolve the Gaussian envelope, even when $\hbar$ is tiny.

# %%
grid = Grid.centered(1.0, 0.6, 1024)
psi = make_coherent_state(PhasePoint(1.0, 0.4), w, hbar, m, omega, grid)
print(f"norm {psi.norm2():.12f}, carrier k0 = {psi.k0:.1f}, dx = {grid.dx:.2e}")

# %%
well = make_potential("double_well", a=1.0, b=1.0)
later = evolve_burst(psi, well, m, 0.3, 0.005)
print(f"<x> = {expectation_x(later):.4f}, <p> = {expectation_p(later):.4f}")
print(f"width changed from {w.sigma_x:.4f} to {math.sqrt(variance_x(later)):.4f}")

# %% [markdown]
# The Husimi window follows the packet and widens when it has spread. The
# field is normalised against $dx\,dp/(2\hbar)$, so its mass is close to one.

# %%
xr, pr = husimi_window(later, w, 5.0)
field = compute_husimi(later, xr, pr, 50, m, omega)
print(f"mass {field.mass:.5f}, peak Q {field.values.max():.4f} (1/pi = {1 / math.pi:.4f})")

# %% [markdown]
# Draws pick a cell by weight and then a uniform point inside it. Their mean
# tracks the centroid, and their spread is the Husimi spread, which is wider
# than the state itself by the coherent-state width.

# %%
rng = np.random.default_rng(0)
pts = sample_phase_point(field, rng, size=20_000)
print("sample mean", pts.mean(axis=0))
print("sample std ", pts.std(axis=0))
print("expected x std", math.sqrt(variance_x(later) + w.sigma_x**2))
