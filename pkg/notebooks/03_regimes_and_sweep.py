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
# # Where does the particle stay classical?
#
# Two dimensionless ratios decide it. The uncertainty ratio compares the
# measurement kick with the classical drift over one interval. The wavelike
# ratio compares the leading Moyal correction with the Liouville terms, and
# it vanishes for any potential that is at most quadratic.

# %%
import numpy as np

from qccsim import RegimeInputs, SimConfig, SweepSpec, classify, run_sweep
from qccsim.output import emit_heatmap
from qccsim.potentials import make_potential
from qccsim.regimes import uncertainty_lhs, wavelike_lhs

inputs = RegimeInputs.at(hbar=0.1, dt_meas=0.1, p=1.0)
print(uncertainty_lhs(inputs), classify(inputs))

# %%
quartic = make_potential("quartic", lam=1.0)
for hbar in (1e-2, 1e-3, 1e-5):
    q = RegimeInputs.at(hbar=hbar, dt_meas=0.1, p=1.0, x=1.0, potential=quartic)
    print(f"hbar={hbar:g}: uncertainty {uncertainty_lhs(q):.3g}, "
          f"wavelike {wavelike_lhs(q):.3g}, label {classify(q)}")

# %% [markdown]
# ## A small sweep
#
# Each cell is an independent `per_run` ensemble with its own derived seed.
# Passing a checkpoint path makes the sweep resumable. The run below is
# deliberately tiny; the full 25 x 25 grid is an overnight job.

# %%
spec = SweepSpec(hbar_min=1e-4, hbar_max=1e-1, hbar_count=4,
                 dt_min=0.02, dt_max=0.2, dt_count=3,
                 base=SimConfig(ensemble_size=3, t_max=5.0, divergence_mode="per_run"))
result = run_sweep(spec)
np.set_printoptions(precision=2, suppress=True)
print("rows: dt", result.dt_values)
print("cols: hbar", ", ".join(f"{h:.2g}" for h in result.hbar_values))
print(result.divergence_times)
print(result.regimes)

# %% [markdown]
# Divergence time falls as hbar grows along every row, so the heatmap lightens
# from right to left.

# %%
from pathlib import Path

out = Path("notebook-output")
out.mkdir(exist_ok=True)
with open(out / "heatmap.svg", "w") as fh:
    fh.write(emit_heatmap(result))
