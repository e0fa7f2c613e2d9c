import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qccsim.config import coherent_widths
from qccsim.grid import Grid, PhasePoint, expectation_p, expectation_x, make_coherent_state
from qccsim.potentials import make_potential
from qccsim.propagator import evolve_burst, make_plan, step, substeps

HBAR = 1e-3


def packet(x=0.0, p=1.0, half=1.0, n=2048, hbar=HBAR, omega=1.0):
    w = coherent_widths(hbar, 1.0, omega)
    return make_coherent_state(PhasePoint(x, p), w, hbar, 1.0, omega, Grid.centered(x, half, n))


@given(duration=st.floats(1e-3, 5.0), dt_max=st.floats(1e-3, 0.1))
def test_substeps_cover_duration_exactly(duration, dt_max):
    count, dt, last = substeps(duration, dt_max)
    assert dt == dt_max
    assert 0 < last <= dt_max * (1 + 1e-9)
    assert math.isclose((count - 1) * dt + last, duration, rel_tol=1e-12)


def test_substeps_rejects_nonpositive():
    with pytest.raises(ValueError):
        substeps(0.0, 0.01)


def test_regauge_does_not_change_the_state():
    pot = make_potential("double_well", a=1.0, b=1.0)
    psi = packet(x=0.8, p=0.5, half=2.0)
    a = evolve_burst(psi, pot, 1.0, 0.5, 0.005, regauge=True)
    b = evolve_burst(psi, pot, 1.0, 0.5, 0.005, regauge=False)
    np.testing.assert_allclose(a.psi, b.psi, atol=1e-9)
    assert a.k0 != b.k0


@pytest.mark.parametrize("kind", ["harmonic", "quartic", "gaussian_well", "double_well"])
def test_norm_is_conserved(kind):
    pot = make_potential(kind)
    psi = evolve_burst(packet(p=0.3, half=2.0), pot, 1.0, 1.0, 0.005)
    assert abs(psi.norm2() - 1) < 1e-12


def test_free_flight_moves_the_centroid_ballistically():
    psi = packet(p=0.7, half=1.0)
    out = evolve_burst(psi, make_potential("free"), 1.0, 0.5, 0.05)
    assert math.isclose(expectation_x(out), 0.35, abs_tol=1e-10)
    assert math.isclose(expectation_p(out), 0.7, abs_tol=1e-10)


def test_linear_potential_matches_uniform_acceleration():
    g = 0.8
    psi = packet(p=0.5, half=1.0)
    out = evolve_burst(psi, make_potential("linear", g=g), 1.0, 0.5, 0.01)
    assert math.isclose(expectation_x(out), 0.5 * 0.5 - 0.5 * g * 0.25, abs_tol=1e-8)
    assert math.isclose(expectation_p(out), 0.5 - g * 0.5, abs_tol=1e-8)


def test_step_rejects_mismatched_plan():
    psi = packet()
    plan = make_plan(Grid.centered(0.0, 1.0, 1024), make_potential("free"), HBAR, 1.0, 0.01)
    with pytest.raises(ValueError):
        step(psi, plan)
    plan = make_plan(psi.grid, make_potential("free"), 2 * HBAR, 1.0, 0.01)
    with pytest.raises(ValueError):
        step(psi, plan)


def test_small_hbar_carrier_stays_resolved():
    # at hbar = 3e-6 the wavelength is ~2e-5; the envelope grid only resolves sigma_x
    hbar = 3e-6
    w = coherent_widths(hbar, 1.0, 1.0)
    grid = Grid.centered(0.0, 40 * w.sigma_x, 1024)
    psi = make_coherent_state(PhasePoint(0.0, 1.0), w, hbar, 1.0, 1.0, grid)
    assert grid.dx > 2 * math.pi * hbar
    out = evolve_burst(psi, make_potential("harmonic", k=5.0), 1.0, 0.01, 0.005)
    x_c = math.sin(math.sqrt(5) * 0.01) / math.sqrt(5)
    assert math.isclose(expectation_x(out), x_c, abs_tol=1e-6)
