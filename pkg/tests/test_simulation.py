import math

import numpy as np
import pytest

from qccsim.config import ConfigError, SimConfig
from qccsim.potentials import make_potential
from qccsim.simulation import SimulationError, member_seed, run_ensemble, run_single

FAST = SimConfig(hbar=1e-3, dt_meas=0.05, t_max=1.0, ensemble_size=4, base_seed=3)


def points(run):
    return np.array([(q.x, q.p) for q in run.quantum])


def test_times_are_exact_multiples():
    run = run_single(FAST.replace(stop_at_threshold=False))
    assert run.times == [k * 0.05 for k in range(1, 21)]
    assert [c.t for c in run.classical] == run.times


def test_single_run_stops_at_first_crossing():
    run = run_single(FAST.replace(hbar=0.1, t_max=5.0))
    assert run.divergence_time == run.times[-1]
    assert run.rms_series.values[-1] > FAST.divergence_threshold
    assert all(v <= FAST.divergence_threshold for v in run.rms_series.values[:-1])


def test_without_measurement_the_centroid_tracks_the_classical_orbit():
    cfg = FAST.replace(measure=False, t_max=3.0, stop_at_threshold=False, omega=math.sqrt(5))
    run = run_single(cfg)
    assert max(run.rms_series.values) < 1e-4


def test_replay_is_bit_identical_and_seeds_matter():
    a = run_single(FAST, seed=member_seed(11, 0))
    b = run_single(FAST, seed=member_seed(11, 0))
    c = run_single(FAST, seed=member_seed(11, 1))
    assert points(a).tobytes() == points(b).tobytes()
    assert points(a).tobytes() != points(c).tobytes()


def test_ensemble_members_match_standalone_runs():
    cfg = FAST.replace(divergence_mode="per_run", stop_at_threshold=False)
    ens = run_ensemble(cfg)
    for i, run in enumerate(ens.runs):
        solo = run_single(cfg, seed=member_seed(cfg.base_seed, i))
        assert points(run).tobytes() == points(solo).tobytes()
    # lock-step mode consumes the same per-member streams
    locked = run_ensemble(cfg.replace(divergence_mode="ensemble"))
    assert points(locked.runs[2]).tobytes() == points(ens.runs[2]).tobytes()


def test_pooled_series_is_rms_over_members():
    ens = run_ensemble(FAST.replace(stop_at_threshold=False))
    k = 7
    cl = ens.runs[0].classical[k]
    sq = [(r.quantum[k].x - cl.x) ** 2 + (r.quantum[k].p - cl.p) ** 2 for r in ens.runs]
    assert ens.series.values[k] == pytest.approx(math.sqrt(np.mean(sq)), rel=1e-12)


def test_censored_runs_count_as_t_max():
    cfg = FAST.replace(hbar=1e-7, divergence_mode="per_run", t_max=0.5, ensemble_size=2)
    ens = run_ensemble(cfg)
    assert ens.n_censored == 2 and ens.censored
    assert ens.mean_divergence_time == 0.5
    pooled = run_ensemble(cfg.replace(divergence_mode="ensemble"))
    assert pooled.mean_divergence_time == 0.5 and pooled.n_censored == 1


def test_per_run_mean_averages_member_times():
    cfg = FAST.replace(hbar=0.05, divergence_mode="per_run", t_max=5.0)
    ens = run_ensemble(cfg)
    times = [r.divergence_time if r.divergence_time is not None else cfg.t_max for r in ens.runs]
    assert ens.mean_divergence_time == pytest.approx(np.mean(times))


def test_turning_point_start_on_a_double_well():
    cfg = SimConfig(hbar=1e-4, dt_meas=0.3, t_max=3.0, x0=1.4, p0=0.0,
                    potential=make_potential("double_well"), stop_at_threshold=False,
                    ensemble_size=1)
    run = run_single(cfg)
    assert len(run.times) == 10


def test_invalid_config_is_rejected_before_running():
    with pytest.raises(ConfigError):
        run_single(FAST.replace(dt_meas=-1.0))


def test_runtime_failure_is_wrapped_with_time():
    cfg = FAST.replace(momentum_prefactor=1.0, uncertainty_prefactor=1.0, hbar=0.05,
                       points_per_sigma=0.0, grid_points=64)
    with pytest.raises(SimulationError) as err:
        run_single(cfg)
    assert err.value.t >= 0
    assert "t=" in str(err.value)
