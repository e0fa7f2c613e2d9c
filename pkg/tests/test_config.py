import dataclasses
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qccsim.config import (
    ConfigError,
    SimConfig,
    ValidatedConfig,
    coherent_widths,
    dump_config,
    from_mapping,
    load_config,
    parse_config_text,
    validate,
)
from qccsim.potentials import make_potential


def test_defaults_validate():
    cfg = validate(SimConfig())
    assert isinstance(cfg, ValidatedConfig)
    assert validate(cfg) is cfg


@given(hbar=st.floats(1e-8, 1.0), m=st.floats(0.1, 10.0), omega=st.floats(0.1, 10.0))
def test_coherent_widths_saturate_uncertainty(hbar, m, omega):
    w = coherent_widths(hbar, m, omega)
    assert math.isclose(w.sigma_x * w.sigma_p, hbar / 2, rel_tol=1e-12)
    assert math.isclose(w.sigma_x, math.sqrt(hbar / (2 * m * omega)), rel_tol=1e-12)


def test_validation_collects_every_problem():
    bad = SimConfig(hbar=-1.0, dt_meas=0.0, grid_points=1000, ensemble_size=0,
                    divergence_mode="sometimes")
    with pytest.raises(ConfigError) as err:
        validate(bad)
    problems = err.value.problems
    assert "hbar must be positive" in problems
    assert "dt_meas must be positive" in problems
    assert "grid_points must be power of two and at least 64" in problems
    assert any("ensemble_size" in p for p in problems)
    assert any("divergence_mode" in p for p in problems)


@pytest.mark.parametrize("field,value", [("t_max", math.inf), ("x0", math.nan),
                                         ("grid_points", 32), ("husimi_resolution", 1),
                                         ("momentum_prefactor", 0.5)])
def test_single_bad_field_rejected(field, value):
    with pytest.raises(ConfigError):
        validate(SimConfig().replace(**{field: value}))


def test_parse_text_with_comments():
    text = """
    # a comment
    hbar = 1e-4   # trailing
    dt_meas=0.041
    potential = quartic
    lambda = 2.5
    jitter = off
    """
    cfg = from_mapping(parse_config_text(text))
    assert cfg.hbar == 1e-4
    assert cfg.dt_meas == 0.041
    assert cfg.potential == make_potential("quartic", lam=2.5)
    assert cfg.jitter is False


def test_unknown_key_and_bad_value():
    with pytest.raises(ConfigError, match="unknown config key"):
        from_mapping({"hbarr": "1"})
    with pytest.raises(ConfigError):
        from_mapping({"ensemble_size": "ten"})
    with pytest.raises(ConfigError):
        parse_config_text("hbar 1e-3")


def test_potential_parameters_merge_into_base():
    base = SimConfig(potential=make_potential("harmonic", k=3.0))
    cfg = from_mapping({"k": "7"}, base)
    assert cfg.potential.kind == "harmonic" and cfg.potential.k == 7.0


configs = st.builds(
    SimConfig,
    hbar=st.floats(1e-7, 1.0),
    dt_meas=st.floats(1e-3, 1.0),
    x0=st.floats(-5, 5),
    p0=st.floats(-5, 5),
    ensemble_size=st.integers(1, 100),
    base_seed=st.integers(0, 2**32 - 1),
    jitter=st.booleans(),
    divergence_mode=st.sampled_from(["ensemble", "per_run"]),
    potential=st.sampled_from([make_potential("harmonic", k=0.1 + 1 / 3),
                               make_potential("double_well", a=0.7, b=1.3)]),
)


@given(cfg=configs)
@settings(max_examples=50)
def test_dump_load_round_trip_is_exact(tmp_path_factory, cfg):
    path = tmp_path_factory.mktemp("cfg") / "run.cfg"
    path.write_text(dump_config(cfg))
    back = load_config(path)
    assert dataclasses.asdict(back) == dataclasses.asdict(cfg)
