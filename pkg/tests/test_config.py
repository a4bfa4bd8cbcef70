import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from synthprune.config import (
    ExperimentConfig,
    config_from_mapping,
    derive,
    load_config,
    pruner_moments,
    save_config,
)
from synthprune.errors import ConfigError

REQUIRED = dict(p=10, n=5, m=5, n_hat=5, mu_norm=1.0, gamma=1.0)


def test_derive_oracle_pruner_ratios():
    cfg = ExperimentConfig(p=500, n=1000, m=1000, n_hat=1000, mu_norm=1.0, gamma=1.0,
                           epsilon=0.0, rho=0.0, phi=1.0)
    r = derive(cfg)
    assert (r.eta, r.eta_hat, r.pi, r.alpha, r.lam) == (0.25, 0.5, 0.5, 1.0, 1.0)
    assert r.eta_s == 0.5


def test_symmetric_noise_cancels():
    assert pruner_moments(0.5, 0.5, 0.5) == (0.5, 0.0)


def test_lambda_vanishes_at_critical_noise():
    _, lam = pruner_moments(8 / 11, 0.3, 0.8)
    assert abs(lam) < 1e-15


def test_eta_s_absent_without_synthetic_data():
    r = derive(ExperimentConfig(**{**REQUIRED, "m": 0}))
    assert r.eta_s is None
    assert r.pi == 1.0


@pytest.mark.parametrize("field, value", [
    ("gamma", 0.0), ("gamma", -1.0), ("p", 0), ("n_hat", 0), ("epsilon", 1.5),
    ("rho", -0.1), ("phi", 2.0), ("mu_norm", 0.0), ("sigma", 0.0), ("mu_perp_norm", -1.0),
    ("seed", -1), ("seed", 2**64),
])
def test_invalid_fields_are_named(field, value):
    with pytest.raises(ConfigError) as exc:
        ExperimentConfig(**{**REQUIRED, field: value})
    assert exc.value.field == field
    assert field in str(exc.value)


def test_empty_training_set_rejected():
    with pytest.raises(ConfigError):
        ExperimentConfig(**{**REQUIRED, "n": 0, "m": 0})


def test_n_hat_may_exceed_n():
    ExperimentConfig(**{**REQUIRED, "n": 1, "n_hat": 10_000})


def test_minimal_file_gets_defaults(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps(REQUIRED))
    cfg = load_config(path)
    assert (cfg.sigma, cfg.beta, cfg.mu_perp_norm, cfg.seed) == (1.0, 1.0, 0.0, 0)


def test_file_with_zero_gamma_names_gamma(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({**REQUIRED, "gamma": 0}))
    with pytest.raises(ConfigError, match="gamma"):
        load_config(path)


def test_unknown_key_is_named(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({**REQUIRED, "epsilonn": 0.1}))
    with pytest.raises(ConfigError, match="epsilonn"):
        load_config(path)


def test_missing_required_key():
    values = dict(REQUIRED)
    del values["gamma"]
    with pytest.raises(ConfigError, match="gamma"):
        config_from_mapping(values)


def test_bad_json_and_nested_values(tmp_path):
    path = tmp_path / "c.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(path)
    path.write_text(json.dumps({**REQUIRED, "p": [1, 2]}))
    with pytest.raises(ConfigError):
        load_config(path)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")


def test_save_load_round_trip(tmp_path):
    cfg = ExperimentConfig(**REQUIRED, epsilon=0.3, rho=0.1, seed=99)
    path = tmp_path / "c.json"
    save_config(cfg, path)
    assert load_config(path) == cfg


def test_with_revalidates():
    cfg = ExperimentConfig(**REQUIRED)
    assert cfg.with_(m=7).m == 7
    with pytest.raises(ConfigError):
        cfg.with_(gamma=0.0)


unit = st.floats(0.0, 1.0, allow_nan=False)


@settings(max_examples=300, deadline=None)
@given(unit, unit, unit)
def test_pruner_moment_identities(eps, rho, phi):
    alpha, lam = pruner_moments(eps, rho, phi)
    assert abs((alpha - lam) - 2 * rho * eps) <= 1e-15
    assert abs((alpha + lam) - 2 * phi * (1 - eps)) <= 1e-15
    assert alpha >= abs(lam) - 1e-15
    assert 0.0 <= alpha <= 1.0 + 1e-15


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 10_000), st.integers(0, 10_000), st.integers(0, 10_000),
       st.integers(1, 10_000), unit, unit, unit)
def test_derive_is_pure_and_consistent(p, n, m, n_hat, eps, rho, phi):
    if n + m == 0:
        n = 1
    cfg = ExperimentConfig(p=p, n=n, m=m, n_hat=n_hat, mu_norm=1.0, gamma=1.0,
                           epsilon=eps, rho=rho, phi=phi)
    r1, r2 = derive(cfg), derive(cfg)
    assert r1 == r2
    assert math.isclose(r1.pi * (n + m), n, rel_tol=1e-14, abs_tol=1e-12)
    assert math.isclose(r1.eta, p / (n + m))
