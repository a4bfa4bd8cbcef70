"""Experiment parameterization shared by the theory and the simulator.

A configuration is a flat record of the free parameters of the
real + pruned-synthetic mixture model. The ratios that the asymptotic
formulas actually consume are computed by :func:`derive`.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any, Mapping

from .errors import ConfigError

# tolerance used whenever a noise level is compared against the critical one
EPSILON_TOL = 1e-12

_UINT64_MAX = 2**64 - 1


@dataclass(frozen=True)
class ExperimentConfig:
    """Free parameters of one experiment.

    Attributes
    ----------
    p : int
        Feature dimension.
    n : int
        Number of real training samples.
    m : int
        Number of synthetic samples (before pruning).
    n_hat : int
        Number of real samples used to fit the generator. May exceed ``n``;
        the simulator draws this set independently.
    mu_norm : float
        Norm of the class mean.
    gamma : float
        Ridge regularization, strictly positive.
    epsilon : float
        Label-flip probability of the synthetic labels.
    rho, phi : float
        Keep probabilities of the verifier for wrong and right labels.
    sigma : float
        Scale of an isotropic synthetic covariance ``sigma**2 I``.
    beta : float
        Alignment of the synthetic mean, ``mu_beta = beta*mu + mu_perp``.
    mu_perp_norm : float
        Norm of the component of the synthetic mean orthogonal to ``mu``.
    seed : int
        Master seed of all random streams.
    """

    p: int
    n: int
    m: int
    n_hat: int
    mu_norm: float
    gamma: float
    epsilon: float = 0.0
    rho: float = 0.0
    phi: float = 1.0
    sigma: float = 1.0
    beta: float = 1.0
    mu_perp_norm: float = 0.0
    seed: int = 0

    def __post_init__(self):
        validate(self)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def with_(self, **changes) -> "ExperimentConfig":
        """Copy with some fields replaced (and re-validated)."""
        return replace(self, **changes)


@dataclass(frozen=True)
class DerivedRatios:
    """Limits of the dimension ratios and pruner moments.

    ``eta_s`` is ``None`` when there is no synthetic data.
    """

    eta: float
    eta_hat: float
    pi: float
    eta_s: float | None
    alpha: float
    lam: float

    @classmethod
    def from_values(cls, eta: float, eta_hat: float, pi: float, epsilon: float,
                    rho: float, phi: float, eta_s: float | None = None) -> "DerivedRatios":
        """Build ratios directly from continuous values (no integer counts)."""
        alpha, lam = pruner_moments(epsilon, rho, phi)
        return cls(eta=float(eta), eta_hat=float(eta_hat), pi=float(pi),
                   eta_s=eta_s, alpha=alpha, lam=lam)


FIELD_NAMES = tuple(f.name for f in fields(ExperimentConfig))
REQUIRED_FIELDS = ("p", "n", "m", "n_hat", "mu_norm", "gamma")
_INT_FIELDS = {"p", "n", "m", "n_hat", "seed"}


def _check_int(name: str, value, minimum: int) -> None:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"must be an integer, got {value!r}", name)
    if value < minimum:
        raise ConfigError(f"must be >= {minimum}, got {value}", name)


def _check_real(name: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"must be a real number, got {value!r}", name)
    if not math.isfinite(value):
        raise ConfigError(f"must be finite, got {value!r}", name)
    return float(value)


def validate(cfg: ExperimentConfig) -> None:
    """Raise :class:`ConfigError` naming the first invalid field."""
    _check_int("p", cfg.p, 1)
    _check_int("n", cfg.n, 0)
    _check_int("m", cfg.m, 0)
    _check_int("n_hat", cfg.n_hat, 1)
    _check_int("seed", cfg.seed, 0)
    if cfg.seed > _UINT64_MAX:
        raise ConfigError("must fit in 64 bits", "seed")
    if cfg.n + cfg.m < 1:
        raise ConfigError("n + m must be at least 1", "m")

    if _check_real("mu_norm", cfg.mu_norm) <= 0:
        raise ConfigError("must be > 0", "mu_norm")
    if _check_real("gamma", cfg.gamma) <= 0:
        raise ConfigError(f"must be > 0, got {cfg.gamma}", "gamma")
    for name in ("epsilon", "rho", "phi"):
        v = _check_real(name, getattr(cfg, name))
        if not 0.0 <= v <= 1.0:
            raise ConfigError(f"must lie in [0, 1], got {v}", name)
    if _check_real("sigma", cfg.sigma) <= 0:
        raise ConfigError("must be > 0", "sigma")
    _check_real("beta", cfg.beta)
    if _check_real("mu_perp_norm", cfg.mu_perp_norm) < 0:
        raise ConfigError("must be >= 0", "mu_perp_norm")


def pruner_moments(epsilon: float, rho: float, phi: float) -> tuple[float, float]:
    """Return ``(alpha, lam)``: probability of keeping a sample and mean of ``q * y_noisy * y_true``."""
    kept_right = phi * (1.0 - epsilon)
    kept_wrong = rho * epsilon
    return kept_right + kept_wrong, kept_right - kept_wrong


def derive(cfg: ExperimentConfig) -> DerivedRatios:
    """Compute the dimension ratios and pruner moments of a configuration."""
    validate(cfg)
    total = cfg.n + cfg.m
    alpha, lam = pruner_moments(cfg.epsilon, cfg.rho, cfg.phi)
    return DerivedRatios(
        eta=cfg.p / total,
        eta_hat=cfg.p / cfg.n_hat,
        pi=cfg.n / total,
        eta_s=cfg.p / cfg.m if cfg.m > 0 else None,
        alpha=alpha,
        lam=lam,
    )


def config_from_mapping(values: Mapping[str, Any]) -> ExperimentConfig:
    """Build a config from a flat mapping, rejecting unknown keys."""
    unknown = sorted(set(values) - set(FIELD_NAMES))
    if unknown:
        raise ConfigError(f"unknown key {unknown[0]!r}", unknown[0])
    missing = [k for k in REQUIRED_FIELDS if k not in values]
    if missing:
        raise ConfigError("required key is missing", missing[0])
    clean = {}
    for key, value in values.items():
        # JSON has no int/float distinction for whole numbers like 1.0
        if key in _INT_FIELDS and isinstance(value, float) and value.is_integer():
            value = int(value)
        clean[key] = value
    return ExperimentConfig(**clean)


def load_config(path: str | Path) -> ExperimentConfig:
    """Read a config from a flat JSON object.

    Raises
    ------
    ConfigError
        If the file does not parse, is not a flat object, has unknown keys
        or fails validation. The message names the field when there is one.
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    for key, value in raw.items():
        if isinstance(value, (dict, list)):
            raise ConfigError("nested values are not allowed", key)
    return config_from_mapping(raw)


def save_config(cfg: ExperimentConfig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
