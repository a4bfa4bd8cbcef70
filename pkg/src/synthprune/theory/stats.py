"""Closed-form mean, variance and accuracy of the ridge decision function."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..config import ExperimentConfig, derive
from ..errors import ConfigError, InvalidRegimeError
from .fixed_point import DEFAULT_MAX_ITER, DEFAULT_TOL, positive_quadratic_root, solve_deltas, synthetic_weight
from .ledger import ScalarLedger, build_ledger


@dataclass(frozen=True)
class TheoryStats:
    """Asymptotic law of ``y * w^T x`` for a fresh real test point.

    Attributes
    ----------
    mean : float
        Mean of the decision function on class +1.
    second_moment : float
        Its second moment.
    variance : float
        ``second_moment - mean**2``.
    accuracy : float
        ``Phi(mean / sqrt(variance))``.
    """

    mean: float
    second_moment: float
    variance: float
    accuracy: float

    def to_dict(self) -> dict[str, float]:
        return {"mean": self.mean, "second_moment": self.second_moment,
                "variance": self.variance, "accuracy": self.accuracy}


def normal_cdf(x: float) -> float:
    """Standard normal CDF through ``erfc`` (accurate in both tails)."""
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def stats_from_moments(mean: float, second_moment: float) -> TheoryStats:
    """Package a (mean, second moment) pair, rejecting nonpositive variance."""
    mean, second_moment = float(mean), float(second_moment)
    variance = second_moment - mean * mean
    if not (math.isfinite(variance) and variance > 0):
        raise InvalidRegimeError(f"decision-function variance {variance:.6g} is not positive")
    accuracy = 0.5 if mean == 0 else normal_cdf(mean / math.sqrt(variance))
    return TheoryStats(mean=mean, second_moment=second_moment, variance=variance, accuracy=accuracy)


def theorem1_stats(ledger: ScalarLedger, mu_norm_sq: float) -> TheoryStats:
    """Mean and second moment of the decision function from the scalar ledger.

    With ``D = b + a|mu|^2``::

        mean = c |mu|^2 / D
        nu   = c|mu|^2/(h1 D^2) * (c(1+b1-b2)|mu|^2 + c/h2 - 2(a1 + lam*b1/alpha) D)
               + (a1 + b1)/h1
    """
    if not mu_norm_sq > 0:
        raise ConfigError("must be > 0", "mu_norm")
    L = ledger
    if L.alpha == 0:
        if L.b1 != 0:
            raise InvalidRegimeError("ledger has alpha = 0 but b1 != 0")
        lam_b1_over_alpha = 0.0
    else:
        lam_b1_over_alpha = L.lam * L.b1 / L.alpha

    D = L.b + L.a * mu_norm_sq
    mean = L.c * mu_norm_sq / D
    inner = L.c * (1.0 + L.b1 - L.b2) * mu_norm_sq + L.c / L.h2 - 2.0 * (L.a1 + lam_b1_over_alpha) * D
    nu = L.c * mu_norm_sq / (L.h1 * D * D) * inner + (L.a1 + L.b1) / L.h1
    return stats_from_moments(mean, nu)


def mixture_stats(cfg: ExperimentConfig, convention: str = "paper",
                  tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> TheoryStats:
    """Theory for a config: fixed point, ledger, then :func:`theorem1_stats`."""
    r = derive(cfg)
    d = solve_deltas(r.eta, r.eta_hat, r.pi, r.alpha, cfg.gamma, tol, max_iter, convention)
    return theorem1_stats(build_ledger(d, r, cfg.gamma), cfg.mu_norm**2)


def synthetic_only_delta(eta_s: float, alpha: float, gamma: float, convention: str = "paper") -> float:
    """Closed-form self-energy when training on (identity-covariance) synthetic data only."""
    k = synthetic_weight(alpha, convention)
    # gamma d^2 + (alpha + gamma - k eta_s) d - k eta_s = 0
    return positive_quadratic_root(gamma, alpha + gamma - k * eta_s, k * eta_s)


def corollary_synthetic_stats(eta_s: float, alpha: float, lam: float, gamma: float,
                              mu_norm_sq: float, convention: str = "paper") -> TheoryStats:
    """Test statistics of a classifier trained only on pruned synthetic data.

    The generator is exact (identity covariance, true mean), so only the
    label noise and the pruner moments ``alpha`` and ``lam`` matter.

    Parameters
    ----------
    eta_s : float
        ``p/m``.
    alpha, lam : float
        Pruner moments, ``0 < alpha <= 1`` and ``|lam| <= alpha``.
    gamma : float
        Ridge regularization.
    mu_norm_sq : float
        ``|mu|^2``.
    convention : {"paper", "corrected"}
        Normalization of the synthetic self-energy.
    """
    if not eta_s >= 0:
        raise ConfigError("must be >= 0", "eta_s")
    if not 0 < alpha <= 1:
        raise ConfigError(f"must lie in (0, 1], got {alpha}", "alpha")
    if not gamma > 0:
        raise ConfigError(f"must be > 0, got {gamma}", "gamma")
    if not mu_norm_sq > 0:
        raise ConfigError("must be > 0", "mu_norm")

    ds = synthetic_only_delta(eta_s, alpha, gamma, convention)
    g = alpha + gamma * (1.0 + ds)
    D = alpha * mu_norm_sq + g
    h = 1.0 - alpha * eta_s / g**2
    if not h > 0:
        raise InvalidRegimeError(f"h = {h:.6g} <= 0")
    mean = lam * mu_norm_sq / D
    nu = (lam**2 * mu_norm_sq / (h * D) * ((mu_norm_sq + 1.0) / D - 2.0 * (1.0 - h) / alpha)
          + (1.0 - h) / h)
    return stats_from_moments(mean, nu)


def critical_epsilon(rho: float, phi: float) -> float:
    """Label-noise level at which the pruned labels stop carrying signal: ``phi/(phi+rho)``."""
    if not 0 < phi <= 1:
        raise ConfigError(f"must lie in (0, 1], got {phi}", "phi")
    if not 0 <= rho <= 1:
        raise ConfigError(f"must lie in [0, 1], got {rho}", "rho")
    return phi / (phi + rho)
