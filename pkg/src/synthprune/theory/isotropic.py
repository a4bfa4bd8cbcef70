"""Closed forms for a fixed isotropic synthetic law ``N(+-mu_beta, sigma^2 I)``.

The synthetic mean is ``mu_beta = beta*mu + mu_perp`` with ``mu_perp``
orthogonal to ``mu``. Every bilinear form of the deterministic equivalent
reduces to scalar Sherman-Morrison identities in ``|mu|``, ``beta`` and
``|mu_perp|``, so no p-dimensional object is built here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..config import DerivedRatios, ExperimentConfig, derive
from ..errors import ConfigError, InvalidRegimeError
from .fixed_point import synthetic_weight
from .stats import TheoryStats, stats_from_moments


@dataclass(frozen=True)
class IsotropicDeltas:
    """Self-energies ``delta`` (real) and ``delta_S`` (synthetic) and the scale ``theta``."""

    delta: float
    delta_s: float
    theta: float


def isotropic_cubic(eta: float, pi: float, alpha: float, sigma: float, gamma: float,
                    convention: str = "paper") -> np.ndarray:
    """Coefficients (highest degree first) of the cubic satisfied by ``delta``.

    With ``delta_S = k*delta`` (``k = alpha*sigma^2`` or ``sigma^2``) and
    ``s = alpha*sigma^2``, ``delta = eta/theta`` expands to

        gamma k d^3 + (gamma(1+k) + pi k + s(1-pi) - eta k) d^2
            + (gamma + pi + s(1-pi) - eta(1+k)) d - eta = 0.
    """
    s = alpha * sigma**2
    k = synthetic_weight(alpha, convention) * sigma**2
    return np.array([
        gamma * k,
        gamma * (1.0 + k) + pi * k + s * (1.0 - pi) - eta * k,
        gamma + pi + s * (1.0 - pi) - eta * (1.0 + k),
        -eta,
    ])


def solve_isotropic_delta(eta: float, pi: float, alpha: float, sigma: float, gamma: float,
                          convention: str = "paper") -> IsotropicDeltas:
    """Unique nonnegative root of :func:`isotropic_cubic`, polished by Newton steps."""
    coeffs = isotropic_cubic(eta, pi, alpha, sigma, gamma, convention)
    if eta == 0:
        delta = 0.0
    else:
        # drop vanishing leading coefficients (k = 0 happens when alpha = 0)
        lead = np.flatnonzero(coeffs != 0)[0]
        roots = np.roots(coeffs[lead:])
        scale = max(1.0, float(np.max(np.abs(roots))))
        real = roots[np.abs(roots.imag) <= 1e-9 * scale].real
        cands = np.sort(real[real >= -1e-12])
        if cands.size == 0:
            raise InvalidRegimeError("isotropic cubic has no nonnegative root")
        if cands.size > 1 and np.any(np.diff(cands) > 1e-9):
            raise InvalidRegimeError(f"isotropic cubic has several nonnegative roots {cands.tolist()}")
        delta = max(float(cands[0]), 0.0)
        poly = np.polynomial.Polynomial(coeffs[::-1])
        dpoly = poly.deriv()
        for _ in range(3):
            slope = dpoly(delta)
            if slope == 0:
                break
            delta -= poly(delta) / slope
    k = synthetic_weight(alpha, convention) * sigma**2
    delta_s = k * delta
    theta = gamma + pi / (1.0 + delta) + alpha * sigma**2 * (1.0 - pi) / (1.0 + delta_s)
    return IsotropicDeltas(delta=delta, delta_s=delta_s, theta=theta)


def isotropic_stats_from_ratios(ratios: DerivedRatios, gamma: float, mu_norm: float,
                                sigma: float = 1.0, beta: float = 1.0, mu_perp_norm: float = 0.0,
                                convention: str = "paper") -> TheoryStats:
    """Isotropic-covariance test statistics from continuous ratios.

    See :func:`isotropic_stats` for the model.
    """
    if not gamma > 0:
        raise ConfigError(f"must be > 0, got {gamma}", "gamma")
    eta, pi, alpha, lam = ratios.eta, ratios.pi, ratios.alpha, ratios.lam
    sol = solve_isotropic_delta(eta, pi, alpha, sigma, gamma, convention)
    d, dS, th = sol.delta, sol.delta_s, sol.theta
    s2 = sigma**2

    M2 = mu_norm**2
    B2 = beta**2 * M2 + mu_perp_norm**2  # |mu_beta|^2
    MB = beta * M2                       # mu^T mu_beta
    kr = pi / (1.0 + d)                  # weight of mu mu^T in Qbar^{-1}
    ks = alpha * (1.0 - pi) / (1.0 + dS)  # weight of mu_beta mu_beta^T

    # R1 = (ks mu_b mu_b^T + theta I)^{-1},  R2 = (kr mu mu^T + theta I)^{-1}
    s = ks / (th + ks * B2)
    r = kr / (th + kr * M2)
    muR1mu = (M2 - s * MB**2) / th
    mubR2mub = (B2 - r * MB**2) / th
    muR1sq_mu = (M2 - 2 * s * MB**2 + s**2 * MB**2 * B2) / th**2
    mubR2sq_mub = (B2 - 2 * r * MB**2 + r**2 * MB**2 * M2) / th**2
    mubR2R1mu = (MB - r * M2 * MB - s * MB * B2 + r * s * MB**2 * MB) / th**2

    # Qbar mu = R1 mu / (1 + kr mu^T R1 mu),  Qbar mu_b = R2 mu_b / (1 + ks mu_b^T R2 mu_b)
    den_mu = 1.0 + kr * muR1mu
    den_mub = 1.0 + ks * mubR2mub
    u = muR1mu / den_mu                  # mu^T Qbar mu
    w = mubR2mub / den_mub               # mu_b^T Qbar mu_b
    v = MB / (th + kr * M2) / den_mub    # mu^T Qbar mu_b  (R2 mu = mu/(theta + kr|mu|^2))
    uu = muR1sq_mu / den_mu**2           # mu^T Qbar^2 mu
    ww = mubR2sq_mub / den_mub**2        # mu_b^T Qbar^2 mu_b
    uw = mubR2R1mu / (den_mu * den_mub)  # mu^T Qbar^2 mu_b

    tr = eta / th**2
    a1 = pi / (1.0 + d) ** 2 * tr
    a2 = a1 * s2
    b1 = alpha * (1.0 - pi) / (1.0 + dS) ** 2 * tr * s2
    b2 = b1 * s2
    h = (1.0 - b2) * (1.0 - a1) - a2 * b1
    if not h > 0:
        raise InvalidRegimeError(f"h = {h:.6g} <= 0")

    # E[Q Sigma Q] = ((1-b2)/h) Qbar Sigma Qbar + (b1/h) Qbar Sigma_beta Qbar
    def qsq(x_mu, y_mu, x_mub, y_mub, xy_sq):
        sig = x_mu * y_mu + xy_sq
        sig_b = x_mub * y_mub + s2 * xy_sq
        return ((1.0 - b2) * sig + b1 * sig_b) / h

    E_mm = qsq(u, u, v, v, uu)
    E_bb = qsq(v, v, w, w, ww)
    E_mb = qsq(u, v, v, w, uw)

    cr = kr                               # pi/(1+delta)
    cs = lam * (1.0 - pi) / (1.0 + dS)
    mean = cr * u + cs * v
    tT = eta / (h * th**2)
    real_part = pi / (1.0 + d) ** 2 * tT
    syn_part = (1.0 - pi) * s2 / (1.0 + dS) ** 2 * tT
    nu = (cr**2 * E_mm + cs**2 * E_bb + 2.0 * cr * cs * E_mb
          + real_part * (1.0 - 2.0 * cr * u - 2.0 * cs * v)
          + syn_part * (alpha - 2.0 * lam * cs * w - 2.0 * lam * cr * v))
    return stats_from_moments(mean, nu)


def isotropic_stats(cfg: ExperimentConfig, convention: str = "paper") -> TheoryStats:
    """Test statistics when the synthetic block is drawn from ``N(+-mu_beta, sigma^2 I)``.

    Uses ``sigma``, ``beta`` and ``mu_perp_norm`` from the config. The
    generator sample size ``n_hat`` plays no role: the synthetic law is
    fixed rather than estimated.
    """
    return isotropic_stats_from_ratios(derive(cfg), cfg.gamma, cfg.mu_norm,
                                       cfg.sigma, cfg.beta, cfg.mu_perp_norm, convention)
