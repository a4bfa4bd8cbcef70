"""Test statistics for an arbitrary deterministic synthetic covariance.

The synthetic block is ``N(+-mu_beta, C)`` with ``C = P diag(d) P^T``. The
deterministic equivalent ``Qbar`` is built as an explicit p x p matrix.
"""

from __future__ import annotations

import numpy as np

from ..config import DerivedRatios
from ..errors import ConfigError, InvalidRegimeError
from .fixed_point import DEFAULT_MAX_ITER, DEFAULT_TOL, damped_picard, synthetic_weight
from .stats import TheoryStats, stats_from_moments


def solve_general_deltas(d: np.ndarray, ratios: DerivedRatios, gamma: float,
                         tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                         convention: str = "paper") -> tuple[float, float]:
    """Solve the eigen-sum fixed point for ``(delta, delta_S)``.

    With ``t_i = gamma + pi/(1+delta) + alpha(1-pi) d_i/(1+delta_S)``::

        delta   = (1/N) sum_i 1/t_i
        delta_S = k (1/N) sum_i d_i/t_i

    where ``1/N = eta/p`` and ``k`` is ``alpha`` or 1 depending on ``convention``.
    """
    eta, pi, alpha = ratios.eta, ratios.pi, ratios.alpha
    k = synthetic_weight(alpha, convention)
    scale = eta / d.size
    syn = alpha * (1.0 - pi)

    def sweep(x):
        delta, delta_s = x
        t = gamma + pi / (1.0 + delta) + syn * d / (1.0 + delta_s)
        return [scale * float(np.sum(1.0 / t)), k * scale * float(np.sum(d / t))]

    (delta, delta_s), _, _ = damped_picard(sweep, (0.0, 0.0), tol, max_iter)
    return delta, delta_s


def general_covariance_stats(cov_eigenvalues, mu, mu_beta, cov_basis, ratios: DerivedRatios,
                             gamma: float, convention: str = "paper") -> TheoryStats:
    """Decision-function statistics for a synthetic covariance ``P diag(d) P^T``.

    Parameters
    ----------
    cov_eigenvalues : array_like, shape (p,)
        Eigenvalues ``d >= 0`` of the synthetic covariance (a singular one is fine).
    mu, mu_beta : array_like, shape (p,)
        Real and synthetic class means.
    cov_basis : array_like, shape (p, p)
        Orthogonal matrix ``P`` whose columns are the eigenvectors.
    ratios : DerivedRatios
        Only ``eta``, ``pi``, ``alpha`` and ``lam`` are used.
    gamma : float
        Ridge regularization.
    convention : {"paper", "corrected"}
        Normalization of the synthetic self-energy.

    Returns
    -------
    TheoryStats
    """
    d = np.asarray(cov_eigenvalues, dtype=float)
    mu = np.asarray(mu, dtype=float)
    mub = np.asarray(mu_beta, dtype=float)
    P = np.asarray(cov_basis, dtype=float)
    p = d.size
    if d.ndim != 1 or mu.shape != (p,) or mub.shape != (p,) or P.shape != (p, p):
        raise ConfigError(f"inconsistent shapes: d {d.shape}, mu {mu.shape}, "
                          f"mu_beta {mub.shape}, basis {P.shape}", "cov_eigenvalues")
    if np.any(d < 0) or not np.all(np.isfinite(d)):
        raise ConfigError("eigenvalues must be finite and >= 0", "cov_eigenvalues")
    if not gamma > 0:
        raise ConfigError(f"must be > 0, got {gamma}", "gamma")

    eta, pi, alpha, lam = ratios.eta, ratios.pi, ratios.alpha, ratios.lam
    delta, delta_s = solve_general_deltas(d, ratios, gamma, convention=convention)
    kr = pi / (1.0 + delta)
    ks = alpha * (1.0 - pi) / (1.0 + delta_s)

    # A = kr I + ks C + gamma I is diagonal in the eigenbasis; add the two
    # rank-one mean terms with Woodbury (U = [mu, mu_beta], weights kr, ks).
    t = gamma + kr + ks * d
    A_inv = (P / t) @ P.T
    U = np.column_stack([mu, mub])
    W = np.diag([kr, ks])
    AiU = A_inv @ U
    core = np.eye(2) + W @ (U.T @ AiU)
    Qbar = A_inv - AiU @ np.linalg.solve(core, W @ AiU.T)
    Qbar = 0.5 * (Qbar + Qbar.T)

    # trace constants in the eigenbasis (rank-one corrections are O(1/N))
    scale = eta / p
    inv_t2 = 1.0 / t**2
    tr_1 = scale * np.sum(inv_t2)
    tr_d = scale * np.sum(d * inv_t2)
    tr_dd = scale * np.sum(d * d * inv_t2)
    a1 = pi / (1.0 + delta) ** 2 * tr_1
    a2 = pi / (1.0 + delta) ** 2 * tr_d
    b1 = alpha * (1.0 - pi) / (1.0 + delta_s) ** 2 * tr_d
    b2 = alpha * (1.0 - pi) / (1.0 + delta_s) ** 2 * tr_dd
    h = (1.0 - b2) * (1.0 - a1) - a2 * b1
    if not h > 0:
        raise InvalidRegimeError(f"h = {h:.6g} <= 0")

    C = (P * d) @ P.T
    Sigma = np.outer(mu, mu) + np.eye(p)
    Sigma_b = np.outer(mub, mub) + C
    EQSQ = ((1.0 - b2) * Qbar @ Sigma @ Qbar + b1 * Qbar @ Sigma_b @ Qbar) / h

    cs = lam * (1.0 - pi) / (1.0 + delta_s)
    Qmu = Qbar @ mu
    u = mu @ Qmu
    v = mub @ Qmu
    w = mub @ Qbar @ mub
    mean = kr * u + cs * v

    # (pi/(1+delta)^2) T1 and ((1-pi)/(1+delta_S)^2) T2
    real_part = (a1 * (1.0 - b2) + a2 * b1) / h
    syn_part = b1 / (alpha * h) if alpha > 0 else 0.0
    nu = (kr**2 * (mu @ EQSQ @ mu) + cs**2 * (mub @ EQSQ @ mub) + 2.0 * kr * cs * (mu @ EQSQ @ mub)
          + real_part * (1.0 - 2.0 * kr * u - 2.0 * cs * v)
          + syn_part * (alpha - 2.0 * lam * cs * w - 2.0 * lam * kr * v))
    return stats_from_moments(float(mean), float(nu))
