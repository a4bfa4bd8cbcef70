"""Marchenko-Pastur law of a white sample covariance with aspect ratio ``p/n_hat``."""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate

from ..errors import ConfigError


def _check_ratio(ratio: float) -> None:
    if not (math.isfinite(ratio) and ratio > 0):
        raise ConfigError(f"must be > 0, got {ratio}", "ratio")


def marchenko_pastur_support(ratio: float) -> tuple[float, float]:
    """Edges ``((1 - sqrt(r))^2, (1 + sqrt(r))^2)`` of the continuous part."""
    _check_ratio(ratio)
    s = math.sqrt(ratio)
    return (1.0 - s) ** 2, (1.0 + s) ** 2


def marchenko_pastur_point_mass(ratio: float) -> float:
    """Weight of the atom at 0, ``max(0, 1 - 1/r)``."""
    _check_ratio(ratio)
    return max(0.0, 1.0 - 1.0 / ratio)


def marchenko_pastur_density(x, ratio: float):
    """Density of the continuous part (total mass ``min(1, 1/r)``).

    Accepts scalars or arrays; returns the same shape.
    """
    lo, hi = marchenko_pastur_support(ratio)
    xa = np.asarray(x, dtype=float)
    inside = (xa > lo) & (xa < hi) & (xa > 0)
    xs = np.where(inside, xa, 1.0)
    dens = np.sqrt(np.clip((hi - xs) * (xs - lo), 0.0, None)) / (2.0 * math.pi * ratio * xs)
    out = np.where(inside, dens, 0.0)
    return float(out) if np.ndim(x) == 0 else out


def marchenko_pastur_cdf(x, ratio: float):
    """CDF including the atom at 0, by adaptive quadrature of the density."""
    lo, hi = marchenko_pastur_support(ratio)
    atom = marchenko_pastur_point_mass(ratio)

    def one(t: float) -> float:
        if t < 0:
            return 0.0
        if t <= lo:
            return atom
        if t >= hi:
            return 1.0
        # the sqrt edge and (at r = 1) the 1/sqrt(x) blow-up are integrable;
        # a weighted rule copes better than plain quad near both
        val, _ = integrate.quad(marchenko_pastur_density, lo, t, args=(ratio,), limit=200,
                                epsabs=1e-12, epsrel=1e-10)
        return min(1.0, atom + val)

    if np.ndim(x) == 0:
        return one(float(x))
    return np.array([one(float(t)) for t in np.ravel(x)]).reshape(np.shape(x))


def kolmogorov_distance(eigenvalues, ratio: float) -> float:
    """Sup distance between the empirical spectral CDF and the MP CDF."""
    ev = np.sort(np.asarray(eigenvalues, dtype=float))
    k = ev.size
    F = marchenko_pastur_cdf(ev, ratio)
    upper = np.arange(1, k + 1) / k
    lower = np.arange(0, k) / k
    return float(max(np.max(np.abs(upper - F)), np.max(np.abs(F - lower))))
