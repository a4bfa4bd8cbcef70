"""Scalar ledger: the constants that enter the closed-form test statistics."""

from __future__ import annotations

from dataclasses import dataclass

from ..config import DerivedRatios
from ..errors import ConfigError, InvalidRegimeError
from .fixed_point import Deltas


@dataclass(frozen=True)
class ScalarLedger:
    """Constants built from a converged :class:`Deltas`.

    ``lam`` stands for the pruner moment lambda.
    """

    alpha: float
    lam: float
    a: float
    b: float
    c: float
    a1: float
    b1: float
    b2: float
    h1: float
    h2: float


def build_ledger(deltas: Deltas, ratios: DerivedRatios, gamma: float) -> ScalarLedger:
    """Evaluate the ledger in dependency order: (a, b, c), h2, (a1, b1, b2), h1.

    Raises
    ------
    InvalidRegimeError
        If ``h2 <= 0`` or ``h1 <= 0``.
    """
    if not gamma > 0:
        raise ConfigError(f"must be > 0, got {gamma}", "gamma")
    pi, alpha, lam = ratios.pi, ratios.alpha, ratios.lam
    eta, eta_hat = ratios.eta, ratios.eta_hat
    dr, ds, dg = deltas.delta_r, deltas.delta_s, deltas.delta_g

    real_w = pi / (1.0 + dr)
    syn_w = alpha * (1.0 - pi) / (1.0 + ds)
    a = real_w + syn_w
    b = gamma + real_w + syn_w / (1.0 + dg)
    c = real_w + lam * (1.0 - pi) / (1.0 + ds)

    h2 = 1.0 - (syn_w / (1.0 + dg)) ** 2 * eta_hat / b**2
    if not h2 > 0:
        raise InvalidRegimeError(f"h2 = {h2:.6g} <= 0: generator covariance too noisy for the theory")

    scale = eta / (h2 * b**2)
    a1 = pi * scale / (1.0 + dr) ** 2
    syn_scale = alpha * (1.0 - pi) * scale / ((1.0 + ds) ** 2 * (1.0 + dg) ** 2)
    b1 = syn_scale
    b2 = syn_scale / (1.0 + dg) ** 2
    h1 = 1.0 - a1 - b2
    if not h1 > 0:
        raise InvalidRegimeError(f"h1 = {h1:.6g} <= 0: outside the validity range of the theory")
    return ScalarLedger(alpha=alpha, lam=lam, a=a, b=b, c=c, a1=a1, b1=b1, b2=b2, h1=h1, h2=h2)
