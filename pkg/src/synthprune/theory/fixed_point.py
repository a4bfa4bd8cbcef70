"""Self-consistent fixed point for the mixed real/synthetic resolvent.

The three scalars are the asymptotic self-energies of a real sample
(``delta_r``), a kept synthetic sample (``delta_s``) and of the generator's
sample covariance (``delta_g``). With

    b = gamma + pi/(1+dr) + alpha(1-pi)/((1+ds)(1+dg))

they satisfy

    dg = alpha(1-pi)/(1+ds) * eta_hat / b
    dr = eta / b
    ds = k * dr / (1+dg)

where ``k = alpha`` in the ``"paper"`` convention and ``k = 1`` in the
``"corrected"`` one (see :data:`CONVENTIONS`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from ..errors import ConfigError, ConvergenceError

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 100_000

# How the synthetic self-energy is normalized.
#   "paper":     delta_S = alpha * Tr(C Qbar)/N, as in the closed forms of the model
#   "corrected": delta_S = Tr(C Qbar)/N. A kept sample enters the resolvent with
#                weight q in {0,1}, and E[q/(1+q d)] = alpha/(1+d), so the
#                leave-one-out denominator carries no alpha.
CONVENTIONS = ("paper", "corrected")

_MIN_STEP = 2.0**-30


def check_convention(convention: str) -> None:
    if convention not in CONVENTIONS:
        raise ConfigError(f"unknown convention {convention!r}, expected one of {CONVENTIONS}",
                          "convention")


def synthetic_weight(alpha: float, convention: str) -> float:
    """Factor in front of ``Tr(C Qbar)/N`` in the synthetic self-energy."""
    check_convention(convention)
    return alpha if convention == "paper" else 1.0


@dataclass(frozen=True)
class Deltas:
    """Solution of the three-scalar fixed point.

    ``residual`` is the sup-norm of the last update, ``iterations`` the
    number of sweeps (0 for closed-form branches).
    """

    delta_r: float
    delta_s: float
    delta_g: float
    residual: float
    iterations: int

    def as_tuple(self) -> tuple[float, float, float]:
        return self.delta_r, self.delta_s, self.delta_g


def damped_picard(sweep: Callable[[list[float]], list[float]], start: Sequence[float],
                  tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                  ) -> tuple[list[float], float, int]:
    """Iterate ``x <- x + step*(sweep(x) - x)`` until the update is below ``tol``.

    The stopping test is ``|update| <= tol * max(1, |x|)`` in sup-norm.

    ``step`` starts at 1 and is halved when the sup-norm of the update grows
    while some component of the update changes sign, i.e. on overshoot. A
    growing update of constant sign is the normal ramp away from the zero
    start and is left undamped.

    Returns
    -------
    x : list of float
        The last image ``sweep(x)``.
    residual : float
        Sup-norm of the last update.
    iterations : int
        Number of sweeps performed.
    """
    x = [float(v) for v in start]
    step = 1.0
    prev = math.inf
    prev_upd: list[float] | None = None
    res = math.inf
    for it in range(1, max_iter + 1):
        fx = sweep(x)
        upd = [a - b for a, b in zip(fx, x)]
        res = max((abs(u) for u in upd), default=0.0)
        if not math.isfinite(res):
            raise ConvergenceError(f"non-finite value after {it} sweeps", res, it)
        # relative once the iterate exceeds 1: an absolute 1e-12 is below one ulp near 1e4
        if res <= tol * max(1.0, max((abs(v) for v in fx), default=0.0)):
            return fx, res, it
        if res > prev and prev_upd is not None and any(u * v < 0 for u, v in zip(upd, prev_upd)):
            step = max(0.5 * step, _MIN_STEP)
        x = [b + step * u for u, b in zip(upd, x)]
        prev, prev_upd = res, upd
    raise ConvergenceError(f"no convergence after {max_iter} sweeps, residual {res:.3e}",
                           res, max_iter)


def positive_quadratic_root(a: float, b: float, c: float) -> float:
    """Nonnegative root of ``a x^2 + b x - c = 0`` with ``a > 0``, ``c >= 0``.

    Uses the cancellation-free form on either sign of ``b``.
    """
    disc = math.sqrt(b * b + 4.0 * a * c)
    if b >= 0:
        return 2.0 * c / (b + disc) if c > 0 else 0.0
    return (disc - b) / (2.0 * a)


def real_only_delta(eta: float, pi: float, gamma: float) -> float:
    """Solve ``d = eta / (gamma + pi/(1+d))`` (no synthetic block)."""
    # gamma d^2 + (gamma + pi - eta) d - eta = 0
    return positive_quadratic_root(gamma, gamma + pi - eta, eta)


def _check_inputs(eta, eta_hat, pi, alpha, gamma, tol, max_iter):
    for name, v in (("eta", eta), ("eta_hat", eta_hat)):
        if not (math.isfinite(v) and v >= 0):
            raise ConfigError(f"must be finite and >= 0, got {v}", name)
    for name, v in (("pi", pi), ("alpha", alpha)):
        if not 0.0 <= v <= 1.0:
            raise ConfigError(f"must lie in [0, 1], got {v}", name)
    if not gamma > 0:
        raise ConfigError(f"must be > 0, got {gamma}", "gamma")
    if not tol > 0:
        raise ConfigError("must be > 0", "tol")
    if max_iter < 1:
        raise ConfigError("must be >= 1", "max_iter")


def solve_deltas(eta: float, eta_hat: float, pi: float, alpha: float, gamma: float,
                 tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                 convention: str = "paper") -> Deltas:
    """Solve for ``(delta_r, delta_s, delta_g)`` by damped Picard iteration from zero.

    Each sweep updates ``delta_g``, then ``delta_r``, then ``delta_s``, each
    using the freshest values. ``eta_hat = 0`` (exact generator covariance)
    is accepted and gives ``delta_g = 0``.

    When no kept synthetic sample survives (``alpha*(1-pi) == 0``) the
    system decouples: ``delta_g = delta_s = 0`` and ``delta_r`` is the
    positive root of a quadratic.

    Raises
    ------
    ConvergenceError
        If the update does not fall below ``tol`` within ``max_iter`` sweeps.
    """
    _check_inputs(eta, eta_hat, pi, alpha, gamma, tol, max_iter)
    k = synthetic_weight(alpha, convention)
    syn = alpha * (1.0 - pi)

    if syn == 0.0:
        dr = real_only_delta(eta, pi, gamma)
        res = abs(eta / (gamma + pi / (1.0 + dr)) - dr)
        return Deltas(dr, 0.0, 0.0, res, 0)

    def sweep(x):
        dr, ds, dg = x
        b = gamma + pi / (1.0 + dr) + syn / ((1.0 + ds) * (1.0 + dg))
        dg = syn / (1.0 + ds) * eta_hat / b
        # the coupled form (eta/eta_hat)(1+ds)/(alpha(1-pi)) * dg collapses to eta/b
        dr = eta / b
        ds = k * dr / (1.0 + dg)
        return [dr, ds, dg]

    (dr, ds, dg), res, it = damped_picard(sweep, (0.0, 0.0, 0.0), tol, max_iter)
    return Deltas(dr, ds, dg, res, it)


def internal_b(d: Deltas, pi: float, alpha: float, gamma: float) -> float:
    """The denominator ``b`` shared by the fixed point and the scalar ledger."""
    return gamma + pi / (1.0 + d.delta_r) + alpha * (1.0 - pi) / ((1.0 + d.delta_s) * (1.0 + d.delta_g))
