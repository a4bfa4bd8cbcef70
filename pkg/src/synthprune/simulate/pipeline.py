"""Finite-size pipeline: real data, generator, noisy synthetic data, pruning, ridge.

Data matrices are ``p x k`` with one sample per column.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy import linalg

from ..errors import ConfigError, DataError

# columns drawn per block when streaming large sample sets
CHUNK = 8192


@dataclass(frozen=True)
class LabeledMatrix:
    """Samples as columns of ``features`` with their (possibly noisy) labels.

    ``true_labels`` and ``keep_mask`` are only set for synthetic data.
    """

    features: np.ndarray
    labels: np.ndarray
    true_labels: np.ndarray | None = None
    keep_mask: np.ndarray | None = None

    def __post_init__(self):
        k = self.features.shape[1]
        for name in ("labels", "true_labels", "keep_mask"):
            v = getattr(self, name)
            if v is not None and v.shape != (k,):
                raise DataError(f"{name} has shape {v.shape}, expected ({k},)")

    @property
    def dim(self) -> int:
        return self.features.shape[0]

    def __len__(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True)
class GeneratorModel:
    """Gaussian generator: class mean ``mu_hat`` and shared covariance ``cov_hat``."""

    mu_hat: np.ndarray
    cov_hat: np.ndarray
    cov_sqrt: np.ndarray

    @classmethod
    def from_moments(cls, mean, cov) -> "GeneratorModel":
        """Generator with a prescribed mean and covariance (e.g. an exact or isotropic law)."""
        mean = np.asarray(mean, dtype=float)
        cov = np.asarray(cov, dtype=float)
        return cls(mean, cov, psd_sqrt(cov))


@dataclass(frozen=True)
class RidgeModel:
    weights: np.ndarray
    gamma: float


def psd_sqrt(cov: np.ndarray) -> np.ndarray:
    """Symmetric square root with eigenvalues clamped at 0."""
    evals, evecs = np.linalg.eigh(cov)
    scale = max(1.0, float(np.max(np.abs(evals)))) if evals.size else 1.0
    if evals.size and evals[0] < -1e-10 * scale:
        raise DataError(f"covariance is not PSD (smallest eigenvalue {evals[0]:.3e})")
    root = np.sqrt(np.clip(evals, 0.0, None))
    return (evecs * root) @ evecs.T


def mean_vector(p: int, mu_norm: float) -> np.ndarray:
    """``mu_norm * e_1``."""
    mu = np.zeros(p)
    mu[0] = mu_norm
    return mu


def shifted_mean(p: int, mu_norm: float, beta: float, mu_perp_norm: float) -> np.ndarray:
    """``beta*mu + mu_perp`` with ``mu_perp`` along ``e_2``."""
    mub = beta * mean_vector(p, mu_norm)
    if mu_perp_norm:
        if p < 2:
            raise ConfigError("an orthogonal mean shift needs p >= 2", "mu_perp_norm")
        mub[1] = mu_perp_norm
    return mub


def random_labels(k: int, rng: np.random.Generator) -> np.ndarray:
    return 2 * rng.integers(0, 2, size=k) - 1


def sample_real(n: int, p: int, mu: np.ndarray, rng: np.random.Generator) -> LabeledMatrix:
    """``x = y mu + z`` with uniform labels and standard Gaussian noise."""
    y = random_labels(n, rng)
    X = rng.standard_normal((p, n))
    X += np.outer(mu, y)
    return LabeledMatrix(X, y)


def fit_generator(data: LabeledMatrix) -> GeneratorModel:
    """Empirical mean of ``y x`` and covariance of ``y x`` around it (1/n normalization)."""
    k = len(data)
    if k == 0:
        raise DataError("cannot fit a generator on zero samples")
    Y = data.features * data.labels
    mu_hat = Y.mean(axis=1)
    R = Y - mu_hat[:, None]
    cov = R @ R.T / k
    cov = 0.5 * (cov + cov.T)
    return GeneratorModel(mu_hat, cov, psd_sqrt(cov))


def fit_generator_streaming(n_hat: int, p: int, mu: np.ndarray, rng: np.random.Generator,
                            chunk: int = CHUNK) -> GeneratorModel:
    """Draw ``n_hat`` real samples block by block and fit the generator without storing them.

    Equivalent to ``fit_generator(sample_real(...))`` up to roundoff, but the
    draws are organized in blocks of ``chunk`` columns.
    """
    if n_hat < 1:
        raise DataError("cannot fit a generator on zero samples")
    s1 = np.zeros(p)
    s2 = np.zeros((p, p))
    done = 0
    while done < n_hat:
        k = min(chunk, n_hat - done)
        block = sample_real(k, p, mu, rng)
        Y = block.features * block.labels
        # accumulate around mu to keep the second moment well conditioned
        Yc = Y - mu[:, None]
        s1 += Yc.sum(axis=1)
        s2 += Yc @ Yc.T
        done += k
    shift = s1 / n_hat
    cov = s2 / n_hat - np.outer(shift, shift)
    cov = 0.5 * (cov + cov.T)
    return GeneratorModel(mu + shift, cov, psd_sqrt(cov))


def sample_synthetic(m: int, gen: GeneratorModel, epsilon: float,
                     rng: np.random.Generator) -> LabeledMatrix:
    """``x = y_true mu_hat + C^{1/2} z``; each label is flipped with probability ``epsilon``.

    Draw order: true labels, Gaussian noise, then one uniform per sample for the flips.
    """
    if not 0.0 <= epsilon <= 1.0:
        raise ConfigError(f"must lie in [0, 1], got {epsilon}", "epsilon")
    p = gen.mu_hat.shape[0]
    y_true = random_labels(m, rng)
    Z = rng.standard_normal((p, m))
    X = gen.cov_sqrt @ Z
    X += np.outer(gen.mu_hat, y_true)
    flip = rng.random(m) < epsilon
    y = np.where(flip, -y_true, y_true)
    return LabeledMatrix(X, y, true_labels=y_true)


def prune(data: LabeledMatrix, rho: float, phi: float, rng: np.random.Generator) -> LabeledMatrix:
    """Keep each sample with probability ``phi`` if its label is right, ``rho`` otherwise."""
    if data.true_labels is None:
        raise DataError("pruning needs the true labels of the synthetic samples")
    for name, v in (("rho", rho), ("phi", phi)):
        if not 0.0 <= v <= 1.0:
            raise ConfigError(f"must lie in [0, 1], got {v}", name)
    u = rng.random(len(data))
    keep_prob = np.where(data.labels == data.true_labels, phi, rho)
    keep = (u < keep_prob).astype(np.int8)
    return replace(data, keep_mask=keep)


def train_ridge(real: LabeledMatrix, synthetic: LabeledMatrix | None, gamma: float) -> RidgeModel:
    """Solve ``((1/N) X X^T + gamma I) w = (1/N) X y`` by Cholesky.

    Pruned synthetic columns count in ``N = n + m`` but contribute zero.
    The noisy labels are used.
    """
    if not gamma > 0:
        raise ConfigError(f"must be > 0, got {gamma}", "gamma")
    blocks = [real]
    if synthetic is not None:
        blocks.append(synthetic)
    N = sum(len(b) for b in blocks)
    if N < 1:
        raise DataError("no training samples")
    p = real.dim
    gram = np.zeros((p, p))
    rhs = np.zeros(p)
    for b in blocks:
        X, y = b.features, b.labels
        if b.keep_mask is not None:
            idx = np.flatnonzero(b.keep_mask)
            X, y = X[:, idx], y[idx]
        if not np.all(np.isfinite(X)):
            raise DataError("non-finite training features")
        gram += X @ X.T
        rhs += X @ y
    gram /= N
    gram[np.diag_indices(p)] += gamma
    w = linalg.cho_solve(linalg.cho_factor(gram, lower=True, check_finite=False), rhs / N,
                         check_finite=False)
    return RidgeModel(w, float(gamma))


def balanced_labels(n_test: int) -> np.ndarray:
    """``ceil(n/2)`` labels +1 followed by ``floor(n/2)`` labels -1."""
    y = -np.ones(n_test, dtype=np.int64)
    y[: (n_test + 1) // 2] = 1
    return y


def score_test_points(model: RidgeModel, mu: np.ndarray, labels: np.ndarray,
                rng: np.random.Generator, chunk: int = CHUNK) -> np.ndarray:
    """``w^T x`` for fresh real test points with the given labels."""
    w = model.weights
    p = w.shape[0]
    out = np.empty(labels.shape[0])
    wmu = float(w @ mu)
    for start in range(0, labels.shape[0], chunk):
        stop = min(start + chunk, labels.shape[0])
        Z = rng.standard_normal((p, stop - start))
        out[start:stop] = labels[start:stop] * wmu + w @ Z
    return out


def decision_stats(model: RidgeModel, mu: np.ndarray, n_test: int,
                   rng: np.random.Generator) -> tuple[float, float, float]:
    """Empirical mean and variance of ``y w^T x`` and accuracy on balanced real test data.

    A zero score is predicted as +1.
    """
    if n_test < 1:
        raise ConfigError("must be >= 1", "n_test")
    y = balanced_labels(n_test)
    s = score_test_points(model, mu, y, rng)
    margin = y * s
    pred = np.where(s >= 0, 1, -1)
    var = float(margin.var(ddof=1)) if n_test > 1 else 0.0
    return float(margin.mean()), var, float(np.mean(pred == y))


def spectrum(cov: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of a symmetric matrix."""
    cov = np.asarray(cov, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise DataError(f"expected a square matrix, got shape {cov.shape}")
    scale = max(float(np.max(np.abs(cov))), np.finfo(float).tiny) if cov.size else 1.0
    if cov.size and float(np.max(np.abs(cov - cov.T))) > 1e-8 * scale:
        raise DataError("matrix is not symmetric")
    return np.linalg.eigvalsh(0.5 * (cov + cov.T))
