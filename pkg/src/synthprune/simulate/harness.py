"""Monte Carlo trials of the full pipeline and their aggregation."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ..config import ExperimentConfig, validate
from ..errors import ConfigError
from .pipeline import (
    GeneratorModel,
    LabeledMatrix,
    decision_stats,
    fit_generator_streaming,
    mean_vector,
    prune,
    sample_real,
    sample_synthetic,
    shifted_mean,
    train_ridge,
)
from .rng import TrialStreams

# "fitted":    generator estimated from n_hat fresh real samples
# "isotropic": fixed law N(+-mu_beta, sigma^2 I) from the config's sigma, beta, mu_perp_norm
GENERATOR_MODES = ("fitted", "isotropic")


@dataclass(frozen=True)
class TrialResult:
    trial: int
    accuracy: float
    decision_mean: float
    decision_var: float
    kept: int


class MonteCarloSummary(NamedTuple):
    mean_acc: float
    std_acc: float
    mean_decision_mean: float
    mean_decision_var: float


def isotropic_generator(cfg: ExperimentConfig) -> GeneratorModel:
    mub = shifted_mean(cfg.p, cfg.mu_norm, cfg.beta, cfg.mu_perp_norm)
    s2 = cfg.sigma**2
    return GeneratorModel(mub, s2 * np.eye(cfg.p), cfg.sigma * np.eye(cfg.p))


def build_generator(cfg: ExperimentConfig, mode: str, streams: TrialStreams) -> GeneratorModel:
    if mode == "fitted":
        return fit_generator_streaming(cfg.n_hat, cfg.p, mean_vector(cfg.p, cfg.mu_norm),
                                       streams.generator)
    if mode == "isotropic":
        return isotropic_generator(cfg)
    raise ConfigError(f"unknown generator mode {mode!r}, expected one of {GENERATOR_MODES}",
                      "generator")


def run_trial(cfg: ExperimentConfig, trial: int, n_test: int, generator: str = "fitted",
              generator_model: GeneratorModel | None = None) -> TrialResult:
    """One pass of the pipeline with the streams of ``(cfg.seed, trial)``.

    ``generator_model`` overrides ``generator`` with a prescribed synthetic law.
    """
    streams = TrialStreams(cfg.seed, trial)
    mu = mean_vector(cfg.p, cfg.mu_norm)
    real = sample_real(cfg.n, cfg.p, mu, streams.real)
    synthetic: LabeledMatrix | None = None
    kept = 0
    if cfg.m > 0:
        gen = generator_model if generator_model is not None else build_generator(cfg, generator, streams)
        synthetic = sample_synthetic(cfg.m, gen, cfg.epsilon, streams.synthetic)
        synthetic = prune(synthetic, cfg.rho, cfg.phi, streams.prune)
        kept = int(synthetic.keep_mask.sum())
    model = train_ridge(real, synthetic, cfg.gamma)
    mean, var, acc = decision_stats(model, mu, n_test, streams.test)
    return TrialResult(trial, acc, mean, var, kept)


def run_trials(cfg: ExperimentConfig, trials: int, n_test: int, generator: str = "fitted",
               generator_model: GeneratorModel | None = None, workers: int = 1,
               first_trial: int = 0) -> list[TrialResult]:
    """Run trials ``first_trial .. first_trial + trials - 1``, ordered by trial index.

    With ``workers > 1`` trials run on a thread pool. Results do not depend on
    the number of workers.
    """
    validate(cfg)
    if trials < 1:
        raise ConfigError("must be >= 1", "trials")
    if n_test < 1:
        raise ConfigError("must be >= 1", "n_test")
    idx = range(first_trial, first_trial + trials)

    def job(t):
        return run_trial(cfg, t, n_test, generator, generator_model)

    if workers <= 1:
        return [job(t) for t in idx]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(job, idx))


def summarize(results: list[TrialResult]) -> MonteCarloSummary:
    """Fold trial results in trial order."""
    results = sorted(results, key=lambda r: r.trial)
    acc = np.array([r.accuracy for r in results])
    std = float(acc.std(ddof=1)) if acc.size > 1 else 0.0
    return MonteCarloSummary(
        float(acc.mean()),
        std,
        float(np.mean([r.decision_mean for r in results])),
        float(np.mean([r.decision_var for r in results])),
    )


def monte_carlo(cfg: ExperimentConfig, trials: int, n_test: int, generator: str = "fitted",
                generator_model: GeneratorModel | None = None, workers: int = 1) -> MonteCarloSummary:
    """Mean and spread of the test accuracy and decision moments over independent trials."""
    return summarize(run_trials(cfg, trials, n_test, generator, generator_model, workers))
