"""Monte Carlo simulation of the real + pruned-synthetic ridge pipeline."""

from .harness import (
    GENERATOR_MODES,
    MonteCarloSummary,
    TrialResult,
    build_generator,
    isotropic_generator,
    monte_carlo,
    run_trial,
    run_trials,
    summarize,
)
from .pipeline import (
    GeneratorModel,
    LabeledMatrix,
    RidgeModel,
    balanced_labels,
    decision_stats,
    fit_generator,
    fit_generator_streaming,
    mean_vector,
    prune,
    psd_sqrt,
    sample_real,
    sample_synthetic,
    score_test_points,
    shifted_mean,
    spectrum,
    train_ridge,
)
from .rng import PURPOSES, TrialStreams, stream

__all__ = [
    "GENERATOR_MODES", "GeneratorModel", "LabeledMatrix", "MonteCarloSummary", "PURPOSES",
    "RidgeModel", "TrialResult", "TrialStreams", "balanced_labels", "build_generator",
    "decision_stats", "fit_generator", "fit_generator_streaming", "isotropic_generator",
    "mean_vector", "monte_carlo", "prune", "psd_sqrt", "run_trial", "run_trials",
    "sample_real", "sample_synthetic", "score_test_points", "shifted_mean", "spectrum",
    "stream", "summarize", "train_ridge",
]
