"""Asymptotic (random-matrix) predictions for the mixed ridge classifier."""

from .fixed_point import CONVENTIONS, Deltas, damped_picard, internal_b, real_only_delta, solve_deltas
from .general import general_covariance_stats, solve_general_deltas
from .isotropic import IsotropicDeltas, isotropic_stats, isotropic_stats_from_ratios, solve_isotropic_delta
from .ledger import ScalarLedger, build_ledger
from .spectral import (
    kolmogorov_distance,
    marchenko_pastur_cdf,
    marchenko_pastur_density,
    marchenko_pastur_point_mass,
    marchenko_pastur_support,
)
from .stats import (
    TheoryStats,
    corollary_synthetic_stats,
    critical_epsilon,
    mixture_stats,
    normal_cdf,
    stats_from_moments,
    synthetic_only_delta,
    theorem1_stats,
)

__all__ = [
    "CONVENTIONS", "Deltas", "IsotropicDeltas", "ScalarLedger", "TheoryStats",
    "build_ledger", "corollary_synthetic_stats", "critical_epsilon", "damped_picard",
    "general_covariance_stats", "internal_b", "isotropic_stats", "isotropic_stats_from_ratios",
    "kolmogorov_distance", "marchenko_pastur_cdf", "marchenko_pastur_density",
    "marchenko_pastur_point_mass", "marchenko_pastur_support", "mixture_stats", "normal_cdf",
    "real_only_delta", "solve_deltas", "solve_general_deltas", "solve_isotropic_delta",
    "stats_from_moments", "synthetic_only_delta", "theorem1_stats",
]
