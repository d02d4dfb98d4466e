"""Fractional Brownian motion from superposed persistence-mixed walks.

The construction: each walk repeats its previous step with a persistence
probability drawn once per walk from a mixing measure chosen so that the
annealed step correlations decay like a power law; M such walks averaged
and rescaled approximate fractional Brownian motion with the prescribed
Hurst parameter.  The package also ships the exact Gaussian reference
sampler, a Berry-Esseen accuracy planner, and the statistical validation
tooling used by the command line interface.
"""

from .errors import InfeasiblePlanError, NumericError, ParameterError
from .measures import (ConstantKind, Family, MeasureSpec, Regime,
                       ScalingConstant, autocovariance_sequence,
                       compensation_partial_sum, increment_autocovariance,
                       make_measure, persistence_cdf, regime_of,
                       sample_persistence, scaling_constant)
from .ensemble import (EnsembleConfig, EnsembleTrajectory, scale_factor,
                       simulate_fbm, stream_fbm)
from .oracle import (enumerate_quenched, exact_fbm_sample, fbm_covariance,
                     fgn_autocovariance, quadrature_moment)
from .planner import (AccuracyPlan, BERRY_ESSEEN_CONSTANT,
                      ESSEEN_CONJECTURED_CONSTANT, advise, cost_estimate,
                      error_bound, third_moment_bound)
from .rng import Stream, derive_streams, replication_seed, stream_for_walk
from .special import log_gamma
from .stats import (RiseTailRow, ValidationReport, covariance_check,
                    empirical_autocovariance, estimate_hurst,
                    marginal_normality, rise_tail_report,
                    window_autocovariance_theory)
from .walks import (WalkState, crw_next, first_rise_lengths, run_walk,
                    y_next)
from ._backend import backend_name, load_backend

__version__ = "0.1.0"

__all__ = [
    "AccuracyPlan", "BERRY_ESSEEN_CONSTANT", "ConstantKind",
    "ESSEEN_CONJECTURED_CONSTANT", "EnsembleConfig", "EnsembleTrajectory",
    "Family", "InfeasiblePlanError", "MeasureSpec", "NumericError",
    "ParameterError", "Regime", "RiseTailRow", "ScalingConstant", "Stream",
    "ValidationReport", "WalkState", "advise", "autocovariance_sequence",
    "backend_name", "compensation_partial_sum", "cost_estimate",
    "covariance_check", "crw_next", "derive_streams",
    "empirical_autocovariance", "enumerate_quenched", "error_bound",
    "estimate_hurst", "exact_fbm_sample", "fbm_covariance",
    "fgn_autocovariance", "first_rise_lengths", "increment_autocovariance",
    "load_backend", "log_gamma", "make_measure", "marginal_normality",
    "persistence_cdf", "quadrature_moment", "regime_of", "replication_seed",
    "rise_tail_report", "run_walk", "sample_persistence", "scale_factor",
    "scaling_constant", "simulate_fbm", "stream_fbm", "stream_for_walk",
    "third_moment_bound", "window_autocovariance_theory", "y_next",
]
