"""Posterior predictive p-values under the modified Kolmogorov-Smirnov test,
with chi-squared, score, and PIT-based KS statistics, a gamma-null MCMC
sampler, and a simulation harness."""

__version__ = "0.1.0"

from .estimation import DegenerateDataError, EstimatorKind, gamma_mle, posterior_mean
from .experiments import (
    ExperimentConfig,
    ExperimentResult,
    Scenario,
    rejection_rate,
    run_contiguity_check,
    run_null_calibration,
    run_power,
    uniformity_ks_distance,
)
from .mcmc import ChainOutput, McmcSettings, log_posterior, run_chain
from .models import (
    Dataset,
    GammaParams,
    ModelSpec,
    PriorSpec,
    bad_priors,
    gamma_cdf,
    gamma_log_pdf,
    good_priors,
    sample_dataset,
)
from .ppp import PppConfig, PppResult, estimate_ppp, estimate_ppp_multi, two_sided
from .statistics import StatisticKind, chi_squared_stat, modified_ks, pit_ks, score_stat

__all__ = [
    "ChainOutput",
    "Dataset",
    "DegenerateDataError",
    "EstimatorKind",
    "ExperimentConfig",
    "ExperimentResult",
    "GammaParams",
    "McmcSettings",
    "ModelSpec",
    "PppConfig",
    "PppResult",
    "PriorSpec",
    "Scenario",
    "StatisticKind",
    "bad_priors",
    "chi_squared_stat",
    "estimate_ppp",
    "estimate_ppp_multi",
    "gamma_cdf",
    "gamma_log_pdf",
    "gamma_mle",
    "good_priors",
    "log_posterior",
    "modified_ks",
    "pit_ks",
    "posterior_mean",
    "rejection_rate",
    "run_chain",
    "run_contiguity_check",
    "run_null_calibration",
    "run_power",
    "sample_dataset",
    "score_stat",
    "two_sided",
    "uniformity_ks_distance",
]
