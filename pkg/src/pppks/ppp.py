"""Monte Carlo estimation of the posterior predictive p-value."""

import math
from dataclasses import dataclass, field

import numpy as np

from .mcmc import McmcSettings, run_chain, run_chains_batch
from .estimation import DegenerateDataError, EstimatorKind, gamma_mle, posterior_mean
from .models import Dataset, GammaParams, gamma_cdf, prior_means
from .statistics import StatisticKind, chi_squared_stat, modified_ks, pit_ks, score_stat

# Monte Carlo floor for a reported p-value
_MIN_DRAWS = 100


@dataclass(frozen=True)
class PppConfig:
    estimator: EstimatorKind = EstimatorKind.MLE
    statistic: StatisticKind = StatisticKind.MODIFIED_KS
    mcmc: McmcSettings = field(default_factory=McmcSettings)
    # shortened refits keep the posterior-mean plug-in tractable on
    # predictive datasets; pass full-length settings for fidelity runs
    predictive_refit_mcmc: McmcSettings = field(
        default_factory=lambda: McmcSettings(burn_in=500, iterations=1000, thin=2)
    )
    m_draws: int | None = None

    def __post_init__(self):
        if self.m_draws is not None and self.m_draws < _MIN_DRAWS:
            raise ValueError(f"m_draws must be >= {_MIN_DRAWS}")


@dataclass(frozen=True, eq=False)
class PppResult:
    p_value: float
    t_obs: float
    t_replicates: np.ndarray
    m_draws: int
    two_sided_p: float | None = None


def two_sided(p: float) -> float:
    """Two-sided p-value 2 * min(p, 1 - p), clamped to [0, 1]."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must be in [0, 1]")
    return min(1.0, 2.0 * min(p, 1.0 - p))


def _default_stat_fn(kind: StatisticKind):
    if kind is StatisticKind.MODIFIED_KS:
        return lambda d, est, x: modified_ks(d, lambda ys: gamma_cdf(est, ys))
    if kind is StatisticKind.CHI_SQUARED:
        return lambda d, est, x: chi_squared_stat(d, est)
    if kind is StatisticKind.SCORE:
        def score(d, est, x):
            if x is None:
                raise ValueError("score statistic requires a covariate vector")
            return score_stat(d, x, est)
        return score
    if kind is StatisticKind.PIT_KS:
        return lambda d, est, x: pit_ks(d, lambda i, yi: gamma_cdf(est, yi))
    raise ValueError(f"unknown statistic {kind}")


def _predictive_estimates_mle(datasets):
    estimates = []
    for j, ds in enumerate(datasets):
        try:
            estimates.append(gamma_mle(ds))
        except DegenerateDataError as exc:
            raise RuntimeError(
                f"predictive dataset {j} is degenerate for the gamma MLE: {exc}"
            ) from exc
    return estimates


def _predictive_estimates_refit(datasets, pr, settings, rng):
    n = datasets[0].n
    slog = np.array([float(np.log(ds.observations).sum()) for ds in datasets])
    sy = np.array([float(ds.observations.sum()) for ds in datasets])
    init = np.empty((len(datasets), 2))
    for j, ds in enumerate(datasets):
        try:
            p = gamma_mle(ds)
        except (DegenerateDataError, ValueError):
            p = prior_means(pr) if pr is not None else GammaParams(1.0, 1.0)
        init[j, 0] = math.log(p.alpha)
        init[j, 1] = math.log(p.beta)
    draws, _ = run_chains_batch(n, slog, sy, pr, settings, rng, init)
    means = draws.mean(axis=1)
    return [GammaParams(float(a), float(b)) for a, b in means]


def estimate_ppp_multi(
    observed: Dataset,
    pr,
    cfg: PppConfig,
    statistics,
    rng: np.random.Generator,
    covariates=None,
    statistic_fns=None,
    estimator_fn=None,
) -> dict:
    """Shared-chain ppp estimation for several statistics at once.

    Runs one posterior chain on the observed data, draws one predictive
    dataset per retained posterior draw, applies the same plug-in estimator
    to the observed and every predictive dataset, and evaluates each
    requested statistic on all of them.

    statistic_fns / estimator_fn are injection points for tests; statistic
    callables have signature (dataset, estimate, covariates) -> float and an
    estimator callable has signature (dataset, chain_or_None) -> GammaParams.
    """
    statistics = list(statistics)
    if statistic_fns is None:
        statistic_fns = {k: _default_stat_fn(k) for k in statistics}

    chain_rng, pred_rng = rng.spawn(2)
    chain = run_chain(observed, pr, cfg.mcmc, chain_rng)
    retained = chain.draws.shape[0]
    m = cfg.m_draws if cfg.m_draws is not None else retained
    if m < _MIN_DRAWS:
        raise ValueError(f"m_draws must be >= {_MIN_DRAWS}")
    if m > retained:
        raise ValueError(f"m_draws = {m} exceeds the {retained} retained draws")
    theta = chain.draws[:m]

    if estimator_fn is not None:
        est_obs = estimator_fn(observed, chain)
    elif cfg.estimator is EstimatorKind.MLE:
        est_obs = gamma_mle(observed)
    else:
        est_obs = posterior_mean(chain)

    t_obs = {k: float(statistic_fns[k](observed, est_obs, covariates)) for k in statistics}

    n = observed.n
    streams = pred_rng.spawn(m)
    datasets = []
    for j in range(m):
        y = streams[j].gamma(shape=theta[j, 0], scale=1.0 / theta[j, 1], size=n)
        datasets.append(Dataset(np.maximum(y, 1e-300)))

    if estimator_fn is not None:
        estimates = [estimator_fn(ds, None) for ds in datasets]
    elif cfg.estimator is EstimatorKind.MLE:
        estimates = _predictive_estimates_mle(datasets)
    else:
        estimates = _predictive_estimates_refit(datasets, pr, cfg.predictive_refit_mcmc, pred_rng)

    results = {}
    for k in statistics:
        fn = statistic_fns[k]
        t_rep = np.array([fn(ds, est, covariates) for ds, est in zip(datasets, estimates)])
        p = float(np.count_nonzero(t_rep >= t_obs[k])) / m
        sided = two_sided(p) if getattr(k, "two_sided", False) else None
        results[k] = PppResult(
            p_value=p, t_obs=t_obs[k], t_replicates=t_rep, m_draws=m, two_sided_p=sided
        )
    return results


def estimate_ppp(
    observed: Dataset,
    pr,
    cfg: PppConfig,
    rng: np.random.Generator,
    covariates=None,
    statistic_fn=None,
    estimator_fn=None,
) -> PppResult:
    """Posterior predictive p-value for a single (estimator, statistic) pair.

    Deterministic given (observed, pr, cfg, rng seed).
    """
    kind = cfg.statistic
    fns = None if statistic_fn is None else {kind: statistic_fn}
    out = estimate_ppp_multi(
        observed,
        pr,
        cfg,
        [kind],
        rng,
        covariates=covariates,
        statistic_fns=fns,
        estimator_fn=estimator_fn,
    )
    return out[kind]
