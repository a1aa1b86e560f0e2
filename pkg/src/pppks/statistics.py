"""Test statistics: modified KS, chi-squared, gamma-GLM score, and the
PIT-based generalized KS. All return raw values; two-sidedness of the
chi-squared p-value is handled by the p-value layer."""

import enum
import math

import numpy as np

from .models import Dataset, GammaParams


class StatisticKind(enum.Enum):
    MODIFIED_KS = "modified_ks"
    CHI_SQUARED = "chi_squared"
    SCORE = "score"
    PIT_KS = "pit_ks"

    @property
    def two_sided(self) -> bool:
        # extreme values in either direction count against the null
        return self is StatisticKind.CHI_SQUARED


def _ks_sup_distance(sorted_values: np.ndarray) -> float:
    # sup over steps of the empirical CDF; valid with ties (jumps of k/n)
    n = sorted_values.size
    grid = np.arange(1.0, n + 1.0)
    d_plus = float((grid / n - sorted_values).max())
    d_minus = float((sorted_values - (grid - 1.0) / n).max())
    return max(d_plus, d_minus)


def modified_ks(d: Dataset, fitted_cdf) -> float:
    """sqrt(n) times the sup distance between the empirical CDF and the
    fitted model CDF; fitted_cdf must accept a sorted numpy array.

    For a continuous CDF the supremum over the real line is attained at the
    data points, so only the 2n step gaps are examined.
    """
    y = np.sort(d.observations)
    f = np.asarray(fitted_cdf(y), dtype=float)
    if f.shape != y.shape:
        raise ValueError("fitted_cdf must return one value per observation")
    if np.any(f < 0.0) or np.any(f > 1.0):
        raise ValueError("fitted_cdf returned values outside [0, 1]")
    if np.any(np.diff(f) < 0.0):
        raise ValueError("fitted_cdf decreases on the sorted sample")
    return math.sqrt(d.n) * _ks_sup_distance(f)


def chi_squared_stat(d: Dataset, est: GammaParams) -> float:
    """Mean squared residual scaled by the fitted gamma variance."""
    mu = est.alpha / est.beta
    var = est.alpha / est.beta**2
    return float(((d.observations - mu) ** 2).mean() / var)


def score_stat(d: Dataset, x, est: GammaParams) -> float:
    """Score of the gamma-GLM enlargement in the regression parameter,
    evaluated at the null and plug-in estimates."""
    xv = np.asarray(x, dtype=float)
    if xv.shape != d.observations.shape:
        raise ValueError(f"covariate vector length {xv.size} != n = {d.n}")
    return float(
        (est.beta**2 / est.alpha) * (xv * d.observations).sum() - est.beta * xv.sum()
    )


def pit_ks(d: Dataset, per_obs_cdf) -> float:
    """Generalized KS statistic on the probability integral transforms
    u_i = F_i(Y_i); per_obs_cdf(i, y_i) is the CDF of observation i."""
    y = d.observations
    u = np.array([per_obs_cdf(i, y[i]) for i in range(d.n)], dtype=float)
    if np.any(u < 0.0) or np.any(u > 1.0) or not np.all(np.isfinite(u)):
        raise ValueError("probability integral transforms outside [0, 1]")
    return math.sqrt(d.n) * _ks_sup_distance(np.sort(u))
