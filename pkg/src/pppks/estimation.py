"""Plug-in estimators for the gamma null model: Newton MLE and the
posterior mean of an MCMC chain."""

import enum
import math

import numpy as np

from .models import Dataset, GammaParams
from .specfun import digamma, trigamma

# shape solutions are searched inside this bracket; outside it the data is
# numerically degenerate for the gamma family
_ALPHA_LO = 1e-6
_ALPHA_HI = 1e6

_DEGENERACY_FLOOR = 1e-12


class EstimatorKind(enum.Enum):
    MLE = "mle"
    POSTERIOR_MEAN = "posterior_mean"


class DegenerateDataError(ValueError):
    """Raised when the gamma MLE does not exist (zero log-dispersion)."""


def _shape_start(s: float) -> float:
    # moment-style initializer, accurate within a few percent
    return (3.0 - s + math.sqrt((s - 3.0) ** 2 + 24.0 * s)) / (12.0 * s)


def gamma_mle(d: Dataset) -> GammaParams:
    """Maximum likelihood fit of Gamma(alpha, beta).

    Solves log(alpha) - psi(alpha) = log(mean y) - mean(log y) for the shape
    by safeguarded Newton iteration, then sets beta = alpha / mean(y).
    """
    if d.n < 2:
        raise ValueError("gamma MLE requires n >= 2")
    y = d.observations
    mean_y = float(y.mean())
    mean_log = float(np.log(y).mean())
    s = math.log(mean_y) - mean_log
    if s <= _DEGENERACY_FLOOR:
        raise DegenerateDataError(
            f"sample log-dispersion {s:.3e} at the machine-noise floor; shape estimate diverges"
        )
    alpha = min(max(_shape_start(s), _ALPHA_LO), _ALPHA_HI)
    lo, hi = _ALPHA_LO, _ALPHA_HI
    for _ in range(100):
        f = math.log(alpha) - digamma(alpha) - s
        if f > 0.0:
            lo = max(lo, alpha)  # f is strictly decreasing, root is to the right
        else:
            hi = min(hi, alpha)
        fp = 1.0 / alpha - trigamma(alpha)
        nxt = alpha - f / fp
        if not lo < nxt < hi:
            nxt = 0.5 * (lo + hi)
        if abs(nxt - alpha) <= 1e-13 * max(1.0, alpha):
            alpha = nxt
            break
        alpha = nxt
    return GammaParams(alpha, alpha / mean_y)


def posterior_mean(chain) -> GammaParams:
    """Componentwise mean of the retained draws on the (alpha, beta) scale."""
    draws = np.asarray(chain.draws, dtype=float)
    if draws.size == 0:
        raise ValueError("chain has no retained draws")
    mean = draws.mean(axis=0)
    return GammaParams(float(mean[0]), float(mean[1]))
