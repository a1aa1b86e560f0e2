"""Adaptive random-walk Metropolis sampler for (alpha, beta) under the gamma
likelihood, run on log parameters.

The proposal is isotropic normal in u = (log alpha, log beta) and targets the
unnormalized log posterior plus the log Jacobian u1 + u2. Step-size adaptation
(Robbins-Monro toward a target acceptance rate) runs during burn-in only, so
the post-burn-in kernel is a fixed Metropolis kernel.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .estimation import DegenerateDataError, gamma_mle
from .models import Dataset, GammaParams, PriorSpec, prior_log_pdf, prior_means

_LOG_2PI = math.log(2.0 * math.pi)
_U_BOUND = 600.0  # |log parameter| beyond this is treated as off-support


class ChainInitError(RuntimeError):
    """Raised when the log posterior is not finite at the starting point."""


@dataclass(frozen=True)
class McmcSettings:
    burn_in: int = 1000
    iterations: int = 5000
    thin: int = 5
    initial_step: float = 0.5
    adapt: bool = True
    target_acceptance: float = 0.3

    def __post_init__(self):
        if self.burn_in < 0 or self.iterations < 1 or self.thin < 1:
            raise ValueError("burn_in >= 0, iterations >= 1, thin >= 1 required")
        if self.iterations // self.thin < 1:
            raise ValueError("retained draw count floor(iterations / thin) must be >= 1")
        if not self.initial_step > 0.0:
            raise ValueError("initial_step must be > 0")
        if not 0.0 < self.target_acceptance < 1.0:
            raise ValueError("target_acceptance must be in (0, 1)")

    @property
    def retained(self) -> int:
        return self.iterations // self.thin


@dataclass(frozen=True, eq=False)
class ChainOutput:
    draws: np.ndarray  # (retained, 2) columns alpha, beta
    acceptance_rate: float
    settings_used: McmcSettings


def log_posterior(d: Dataset, pr, p) -> float:
    """Unnormalized log posterior at p; -inf off-support, never an exception.

    p may be a GammaParams or any (alpha, beta) pair. pr=None drops the prior
    term (flat surrogate), leaving the pure log likelihood.
    """
    alpha, beta = (p.alpha, p.beta) if isinstance(p, GammaParams) else (float(p[0]), float(p[1]))
    if not (math.isfinite(alpha) and math.isfinite(beta) and alpha > 0.0 and beta > 0.0):
        return -math.inf
    y = d.observations
    ll = (
        d.n * (alpha * math.log(beta) - specfun.log_gamma(alpha))
        + (alpha - 1.0) * float(np.log(y).sum())
        - beta * float(y.sum())
    )
    if pr is None:
        return ll
    return ll + prior_log_pdf(pr, (alpha, beta))


def _prior_constants(pr: PriorSpec):
    sd = math.sqrt(pr.alpha_var)
    c_alpha = -math.log(sd) - 0.5 * _LOG_2PI - math.log(specfun.normal_cdf(pr.alpha_mean / sd))
    c_beta = pr.beta_shape * math.log(pr.beta_rate) - specfun.log_gamma(pr.beta_shape)
    return pr.alpha_mean, sd, c_alpha, pr.beta_shape, pr.beta_rate, c_beta


def _scalar_target(n, slog, sy, pr):
    lgam = specfun._log_gamma_s
    exp = math.exp
    if pr is None:
        def target(u1, u2):
            if abs(u1) > _U_BOUND or abs(u2) > _U_BOUND:
                return -math.inf
            a = exp(u1)
            return n * (a * u2 - lgam(a)) + (a - 1.0) * slog - exp(u2) * sy + u1 + u2
        return target
    m, sd, c_alpha, k, r, c_beta = _prior_constants(pr)
    def target(u1, u2):
        if abs(u1) > _U_BOUND or abs(u2) > _U_BOUND:
            return -math.inf
        a = exp(u1)
        b = exp(u2)
        z = (a - m) / sd
        return (
            n * (a * u2 - lgam(a))
            + (a - 1.0) * slog
            - b * sy
            + u1
            + u2
            - 0.5 * z * z
            + c_alpha
            + (k - 1.0) * u2
            - r * b
            + c_beta
        )
    return target


def _initial_point(d: Dataset, pr) -> tuple[float, float]:
    try:
        p = gamma_mle(d)
    except (DegenerateDataError, ValueError):
        p = prior_means(pr) if pr is not None else GammaParams(1.0, 1.0)
    return math.log(p.alpha), math.log(p.beta)


def run_chain(d: Dataset, pr, s: McmcSettings, rng: np.random.Generator) -> ChainOutput:
    """Run one adaptive random-walk Metropolis chain on the posterior of
    (alpha, beta) given the dataset. Deterministic given (d, pr, s, rng state)."""
    y = d.observations
    target = _scalar_target(d.n, float(np.log(y).sum()), float(y.sum()), pr)
    u1, u2 = _initial_point(d, pr)
    lp = target(u1, u2)
    if not math.isfinite(lp):
        raise ChainInitError("log posterior is not finite at the chain starting point")

    total = s.burn_in + s.iterations
    z = rng.standard_normal((total, 2))
    logu = np.log(rng.random(total))
    draws = np.empty((s.retained, 2))
    step = s.initial_step
    burn_in, thin, adapt, tacc = s.burn_in, s.thin, s.adapt, s.target_acceptance
    exp = math.exp
    accepted = 0
    kept = 0
    for t in range(total):
        v1 = u1 + step * z[t, 0]
        v2 = u2 + step * z[t, 1]
        lp_new = target(v1, v2)
        dlp = lp_new - lp
        if dlp >= 0.0 or logu[t] < dlp:
            u1, u2, lp = v1, v2, lp_new
            acc = True
        else:
            acc = False
        if t < burn_in:
            if adapt:
                a_prob = 1.0 if dlp >= 0.0 else exp(dlp)
                step *= exp((t + 1.0) ** -0.6 * (a_prob - tacc))
        else:
            if acc:
                accepted += 1
            if (t - burn_in + 1) % thin == 0 and kept < draws.shape[0]:
                draws[kept, 0] = exp(u1)
                draws[kept, 1] = exp(u2)
                kept += 1
    return ChainOutput(draws=draws, acceptance_rate=accepted / s.iterations, settings_used=s)


def _batch_target_terms(pr):
    if pr is None:
        return None
    return _prior_constants(pr)


def _batch_target(n, slog, sy, pr, u1, u2):
    # vectorized counterpart of _scalar_target over chain index
    with np.errstate(over="ignore", invalid="ignore"):
        a = np.exp(u1)
        b = np.exp(u2)
        val = n * (a * u2 - specfun._log_gamma_vec(a)) + (a - 1.0) * slog - b * sy + u1 + u2
        if pr is not None:
            m, sd, c_alpha, k, r, c_beta = pr
            z = (a - m) / sd
            val += -0.5 * z * z + c_alpha + (k - 1.0) * u2 - r * b + c_beta
    bad = ~np.isfinite(val) | (np.abs(u1) > _U_BOUND) | (np.abs(u2) > _U_BOUND)
    val[bad] = -np.inf
    return val


def run_chains_batch(
    n: int,
    slog: np.ndarray,
    sy: np.ndarray,
    pr,
    s: McmcSettings,
    rng: np.random.Generator,
    init_u: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Run m independent chains in lockstep, one per row of sufficient stats.

    slog and sy are length-m vectors of sum(log y) and sum(y) for m datasets
    that share a common size n; init_u is (m, 2) in log-parameter space.
    Returns (draws with shape (m, retained, 2), acceptance rates of length m).
    """
    slog = np.asarray(slog, dtype=float)
    sy = np.asarray(sy, dtype=float)
    m = slog.size
    prc = _batch_target_terms(pr)
    u = np.array(init_u, dtype=float).reshape(m, 2)
    u1 = u[:, 0].copy()
    u2 = u[:, 1].copy()
    lp = _batch_target(n, slog, sy, prc, u1, u2)
    if not np.all(np.isfinite(lp)):
        raise ChainInitError("log posterior is not finite at a batch starting point")

    total = s.burn_in + s.iterations
    draws = np.empty((m, s.retained, 2))
    step = np.full(m, s.initial_step)
    accepted = np.zeros(m, dtype=np.int64)
    kept = 0
    for t in range(total):
        z = rng.standard_normal((m, 2))
        logu = np.log(rng.random(m))
        v1 = u1 + step * z[:, 0]
        v2 = u2 + step * z[:, 1]
        lp_new = _batch_target(n, slog, sy, prc, v1, v2)
        dlp = lp_new - lp
        acc = (dlp >= 0.0) | (logu < dlp)
        u1[acc] = v1[acc]
        u2[acc] = v2[acc]
        lp[acc] = lp_new[acc]
        if t < s.burn_in:
            if s.adapt:
                a_prob = np.exp(np.minimum(dlp, 0.0))
                step *= np.exp((t + 1.0) ** -0.6 * (a_prob - s.target_acceptance))
        else:
            accepted += acc
            if (t - s.burn_in + 1) % s.thin == 0 and kept < s.retained:
                draws[:, kept, 0] = np.exp(u1)
                draws[:, kept, 1] = np.exp(u2)
                kept += 1
    return draws, accepted / s.iterations
