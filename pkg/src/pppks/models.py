"""Parametric families for the null model and its alternatives, the priors
on (alpha, beta), and the gamma family's score / Fisher information."""

import math
from dataclasses import dataclass, field

import numpy as np

from . import specfun

_LOG_2PI = math.log(2.0 * math.pi)

GAMMA = "gamma"
WEIBULL = "weibull"
LOGNORMAL = "lognormal"
GAMMA_GLM = "gamma_glm"

_FAMILIES = {
    GAMMA: ("alpha", "beta"),
    WEIBULL: ("shape", "scale"),
    LOGNORMAL: ("mu", "sigma"),
    GAMMA_GLM: ("alpha", "beta", "theta"),
}


@dataclass(frozen=True)
class GammaParams:
    """Shape-rate parameterization; density beta^alpha y^(alpha-1) e^(-beta y) / Gamma(alpha)."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha > 0.0):
            raise ValueError("alpha must be finite and > 0")
        if not (math.isfinite(self.beta) and self.beta > 0.0):
            raise ValueError("beta must be finite and > 0")


@dataclass(frozen=True)
class PriorSpec:
    """Independent priors: truncated normal on alpha (lower 0), gamma on beta."""

    alpha_mean: float
    alpha_var: float
    beta_shape: float
    beta_rate: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha_var) and self.alpha_var > 0.0):
            raise ValueError("alpha_var must be finite and > 0")
        if not math.isfinite(self.alpha_mean):
            raise ValueError("alpha_mean must be finite")
        if not (math.isfinite(self.beta_shape) and self.beta_shape > 0.0):
            raise ValueError("beta_shape must be finite and > 0")
        if not (math.isfinite(self.beta_rate) and self.beta_rate > 0.0):
            raise ValueError("beta_rate must be finite and > 0")


def good_priors() -> PriorSpec:
    return PriorSpec(alpha_mean=2.5, alpha_var=16.0, beta_shape=1.0, beta_rate=1.0)


def bad_priors() -> PriorSpec:
    return PriorSpec(alpha_mean=1.0, alpha_var=0.5, beta_shape=3.0, beta_rate=1.25)


class Dataset:
    """Vector of positive real observations."""

    __slots__ = ("observations",)

    def __init__(self, observations):
        obs = np.ascontiguousarray(observations, dtype=float)
        if obs.ndim != 1 or obs.size < 1:
            raise ValueError("observations must be a non-empty 1-D vector")
        if not np.all(np.isfinite(obs)) or np.any(obs <= 0.0):
            raise ValueError("observations must be finite and > 0")
        obs.flags.writeable = False
        self.observations = obs

    @property
    def n(self) -> int:
        return self.observations.size

    def __repr__(self):
        return f"Dataset(n={self.n})"


@dataclass(frozen=True, eq=False)
class ModelSpec:
    """A data-generating family with concrete parameter values.

    GammaGLM additionally carries a fixed covariate vector; its length must
    match the dataset size it generates.
    """

    family: str
    params: dict = field(default_factory=dict)
    covariates: np.ndarray | None = None

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        required = _FAMILIES[self.family]
        missing = [k for k in required if k not in self.params]
        if missing:
            raise ValueError(f"{self.family} is missing parameters {missing}")
        for key in required:
            v = float(self.params[key])
            if not math.isfinite(v):
                raise ValueError(f"parameter {key} must be finite")
            if key != "mu" and v <= 0.0:
                raise ValueError(f"parameter {key} must be > 0")
        if self.family == GAMMA_GLM:
            if self.covariates is None:
                raise ValueError("gamma_glm requires a covariate vector")
            x = np.ascontiguousarray(self.covariates, dtype=float)
            if x.ndim != 1 or x.size < 1 or not np.all(np.isfinite(x)) or np.any(x <= 0.0):
                raise ValueError("covariates must be a 1-D vector of positive reals")
            x.flags.writeable = False
            object.__setattr__(self, "covariates", x)
        elif self.covariates is not None:
            raise ValueError("covariates are only valid for gamma_glm")

    @staticmethod
    def gamma(alpha: float, beta: float) -> "ModelSpec":
        return ModelSpec(GAMMA, {"alpha": alpha, "beta": beta})

    @staticmethod
    def weibull(shape: float, scale: float) -> "ModelSpec":
        return ModelSpec(WEIBULL, {"shape": shape, "scale": scale})

    @staticmethod
    def lognormal(mu: float, sigma: float) -> "ModelSpec":
        return ModelSpec(LOGNORMAL, {"mu": mu, "sigma": sigma})

    @staticmethod
    def gamma_glm(alpha: float, beta: float, theta: float, covariates) -> "ModelSpec":
        return ModelSpec(GAMMA_GLM, {"alpha": alpha, "beta": beta, "theta": theta}, covariates)


def glm_rates(m: ModelSpec) -> np.ndarray:
    """Per-observation gamma rates alpha / (x_i theta + alpha / beta)."""
    a = m.params["alpha"]
    b = m.params["beta"]
    t = m.params["theta"]
    return a / (m.covariates * t + a / b)


def gamma_log_pdf(p: GammaParams, y):
    """Log density of Gamma(alpha, beta) at y > 0 (scalar or array)."""
    yv = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(yv)) or np.any(yv <= 0.0):
        raise ValueError("y must be finite and > 0")
    out = (
        p.alpha * math.log(p.beta)
        - specfun.log_gamma(p.alpha)
        + (p.alpha - 1.0) * np.log(yv)
        - p.beta * yv
    )
    return float(out) if np.ndim(y) == 0 else out


def gamma_cdf(p: GammaParams, y):
    """Gamma CDF via the regularized lower incomplete gamma function."""
    yv = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(yv)) or np.any(yv < 0.0):
        raise ValueError("y must be finite and >= 0")
    return reg_gamma_cdf(p.alpha, p.beta, y)


def reg_gamma_cdf(alpha: float, beta: float, y):
    return specfun.reg_lower_incomplete_gamma(alpha, np.multiply(beta, y))


def weibull_cdf(shape: float, scale: float, y):
    yv = np.asarray(y, dtype=float)
    out = -np.expm1(-((np.maximum(yv, 0.0) / scale) ** shape))
    return float(out) if np.ndim(y) == 0 else out


def lognormal_cdf(mu: float, sigma: float, y):
    yv = np.asarray(y, dtype=float)
    out = np.where(yv > 0.0, specfun.normal_cdf((np.log(np.maximum(yv, 1e-300)) - mu) / sigma), 0.0)
    return float(out) if np.ndim(y) == 0 else out


def model_cdf(m: ModelSpec, i: int, y):
    """CDF of observation i under the model; i matters only for gamma_glm."""
    if m.family == GAMMA:
        return reg_gamma_cdf(m.params["alpha"], m.params["beta"], y)
    if m.family == WEIBULL:
        return weibull_cdf(m.params["shape"], m.params["scale"], y)
    if m.family == LOGNORMAL:
        return lognormal_cdf(m.params["mu"], m.params["sigma"], y)
    rates = glm_rates(m)
    if not 0 <= i < rates.size:
        raise IndexError(f"observation index {i} out of range for {rates.size} covariates")
    return reg_gamma_cdf(m.params["alpha"], rates[i], y)


def sample_dataset(m: ModelSpec, n: int, rng: np.random.Generator) -> Dataset:
    """Draw n independent observations from the model."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if m.family == GAMMA:
        y = rng.gamma(shape=m.params["alpha"], scale=1.0 / m.params["beta"], size=n)
    elif m.family == WEIBULL:
        y = m.params["scale"] * rng.weibull(m.params["shape"], size=n)
    elif m.family == LOGNORMAL:
        y = rng.lognormal(mean=m.params["mu"], sigma=m.params["sigma"], size=n)
    else:
        rates = glm_rates(m)
        if rates.size != n:
            raise ValueError(f"gamma_glm has {rates.size} covariates but n={n}")
        y = rng.gamma(shape=m.params["alpha"], scale=1.0 / rates, size=n)
    # zero draws have probability ~0 but would violate the Dataset invariant
    y = np.maximum(y, 1e-300)
    return Dataset(y)


def gamma_score(p: GammaParams, y: float) -> np.ndarray:
    """Score vector (d/dalpha, d/dbeta) of the gamma log density at y."""
    yf = float(y)
    if not math.isfinite(yf) or yf <= 0.0:
        raise ValueError("y must be finite and > 0")
    return np.array(
        [
            math.log(p.beta) - specfun.digamma(p.alpha) + math.log(yf),
            p.alpha / p.beta - yf,
        ]
    )


def gamma_fisher_info(p: GammaParams) -> np.ndarray:
    """Fisher information of Gamma(alpha, beta), E[s s^T]."""
    return np.array(
        [
            [specfun.trigamma(p.alpha), -1.0 / p.beta],
            [-1.0 / p.beta, p.alpha / p.beta**2],
        ]
    )


def _trunc_normal_log_const(pr: PriorSpec) -> float:
    # log of the normal mass above 0, i.e. log Phi(mean / sd)
    sd = math.sqrt(pr.alpha_var)
    return math.log(specfun.normal_cdf(pr.alpha_mean / sd))


def prior_log_pdf(pr: PriorSpec, p) -> float:
    """Joint log prior density at (alpha, beta); -inf off the support."""
    alpha, beta = (p.alpha, p.beta) if isinstance(p, GammaParams) else (float(p[0]), float(p[1]))
    if not (alpha > 0.0 and beta > 0.0) or not (math.isfinite(alpha) and math.isfinite(beta)):
        return -math.inf
    sd = math.sqrt(pr.alpha_var)
    z = (alpha - pr.alpha_mean) / sd
    lp_alpha = -0.5 * z * z - math.log(sd) - 0.5 * _LOG_2PI - _trunc_normal_log_const(pr)
    k, r = pr.beta_shape, pr.beta_rate
    lp_beta = k * math.log(r) - specfun.log_gamma(k) + (k - 1.0) * math.log(beta) - r * beta
    return lp_alpha + lp_beta


def prior_means(pr: PriorSpec) -> GammaParams:
    """Means of the truncated-normal and gamma priors."""
    sd = math.sqrt(pr.alpha_var)
    z = pr.alpha_mean / sd
    phi = math.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)
    alpha_mean = pr.alpha_mean + sd * phi / specfun.normal_cdf(z)
    return GammaParams(alpha_mean, pr.beta_shape / pr.beta_rate)


def sample_prior(pr: PriorSpec, rng: np.random.Generator) -> GammaParams:
    """One draw from the prior; alpha by rejection from the untruncated normal."""
    sd = math.sqrt(pr.alpha_var)
    while True:
        alpha = rng.normal(pr.alpha_mean, sd)
        if alpha > 0.0:
            break
    beta = rng.gamma(shape=pr.beta_shape, scale=1.0 / pr.beta_rate)
    return GammaParams(alpha, max(beta, 1e-300))


def cdf_param_grad_fd(p: GammaParams, y: float, h: float = 1e-5) -> np.ndarray:
    """Central finite-difference gradient of the gamma CDF in (alpha, beta)."""
    if h <= 0.0 or p.alpha - h <= 0.0 or p.beta - h <= 0.0:
        raise ValueError("step h must keep both evaluation points in the domain")
    da = (
        reg_gamma_cdf(p.alpha + h, p.beta, y) - reg_gamma_cdf(p.alpha - h, p.beta, y)
    ) / (2.0 * h)
    db = (
        reg_gamma_cdf(p.alpha, p.beta + h, y) - reg_gamma_cdf(p.alpha, p.beta - h, y)
    ) / (2.0 * h)
    return np.array([da, db])
