"""Independent oracles used by the test suite.

Everything here is deliberately implemented from first principles (stdlib
math, quadrature, grid search, brute-force enumeration) rather than calling
back into the package, so agreement is evidence and not tautology.
"""

import math

import numpy as np


def oracle_gamma_cdf(alpha: float, beta: float, y: float, steps: int = 200001) -> float:
    """Gamma CDF by composite Simpson quadrature of the density."""
    if y <= 0.0:
        return 0.0
    # integrate exp((a-1) ln t - b t) on [0, y]; substitute t = y u to keep
    # the panel count fixed regardless of scale
    u = np.linspace(0.0, 1.0, steps)
    # substitute t = y u^p with integer p chosen so u^(p*alpha - 1) has at
    # least four bounded derivatives at 0; Simpson then converges at full rate
    p = max(1, math.ceil(5.0 / alpha))
    with np.errstate(divide="ignore"):
        logf = (p * alpha - 1.0) * np.log(
            u, where=u > 0, out=np.full_like(u, -np.inf)
        ) - beta * y * u**p
    f = np.exp(logf)
    log_scale = alpha * math.log(beta * y) + math.log(p) - math.lgamma(alpha)
    w = np.ones(steps)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    val = float((w * f).sum()) * (1.0 / (steps - 1)) / 3.0 * math.exp(log_scale)
    return min(max(val, 0.0), 1.0)


def oracle_gamma_mle_shape(y: np.ndarray, rel_window: float = 0.03) -> float:
    """Profile log-likelihood grid search for the gamma shape."""
    n = y.size
    slog = float(np.log(y).sum())
    ybar = float(y.mean())
    grid = np.exp(np.linspace(math.log(1e-3), math.log(1e3), 4001))
    best = grid[0]
    for _ in range(4):
        lg = np.array([math.lgamma(a) for a in grid])
        ll = n * (grid * np.log(grid / ybar) - lg) + (grid - 1.0) * slog - n * grid
        best = float(grid[int(np.argmax(ll))])
        grid = np.linspace(best * (1.0 - rel_window), best * (1.0 + rel_window), 4001)
        rel_window /= 10.0
    return best


def oracle_ks_sup(y: np.ndarray, cdf, extra_grid_points: int = 100001) -> float:
    """Dense-grid search for sqrt(n) * sup |F_n - F|, data points included."""
    y = np.sort(np.asarray(y, dtype=float))
    n = y.size
    grid = np.unique(np.concatenate([np.linspace(0.0, float(y[-1]) * 1.5, extra_grid_points), y]))
    f = np.asarray(cdf(grid), dtype=float)
    right = np.searchsorted(y, grid, side="right") / n
    left = np.searchsorted(y, grid, side="left") / n
    return math.sqrt(n) * max(float(np.abs(right - f).max()), float(np.abs(left - f).max()))


def oracle_posterior_mean_quadrature(
    y: np.ndarray,
    alpha_mean: float,
    alpha_var: float,
    beta_shape: float,
    beta_rate: float,
    grid_lo: float = 0.05,
    grid_hi: float = 15.0,
    points: int = 600,
):
    """Posterior mean of (alpha, beta) for the gamma likelihood with a
    truncated-normal-by-gamma prior, by 2-D Riemann quadrature."""
    grid = np.linspace(grid_lo, grid_hi, points)
    a, b = np.meshgrid(grid, grid, indexing="ij")
    n = y.size
    slog = float(np.log(y).sum())
    sy = float(y.sum())
    lg = np.array([math.lgamma(t) for t in grid])[:, None]
    lp = n * (a * np.log(b) - lg) + (a - 1.0) * slog - b * sy
    sd = math.sqrt(alpha_var)
    lp += -0.5 * ((a - alpha_mean) / sd) ** 2
    lp += (beta_shape - 1.0) * np.log(b) - beta_rate * b
    w = np.exp(lp - lp.max())
    total = w.sum()
    return float((a * w).sum() / total), float((b * w).sum() / total)


def oracle_two_sample_ks(a: np.ndarray, b: np.ndarray) -> float:
    """Brute-force sup over all pooled evaluation points."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    best = 0.0
    for t in np.concatenate([a, b]):
        fa = float(np.count_nonzero(a <= t)) / a.size
        fb = float(np.count_nonzero(b <= t)) / b.size
        best = max(best, abs(fa - fb))
    return best


def oracle_uniform_ks(values: np.ndarray) -> float:
    """Brute-force sup distance of an empirical CDF to Uniform(0,1)."""
    v = np.asarray(values, dtype=float)
    n = v.size
    best = 0.0
    for t in np.concatenate([v, [0.0, 1.0]]):
        emp_right = float(np.count_nonzero(v <= t)) / n
        emp_left = float(np.count_nonzero(v < t)) / n
        best = max(best, abs(emp_right - t), abs(emp_left - t))
    return best


def truncated_normal_log_pdf(mean: float, var: float, x: float) -> float:
    """Log density of N(mean, var) truncated to (0, inf), from stdlib erfc."""
    sd = math.sqrt(var)
    log_norm = -0.5 * math.log(2.0 * math.pi * var) - 0.5 * ((x - mean) / sd) ** 2
    upper_mass = 0.5 * math.erfc(-(mean / sd) / math.sqrt(2.0))
    return log_norm - math.log(upper_mass)


def gamma_log_pdf_ref(shape: float, rate: float, x: float) -> float:
    return (
        shape * math.log(rate)
        - math.lgamma(shape)
        + (shape - 1.0) * math.log(x)
        - rate * x
    )
