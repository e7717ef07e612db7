"""Weight statistics, fluctuation variables, theorem constants and the
estimators used to check them empirically."""
from dataclasses import asdict, dataclass
from math import exp, sqrt

import numpy as np
from scipy import stats as sps

from .continuum import GridFunction, cell_index
from .errors import ParameterError
from .graph import make_nodes_random, sample_rows, trial_seed


# ---------------------------------------------------------------------------
# weight statistics
# ---------------------------------------------------------------------------

def _xi(xi):
    return np.asarray(getattr(xi, "xi", xi), float)


def alpha_N(xi):
    """Root mean square weight ``((1/N^2) sum_ij xi_ij^2)^(1/2)``."""
    xi = _xi(xi)
    return float(np.sqrt(np.mean(xi * xi)))


def gamma_N(xi):
    """Largest row mean ``max_i (1/N) sum_j xi_ij``."""
    return float(np.max(np.mean(_xi(xi), axis=1)))


# ---------------------------------------------------------------------------
# fluctuation variables
# ---------------------------------------------------------------------------

def _kernel_integral(law, D, x, ux, u_ref):
    """Rectangle-rule ``int_0^1 wbar(x, y) D(u(y) - u(x)) dy`` on the grid of
    ``u_ref``, one value per entry of ``x``."""
    y = u_ref.midpoints
    return (law.mean(x[:, None], y[None, :])
            * D(u_ref.values[None, :] - ux[:, None])).sum(axis=1) / u_ref.m


def z_vector(xi, nodes, u_ref, law, D, rows=None):
    """``Z_i = (1/N) sum_j xi_ij D(u(X_j) - u(X_i)) - int wbar(X_i, y) D(u(y) - u(X_i)) dy``.

    ``xi`` may hold only the requested ``rows`` (shape ``(len(rows), N)``).
    """
    x = nodes.coords
    n = len(x)
    rows = np.arange(n) if rows is None else np.asarray(rows)
    xi = _xi(xi)
    u_nodes = u_ref.values[cell_index(x, u_ref.m)]
    ux = u_nodes[rows]
    empirical = (xi * D(u_nodes[None, :] - ux[:, None])).sum(axis=1) / n
    return empirical - _kernel_integral(law, D, x[rows], ux, u_ref)


def _pair_sums(law, u_ref, D, weight, chunk=256):
    """Double rectangle rule ``(1/m^2) sum_ab weight(y_a, y_b) D(u_b - u_a)^2``
    together with the row integrals ``(1/m) sum_b wbar(y_a, y_b) D(u_b - u_a)``."""
    y, u, m = u_ref.midpoints, u_ref.values, u_ref.m
    double, rows = 0.0, np.empty(m)
    for s in range(0, m, chunk):
        e = min(s + chunk, m)
        d = D(u[None, :] - u[s:e, None])
        double += float((weight(y[s:e, None], y[None, :]) * d * d).sum())
        rows[s:e] = (law.mean(y[s:e, None], y[None, :]) * d).sum(axis=1) / m
    return double / (m * m), rows


def sigma_Y_squared(law, u_ref, D):
    """Variance of ``Y_i = sqrt(N) Z_i`` with the second moment of the law
    inside the double integral:

        iint E[w^2](x, y) D(u(y) - u(x))^2 - int (int wbar D dy)^2 dx
    """
    double, rows = _pair_sums(law, u_ref, D, lambda a, b: law.moment(a, b, 2))
    return max(double - float(np.mean(rows * rows)), 0.0)


def sigma_Y_squared_first_moment(law, u_ref, D):
    """Same expression with ``wbar`` in place of the second moment. Coincides
    with :func:`sigma_Y_squared` only for 0/1-valued weights."""
    double, rows = _pair_sums(law, u_ref, D, law.mean)
    return double - float(np.mean(rows * rows))


def sigma_i_squared_rd(law, nodes, v, D):
    """Per-node variance of ``sqrt(N) * Ztilde_i`` for deterministic nodes:
    ``(1/N) sum_j D(v_j - v_i)^2 Var(xi_ij)``."""
    x = nodes.coords
    f = D(v[None, :] - v[:, None])
    return (f * f * law.variance(x[:, None], x[None, :])).mean(axis=1)


@dataclass
class YMomentReport:
    sigma2: float
    trials: int
    m2_ratio: float          # E[Y^2] / sigma^2
    m2_se: float
    m4_ratio: float          # E[Y^4] / (3 sigma^4)
    m4_se: float
    degenerate: bool

    def as_dict(self):
        return asdict(self)


def y_moment_check(law, nodes_seed, u_ref, D, trials, n, row=0):
    """Monte Carlo moments of ``Y_row`` over independent draws of nodes and
    weights, normalised by ``sigma_Y^2`` and ``3 sigma_Y^4``."""
    if trials < 100:
        raise ParameterError("need at least 100 trials")
    sigma2 = sigma_Y_squared(law, u_ref, D)
    ys = np.empty(trials)
    for t in range(trials):
        seed = trial_seed(nodes_seed, n, t)
        nodes = make_nodes_random(n, seed)
        xi = sample_rows(law, nodes, seed, 0, [row])
        ys[t] = sqrt(n) * z_vector(xi, nodes, u_ref, law, D, rows=[row])[0]
    return _moment_report(ys, sigma2, trials)


def _moment_report(ys, sigma2, trials):
    if sigma2 < 1e-12:
        return YMomentReport(sigma2, trials, float("nan"), float("nan"),
                             float("nan"), float("nan"), True)
    y2, y4 = ys ** 2, ys ** 4
    root = sqrt(trials)
    return YMomentReport(
        sigma2, trials,
        float(y2.mean() / sigma2), float(y2.std(ddof=1) / root / sigma2),
        float(y4.mean() / (3 * sigma2 ** 2)),
        float(y4.std(ddof=1) / root / (3 * sigma2 ** 2)),
        False)


# ---------------------------------------------------------------------------
# theorem constants
# ---------------------------------------------------------------------------

@dataclass
class TheoremConstants:
    K: float
    L: float
    M: float
    T: float
    H_g: float
    L_G: float
    C1: float          # static random graph, random nodes
    C1tilde: float
    C3: float          # blinking graph
    C3tilde: float
    c4: float          # averaged system vs limit
    C2: float          # static random graph, deterministic nodes
    C2tilde: float

    def as_dict(self):
        return asdict(self)


def _safe_exp(x):
    return exp(x) if x < 700 else float("inf")


def theorem_constants(K, L, M, T, H_g, H_wbar):
    for name, v in (("K", K), ("L", L), ("M", M), ("T", T)):
        if not v > 0:
            raise ParameterError(f"{name} must be positive, got {v!r}")
    for name, v in (("H_g", H_g), ("H_wbar", H_wbar)):
        if not v >= 0:
            raise ParameterError(f"{name} must be nonnegative, got {v!r}")
    c1 = M * M * K * K
    growth = _safe_exp((0.5 + 4 * M * L) * T)
    C1 = sqrt(T) * sqrt(1 + c1) * growth
    C1t = 3 * c1 * c1 + 6
    a = 4 * M * L
    C3 = sqrt(1 + c1) * growth * (_safe_exp(a * T) - 1) / a
    C3t = (12 + 3 * c1 * c1) * T
    L_G = max(H_wbar, L)
    c4 = 2 * (1 + H_g) * _safe_exp(2 * T * L_G)
    C2 = max(2 * c4, 2 * C1)
    return TheoremConstants(K, L, M, T, H_g, L_G, C1, C1t, C3, C3t, c4, C2, C1t)


def averaged_limit_bound(n, t, H_g, L_G, alpha=0.5):
    """Sup-norm bound ``2 N^-alpha (1 + H(g)) exp(2 t L_G)`` between the
    averaged system on mid-cell nodes and the limit."""
    return 2.0 / n ** alpha * (1 + H_g) * _safe_exp(2 * t * L_G)


def holder_half_constant(f, grid=41):
    """Grid estimate of the 1/2-Holder constant of ``f`` on [0, 1]^2 (max norm)."""
    g = np.linspace(0.0, 1.0, grid)
    X, Y = np.meshgrid(g, g, indexing="ij")
    p = np.column_stack([X.ravel(), Y.ravel()])
    v = np.asarray(f(p[:, 0], p[:, 1]), float)
    best = 0.0
    for i in range(len(p) - 1):
        d = np.max(np.abs(p[i + 1:] - p[i]), axis=1)
        best = max(best, float(np.max(np.abs(v[i + 1:] - v[i]) / np.sqrt(d))))
    return best


# ---------------------------------------------------------------------------
# tails and rates
# ---------------------------------------------------------------------------

@dataclass
class TailReport:
    statistic: str
    threshold: float
    trials: int
    exceed_count: int
    empirical_rate: float
    upper_ci: float
    theory_bound: float | None = None
    n: int | None = None

    def as_dict(self):
        return asdict(self)


def binomial_upper(k, n, level=0.95):
    """One-sided exact (Clopper-Pearson) upper confidence bound."""
    return 1.0 if k >= n else float(sps.beta.ppf(level, k + 1, n - k))


def binomial_lower(k, n, level=0.95):
    return 0.0 if k <= 0 else float(sps.beta.ppf(1 - level, k, n - k + 1))


def tail_frequency(sampler, threshold, trials, statistic="", theory_bound=None, n=None):
    """Count how often ``sampler(t) >= threshold`` over ``t = 0..trials-1``."""
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    exceed = sum(1 for t in range(trials) if sampler(t) >= threshold)
    return TailReport(statistic, float(threshold), trials, exceed, exceed / trials,
                      binomial_upper(exceed, trials), theory_bound, n)


def fit_loglog_slope(sizes, errors):
    """Least-squares line through ``(log N, log error)``: ``(slope, intercept, r2)``."""
    sizes = np.asarray(sizes, float)
    errors = np.asarray(errors, float)
    if len(sizes) < 3 or len(sizes) != len(errors):
        raise ParameterError("need at least 3 (size, error) pairs")
    if np.any(errors <= 0) or np.any(sizes <= 0):
        raise ParameterError("sizes and errors must be positive")
    fit = sps.linregress(np.log(sizes), np.log(errors))
    r2 = fit.rvalue ** 2 if np.isfinite(fit.rvalue) else 1.0
    return float(fit.slope), float(fit.intercept), float(r2)


__all__ = [
    "GridFunction", "alpha_N", "gamma_N", "z_vector", "sigma_Y_squared",
    "sigma_Y_squared_first_moment", "sigma_i_squared_rd", "y_moment_check",
    "YMomentReport", "TheoremConstants", "theorem_constants",
    "averaged_limit_bound", "holder_half_constant", "TailReport",
    "binomial_upper", "binomial_lower", "tail_frequency", "fit_loglog_slope",
]
