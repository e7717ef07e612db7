"""Monte Carlo experiments: convergence sweeps, the averaging limit and the
probability bounds on weight statistics.

Trial ``t`` at size ``N`` always uses the seed ``trial_seed(master, N, t)``,
so changing the size list or the worker count never changes a shared
``(N, t)`` result. Jobs run in a thread pool and are reduced in key order.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from math import exp, sqrt
from pathlib import Path

import numpy as np

from . import config as _config
from .continuum import l2_distance_values, project, refine, solve_graph_limit
from .dynamics import (
    blinking_intervals, integrate_averaged, integrate_blinking, integrate_finite,
    integrate_intermediate, step_count,
)
from .errors import IntegrationError, ParameterError
from .export import fmt, write_csv, write_json
from .graph import make_nodes_deterministic, make_nodes_random, sample_weight_matrix, trial_seed
from .laws import law_moment_bound
from .stats import (
    alpha_N, averaged_limit_bound, binomial_lower, fit_loglog_slope, gamma_N,
    holder_half_constant, tail_frequency, theorem_constants,
)

MODES = ("rr", "rd", "blinking", "averaged")
BLOWUP = 1e12


@dataclass(frozen=True)
class ExperimentConfig:
    law: object
    D: object
    g: object
    T: float = 10.0
    dt: float = 0.01
    mode: str = "rr"
    eps: float | None = None
    n_list: tuple = (25, 50, 100, 200, 400)
    trials: int = 20
    seed: int = 0
    ref_multiplier: int = 16
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "n_list", tuple(int(n) for n in self.n_list))
        if self.mode not in MODES:
            raise ParameterError(f"mode must be one of {MODES}, got {self.mode!r}")
        step_count(self.T, self.dt)
        if self.mode == "blinking":
            if self.eps is None:
                raise ParameterError("blinking mode needs eps")
            blinking_intervals(self.T, self.dt, self.eps)
        if self.trials < 1:
            raise ParameterError("trials must be >= 1")
        if not self.n_list or min(self.n_list) < 1:
            raise ParameterError("n_list must hold positive sizes")
        if self.ref_multiplier < 1 or self.workers < 1:
            raise ParameterError("ref_multiplier and workers must be >= 1")

    @property
    def m_ref(self):
        return self.ref_multiplier * max(self.n_list)

    def to_dict(self):
        return {
            "law": self.law.spec(),
            "interaction": _config.interaction_spec(self.D),
            "initial": self.g.spec(),
            "T": self.T, "dt": self.dt, "mode": self.mode, "eps": self.eps,
            "n_list": list(self.n_list), "trials": self.trials, "seed": self.seed,
            "ref_multiplier": self.ref_multiplier, "workers": self.workers,
        }

    @classmethod
    def from_dict(cls, d):
        law, D, g = _config.parse_model(d)
        keys = ("T", "dt", "mode", "eps", "n_list", "trials", "seed",
                "ref_multiplier", "workers")
        return cls(law, D, g, **{k: d[k] for k in keys if k in d})


# ---------------------------------------------------------------------------
# shared machinery
# ---------------------------------------------------------------------------

@lru_cache(maxsize=4)
def reference_solution(law, g, D, m, T, dt):
    """Limit solution on ``m`` cells, memoised for the life of the process."""
    return solve_graph_limit(law, g, D, m, T, dt)


def _reference(cfg, m=None):
    return reference_solution(cfg.law, cfg.g, cfg.D, m or cfg.m_ref, cfg.T, cfg.dt)


def _run_jobs(fn, jobs, workers):
    if workers <= 1:
        return [fn(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def _sup_norm_2N(states, proj):
    d = states - proj
    return float(np.sqrt(np.mean(d * d, axis=1)).max())


def _sup_l2(states, ref_states, chunk=64):
    return max(float(l2_distance_values(states[s:s + chunk], ref_states[s:s + chunk]).max())
               for s in range(0, len(states), chunk))


def _constants(cfg):
    """Theorem constants for ``cfg``, or ``None`` when an input is degenerate."""
    try:
        M = law_moment_bound(cfg.law)
        H_g = cfg.g.holder if cfg.g.holder is not None else float("nan")
        return theorem_constants(cfg.D.K, cfg.D.L, M, cfg.T, H_g,
                                 holder_half_constant(cfg.law.mean))
    except ParameterError:
        return None


# ---------------------------------------------------------------------------
# convergence sweeps
# ---------------------------------------------------------------------------

@dataclass
class ConvergenceReport:
    mode: str
    n_list: list
    errors: dict                 # N -> per-trial errors, None for excluded trials
    medians: list
    means: list
    excluded: list
    slope: float | None
    intercept: float | None
    r2: float | None
    oracle: bool
    m_ref: int
    eps: float | None
    constants: object = None
    envelope: list = field(default_factory=list)
    exceed_fraction: list = field(default_factory=list)
    exceed_bound: list = field(default_factory=list)
    config: dict = field(default_factory=dict)

    def write(self, out_dir):
        out = Path(out_dir)
        write_json(out / "config.json", self.config)
        write_csv(out / "errors.csv", ["N", "trial", "error"],
                  ([n, t, "excluded" if e is None else e]
                   for n in self.n_list for t, e in enumerate(self.errors[n])))
        write_csv(out / "report.csv",
                  ["N", "median", "mean", "envelope", "exceed_fraction",
                   "exceed_bound", "excluded"],
                  zip(self.n_list, self.medians, self.means, self.envelope,
                      self.exceed_fraction, self.exceed_bound, self.excluded))
        (out / "summary.txt").write_text(self.summary())
        return out

    def summary(self):
        lines = [f"mode: {self.mode}" + (f" (eps={self.eps:g})" if self.eps else ""),
                 f"reference grid: {self.m_ref} cells"]
        if self.oracle:
            lines.append("point-mass law: oracle run, slope fit skipped")
        elif self.slope is not None:
            lines.append(f"log-log slope: {self.slope:.4f} (r2 = {self.r2:.4f}), "
                         "theory -0.5")
        for i, n in enumerate(self.n_list):
            lines.append(f"N={n:6d}  median={self.medians[i]:.6g}  mean={self.means[i]:.6g}"
                         f"  envelope={self.envelope[i]:.3g}"
                         f"  exceed={self.exceed_fraction[i]:.3f}"
                         f" (allowed {self.exceed_bound[i]:.3g})"
                         f"  excluded={self.excluded[i]}")
        if self.constants is not None:
            c = self.constants
            lines.append(f"constants: M={c.M:.6g} K={c.K:g} L={c.L:g} T={c.T:g} "
                         f"C1={c.C1:.4g} C2={c.C2:.4g} C3={c.C3:.4g}")
        return "\n".join(lines) + "\n"


def _trial_error(cfg, ref, n, t):
    s = trial_seed(cfg.seed, n, t)
    args = (cfg.law,)
    try:
        if cfg.mode == "rd":
            nodes = make_nodes_deterministic(n)
            traj = integrate_finite(*args, nodes, cfg.D, cfg.g, cfg.T, cfg.dt, s, BLOWUP)
            return _sup_l2(traj.states, ref.states)
        nodes = make_nodes_random(n, s)
        if cfg.mode == "rr":
            traj = integrate_finite(*args, nodes, cfg.D, cfg.g, cfg.T, cfg.dt, s, BLOWUP)
        elif cfg.mode == "blinking":
            traj = integrate_blinking(*args, nodes, cfg.D, cfg.g, cfg.T, cfg.dt,
                                      cfg.eps, s, BLOWUP)
        else:
            traj = integrate_averaged(*args, nodes, cfg.D, cfg.g, cfg.T, cfg.dt, BLOWUP)
    except IntegrationError:
        return None
    return _sup_norm_2N(traj.states, project(ref.states, nodes))


def _envelope(cfg, consts, n):
    if consts is None:
        return float("nan"), float("nan")
    if cfg.mode == "blinking":
        ne = n * cfg.eps
        return consts.C3 / sqrt(ne), consts.C3tilde / ne
    if cfg.mode == "rd":
        return consts.C2 / sqrt(n), consts.C2tilde / n
    return consts.C1 / sqrt(n), consts.C1tilde / n


def run_sweep(cfg):
    """Error of the finite system against the limit for every ``(N, trial)``."""
    ref = _reference(cfg)
    jobs = [(n, t) for n in cfg.n_list for t in range(cfg.trials)]
    flat = _run_jobs(lambda j: _trial_error(cfg, ref, *j), jobs, cfg.workers)
    errors = {n: flat[i * cfg.trials:(i + 1) * cfg.trials] for i, n in enumerate(cfg.n_list)}
    consts = _constants(cfg)
    medians, means, excluded, env, frac, allowed = [], [], [], [], [], []
    for n in cfg.n_list:
        good = np.array([e for e in errors[n] if e is not None])
        excluded.append(len(errors[n]) - len(good))
        medians.append(float(np.median(good)) if len(good) else float("nan"))
        means.append(float(np.mean(good)) if len(good) else float("nan"))
        e_n, b_n = _envelope(cfg, consts, n)
        env.append(e_n)
        allowed.append(b_n)
        frac.append(float(np.mean(good > e_n)) if len(good) else float("nan"))
    oracle = cfg.law.kind == "delta"
    slope = intercept = r2 = None
    if not oracle and len(cfg.n_list) >= 3 and all(m > 0 for m in medians):
        slope, intercept, r2 = fit_loglog_slope(cfg.n_list, medians)
    return ConvergenceReport(cfg.mode, list(cfg.n_list), errors, medians, means, excluded,
                             slope, intercept, r2, oracle, cfg.m_ref, cfg.eps, consts,
                             env, frac, allowed, cfg.to_dict())


def _require(cfg, mode):
    if cfg.mode != mode:
        raise ParameterError(f"expected a {mode} configuration, got {cfg.mode}")


def run_convergence_rr(cfg):
    """Random nodes, one sampled matrix: sup-time ``||.||_{2,N}`` error
    against the limit projected onto the nodes."""
    _require(cfg, "rr")
    return run_sweep(cfg)


def run_convergence_rd(cfg):
    """Mid-cell nodes, one sampled matrix: sup-time ``L2(I)`` error of the
    piecewise-constant embedding against the limit."""
    _require(cfg, "rd")
    return run_sweep(cfg)


def run_blinking_sweep(cfg):
    """As :func:`run_convergence_rr` with the weights resampled every ``eps``."""
    _require(cfg, "blinking")
    return run_sweep(cfg)


# ---------------------------------------------------------------------------
# averaging limit
# ---------------------------------------------------------------------------

@dataclass
class AveragingReport:
    n: int
    eps_list: list
    distances: dict              # eps -> per-trial sup-time distances
    medians: list
    means: list
    config: dict = field(default_factory=dict)

    @property
    def strictly_decreasing(self):
        return all(b < a for a, b in zip(self.medians, self.medians[1:]))

    def write(self, out_dir):
        out = Path(out_dir)
        write_json(out / "config.json", self.config)
        write_csv(out / "distances.csv", ["eps", "trial", "distance"],
                  ([e, t, d] for e in self.eps_list for t, d in enumerate(self.distances[e])))
        write_csv(out / "report.csv", ["eps", "median", "mean"],
                  zip(self.eps_list, self.medians, self.means))
        lines = [f"N={self.n}: blinking vs averaged, sup-time distance"]
        lines += [f"eps={e:<8g} median={m:.6g} mean={a:.6g}"
                  for e, m, a in zip(self.eps_list, self.medians, self.means)]
        lines.append(f"medians strictly decreasing: {self.strictly_decreasing}")
        (out / "summary.txt").write_text("\n".join(lines) + "\n")
        return out


def run_averaging_sweep(n, eps_list, trials, cfg):
    """Blinking against averaged dynamics on the same node draw, per ``eps``."""
    eps_list = [float(e) for e in eps_list]
    for e in eps_list:
        blinking_intervals(cfg.T, cfg.dt, e)

    def job(t):
        s = trial_seed(cfg.seed, n, t)
        nodes = make_nodes_random(n, s)
        avg = integrate_averaged(cfg.law, nodes, cfg.D, cfg.g, cfg.T, cfg.dt, BLOWUP)
        return [_sup_norm_2N(integrate_blinking(cfg.law, nodes, cfg.D, cfg.g, cfg.T,
                                                cfg.dt, e, s, BLOWUP).states, avg.states)
                for e in eps_list]

    rows = _run_jobs(job, range(trials), cfg.workers)
    distances = {e: [r[i] for r in rows] for i, e in enumerate(eps_list)}
    echo = {**cfg.to_dict(), "N": int(n), "eps_list": eps_list, "trials": int(trials)}
    return AveragingReport(int(n), eps_list, distances,
                           [float(np.median(distances[e])) for e in eps_list],
                           [float(np.mean(distances[e])) for e in eps_list], echo)


# ---------------------------------------------------------------------------
# weight statistics and the per-interval Gronwall bound
# ---------------------------------------------------------------------------

def run_lemma_tails(cfg):
    """Exceedance of ``alpha_N >= 2M`` and ``gamma_N >= 2M`` for every N,
    against the bounds ``1/N^2`` and ``5/N``."""
    if cfg.trials < 100:
        raise ParameterError("tail estimates need at least 100 trials")
    M = law_moment_bound(cfg.law)
    reports = []
    for n in cfg.n_list:
        def job(t, n=n):
            s = trial_seed(cfg.seed, n, t)
            nodes = make_nodes_deterministic(n) if cfg.mode == "rd" else make_nodes_random(n, s)
            xi = sample_weight_matrix(cfg.law, nodes, s)
            return alpha_N(xi), gamma_N(xi)

        vals = np.array(_run_jobs(job, range(cfg.trials), cfg.workers))
        reports.append(tail_frequency(lambda t: vals[t, 0], 2 * M, cfg.trials,
                                      "alpha_N", 1.0 / n ** 2, n))
        reports.append(tail_frequency(lambda t: vals[t, 1], 2 * M, cfg.trials,
                                      "gamma_N", 5.0 / n, n))
    return reports


def write_tail_reports(reports, out_dir, config=None):
    out = Path(out_dir)
    if config is not None:
        write_json(out / "config.json", config)
    cols = ["statistic", "n", "threshold", "trials", "exceed_count", "empirical_rate",
            "upper_ci", "theory_bound"]
    write_csv(out / "tails.csv", cols, ([getattr(r, c) for c in cols] for r in reports))
    lines = [f"{r.statistic} N={r.n}: {r.exceed_count}/{r.trials} >= {r.threshold:.6g}, "
             f"95% upper {r.upper_ci:.4g} vs bound {r.theory_bound:.4g}" for r in reports]
    (out / "summary.txt").write_text("\n".join(lines) + "\n")
    return out


@dataclass
class Lemma3Report:
    n: int
    eps: float
    factor: float
    trials: int
    holds: list                  # per trial: bound held on every interval
    interval_rate: float         # fraction of (trial, k) pairs where it held
    frequency: float
    lower_ci: float
    theory_bound: float


def run_lemma3_check(cfg, n=None):
    """On each ``[k eps, (k+1) eps]`` compare the blinking system with the
    intermediate system restarted from the limit and test
    ``d(t) <= exp(4 L M eps) d(k eps)`` at every stored time."""
    _require(cfg, "blinking")
    n = int(n or cfg.n_list[0])
    M = law_moment_bound(cfg.law)
    factor = exp(4 * cfg.D.L * M * cfg.eps)
    n_int, sub = blinking_intervals(cfg.T, cfg.dt, cfg.eps)
    ref = _reference(cfg, cfg.ref_multiplier * n)

    def job(t):
        s = trial_seed(cfg.seed, n, t)
        nodes = make_nodes_random(n, s)
        blink = integrate_blinking(cfg.law, nodes, cfg.D, cfg.g, cfg.T, cfg.dt, cfg.eps, s)
        ok = []
        for k in range(n_int):
            inter = integrate_intermediate(cfg.law, nodes, cfg.D, ref, k, cfg.eps, cfg.dt, s)
            d = blink.states[k * sub:(k + 1) * sub + 1] - inter.states
            dist = np.sqrt(np.mean(d * d, axis=1))
            ok.append(bool(np.all(dist <= factor * dist[0] * (1 + 1e-12) + 1e-15)))
        return ok

    per = _run_jobs(job, range(cfg.trials), cfg.workers)
    holds = [all(p) for p in per]
    k = sum(holds)
    return Lemma3Report(n, float(cfg.eps), factor, cfg.trials, holds,
                        float(np.mean([x for p in per for x in p])), k / cfg.trials,
                        binomial_lower(k, cfg.trials), 1 - 6 / n)


def check_averaged_bound(law, g, D, n, T, dt, ref_multiplier=16):
    """Sup-norm distance between the averaged system on mid-cell nodes and
    the limit, against ``2 N^-1/2 (1 + H(g)) exp(2 t L_G)`` at every stored t.
    Returns ``(worst ratio distance/bound, per-time distances)``."""
    ref = reference_solution(law, g, D, ref_multiplier * n, T, dt)
    v = integrate_averaged(law, make_nodes_deterministic(n), D, g, T, dt)
    dist = np.abs(refine(v.states, ref.m) - ref.states).max(axis=1)
    L_G = max(holder_half_constant(law.mean), D.L)
    bound = np.array([averaged_limit_bound(n, t, g.holder, L_G) for t in v.times])
    return float(np.max(dist / bound)), dist
