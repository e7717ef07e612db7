"""Finite particle systems on weighted random graphs and their integrator.

All systems share the right-hand side

    du_i/dt = (1/N) sum_j w_ij D(u_j - u_i)

and differ only in where ``w`` comes from: one sampled matrix (static),
the mean matrix (averaged), or a fresh sample on every interval
``[k eps, (k+1) eps)`` (blinking).
"""
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _kernels
from .errors import IntegrationError, ParameterError
from .export import write_csv
from .graph import expected_weight_matrix, sample_weight_matrix


# ---------------------------------------------------------------------------
# interaction functions and initial data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InteractionFunction:
    """Bounded Lipschitz interaction ``D`` with ``K = sup|D|``, ``L = sup|D'|``.

    ``jit`` is an optional numba scalar version of ``eval``; without it the
    right-hand side falls back to numpy.
    """
    name: str
    eval: Callable
    K: float
    L: float
    odd: bool = True
    jit: Callable | None = None

    def __call__(self, z):
        return self.eval(z)


def _rational(z):
    return z / (1.0 + z * z)


def make_rational_attraction():
    """``D(z) = z / (1 + z^2)``: max 1/2 at z = 1, slope 1 at the origin."""
    return InteractionFunction("rational", _rational, K=0.5, L=1.0, odd=True,
                               jit=_kernels.rational)


def make_sine():
    """Kuramoto-type coupling ``D(z) = sin z``."""
    return InteractionFunction("sine", np.sin, K=1.0, L=1.0, odd=True,
                               jit=_kernels.sine)


@dataclass(frozen=True)
class InitialData:
    """Initial profile ``g`` on [0, 1]; ``holder`` bounds its 1/2-Holder constant."""
    name: str
    eval: Callable
    holder: float | None = None
    params: tuple = ()

    def __call__(self, x):
        return np.asarray(self.eval(np.asarray(x, float)), float)

    def spec(self):
        return {"kind": self.name, **dict(self.params)}


@dataclass(frozen=True)
class _SinSquared:
    freq: float

    def __call__(self, x):
        return np.sin(self.freq * x) ** 2


@dataclass(frozen=True)
class _Constant:
    value: float

    def __call__(self, x):
        return np.full(np.shape(x), float(self.value))


def make_sin_squared(freq=4.0):
    """``g(x) = sin(freq x)^2``.

    ``|g(x) - g(y)| <= min(1, freq |x - y|)``, whose ratio to ``sqrt|x - y|``
    peaks at ``sqrt(freq)``.
    """
    freq = float(freq)
    return InitialData("sin2", _SinSquared(freq), holder=freq ** 0.5,
                       params=(("freq", freq),))


def make_constant_initial(value):
    value = float(value)
    return InitialData("constant", _Constant(value), holder=0.0,
                       params=(("value", value),))


# ---------------------------------------------------------------------------
# trajectories and the RK4 integrator
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class Trajectory:
    t0: float
    dt: float
    states: np.ndarray          # shape (steps + 1, N)

    @property
    def times(self):
        return self.t0 + self.dt * np.arange(len(self.states))

    @property
    def final(self):
        return self.states[-1]

    def to_csv(self, path):
        header = ["t"] + [f"u_{i + 1}" for i in range(self.states.shape[1])]
        rows = ([t, *s] for t, s in zip(self.times.tolist(), self.states.tolist()))
        return write_csv(path, header, rows)


def step_count(span, dt, what="T/dt"):
    if not dt > 0:
        raise ParameterError("dt must be positive")
    n = int(round(span / dt))
    if n < 0 or abs(n * dt - span) > 1e-9 * max(1.0, abs(span)):
        raise ParameterError(f"{what} must be an integer, got {span / dt!r}")
    return n


def _rk4(rhs, u0, n_steps, dt, t0, thin=1, max_abs=np.inf):
    u = np.array(u0, dtype=float)
    out = [u.copy()]
    h2 = 0.5 * dt
    for m in range(n_steps):
        t = t0 + m * dt
        k1 = rhs(t, u)
        k2 = rhs(t + h2, u + h2 * k1)
        k3 = rhs(t + h2, u + h2 * k2)
        k4 = rhs(t + dt, u + dt * k3)
        u = u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(u)) or np.max(np.abs(u), initial=0.0) > max_abs:
            raise IntegrationError(f"state blew up at t={t + dt:g}", time=t + dt)
        if (m + 1) % thin == 0:
            out.append(u)
    return np.array(out)


def integrate(rhs, u0, t_span, dt, thin=1, max_abs=np.inf):
    """Classical fixed-step RK4 for ``u' = rhs(t, u)``.

    ``t_span`` is ``T`` or ``(t0, T)``. Every ``thin``-th state is stored,
    the initial one included.
    """
    t0, T = (0.0, t_span) if np.isscalar(t_span) else t_span
    n = step_count(T - t0, dt)
    if thin < 1 or n % thin:
        raise ParameterError("thin must be a positive divisor of the step count")
    states = _rk4(rhs, u0, n, dt, t0, thin, max_abs)
    return Trajectory(float(t0), dt * thin, states)


# ---------------------------------------------------------------------------
# right-hand sides
# ---------------------------------------------------------------------------

def make_rhs(w, D):
    """Autonomous vector field ``rhs(t, u)`` for weight matrix ``w``."""
    w = np.ascontiguousarray(getattr(w, "xi", w), dtype=float)
    n = w.shape[0]
    if w.shape != (n, n):
        raise ParameterError("weight matrix must be square")
    if D.jit is None:
        def rhs(t, u):
            u = np.asarray(u, float)
            return (w * D.eval(u[None, :] - u[:, None])).sum(axis=1) / n
        return rhs
    full, antisym = _kernels.pair_kernels(D.jit)
    kernel = antisym if D.odd and np.array_equal(w, w.T) else full

    def rhs(t, u):
        u = np.ascontiguousarray(u, dtype=float)
        out = np.empty(n)
        kernel(w, u, out)
        return out
    return rhs


def rhs_finite(xi, D, u):
    """``(du)_i = (1/N) sum_j xi_ij D(u_j - u_i)``."""
    n = getattr(xi, "xi", xi).shape[0]
    if np.shape(u) != (n,):
        raise ParameterError(f"state has shape {np.shape(u)}, expected ({n},)")
    return make_rhs(xi, D)(0.0, u)


# ---------------------------------------------------------------------------
# systems
# ---------------------------------------------------------------------------

def integrate_finite(law, nodes, D, g, T, dt, seed, max_abs=np.inf):
    """Static random graph: one matrix (interval 0) for the whole run."""
    xi = sample_weight_matrix(law, nodes, seed, 0)
    return integrate(make_rhs(xi, D), g(nodes.coords), T, dt, max_abs=max_abs)


def integrate_averaged(law, nodes, D, g, T, dt, max_abs=np.inf):
    """Averaged system on the mean weights ``wbar(x_i, x_j)``."""
    w = expected_weight_matrix(law, nodes)
    return integrate(make_rhs(w, D), g(nodes.coords), T, dt, max_abs=max_abs)


def blinking_intervals(T, dt, eps):
    n = step_count(T, eps, "T/eps")
    sub = step_count(eps, dt, "eps/dt")
    if n < 1 or sub < 1:
        raise ParameterError("need T >= eps >= dt")
    return n, sub


def integrate_blinking(law, nodes, D, g, T, dt, eps, seed, max_abs=np.inf):
    """Weights resampled at every ``k eps``; matrix ``k`` drives all RK4 stages
    of the steps starting in ``[k eps, (k+1) eps)``."""
    n_int, sub = blinking_intervals(T, dt, eps)
    u = g(nodes.coords)
    pieces = [u[None, :]]
    for k in range(n_int):
        xi = sample_weight_matrix(law, nodes, seed, k)
        seg = _rk4(make_rhs(xi, D), u, sub, dt, k * sub * dt, max_abs=max_abs)
        pieces.append(seg[1:])
        u = seg[-1]
    return Trajectory(0.0, dt, np.concatenate(pieces))


def integrate_intermediate(law, nodes, D, u_reference, k, eps, dt, seed,
                           max_abs=np.inf):
    """Blinking dynamics on ``[k eps, (k+1) eps]`` restarted from the limit.

    The initial state is the limit profile at ``k eps`` evaluated at the
    nodes; the weights are the blinking matrix of interval ``k``.
    """
    from .continuum import project

    sub = step_count(eps, dt, "eps/dt")
    start = step_count(k * eps - u_reference.t0, u_reference.dt, "k*eps/reference dt")
    end = step_count((k + 1) * eps - u_reference.t0, u_reference.dt)
    if end > len(u_reference.states) - 1:
        raise ParameterError("reference trajectory does not cover the interval")
    u0 = project(u_reference.snapshot(start), nodes.coords)
    xi = sample_weight_matrix(law, nodes, seed, k)
    states = _rk4(make_rhs(xi, D), u0, sub, dt, k * eps, max_abs=max_abs)
    return Trajectory(k * eps, dt, states)
