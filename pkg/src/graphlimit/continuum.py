"""The graph-limit equation, piecewise-constant functions and the norms
used to compare finite systems with it.

The limit equation

    du/dt(x, t) = int_0^1 wbar(x, y) D(u(y, t) - u(x, t)) dy,  u(x, 0) = g(x)

is discretized by the method of lines at mid-cell points with the rectangle
rule, which is exactly the averaged finite system on mid-cell nodes.
"""
from dataclasses import dataclass
from math import lcm

import numpy as np

from .dynamics import Trajectory, integrate_averaged
from .errors import ParameterError
from .export import fmt, write_csv
from .graph import make_nodes_deterministic


@dataclass(eq=False)
class GridFunction:
    """Piecewise constant on the cells ``[(i-1)/m, i/m)``."""
    values: np.ndarray

    @property
    def m(self):
        return len(self.values)

    @property
    def midpoints(self):
        return (np.arange(self.m) + 0.5) / self.m

    def __call__(self, x):
        return self.values[cell_index(x, self.m)]


@dataclass(eq=False)
class GridTrajectory(Trajectory):
    """Snapshots of a grid function at uniform times; ``states[s]`` is one
    snapshot of length ``m``."""

    @property
    def m(self):
        return self.states.shape[1]

    def snapshot(self, index):
        return GridFunction(self.states[index])

    def at_time(self, t):
        idx = int(round((t - self.t0) / self.dt))
        if not 0 <= idx < len(self.states) or abs(self.t0 + idx * self.dt - t) > 1e-9:
            raise ParameterError(f"t={t} is not a stored time")
        return self.snapshot(idx)

    def to_csv(self, path):
        mids = " ".join(fmt(x) for x in (np.arange(self.m) + 0.5) / self.m)
        header = ["t"] + [f"x_{i + 1}" for i in range(self.m)]
        rows = ([t, *s] for t, s in zip(self.times.tolist(), self.states.tolist()))
        return write_csv(path, header, rows, comment=f"midpoints: {mids}")


def cell_index(x, m):
    x = np.asarray(x, float)
    if np.any((x < 0.0) | (x >= 1.0)):
        raise ParameterError("coordinates must lie in [0, 1)")
    return np.minimum((x * m).astype(np.int64), m - 1)


def solve_graph_limit(law, g, D, m, T, dt):
    """Method-of-lines solution on ``m`` cells, RK4 in time."""
    if m < 1:
        raise ParameterError("grid size must be >= 1")
    traj = integrate_averaged(law, make_nodes_deterministic(m), D, g, T, dt)
    return GridTrajectory(traj.t0, traj.dt, traj.states)


def project(u, coords):
    """Evaluate a grid function (or its values) at the given coordinates."""
    values = u.values if isinstance(u, GridFunction) else np.asarray(u)
    return values[..., cell_index(getattr(coords, "coords", coords), values.shape[-1])]


def project_trajectory(traj, coords):
    """Project every snapshot of ``traj`` onto the coordinates."""
    return Trajectory(traj.t0, traj.dt, project(traj.states, coords))


def embed_piecewise(u_vec):
    return GridFunction(np.asarray(u_vec, float).copy())


def norm_2N(u):
    u = np.asarray(u, float)
    return float(np.sqrt(np.mean(u * u)))


def refine(values, m):
    """Values of a piecewise-constant function on the finer ``m``-cell grid."""
    values = np.asarray(values, float)
    factor, rem = divmod(m, values.shape[-1])
    if rem:
        raise ParameterError("target grid must be a multiple of the source grid")
    return np.repeat(values, factor, axis=-1)


def l2_distance_values(a, b, budget=1 << 24):
    """L2(0, 1) distance between piecewise-constant functions given by their
    cell values along the last axis; leading axes are broadcast."""
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    m = lcm(a.shape[-1], b.shape[-1])
    if m > budget:
        raise ParameterError(f"common refinement of {m} cells exceeds budget")
    d = refine(a, m) - refine(b, m)
    return np.sqrt(np.mean(d * d, axis=-1))


def l2_distance_grid(a, b):
    return float(l2_distance_values(a.values, b.values))


def sup_time_distance(A, B, distance):
    """``max_t distance(A(t), B(t))`` over the stored snapshots."""
    if len(A.states) != len(B.states) or not np.isclose(A.dt, B.dt) \
            or not np.isclose(A.t0, B.t0):
        raise ParameterError("trajectories must share their time grid")
    return max(float(distance(a, b)) for a, b in zip(A.states, B.states))
