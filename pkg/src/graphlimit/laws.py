"""Weighted random graph laws.

A law assigns to every pair of vertex coordinates ``(x, y)`` in ``[0, 1]^2`` a
probability distribution on nonnegative edge weights. Each law here knows how
to turn independent uniforms into exact samples, and exposes its first four
raw moments in closed form.

Sampling is split in two: :meth:`GraphLaw.transform` maps an array of
uniforms to weights, so callers that need keyed, order-independent streams
(see :mod:`graphlimit.graph`) can supply their own uniforms, while
:meth:`GraphLaw.sample` is the convenience path taking a numpy ``Generator``.
"""
from dataclasses import dataclass
from math import factorial
from typing import Callable

import numpy as np

from .errors import DomainError, LawError, ParameterError

# Numeric sups are taken on this grid, then inflated by the safety factor.
BOUND_GRID = 256
BOUND_SAFETY = 1.01


# ---------------------------------------------------------------------------
# kernels: deterministic functions on I x I used as graphons or mean weights
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConstantKernel:
    value: float

    def __call__(self, x, y):
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        return np.full(x.shape, float(self.value))

    def spec(self):
        return {"kind": "constant", "value": self.value}


@dataclass(frozen=True)
class ProductKernel:
    """``(x, y) -> scale * x * y``."""
    scale: float = 1.0

    def __call__(self, x, y):
        return self.scale * np.asarray(x, float) * np.asarray(y, float)

    def spec(self):
        return {"kind": "product", "scale": self.scale}


def kernel_spec(fn):
    if hasattr(fn, "spec"):
        return fn.spec()
    return {"kind": "callable", "name": getattr(fn, "__qualname__", repr(fn))}


def circular_distance(x, y):
    """Distance between ``x`` and ``y`` on the unit circle."""
    d = np.asarray(x, float) - np.asarray(y, float)
    return np.minimum(np.abs(d), np.minimum(np.abs(d - 1.0), np.abs(-d - 1.0)))


# ---------------------------------------------------------------------------
# geometric weights on {0, 1, 2, ...} with P[w = i] = (1 - p) p^i
# ---------------------------------------------------------------------------

# Eulerian polynomials: sum_i i^k p^i (1-p) = p * A_k(p) / (1-p)^k
_EULERIAN = {
    1: (1.0,),
    2: (1.0, 1.0),
    3: (1.0, 4.0, 1.0),
    4: (1.0, 11.0, 11.0, 1.0),
}


def geometric_moment(p, k):
    p = np.asarray(p, float)
    poly = np.polynomial.polynomial.polyval(p, _EULERIAN[k])
    return p * poly / (1.0 - p) ** k


def geometric_from_uniform(p, u):
    """Inverse-CDF geometric sample; ``u`` must lie in (0, 1]."""
    p = np.asarray(p, float)
    with np.errstate(divide="ignore", invalid="ignore"):
        w = np.floor(np.log(u) / np.log(p))
    return np.where(p > 0.0, w, 0.0)


# ---------------------------------------------------------------------------
# laws
# ---------------------------------------------------------------------------

def _check_order(k):
    if k not in (1, 2, 3, 4):
        raise ParameterError(f"moment order must be 1..4, got {k!r}")


class GraphLaw:
    """Base class. Subclasses define ``kind``, ``n_uniforms``, ``_moment``,
    ``transform`` and ``moment_bound``."""

    kind = "abstract"
    n_uniforms = 1

    def mean(self, x, y):
        return self.moment(x, y, 1)

    def moment(self, x, y, k):
        _check_order(k)
        return self._moment(np.asarray(x, float), np.asarray(y, float), k)

    def variance(self, x, y):
        m1 = self.moment(x, y, 1)
        return self.moment(x, y, 2) - m1 * m1

    def sample(self, x, y, rng):
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        u = 1.0 - rng.random(x.shape + (self.n_uniforms,))
        return self.transform(x, y, u)

    def transform(self, x, y, u):
        raise NotImplementedError

    def moment_bound(self):
        raise NotImplementedError

    def spec(self):
        raise NotImplementedError

    def _grid_sup(self, fn):
        g = np.linspace(0.0, 1.0, BOUND_GRID)
        return float(np.max(fn(g[:, None], g[None, :])))


@dataclass(frozen=True)
class BernoulliGraphon(GraphLaw):
    """Unweighted W-random graph: weight 1 with probability ``W(x, y)``."""
    W: Callable
    kind = "bernoulli"

    def _prob(self, x, y):
        w = np.asarray(self.W(x, y), float)
        if np.any((w < 0.0) | (w > 1.0)) or not np.all(np.isfinite(w)):
            raise DomainError("graphon value outside [0, 1]")
        return w

    def _moment(self, x, y, k):
        return self._prob(x, y)

    def transform(self, x, y, u):
        return (u[..., 0] <= self._prob(x, y)).astype(float)

    def moment_bound(self):
        return 1.0

    def spec(self):
        return {"kind": self.kind, "W": kernel_spec(self.W)}


@dataclass(frozen=True)
class GarlaschelliConst(GraphLaw):
    """Weighted Erdos-Renyi graph with geometric weights of parameter ``p``."""
    p: float
    kind = "garlaschelli_const"

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise ParameterError(f"p must lie in (0, 1), got {self.p!r}")

    def _moment(self, x, y, k):
        shape = np.broadcast_shapes(x.shape, y.shape)
        return np.full(shape, float(geometric_moment(self.p, k)))

    def transform(self, x, y, u):
        return geometric_from_uniform(self.p, u[..., 0])

    def moment_bound(self):
        # (E w^k)^(1/k) is nondecreasing in k, so the 4th root dominates
        return float(geometric_moment(self.p, 4)) ** 0.25

    def spec(self):
        return {"kind": self.kind, "p": self.p}


@dataclass(frozen=True)
class GarlaschelliXY(GraphLaw):
    """Geometric weights whose parameter ``xy/2`` depends on the endpoints."""
    kind = "garlaschelli_xy"

    @staticmethod
    def p(x, y):
        return 0.5 * np.asarray(x, float) * np.asarray(y, float)

    def _moment(self, x, y, k):
        return geometric_moment(self.p(x, y), k)

    def transform(self, x, y, u):
        return geometric_from_uniform(self.p(x, y), u[..., 0])

    def moment_bound(self):
        sup = max(self._grid_sup(lambda a, b: self._moment(a, b, k) ** (1.0 / k))
                  for k in (1, 2, 3, 4))
        return sup * BOUND_SAFETY

    def spec(self):
        return {"kind": self.kind}


@dataclass(frozen=True)
class Exponential(GraphLaw):
    """i.i.d. exponential weights of rate ``lam``."""
    lam: float
    kind = "exponential"

    def __post_init__(self):
        if not self.lam > 0.0:
            raise ParameterError(f"rate must be positive, got {self.lam!r}")

    def _moment(self, x, y, k):
        shape = np.broadcast_shapes(x.shape, y.shape)
        return np.full(shape, factorial(k) / self.lam ** k)

    def transform(self, x, y, u):
        return -np.log(u[..., 0]) / self.lam + np.zeros(np.broadcast_shapes(x.shape, y.shape))

    def moment_bound(self):
        return factorial(4) ** 0.25 / self.lam

    def spec(self):
        return {"kind": self.kind, "lam": self.lam}


@dataclass(frozen=True)
class SmallWorld(GraphLaw):
    """Weighted small-world law on the circle.

    Pairs closer than ``r`` get weight 1, except that with probability
    ``rho / r`` the edge is rewired to a uniform weight on [0, 1]; pairs
    farther apart always get a uniform weight.
    """
    r: float
    kind = "small_world"
    n_uniforms = 2

    def __post_init__(self):
        if not 0.0 < self.r <= 0.5:
            raise ParameterError(f"r must lie in (0, 1/2], got {self.r!r}")

    def _rewire_prob(self, x, y):
        rho = circular_distance(x, y)
        return np.where(rho <= self.r, rho / self.r, 1.0)

    def _moment(self, x, y, k):
        a = self._rewire_prob(x, y)
        return a / (k + 1.0) + (1.0 - a)

    def transform(self, x, y, u):
        a = self._rewire_prob(x, y)
        return np.where(u[..., 0] <= a, u[..., 1], 1.0)

    def moment_bound(self):
        return 1.0

    def spec(self):
        return {"kind": self.kind, "r": self.r}


@dataclass(frozen=True)
class Delta(GraphLaw):
    """Point mass at ``wbar(x, y)``: the deterministic (averaged) law."""
    wbar: Callable
    kind = "delta"
    n_uniforms = 0

    def _value(self, x, y):
        w = np.asarray(self.wbar(x, y), float)
        if np.any(w < 0.0) or not np.all(np.isfinite(w)):
            raise DomainError("wbar must be finite and nonnegative")
        return w

    def _moment(self, x, y, k):
        return self._value(x, y) ** k

    def variance(self, x, y):
        return np.zeros(np.broadcast_shapes(np.shape(x), np.shape(y)))

    def transform(self, x, y, u):
        return self._value(x, y) + np.zeros(np.broadcast_shapes(x.shape, y.shape))

    def moment_bound(self):
        return self._grid_sup(self._value)

    def spec(self):
        owner = getattr(self.wbar, "__self__", None)
        if isinstance(owner, GraphLaw):
            return {"kind": self.kind, "of": owner.spec()}
        return {"kind": self.kind, "wbar": kernel_spec(self.wbar)}


# ---------------------------------------------------------------------------
# constructors and module-level accessors
# ---------------------------------------------------------------------------

def make_bernoulli_graphon(W):
    return BernoulliGraphon(W)


def make_garlaschelli_const(p):
    return GarlaschelliConst(float(p))


def make_garlaschelli_xy():
    return GarlaschelliXY()


def make_exponential(lam):
    return Exponential(float(lam))


def make_small_world(r):
    return SmallWorld(float(r))


def make_delta(wbar):
    """Point-mass law. ``wbar`` may be a kernel or another law, in which case
    the point mass sits at that law's mean."""
    if isinstance(wbar, GraphLaw):
        wbar = wbar.mean
    return Delta(wbar)


def law_moment(law, x, y, k):
    """Raw moment ``int w^k q(x, y; dw)``."""
    return law.moment(x, y, k)


def law_moment_bound(law):
    M = law.moment_bound()
    if not np.isfinite(M):
        raise LawError(f"{law.kind}: moments are not uniformly bounded")
    return float(M)
