"""Compiled pair-interaction sums.

Given a weight matrix ``w`` and a state ``u`` these compute
``out_i = (1/n) sum_j w_ij D(u_j - u_i)``. The antisymmetric variant visits
each unordered pair once and is only valid when ``w`` is symmetric and ``D``
is odd; it halves the cost of the large reference solves.
"""
import math
from functools import lru_cache

import numba


@lru_cache(maxsize=None)
def pair_kernels(d):
    """Return ``(full, antisym)`` kernels specialised to the scalar jit ``d``."""

    @numba.njit(nogil=True, cache=False)
    def full(w, u, out):
        n = u.shape[0]
        for i in range(n):
            ui = u[i]
            s = 0.0
            for j in range(n):
                s += w[i, j] * d(u[j] - ui)
            out[i] = s / n

    @numba.njit(nogil=True, cache=False)
    def antisym(w, u, out):
        n = u.shape[0]
        for i in range(n):
            out[i] = 0.0
        for i in range(n):
            ui = u[i]
            s = 0.0
            for j in range(i + 1, n):
                f = w[i, j] * d(u[j] - ui)
                s += f
                out[j] -= f
            out[i] += s
        for i in range(n):
            out[i] = out[i] / n

    return full, antisym


@numba.njit(nogil=True, cache=True)
def rational(z):
    return z / (1.0 + z * z)


@numba.njit(nogil=True, cache=True)
def sine(z):
    return math.sin(z)
