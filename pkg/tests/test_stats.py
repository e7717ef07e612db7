import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from graphlimit import laws
from graphlimit.continuum import GridFunction, solve_graph_limit
from graphlimit.errors import ParameterError
from graphlimit.graph import make_nodes_deterministic, make_nodes_random, sample_rows, sample_weight_matrix
from graphlimit.stats import (
    alpha_N, averaged_limit_bound, binomial_lower, binomial_upper, fit_loglog_slope, gamma_N,
    holder_half_constant, sigma_i_squared_rd, sigma_Y_squared, sigma_Y_squared_first_moment,
    tail_frequency, theorem_constants, y_moment_check, z_vector,
)


@pytest.fixture(scope="module")
def u_xy():
    from graphlimit.dynamics import make_rational_attraction, make_sin_squared
    sol = solve_graph_limit(laws.make_garlaschelli_xy(), make_sin_squared(),
                            make_rational_attraction(), 256, 1.0, 0.01)
    return sol.snapshot(-1)


# ---------------------------------------------------------------- alpha, gamma

def test_alpha_gamma_examples():
    assert alpha_N(np.ones((5, 5))) == 1.0
    assert gamma_N(np.ones((5, 5))) == 1.0
    assert alpha_N(np.zeros((3, 3))) == 0.0
    assert gamma_N(np.zeros((3, 3))) == 0.0
    assert alpha_N(np.array([[0.0, 2.0], [0.0, 0.0]])) == 1.0
    assert gamma_N(np.array([[0.0, 2.0], [1.0, 1.0]])) == 1.0


@given(st.integers(1, 12), st.integers(0, 2 ** 31), st.sampled_from([0.5, 2.0, 4.0, 0.25]))
def test_scale_equivariance(n, seed, lam):
    xi = np.random.default_rng(seed).exponential(size=(n, n))
    assert alpha_N(lam * xi) == pytest.approx(lam * alpha_N(xi), rel=1e-15)
    assert gamma_N(lam * xi) == pytest.approx(lam * gamma_N(xi), rel=1e-15)


def test_alpha_accepts_weight_matrix(xy):
    m = sample_weight_matrix(xy, make_nodes_random(10, 0), 0)
    assert alpha_N(m) == alpha_N(m.xi)


# ---------------------------------------------------------------- Z and sigma

def test_z_zero_for_delta_on_matching_grid(D, g):
    law = laws.make_delta(laws.make_garlaschelli_xy())
    sol = solve_graph_limit(law, g, D, 64, 1.0, 0.01)
    nodes = make_nodes_deterministic(64)
    xi = sample_weight_matrix(law, nodes, 3)
    assert np.all(z_vector(xi, nodes, sol.snapshot(-1), law, D) == 0.0)


def test_z_zero_for_constant_profile(D, xy):
    nodes = make_nodes_random(30, 1)
    xi = sample_weight_matrix(xy, nodes, 1)
    assert np.all(z_vector(xi, nodes, GridFunction(np.full(40, 0.2)), xy, D) == 0.0)


def test_z_rows_subset(D, xy, u_xy):
    nodes = make_nodes_random(30, 1)
    xi = sample_weight_matrix(xy, nodes, 1)
    full = z_vector(xi, nodes, u_xy, xy, D)
    part = z_vector(sample_rows(xy, nodes, 1, 0, [4, 7]), nodes, u_xy, xy, D, rows=[4, 7])
    np.testing.assert_allclose(part, full[[4, 7]], rtol=1e-13, atol=1e-16)


def test_z_has_mean_zero(D, xy, u_xy):
    from graphlimit.graph import trial_seed
    n, trials = 40, 10 ** 4
    z = np.empty(trials)
    for t in range(trials):
        s = trial_seed(77, t)
        nodes = make_nodes_random(n, s)
        z[t] = z_vector(sample_rows(xy, nodes, s, 0, [0]), nodes, u_xy, xy, D, rows=[0])[0]
    # j = i contributes xi_ii D(0) = 0, so E[Z] = -E[I(X)] / N
    assert abs(z.mean()) < 4 * z.std() / math.sqrt(trials)


def test_sigma_zero_for_constant_profile(D, xy):
    assert sigma_Y_squared(xy, GridFunction(np.full(32, 1.5)), D) == 0.0


def test_sigma_bounded_and_translation_invariant(D, u_xy):
    for law in (laws.make_garlaschelli_xy(), laws.make_small_world(0.3),
                laws.make_garlaschelli_const(0.5)):
        s = sigma_Y_squared(law, u_xy, D)
        M = laws.law_moment_bound(law)
        assert 0.0 < s <= (M * D.K) ** 2
        shifted = GridFunction(u_xy.values + 3.25)
        assert sigma_Y_squared(law, shifted, D) == pytest.approx(s, abs=1e-12)


def test_sigma_forms_agree_for_zero_one_weights(D, u_xy):
    law = laws.make_bernoulli_graphon(laws.ProductKernel())
    assert sigma_Y_squared(law, u_xy, D) == pytest.approx(sigma_Y_squared_first_moment(law, u_xy, D), rel=1e-12)
    xy = laws.make_garlaschelli_xy()
    assert sigma_Y_squared(xy, u_xy, D) > sigma_Y_squared_first_moment(xy, u_xy, D)


def test_sigma_delta_matches_monte_carlo_variance(D, u_xy):
    law = laws.make_delta(laws.make_garlaschelli_xy())
    y = u_xy.midpoints
    w = law.mean(y[:, None], y[None, :])
    d = D(u_xy.values[None, :] - u_xy.values[:, None])
    direct = (w * w * d * d).mean() - ((w * d).mean(axis=1) ** 2).mean()
    s2 = sigma_Y_squared(law, u_xy, D)
    assert s2 == pytest.approx(direct, rel=1e-12)
    rep = y_moment_check(law, 5, u_xy, D, trials=10 ** 4, n=200)
    assert not rep.degenerate
    assert abs(rep.m2_ratio - 1.0) < 4 * rep.m2_se + 1.0 / 200


def test_y_moment_degenerate_and_checked(D, xy):
    flat = GridFunction(np.full(16, 0.4))
    rep = y_moment_check(laws.make_delta(laws.ConstantKernel(1.0)), 0, flat, D, 100, 20)
    assert rep.degenerate and math.isnan(rep.m2_ratio)
    with pytest.raises(ParameterError):
        y_moment_check(xy, 0, flat, D, 99, 20)


def test_rd_variance_bound(D, xy):
    nodes = make_nodes_deterministic(50)
    v = np.sin(4 * nodes.coords) ** 2
    s = sigma_i_squared_rd(xy, nodes, v, D)
    assert np.all(s >= 0) and np.all(s <= (laws.law_moment_bound(xy) * D.K) ** 2)
    assert np.all(sigma_i_squared_rd(laws.make_delta(xy), nodes, v, D) == 0.0)


# ---------------------------------------------------------------- constants

def test_constants_examples():
    c = theorem_constants(K=0.5, L=1.0, M=1.0, T=1.0, H_g=2.0, H_wbar=0.5)
    assert c.C1tilde == pytest.approx(6.1875)
    assert c.C3tilde == pytest.approx(12.1875)
    assert c.C2tilde == c.C1tilde
    assert c.L_G == 1.0
    growth = math.exp((0.5 + 4) * 1.0)
    assert c.C1 == pytest.approx(math.sqrt(1.25) * growth)
    assert c.C3 == pytest.approx(math.sqrt(1.25) * growth * (math.exp(4) - 1) / 4)
    assert c.c4 == pytest.approx(2 * 3 * math.exp(2))
    assert c.C2 == pytest.approx(max(2 * c.c4, 2 * c.C1))


def test_C1_vanishes_like_sqrt_T():
    a = theorem_constants(0.5, 1.0, 1.0, 1e-6, 0.0, 0.0).C1
    b = theorem_constants(0.5, 1.0, 1.0, 4e-6, 0.0, 0.0).C1
    assert b / a == pytest.approx(2.0, rel=1e-4)


def test_constants_monotone():
    fields = ("C1", "C1tilde", "C3", "C3tilde", "C2")
    grid = [0.25, 0.5, 1.0, 2.0]
    for name in ("M", "K", "T"):
        for base in grid:
            for lo, hi in zip(grid, grid[1:]):
                args = dict(K=base, L=1.0, M=base, T=base, H_g=1.0, H_wbar=1.0)
                a = theorem_constants(**{**args, name: lo})
                b = theorem_constants(**{**args, name: hi})
                for f in fields:
                    assert getattr(b, f) >= getattr(a, f)


@pytest.mark.parametrize("bad", [dict(K=0), dict(L=-1), dict(M=0), dict(T=0), dict(H_g=-1),
                                 dict(H_wbar=float("nan"))])
def test_constants_reject_bad_inputs(bad):
    with pytest.raises(ParameterError):
        theorem_constants(**{**dict(K=0.5, L=1, M=1, T=1, H_g=1, H_wbar=1), **bad})


def test_averaged_bound_formula():
    assert averaged_limit_bound(100, 0.0, 1.0, 1.0) == pytest.approx(0.4)
    assert averaged_limit_bound(4, 1.0, 0.0, 0.5, alpha=1.0) == pytest.approx(0.5 * math.e)


def test_holder_estimate():
    assert holder_half_constant(lambda x, y: np.sqrt(x)) == pytest.approx(1.0)
    assert holder_half_constant(lambda x, y: 0 * x) == 0.0
    assert holder_half_constant(lambda x, y: x * y) <= 2.0


# ---------------------------------------------------------------- tails and fits

def test_tail_frequency_basics():
    rep = tail_frequency(lambda t: 1.0, 1.0, 50, "c")
    assert rep.empirical_rate == 1.0 and rep.exceed_count == 50 and rep.upper_ci == 1.0
    rep = tail_frequency(lambda t: t % 4, 3, 100)
    assert rep.exceed_count == 25 and rep.empirical_rate == 0.25
    with pytest.raises(ParameterError):
        tail_frequency(lambda t: 0, 1, 0)


def test_clopper_pearson():
    # zero successes: upper bound solves (1 - p)^n = 0.05
    assert binomial_upper(0, 2000) == pytest.approx(1 - 0.05 ** (1 / 2000), rel=1e-9)
    assert binomial_lower(0, 10) == 0.0
    assert binomial_lower(10, 10) == pytest.approx(0.05 ** (1 / 10), rel=1e-9)


def test_ci_width_scales_as_inverse_root_trials():
    rng = np.random.default_rng(0)
    draws = rng.random(16000) < 0.3

    def width(n):
        k = int(draws[:n].sum())
        return binomial_upper(k, n) - k / n

    for n in (1000, 2000, 4000):
        assert width(4 * n) / width(n) == pytest.approx(0.5, rel=0.1)
        assert width(2 * n) / width(n) == pytest.approx(1 / math.sqrt(2), rel=0.1)


def test_slope_fits():
    n = np.array([25, 50, 100, 200, 400])
    s, _, r2 = fit_loglog_slope(n, 3 / np.sqrt(n))
    assert s == pytest.approx(-0.5) and r2 == pytest.approx(1.0)
    assert fit_loglog_slope(n, np.full(5, 0.2))[0] == pytest.approx(0.0, abs=1e-12)
    assert fit_loglog_slope(n, 2 / n)[0] == pytest.approx(-1.0)
    with pytest.raises(ParameterError):
        fit_loglog_slope(n, np.array([1, 2, 0, 1, 1.0]))
    with pytest.raises(ParameterError):
        fit_loglog_slope([1, 2], [1, 2])
