import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from graphlimit import laws
from graphlimit.continuum import project, solve_graph_limit
from graphlimit.dynamics import (
    InteractionFunction, integrate, integrate_averaged, integrate_blinking,
    integrate_finite, integrate_intermediate, make_constant_initial, make_rhs, make_sine,
    rhs_finite,
)
from graphlimit.errors import IntegrationError, ParameterError
from graphlimit.graph import (
    expected_weight_matrix, make_nodes_deterministic, make_nodes_random, sample_weight_matrix,
)

finite = st.floats(-50, 50, allow_nan=False)


def sup_dist(a, b):
    d = a.states - b.states
    return np.sqrt(np.mean(d * d, axis=1)).max()


# ---------------------------------------------------------------- D and rhs

def test_rational_values(D):
    assert D(0.0) == 0.0
    assert D(1.0) == 0.5
    assert D.K == 0.5 and D.L == 1.0
    z = np.linspace(-20, 20, 100001)
    assert np.max(np.abs(D(z))) == pytest.approx(0.5, abs=1e-9)
    assert np.max(np.abs(np.diff(D(z)) / np.diff(z))) == pytest.approx(1.0, abs=1e-6)


@given(finite, finite)
def test_interaction_constants(a, b):
    for D in (InteractionFunction("r", lambda z: z / (1 + z * z), 0.5, 1.0), make_sine()):
        assert abs(D(a)) <= D.K + 1e-15
        assert abs(D(a) - D(b)) <= D.L * abs(a - b) + 1e-12


def test_rhs_hand_value(D):
    out = rhs_finite(np.array([[0.0, 1.0], [1.0, 0.0]]), D, np.array([0.0, 1.0]))
    np.testing.assert_allclose(out, [0.25, -0.25], rtol=1e-15)


def test_rhs_zero_cases(D, xy):
    nodes = make_nodes_random(25, 0)
    xi = sample_weight_matrix(xy, nodes, 0)
    assert np.all(rhs_finite(xi, D, np.full(25, 0.3)) == 0.0)
    assert np.all(rhs_finite(np.zeros((25, 25)), D, np.random.default_rng(0).random(25)) == 0.0)
    with pytest.raises(ParameterError):
        rhs_finite(xi, D, np.zeros(24))


@given(st.integers(1, 30), st.integers(0, 2 ** 31), finite)
def test_consensus_is_equilibrium(n, seed, c):
    D = make_sine()
    xi = np.random.default_rng(seed).exponential(size=(n, n))
    assert np.all(rhs_finite(xi, D, np.full(n, c)) == 0.0)


def test_compiled_kernels_match_numpy(D):
    rng = np.random.default_rng(1)
    plain = InteractionFunction("r", D.eval, D.K, D.L)
    u = rng.normal(size=40)
    w = rng.exponential(size=(40, 40))
    np.testing.assert_allclose(make_rhs(w, D)(0, u), make_rhs(w, plain)(0, u), rtol=1e-12, atol=1e-15)
    sym = w + w.T
    np.testing.assert_allclose(make_rhs(sym, D)(0, u), make_rhs(sym, plain)(0, u), rtol=1e-12, atol=1e-15)


# ---------------------------------------------------------------- integrator

def test_zero_rhs_constant():
    traj = integrate(lambda t, u: np.zeros_like(u), np.array([1.0, 2.0]), 1.0, 0.1)
    assert np.all(traj.states == [1.0, 2.0]) and len(traj.states) == 11


def test_rk4_exponential_decay():
    traj = integrate(lambda t, u: -u, np.array([1.0]), 1.0, 0.01)
    assert traj.final[0] == pytest.approx(np.exp(-1.0), abs=1e-9)
    np.testing.assert_allclose(traj.times[-1], 1.0)


def test_rk4_fourth_order():
    err = [abs(integrate(lambda t, u: -u, np.array([1.0]), 1.0, h).final[0] - np.exp(-1))
           for h in (0.1, 0.05)]
    assert 14 < err[0] / err[1] < 18


def test_time_dependent_rhs():
    traj = integrate(lambda t, u: np.array([np.cos(t)]), np.array([0.0]), (1.0, 2.0), 0.01)
    assert traj.t0 == 1.0
    assert traj.final[0] == pytest.approx(np.sin(2.0) - np.sin(1.0), abs=1e-10)


def test_thinning():
    full = integrate(lambda t, u: -u, np.array([1.0]), 1.0, 0.01)
    thin = integrate(lambda t, u: -u, np.array([1.0]), 1.0, 0.01, thin=10)
    np.testing.assert_array_equal(thin.states, full.states[::10])
    assert thin.dt == pytest.approx(0.1)
    with pytest.raises(ParameterError):
        integrate(lambda t, u: -u, np.array([1.0]), 1.0, 0.01, thin=7)


def test_step_budget_checked():
    with pytest.raises(ParameterError):
        integrate(lambda t, u: -u, np.array([1.0]), 1.0, 0.03)
    with pytest.raises(ParameterError):
        integrate(lambda t, u: -u, np.array([1.0]), 1.0, 0.0)


def test_blow_up_reports_time():
    with pytest.raises(IntegrationError) as info, np.errstate(over="ignore"):
        integrate(lambda t, u: u * u, np.array([1.0]), 2.0, 0.01)
    assert 0.9 < info.value.time <= 1.2
    with pytest.raises(IntegrationError):
        integrate(lambda t, u: u, np.array([1.0]), 5.0, 0.01, max_abs=10.0)


# ---------------------------------------------------------------- systems

def test_delta_oracle_equivalence(D, g):
    law = laws.make_delta(laws.make_garlaschelli_xy())
    nodes = make_nodes_random(30, 3)
    avg = integrate_averaged(law, nodes, D, g, 2.0, 0.01)
    for other in (integrate_finite(law, nodes, D, g, 2.0, 0.01, seed=5),
                  integrate_blinking(law, nodes, D, g, 2.0, 0.01, 0.1, seed=9),
                  integrate_blinking(law, nodes, D, g, 2.0, 0.01, 2.0, seed=1)):
        assert sup_dist(other, avg) <= 1e-12


def test_constant_initial_stays(D, xy):
    g = make_constant_initial(0.5)
    nodes = make_nodes_random(20, 0)
    for traj in (integrate_finite(xy, nodes, D, g, 1.0, 0.01, 0),
                 integrate_averaged(xy, nodes, D, g, 1.0, 0.01),
                 integrate_blinking(xy, nodes, D, g, 1.0, 0.01, 0.1, 0)):
        assert np.all(traj.states == 0.5)


def test_small_world_contracts(D, g, sw):
    nodes = make_nodes_random(60, 17)
    traj = integrate_finite(sw, nodes, D, g, 40.0, 0.01, 17)
    spread = np.ptp(traj.states, axis=1)
    assert spread[-1] < spread[0]
    assert spread[-1] < 0.1 * spread[0]


def test_derivative_bound_along_trajectory(D, g, xy):
    nodes = make_nodes_random(40, 2)
    xi = sample_weight_matrix(xy, nodes, 2)
    traj = integrate_finite(xy, nodes, D, g, 5.0, 0.01, 2)
    rhs = make_rhs(xi, D)
    bound = D.K * xi.xi.mean(axis=1).max()
    assert max(np.abs(rhs(0, u)).max() for u in traj.states[::10]) <= bound + 1e-15


def test_rk4_self_convergence_averaged(D, g, xy):
    nodes = make_nodes_random(20, 0)
    tr = [integrate_averaged(xy, nodes, D, g, 10.0, h) for h in (0.2, 0.1, 0.05)]
    d1 = np.abs(tr[0].states - tr[1].states[::2]).max()
    d2 = np.abs(tr[1].states[::2] - tr[2].states[::4]).max()
    assert d1 / d2 >= 8


def test_single_interval_blinking_is_static(D, g, xy):
    nodes = make_nodes_random(25, 4)
    a = integrate_blinking(xy, nodes, D, g, 3.0, 0.01, 3.0, seed=8)
    b = integrate_finite(xy, nodes, D, g, 3.0, 0.01, seed=8)
    np.testing.assert_array_equal(a.states, b.states)


def test_blinking_resamples_per_interval(D, g, xy):
    nodes = make_nodes_random(15, 4)
    traj = integrate_blinking(xy, nodes, D, g, 1.0, 0.01, 0.5, seed=8)
    # second half must follow matrix 1 from the midpoint state
    xi1 = sample_weight_matrix(xy, nodes, 8, 1)
    tail = integrate(make_rhs(xi1, D), traj.states[50], (0.5, 1.0), 0.01)
    np.testing.assert_allclose(tail.states, traj.states[50:], rtol=0, atol=1e-15)
    assert len(traj.states) == 101


@pytest.mark.parametrize("eps,dt", [(0.3, 0.01), (0.1, 0.03)])
def test_blinking_alignment_checked(D, g, xy, eps, dt):
    with pytest.raises(ParameterError):
        integrate_blinking(xy, make_nodes_random(5, 0), D, g, 1.0, dt, eps, 0)


def test_faster_blinking_is_closer_to_average(D, g, xy):
    med = {}
    for eps in (1.0, 0.1):
        d = []
        for s in range(20):
            nodes = make_nodes_random(20, s)
            avg = integrate_averaged(xy, nodes, D, g, 10.0, 0.01)
            d.append(sup_dist(integrate_blinking(xy, nodes, D, g, 10.0, 0.01, eps, s), avg))
        med[eps] = np.median(d)
    assert med[0.1] < med[1.0]


# ---------------------------------------------------------------- intermediate

def test_intermediate_initial_state(D, g, xy):
    ref = solve_graph_limit(xy, g, D, 64, 1.0, 0.01)
    mid = make_nodes_deterministic(64)
    inter = integrate_intermediate(xy, mid, D, ref, 0, 0.1, 0.01, seed=1)
    np.testing.assert_array_equal(inter.states[0], g(mid.coords))
    nodes = make_nodes_random(30, 2)
    inter = integrate_intermediate(xy, nodes, D, ref, 3, 0.1, 0.01, seed=1)
    np.testing.assert_array_equal(inter.states[0], project(ref.states[30], nodes))
    assert inter.t0 == pytest.approx(0.3) and len(inter.states) == 11


def test_intermediate_uses_blinking_matrix(D, g, xy):
    ref = solve_graph_limit(xy, g, D, 64, 1.0, 0.01)
    nodes = make_nodes_random(30, 2)
    inter = integrate_intermediate(xy, nodes, D, ref, 4, 0.1, 0.01, seed=6)
    xi = sample_weight_matrix(xy, nodes, 6, 4)
    again = integrate(make_rhs(xi, D), inter.states[0], (0.4, 0.5), 0.01)
    np.testing.assert_array_equal(again.states, inter.states)


def test_intermediate_delta_is_averaged_restart(D, g, xy):
    law = laws.make_delta(xy)
    ref = solve_graph_limit(xy, g, D, 64, 1.0, 0.01)
    nodes = make_nodes_random(30, 2)
    inter = integrate_intermediate(law, nodes, D, ref, 2, 0.1, 0.01, seed=3)
    avg = integrate(make_rhs(expected_weight_matrix(xy, nodes), D), project(ref.states[20], nodes),
                    (0.2, 0.3), 0.01)
    np.testing.assert_allclose(inter.states, avg.states, atol=1e-14)


def test_intermediate_needs_coverage(D, g, xy):
    ref = solve_graph_limit(xy, g, D, 16, 0.5, 0.01)
    with pytest.raises(ParameterError):
        integrate_intermediate(xy, make_nodes_random(5, 0), D, ref, 5, 0.1, 0.01, 0)


def test_trajectory_csv(tmp_path, D, g, xy):
    traj = integrate_averaged(xy, make_nodes_deterministic(3), D, g, 0.02, 0.01)
    lines = traj.to_csv(tmp_path / "t.csv").read_text().splitlines()
    assert lines[0] == "t,u_1,u_2,u_3"
    assert len(lines) == 4 and lines[1].startswith("0.0,")
