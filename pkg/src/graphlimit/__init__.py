"""Particle systems on weighted random graphs and their graph-limit equation."""
from .continuum import (
    GridFunction, GridTrajectory, embed_piecewise, l2_distance_grid, norm_2N, project,
    solve_graph_limit, sup_time_distance,
)
from .dynamics import (
    InitialData, InteractionFunction, Trajectory, integrate, integrate_averaged,
    integrate_blinking, integrate_finite, integrate_intermediate, make_constant_initial,
    make_rational_attraction, make_sin_squared, make_sine, rhs_finite,
)
from .errors import DomainError, IntegrationError, LawError, ParameterError
from .graph import (
    NodeSet, WeightMatrix, expected_weight_matrix, make_nodes_deterministic,
    make_nodes_random, sample_weight_matrix,
)
from .harness import (
    ExperimentConfig, run_averaging_sweep, run_blinking_sweep, run_convergence_rd,
    run_convergence_rr, run_lemma3_check, run_lemma_tails,
)
from .laws import (
    GraphLaw, law_moment, law_moment_bound, make_bernoulli_graphon, make_delta,
    make_exponential, make_garlaschelli_const, make_garlaschelli_xy, make_small_world,
)
from .stats import (
    alpha_N, fit_loglog_slope, gamma_N, sigma_Y_squared, tail_frequency,
    theorem_constants, y_moment_check, z_vector,
)

__version__ = "0.1.0"
