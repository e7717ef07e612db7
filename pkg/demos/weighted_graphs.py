"""A tour of the weight laws.

Each law says how the weight between nodes at positions x and y is drawn.
We print the analytic mean and variance at a couple of positions, compare
with a Monte Carlo estimate, and sample a small weighted graph to look at
its row sums.

    python3 demos/weighted_graphs.py
"""
import numpy as np

from graphlimit import (
    alpha_N, gamma_N, law_moment_bound, make_exponential, make_garlaschelli_const,
    make_garlaschelli_xy, make_nodes_random, make_small_world, sample_weight_matrix,
)

LAWS = {
    "geometric, p = 1/2": make_garlaschelli_const(0.5),
    "geometric, p = x y": make_garlaschelli_xy(),
    "exponential, rate 2": make_exponential(2.0),
    "small world, r = 0.3": make_small_world(0.3),
}

rng = np.random.default_rng(3)
for name, law in LAWS.items():
    print(f"\n{name}  (moment bound M = {law_moment_bound(law):.4f})")
    for x, y in [(0.2, 0.7), (0.9, 0.85)]:
        w = law.sample(np.full(200_000, x), np.full(200_000, y), rng)
        print(f"  at ({x}, {y}): mean {float(law.mean(x, y)):.4f} (sampled {w.mean():.4f}), "
              f"variance {float(law.variance(x, y)):.4f} (sampled {w.var():.4f})")

# One concrete graph on 300 random nodes. Heavy-tailed weights show up in
# the largest row mean; the rms weight stays moderate.
nodes = make_nodes_random(300, seed=11)
for name, law in LAWS.items():
    xi = sample_weight_matrix(law, nodes, master_seed=11)
    print(f"{name:22s} largest row mean {gamma_N(xi):7.3f}   rms weight {alpha_N(xi):6.3f}")
