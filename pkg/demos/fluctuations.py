"""Size of one node's deviation from the limit drift, scaled by sqrt(N).

For a single node the scaled deviation Y has a predicted variance sigma^2.
The second moment matches it. The fourth moment does not match the Gaussian
value 3 sigma^4: sigma^2 averages over the node position, and mixing
Gaussians with different variances inflates the fourth moment. Both the
prediction from the conditional variances and the Monte Carlo value are
shown.

    python3 demos/fluctuations.py
"""
import numpy as np

from graphlimit import make_garlaschelli_xy, make_rational_attraction, make_sin_squared
from graphlimit.harness import reference_solution
from graphlimit.stats import sigma_Y_squared, y_moment_check

law, D, g = make_garlaschelli_xy(), make_rational_attraction(), make_sin_squared()
u = reference_solution(law, g, D, 1600, 1.0, 0.01).snapshot(-1)

rep = y_moment_check(law, 0, u, D, trials=3000, n=100)
print(f"sigma^2 = {rep.sigma2:.5f}")
print(f"E[Y^2] / sigma^2     = {rep.m2_ratio:.3f} +- {rep.m2_se:.3f}")
print(f"E[Y^4] / (3 sigma^4) = {rep.m4_ratio:.3f} +- {rep.m4_se:.3f}")

# conditional variance s(x)^2 of Y given the node position x, on the grid
y, v = u.midpoints, u.values
d = D(v[None, :] - v[:, None])
s2 = (law.moment(y[:, None], y[None, :], 2) * d * d).mean(axis=1) \
    - ((law.mean(y[:, None], y[None, :]) * d).mean(axis=1)) ** 2
print(f"mixture prediction E[s^4] / (E s^2)^2 = {np.mean(s2 ** 2) / np.mean(s2) ** 2:.3f}")
