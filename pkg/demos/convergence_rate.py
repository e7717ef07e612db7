"""Measuring the rate at which finite systems approach the limit.

A reduced sweep (short horizon, fewer trials) so it runs in well under a
minute. The acceptance suite runs the full-size version.

    python3 demos/convergence_rate.py [output-dir]
"""
import sys

from graphlimit import (
    ExperimentConfig, make_garlaschelli_xy, make_rational_attraction, make_sin_squared,
    run_convergence_rr,
)

cfg = ExperimentConfig(make_garlaschelli_xy(), make_rational_attraction(), make_sin_squared(),
                       T=2.0, dt=0.01, mode="rr", n_list=(20, 40, 80, 160), trials=8,
                       ref_multiplier=8, seed=4)
rep = run_convergence_rr(cfg)
print(rep.summary())
if len(sys.argv) > 1:
    print("report written to", rep.write(sys.argv[1]))
