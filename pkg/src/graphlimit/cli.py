"""Command-line front end.

Every subcommand reads one JSON run description (``--config``), writes its
outputs into a directory, and echoes the fully resolved configuration there
as ``config.json`` so the run can be repeated from it.

Exit codes: 0 success, 1 configuration error, 2 runtime error.
"""
import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import config as _config
from . import harness
from .continuum import project, solve_graph_limit
from .dynamics import integrate_averaged, integrate_blinking, integrate_finite
from .errors import DomainError, IntegrationError, LawError, ParameterError
from .export import fmt, write_csv, write_json, write_matrix_csv
from .graph import (
    export_matrix, make_nodes_deterministic, make_nodes_random, sample_weight_matrix,
)
from .laws import law_moment_bound

OUTPUT_ENV = "GRAPHLIMIT_OUTPUT"
DEFAULT_SNAPSHOTS = (0.0, 6.0, 40.0)
log = logging.getLogger("graphlimit")


def _nodes(mode, n, seed):
    if mode in ("rd", "deterministic"):
        return make_nodes_deterministic(n)
    if mode in ("rr", "random", "averaged", "blinking"):
        return make_nodes_random(n, seed)
    raise ParameterError(f"unknown node mode {mode!r}")


def _write_nodes(path, nodes):
    write_csv(path, ["i", "x"], ((i + 1, x) for i, x in enumerate(nodes.coords.tolist())))


# ---------------------------------------------------------------------------
# subcommands: each takes (resolved config, output dir)
# ---------------------------------------------------------------------------

def cmd_sample_graph(cfg, out):
    law, _, _ = _config.parse_model(cfg)
    nodes = _nodes(cfg["mode"], int(cfg["N"]), cfg["seed"])
    xi = sample_weight_matrix(law, nodes, cfg["seed"], int(cfg["interval"]))
    export_matrix(xi, out / "matrix.csv", out / "matrix.pgm")
    _write_nodes(out / "nodes.csv", nodes)
    grid = (np.arange(cfg["grid"]) + 0.5) / cfg["grid"]
    write_matrix_csv(out / "graphon.csv", law.mean(grid[:, None], grid[None, :]))
    return f"sampled {nodes.n}x{nodes.n} matrix, max entry {xi.xi.max():.6g}"


def cmd_simulate(cfg, out):
    law, D, g = _config.parse_model(cfg)
    mode, n, seed, T, dt = cfg["mode"], int(cfg["N"]), cfg["seed"], cfg["T"], cfg["dt"]
    nodes = _nodes(mode, n, seed)
    if mode in ("rr", "rd"):
        traj = integrate_finite(law, nodes, D, g, T, dt, seed)
        export_matrix(sample_weight_matrix(law, nodes, seed, 0), out / "matrix.csv")
    elif mode == "averaged":
        traj = integrate_averaged(law, nodes, D, g, T, dt)
    elif mode == "blinking":
        if cfg.get("eps") is None:
            raise ParameterError("blinking mode needs eps")
        traj = integrate_blinking(law, nodes, D, g, T, dt, cfg["eps"], seed)
    else:
        raise ParameterError(f"unknown simulation mode {mode!r}")
    traj.to_csv(out / "trajectory.csv")
    _write_nodes(out / "nodes.csv", nodes)
    m = int(cfg["m"])
    limit = harness.reference_solution(law, g, D, m, T, dt)
    type(traj)(limit.t0, limit.dt, project(limit.states, nodes)).to_csv(out / "limit_projected.csv")
    spread = np.ptp(traj.states, axis=1)
    return f"{mode}: N={n}, range {spread[0]:.4g} -> {spread[-1]:.4g}"


def cmd_blink(cfg, out):
    return cmd_simulate({**cfg, "mode": "blinking"}, out)


def cmd_limit(cfg, out):
    law, D, g = _config.parse_model(cfg)
    sol = solve_graph_limit(law, g, D, int(cfg["m"]), cfg["T"], cfg["dt"])
    sol.to_csv(out / "limit.csv")
    x = sol.snapshot(0).midpoints
    snapshots = cfg["snapshots"]
    if snapshots is None:
        snapshots = [t for t in DEFAULT_SNAPSHOTS if t <= cfg["T"]]
    for t in snapshots:
        snap = sol.at_time(t)
        write_csv(out / f"snapshot_t{fmt(t)}.csv", ["x", "u"], zip(x.tolist(), snap.values.tolist()))
    return f"limit on {sol.m} cells, range {np.ptp(sol.states[0]):.4g} -> {np.ptp(sol.states[-1]):.4g}"


def cmd_converge(cfg, out):
    ecfg = harness.ExperimentConfig.from_dict(cfg)
    report = harness.run_sweep(ecfg)
    report.write(out)
    return report.summary().rstrip()


def cmd_tails(cfg, out):
    ecfg = harness.ExperimentConfig.from_dict(cfg)
    reports = harness.run_lemma_tails(ecfg)
    harness.write_tail_reports(reports, out, ecfg.to_dict())
    return (out / "summary.txt").read_text().rstrip()


def cmd_moments(cfg, out):
    """Analytic moments against Monte Carlo at a few (x, y) points."""
    law, _, _ = _config.parse_model(cfg)
    M = law_moment_bound(law)
    rng = np.random.Generator(np.random.Philox(cfg["seed"]))
    points = cfg.get("points") or rng.random((5, 2)).tolist()
    rows, ok = [], True
    for x, y in points:
        xs, ys = np.full(cfg["samples"], float(x)), np.full(cfg["samples"], float(y))
        w = law.sample(xs, ys, rng)
        for k in range(1, 5):
            exact = float(law.moment(x, y, k))
            wk = w ** k
            mc, se = float(wk.mean()), float(wk.std(ddof=1) / np.sqrt(len(wk)))
            root = exact ** (1.0 / k)
            good = root <= M + 1e-9 and abs(mc - exact) <= 4 * se + 1e-12
            ok &= good
            rows.append([x, y, k, exact, mc, se, root, M, good])
    write_csv(out / "moments.csv", ["x", "y", "k", "analytic", "monte_carlo", "mc_se",
                                     "root", "bound", "ok"], rows)
    return f"moment bound M={M:.6g}; all checks ok: {ok}"


def cmd_averaging(cfg, out):
    ecfg = harness.ExperimentConfig.from_dict(cfg)
    rep = harness.run_averaging_sweep(int(cfg["N"]), cfg["eps_list"], int(cfg["trials"]), ecfg)
    rep.write(out)
    return (out / "summary.txt").read_text().rstrip()


SUBCOMMANDS = {
    "sample-graph": (cmd_sample_graph, {"N": 60, "mode": "random", "interval": 0, "grid": 256}),
    "simulate": (cmd_simulate, {"N": 60, "mode": "rr", "T": 40.0, "eps": None, "m": 256}),
    "blink": (cmd_blink, {"N": 60, "mode": "blinking", "T": 40.0, "eps": 0.1, "m": 256}),
    "limit": (cmd_limit, {"m": 512, "T": 40.0, "snapshots": None}),
    "converge": (cmd_converge, {"T": 10.0, "mode": "rr", "eps": None,
                                "n_list": [25, 50, 100, 200, 400], "trials": 20,
                                "ref_multiplier": 16, "workers": 1}),
    "tails": (cmd_tails, {"T": 10.0, "mode": "rr", "n_list": [100], "trials": 2000,
                          "workers": 1}),
    "moments": (cmd_moments, {"samples": 100000, "points": None}),
    "averaging": (cmd_averaging, {"T": 10.0, "N": 20, "eps_list": [1.0, 0.5, 0.1, 0.01],
                                  "trials": 20, "workers": 1}),
}


def build_parser():
    p = argparse.ArgumentParser(prog="graphlimit", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", "-c", required=True, help="JSON run description")
        s.add_argument("--out", "-o", help=f"output directory (default ${OUTPUT_ENV}/{name})")
        s.add_argument("--seed", type=int, help="override the master seed")
        s.add_argument("--workers", type=int, help="worker threads for Monte Carlo runs")
        s.add_argument("-v", "--verbose", action="count", default=0)
    return p


def _out_dir(args):
    if args.out:
        return Path(args.out)
    return Path(os.environ.get(OUTPUT_ENV, "graphlimit-output")) / args.command


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose, format="%(message)s")
    fn, defaults = SUBCOMMANDS[args.command]
    try:
        raw = json.loads(Path(args.config).read_text())
        if not isinstance(raw, dict):
            raise ParameterError("config must be a JSON object")
        if args.seed is not None:
            raw["seed"] = args.seed
        if args.workers is not None:
            raw["workers"] = args.workers
        cfg = _config.resolve(raw, defaults)
    except (OSError, json.JSONDecodeError, ParameterError, DomainError, LawError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    out = _out_dir(args)
    try:
        out.mkdir(parents=True, exist_ok=True)
        write_json(out / "config.json", cfg)
        message = fn(cfg, out)
    except (ParameterError, DomainError, KeyError, TypeError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (IntegrationError, LawError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    log.info(message)
    log.warning("wrote %s", out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
