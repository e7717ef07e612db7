"""Node coordinates and weight-matrix realizations.

Every edge weight is a pure function of ``(law, coords, master_seed, k, i, j)``.
The Philox key is derived from ``(master_seed, k)`` and row ``i`` occupies its
own block of the 256-bit counter, so row ``i`` can be generated alone, in any
order, or in parallel and still produce the same bits.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import LawError, ParameterError
from .export import write_matrix_csv, write_pgm

_NODE_TAG = 0x6E6F6465   # "node"
_EDGE_TAG = 0x65646765   # "edge"


@dataclass(frozen=True, eq=False)
class NodeSet:
    coords: np.ndarray
    mode: str                # "random" or "deterministic"
    seed: int | None = None

    @property
    def n(self):
        return len(self.coords)


@dataclass(eq=False)
class WeightMatrix:
    xi: np.ndarray
    provenance: dict = field(default_factory=dict)

    @property
    def n(self):
        return self.xi.shape[0]


def _check_n(n):
    if int(n) != n or n < 1:
        raise ParameterError(f"node count must be a positive integer, got {n!r}")
    return int(n)


def make_nodes_random(n, seed):
    """``n`` i.i.d. uniform coordinates on [0, 1), reproducible from ``seed``."""
    n = _check_n(n)
    ss = np.random.SeedSequence([int(seed), _NODE_TAG])
    coords = np.random.Generator(np.random.Philox(ss)).random(n)
    return NodeSet(coords, "random", int(seed))


def make_nodes_deterministic(n):
    """Mid-cell coordinates ``(2i - 1) / (2n)``, i = 1..n."""
    n = _check_n(n)
    return NodeSet((2.0 * np.arange(1, n + 1) - 1.0) / (2.0 * n), "deterministic")


def trial_seed(master_seed, *parts):
    """64-bit seed for one Monte Carlo trial, keyed by e.g. ``(N, t)``."""
    ss = np.random.SeedSequence([int(master_seed), *(int(p) for p in parts)])
    return int(ss.generate_state(1, np.uint64)[0])


def edge_key(master_seed, interval):
    ss = np.random.SeedSequence([int(master_seed), int(interval), _EDGE_TAG])
    return ss.generate_state(2, np.uint64)


def row_uniforms(key, row, n, d):
    """The ``(n, d)`` uniforms in (0, 1] feeding row ``row`` of a matrix."""
    counter = np.array([0, 0, row, 0], dtype=np.uint64)
    gen = np.random.Generator(np.random.Philox(key=key, counter=counter))
    return 1.0 - gen.random((n, d))


def sample_rows(law, nodes, master_seed, interval, rows):
    """Sampled weights for the given row indices, shape ``(len(rows), n)``."""
    x = nodes.coords
    rows = np.asarray(rows, dtype=np.int64)
    d = law.n_uniforms
    if d:
        key = edge_key(master_seed, interval)
        u = np.stack([row_uniforms(key, int(i), nodes.n, d) for i in rows])
    else:
        u = np.empty((len(rows), nodes.n, 0))
    xi = np.asarray(law.transform(x[rows][:, None], x[None, :], u), float)
    if not np.all(np.isfinite(xi)) or np.any(xi < 0.0):
        raise LawError(f"{law.kind}: sampled a non-finite or negative weight")
    return xi


def sample_weight_matrix(law, nodes, master_seed, interval=0):
    """One realization of the random weights; the diagonal is sampled too."""
    if interval < 0:
        raise ParameterError("interval index must be >= 0")
    xi = sample_rows(law, nodes, master_seed, interval, np.arange(nodes.n))
    return WeightMatrix(xi, {"law": law.spec(), "seed": int(master_seed),
                             "interval": int(interval)})


def expected_weight_matrix(law, nodes, chunk=512):
    """Mean weights ``wbar(x_i, x_j)``, built in row chunks to bound memory."""
    x = nodes.coords
    out = np.empty((nodes.n, nodes.n))
    for start in range(0, nodes.n, chunk):
        stop = min(start + chunk, nodes.n)
        out[start:stop] = law.mean(x[start:stop, None], x[None, :])
    return WeightMatrix(out, {"law": law.spec(), "expected": True})


def export_matrix(matrix, csv_path=None, pgm_path=None):
    xi = matrix.xi if isinstance(matrix, WeightMatrix) else matrix
    if csv_path is not None:
        write_matrix_csv(csv_path, xi)
    if pgm_path is not None:
        write_pgm(pgm_path, xi)
