"""Plain-text writers shared by the library and the command line."""
import csv
import json
from pathlib import Path

import numpy as np


def fmt(value):
    """Locale-independent, round-trippable text for a number."""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def write_csv(path, header, rows, comment=None):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        if comment is not None:
            fh.write(f"# {comment}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    return path


def write_matrix_csv(path, matrix, prefix="c"):
    matrix = np.asarray(matrix)
    header = [f"{prefix}{j + 1}" for j in range(matrix.shape[1])]
    return write_csv(path, header, matrix.tolist())


def write_pgm(path, matrix):
    """Plain (P2) grayscale pixel map, linear over [0, max entry]."""
    matrix = np.asarray(matrix, float)
    top = float(matrix.max()) if matrix.size else 0.0
    if top > 0.0:
        pixels = np.rint(np.clip(matrix, 0.0, None) / top * 255.0).astype(int)
    else:
        pixels = np.zeros(matrix.shape, int)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    h, w = pixels.shape
    lines = ["P2", f"{w} {h}", "255"]
    lines += [" ".join(str(p) for p in row) for row in pixels]
    path.write_text("\n".join(lines) + "\n")
    return path


def read_pgm(path):
    tokens = Path(path).read_text().split()
    if tokens[0] != "P2":
        raise ValueError("not a plain PGM file")
    w, h, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    data = np.array([int(t) for t in tokens[4:4 + w * h]])
    return data.reshape(h, w), maxval


def write_json(path, obj):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
    return path
