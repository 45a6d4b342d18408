"""CSV / JSON / npy export of ensembles, reports and run manifests."""
import csv
import hashlib
import json
import os
from dataclasses import asdict, dataclass, field
from typing import List

import numpy as np
import scipy

from . import __version__
from .model import PathEnsemble


def versions():
    return f"randnet {__version__}; numpy {np.__version__}; scipy {scipy.__version__}"


@dataclass
class RunManifest:
    config_digest: str
    command: str
    seeds: List[int]
    versions: str = field(default_factory=versions)
    outputs: List[str] = field(default_factory=list)


def _fmt(v):
    return repr(float(v))


def write_ensemble_csv(path, ensemble, grid, run_id=0):
    """One row per (particle, time): run_id, particle, t, x, r_0, r_1, ..."""
    d = ensemble.positions.shape[1]
    t = grid.nodes
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["run_id", "particle", "t", "x"] + [f"r_{i}" for i in range(d)])
        for i in range(ensemble.m_paths):
            r = [_fmt(v) for v in ensemble.positions[i]]
            for k in range(ensemble.n_steps + 1):
                w.writerow([run_id, i, _fmt(t[k]), _fmt(ensemble.states[i, k])] + r)


def write_rows_csv(path, rows, columns):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(row[c]) if isinstance(row[c], float) else row[c] for c in columns])


def write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")


_ARRAYS = ("states", "positions", "brownian_increments", "ref_increments", "drift_record")


def save_ensemble(directory, prefix, ensemble):
    """Full-precision arrays as ``<prefix>.<field>.npy``; returns the file names."""
    names = []
    for name in _ARRAYS:
        arr = getattr(ensemble, name)
        if arr is None:
            continue
        fname = f"{prefix}.{name}.npy"
        np.save(os.path.join(directory, fname), arr)
        names.append(fname)
    with open(os.path.join(directory, f"{prefix}.seed"), "w") as fh:
        fh.write(f"{ensemble.seed}\n")
    names.append(f"{prefix}.seed")
    return names


def load_ensemble(directory, prefix):
    arrays = {}
    for name in _ARRAYS:
        path = os.path.join(directory, f"{prefix}.{name}.npy")
        arrays[name] = np.load(path) if os.path.exists(path) else None
    with open(os.path.join(directory, f"{prefix}.seed")) as fh:
        seed = int(fh.read().strip())
    return PathEnsemble(seed=seed, **arrays)


def file_digest(path):
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def write_manifest(directory, manifest):
    path = os.path.join(directory, "manifest.json")
    payload = asdict(manifest)
    payload["outputs"] = sorted(payload["outputs"])
    payload["output_sha256"] = {name: file_digest(os.path.join(directory, name))
                                for name in payload["outputs"]}
    write_json(path, payload)
    return path
