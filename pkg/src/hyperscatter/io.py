"""Atomic CSV/JSON writers that stamp every file with the library version and config hash."""
from __future__ import annotations

import csv
import hashlib
import json
import os
import tempfile

import numpy as np

from . import __version__

__all__ = ["config_hash", "write_csv", "write_json", "kernel_table_rows", "to_jsonable"]


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    return obj


def config_hash(config: dict) -> str:
    blob = json.dumps(to_jsonable(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _atomic_write(path, write):
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            write(fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path, header, rows, config: dict):
    """CSV with a leading '# hyperscatter <version> config=<hash>' comment line."""

    def write(fh):
        fh.write(f"# hyperscatter {__version__} config={config_hash(config)}\n")
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])

    _atomic_write(path, write)


def write_json(path, payload: dict, config: dict):
    body = {"version": __version__, "config_hash": config_hash(config), "config": config, **payload}

    def write(fh):
        json.dump(to_jsonable(body), fh, indent=2, sort_keys=True)
        fh.write("\n")

    _atomic_write(path, write)


def kernel_table_rows(evals):
    """Rows (rho, re, im, err) from RadialKernelEval objects."""
    return [(e.rho, e.value.real, e.value.imag, e.error_estimate) for e in evals]
