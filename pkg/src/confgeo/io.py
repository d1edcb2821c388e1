"""Trajectory CSV/JSON emission and re-reading.

Numbers are written with 17 significant digits, which round-trips every
double exactly, so re-analysing a written file reproduces the report.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .catalog.base import CatalogEntry
from .core import ConfGeoError, ConfigurationError, Signature, SignatureKind, Trajectory

__all__ = [
    "FLOAT_FMT",
    "coordinate_names",
    "output_grid",
    "sampled_trajectory",
    "trajectory_columns",
    "write_csv",
    "read_csv",
    "write_json",
    "to_jsonable",
    "signature_from_name",
]

FLOAT_FMT = "%.17g"

_SIG_NAMES = {
    "riemannian": SignatureKind.RIEMANNIAN,
    "spacelike": SignatureKind.LORENTZ_SPACELIKE,
    "timelike": SignatureKind.LORENTZ_TIMELIKE,
    SignatureKind.RIEMANNIAN.value: SignatureKind.RIEMANNIAN,
    SignatureKind.LORENTZ_SPACELIKE.value: SignatureKind.LORENTZ_SPACELIKE,
    SignatureKind.LORENTZ_TIMELIKE.value: SignatureKind.LORENTZ_TIMELIKE,
}


def signature_from_name(name: str | None, entry: CatalogEntry) -> Signature:
    if name is None:
        return entry.signature
    try:
        sig = Signature(_SIG_NAMES[str(name).lower()])
    except KeyError:
        raise ConfigurationError(f"unknown signature {name!r}; use riemannian, spacelike or timelike") from None
    if sig.lorentzian != bool(np.any(entry.eta < 0)):
        raise ConfigurationError(f"signature {name} does not match metric {entry.id}")
    return sig


def coordinate_names(entry: CatalogEntry) -> tuple[str, ...]:
    chart = entry.metric.chart if entry.metric is not None else entry.extras.get("chart")
    if chart is not None and chart.names:
        return tuple(chart.names)
    return tuple(f"x{i}" for i in range(entry.ncoord))


def output_grid(traj: Trajectory, samples: int) -> np.ndarray:
    """Solver step times merged with a uniform grid of ``samples`` points."""
    t0, t1 = traj.t[0], traj.t[-1]
    if samples < 2 or traj.dense is None:
        return traj.t.copy()
    uniform = np.linspace(t0, t1, samples)
    near = np.min(np.abs(uniform[:, None] - traj.t[None, :]), axis=1) if traj.t.size < 20000 else None
    if near is not None:
        uniform = uniform[near > 1e-12 * max(1.0, abs(t1))]
    return np.union1d(traj.t, uniform)


def sampled_trajectory(entry: CatalogEntry, sig: Signature, t, y, termination: str = "t_max",
                       rhs=None, events=None) -> Trajectory:
    """Trajectory over written samples with a cubic Hermite interpolant.

    Slopes come from the right-hand side at each sample, so the
    interpolant is as good as the samples allow and depends on nothing
    but the written numbers.
    """
    t = np.asarray(t, dtype=float)
    y = np.atleast_2d(np.asarray(y, dtype=float))
    rhs = rhs or entry.rhs(sig)
    dy = np.empty_like(y)
    for k in range(len(t)):
        try:
            dy[k] = rhs(t[k], y[k])
        except ConfGeoError:
            dy[k] = np.nan
    bad = ~np.all(np.isfinite(dy), axis=1)
    if np.any(bad):
        fd = np.gradient(y, t, axis=0)
        dy[bad] = fd[bad]
    dense = None
    if len(t) >= 2:
        spline = CubicHermiteSpline(t, y, dy, axis=0)
        dense = lambda tt: np.asarray(spline(tt)).T  # noqa: E731
    return Trajectory(t, y, list(events or []), termination, dense, entry.dim, entry.ncoord)


def trajectory_columns(entry: CatalogEntry, sig: Signature, t, y) -> tuple[list[str], np.ndarray]:
    """Column names and table: t, coordinates, u, a, |a|^2, constants, drifts."""
    names = ["t"] + [f"x_{n}" for n in coordinate_names(entry)]
    names += [f"u_{i}" for i in range(entry.dim)] + [f"a_{i}" for i in range(entry.dim)]
    nc, d = entry.ncoord, entry.dim
    eta = entry.eta
    a2 = np.array([float(np.dot(eta, row[nc + d:nc + 2 * d] ** 2)) for row in y])
    consts = entry.constant_functions(sig)
    cols = [np.asarray(t)[:, None], y, a2[:, None]]
    names.append("a2")
    drift_cols = []
    for cname, fn in consts.items():
        vals = np.array([fn(row) for row in y])
        cols.append(vals[:, None])
        names.append(f"c_{cname}")
        drift_cols.append(np.abs(vals - vals[0])[:, None])
    names += [f"drift_{c}" for c in consts]
    return names, np.hstack(cols + drift_cols)


def write_csv(path, names, table) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names)
        for row in table:
            w.writerow([FLOAT_FMT % v for v in row])


def read_csv(path) -> tuple[list[str], np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ConfigurationError(f"{path}: empty file")
    return rows[0], np.array([[float(v) for v in r] for r in rows[1:]], dtype=float)


def to_jsonable(obj):
    """Recursively convert numpy scalars/arrays; non-finite floats become strings."""
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
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def write_json(path, payload) -> None:
    text = json.dumps(to_jsonable(payload), indent=2, allow_nan=False)
    if path is None or str(path) == "-":
        print(text)
    else:
        Path(path).write_text(text + "\n")
