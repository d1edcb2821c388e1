"""Command-line front end.

Subcommands: ``integrate``, ``quadrature``, ``verify``, ``scan``, ``exact``.
Settings come from an optional JSON document (``--config``) overridden by
flags.  Exit codes: 0 success, 1 bad configuration or failed verification,
2 infeasible initial data, 3 the integration left its chart.
"""
from __future__ import annotations

import argparse
import csv
import itertools
import json
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import classify_orbit, spiral_check, stability_scan
from .catalog import ENTRY_IDS, FlatKind, flat_explicit_state, get_entry
from .core import (
    CGState,
    ConfGeoError,
    ConfigurationError,
    DomainError,
    InfeasibleError,
    InsufficientDataError,
    SingularParametrizationError,
)
from .integrator import IntegratorConfig, integrate, monitor
from .io import (
    output_grid,
    read_csv,
    sampled_trajectory,
    signature_from_name,
    to_jsonable,
    trajectory_columns,
    write_csv,
    write_json,
)
from .quadratures import (
    RadialReduction,
    berger_quartic,
    berger_special,
    circular_f2,
    circular_orbit,
    critical_r0,
    gamma_evolve,
    nil_lor_special,
    nil_quartic,
    nil_riem_sech,
    schwarzschild_equatorial,
    schwarzschild_radial,
    state_from_constants,
)
from .verify import default_state, run_suite

__all__ = ["main", "build_parser", "load_config", "reanalyze", "EXIT_OK", "EXIT_CONFIG",
           "EXIT_INFEASIBLE", "EXIT_DOMAIN"]

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_DOMAIN = 0, 1, 2, 3

_INTEGRATOR_KEYS = {"rel_tol", "abs_tol", "max_step", "min_step", "blowup_threshold", "event_tol",
                    "stall_factor", "stall_size", "max_steps"}
_CONFIG_KEYS = {
    "metric": str, "params": dict, "signature": str,
    "x0": list, "u0": list, "a0": list,
    "E": (int, float), "J": (int, float), "gamma0": (int, float), "sign": int, "chi0": (int, float),
    "t_max": (int, float), "rel_tol": (int, float), "abs_tol": (int, float), "integrator": dict,
    "generic": bool, "samples": int, "out": str, "format": str, "jobs": int,
    "case": str, "a": (int, float), "r0": (int, float), "q": (int, float), "C": (int, float),
    "r_ref": (int, float), "radius": (int, float), "r_lo": (int, float), "r_hi": (int, float),
    "r_start": (int, float), "grid": dict, "kind": str,
}
_QUAD_CASES = ("nil-r", "nil-l", "berger", "axisym", "schw-radial", "schw-equatorial")
_EXACT_KINDS = tuple(k.value for k in FlatKind) + (
    "nil-sech", "nil-lor-sec", "nil-lor-const-gamma", "nil-lor-alpha-eq-beta", "berger-sech")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigurationError(f"{self.prog}: {message}")


def _line_of(text: str, key: str) -> int:
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    return text.count("\n", 0, m.start()) + 1 if m else 0


def load_config(path) -> dict:
    """Read and validate a JSON run configuration; errors cite file and line."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as err:
        raise ConfigurationError(f"{path}: {err.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigurationError(f"{path}:{err.lineno}:{err.colno}: {err.msg}") from None
    if not isinstance(doc, dict):
        raise ConfigurationError(f"{path}:1: top level must be an object")
    for key, val in doc.items():
        where = f"{path}:{_line_of(text, key)}"
        if key not in _CONFIG_KEYS:
            raise ConfigurationError(f"{where}: unknown key {key!r}")
        want = _CONFIG_KEYS[key]
        if isinstance(val, bool) and want is not bool:
            raise ConfigurationError(f"{where}: {key!r} must not be a boolean")
        if not isinstance(val, want):
            raise ConfigurationError(f"{where}: {key!r} has the wrong type ({type(val).__name__})")
        if key == "integrator":
            for k in val:
                if k not in _INTEGRATOR_KEYS:
                    raise ConfigurationError(f"{path}:{_line_of(text, k)}: unknown integrator key {k!r}")
    return doc


def _vector(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _param_value(v: str):
    low = v.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return float(v)
    except ValueError:
        return v


def parse_params(items) -> dict:
    out = {}
    for item in items or ():
        if "=" not in item:
            raise ConfigurationError(f"parameter {item!r} is not of the form key=value")
        k, v = item.split("=", 1)
        out[k.strip()] = _param_value(v.strip())
    return out


def _grid_values(spec: str) -> list:
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ConfigurationError(f"range {spec!r} must be lo:hi:n")
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
        return [float(v) for v in np.linspace(lo, hi, n)]
    return [float(v) for v in spec.split(",")]


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON run configuration; flags override it")
    common.add_argument("--metric", choices=ENTRY_IDS, help="catalogue entry")
    common.add_argument("--params", nargs="*", default=None, metavar="K=V", help="entry parameters")
    common.add_argument("--signature", help="riemannian, spacelike or timelike")
    common.add_argument("--x0", type=_vector, help="initial coordinates, comma separated")
    common.add_argument("--u0", type=_vector, help="initial velocity frame components")
    common.add_argument("--a0", type=_vector, help="initial acceleration frame components")
    common.add_argument("--E", type=float, help="first constant of the quartic reduction")
    common.add_argument("--J", type=float, help="second constant of the quartic reduction")
    common.add_argument("--gamma0", type=float, help="initial gamma for (E, J) data")
    common.add_argument("--sign", type=int, choices=(-1, 1), help="branch of gamma' (or r')")
    common.add_argument("--chi0", type=float, help="initial velocity angle for (E, J) data")
    common.add_argument("--t-max", dest="t_max", type=float, help="integration length")
    common.add_argument("--rel-tol", dest="rel_tol", type=float)
    common.add_argument("--abs-tol", dest="abs_tol", type=float)
    common.add_argument("--samples", type=int, help="uniform output samples added to the solver steps")
    common.add_argument("--generic", action="store_true", default=None,
                        help="use the generic frame right-hand side")
    common.add_argument("--out", help="output path prefix (default: report to stdout)")
    common.add_argument("--format", choices=("csv", "json"), help="trajectory/table format")
    common.add_argument("--jobs", type=int, help="worker processes for scan")

    p = _Parser(prog="confgeo", description="Conformal geodesics: integration, quadratures and checks.")
    p.add_argument("--version", action="version", version=f"confgeo {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("integrate", parents=[common], help="integrate the third-order system")
    q = sub.add_parser("quadrature", parents=[common], help="quartic and radial reductions")
    q.add_argument("--case", choices=_QUAD_CASES)
    q.add_argument("--a", type=float, help="acceleration for schw-radial")
    q.add_argument("--r0", type=float, help="r0 for schw-radial")
    q.add_argument("--q", type=float, help="acceleration constant (axisym, schw-equatorial)")
    q.add_argument("--C", type=float, help="second constant (axisym, schw-equatorial)")
    q.add_argument("--r-ref", dest="r_ref", type=float, help="reference radius for schw-equatorial")
    q.add_argument("--radius", type=float, help="circular-orbit radius (axisym)")
    q.add_argument("--r-lo", dest="r_lo", type=float)
    q.add_argument("--r-hi", dest="r_hi", type=float)
    q.add_argument("--r-start", dest="r_start", type=float, help="initial radius for an r(t) table")
    sub.add_parser("verify", parents=[common], help="run the invariant suite on an entry")
    s = sub.add_parser("scan", parents=[common], help="verdict table over a parameter grid")
    s.add_argument("--grid", action="append", metavar="KEY=V1,V2|LO:HI:N",
                   help="grid axis over E, J, lam or radius; repeatable")
    e = sub.add_parser("exact", parents=[common], help="evaluate closed-form solutions")
    e.add_argument("--kind", choices=_EXACT_KINDS)
    return p


def _run_config(args) -> dict:
    rc = load_config(args.config) if args.config else {}
    for key, val in vars(args).items():
        if key in ("config", "command", "grid") or val is None:
            continue
        if key == "params":
            rc["params"] = {**rc.get("params", {}), **parse_params(val)}
        else:
            rc[key] = val
    if getattr(args, "grid", None):
        grid = dict(rc.get("grid", {}))
        for item in args.grid:
            if "=" not in item:
                raise ConfigurationError(f"grid axis {item!r} must be KEY=VALUES")
            k, v = item.split("=", 1)
            grid[k.strip()] = _grid_values(v)
        rc["grid"] = grid
    return rc


def _integrator_config(rc: dict, t_max_default: float = 10.0) -> IntegratorConfig:
    kw = dict(rc.get("integrator", {}))
    for k in ("rel_tol", "abs_tol"):
        if k in rc:
            kw[k] = rc[k]
    kw["t_max"] = float(rc.get("t_max", t_max_default))
    return IntegratorConfig(**kw)


def _entry(rc: dict):
    if "metric" not in rc:
        raise ConfigurationError("no metric given (--metric or \"metric\" in the config)")
    return get_entry(rc["metric"], **rc.get("params", {}))


def _initial_state(entry, rc: dict) -> CGState:
    have = [k for k in ("x0", "u0", "a0") if k in rc]
    if have:
        if len(have) != 3:
            raise ConfigurationError("x0, u0 and a0 must be given together")
        x0, u0, a0 = (np.asarray(rc[k], dtype=float) for k in ("x0", "u0", "a0"))
        if x0.size != entry.ncoord or u0.size != entry.dim or a0.size != entry.dim:
            raise ConfigurationError(f"{entry.id} needs {entry.ncoord} coordinates and "
                                     f"{entry.dim} frame components")
        return CGState(x0, u0, a0)
    if "E" in rc or "J" in rc:
        if entry.id not in ("nil-r", "nil-l", "berger"):
            raise ConfigurationError("(E, J) initial data applies to nil-r, nil-l and berger")
        if "gamma0" not in rc:
            raise ConfigurationError("(E, J) initial data needs gamma0")
        s = state_from_constants(entry.id, float(rc.get("E", 0.0)), float(rc.get("J", 0.0)),
                                 entry.params["lam"], float(rc["gamma0"]), int(rc.get("sign", 1)),
                                 float(rc.get("chi0", 0.0)))
        if entry.id == "berger":
            s = CGState(np.array([np.pi / 2, 0.0, 0.0]), s.u, s.a)
        return s
    return default_state(entry)


def _prefix(out: str) -> str:
    for suf in (".csv", ".json"):
        if out.endswith(suf):
            return out[: -len(suf)]
    return out


def _analyse(entry, sig, traj) -> dict:
    out = {}
    try:
        out["verdict"] = classify_orbit(traj, entry).to_dict()
    except InsufficientDataError as err:
        out["verdict"] = {"kind": None, "evidence": {"insufficient_data": str(err)}}
    out["spiral"] = spiral_check(traj, sig).to_dict()
    return out


def cmd_integrate(rc: dict) -> int:
    entry = _entry(rc)
    sig = signature_from_name(rc.get("signature"), entry)
    s0 = _initial_state(entry, rc)
    entry.check_initial(s0, sig)
    cfg = _integrator_config(rc)
    rhs = entry.rhs(sig, specialized=not rc.get("generic", False))
    tr = integrate(rhs, s0.to_vector(), cfg, dim=entry.dim, ncoord=entry.ncoord)
    ledger = monitor(tr, entry.constant_functions(sig))

    t = output_grid(tr, int(rc.get("samples", 2001)))
    y = tr.y if t.size == tr.t.size else np.asarray(tr.dense(t)).T
    if t.size != tr.t.size:
        y[-1] = tr.y[-1]
    names, table = trajectory_columns(entry, sig, t, y)
    # analysis runs on exactly the numbers written out, so re-reading reproduces it
    samp = sampled_trajectory(entry, sig, t, y, tr.termination, rhs, tr.events)
    report = {
        "command": "integrate",
        "metric": entry.id,
        "params": entry.params,
        "signature": sig.kind.value,
        "layout": {"ncoord": entry.ncoord, "dim": entry.dim},
        "initial": {"x0": s0.x, "u0": s0.u, "a0": s0.a},
        "integrator": {k: getattr(cfg, k) for k in cfg.__dataclass_fields__},
        "generic": bool(rc.get("generic", False)),
        "termination": tr.termination,
        "t_end": tr.t_end,
        "steps": len(tr),
        "events": [{"t": e.t, "kind": e.kind.value, "name": e.name} for e in tr.events],
        "drift": ledger,
        **_analyse(entry, sig, samp),
    }
    if tr.termination == "blowup":
        report["blowup"] = report["verdict"]["evidence"] if report["verdict"]["kind"] else {}
    fmt = rc.get("format", "csv")
    out = rc.get("out")
    if fmt == "json":
        report["columns"] = names
        report["table"] = table
    if out:
        pre = _prefix(out)
        if fmt == "csv":
            write_csv(pre + ".csv", names, table)
            report["trajectory"] = pre + ".csv"
        write_json(pre + ".json", report)
    else:
        write_json(None, report)
    return EXIT_DOMAIN if tr.termination in ("domain_exit", "frame_singularity") else EXIT_OK


def reanalyze(csv_path, report_path) -> dict:
    """Classify a written trajectory again from its CSV and report."""
    report = json.loads(Path(report_path).read_text())
    entry = get_entry(report["metric"], **report["params"])
    sig = signature_from_name(report["signature"], entry)
    names, table = read_csv(csv_path)
    width = 1 + entry.ncoord + 2 * entry.dim
    rhs = entry.rhs(sig, specialized=not report.get("generic", False))
    traj = sampled_trajectory(entry, sig, table[:, 0], table[:, 1:width], report["termination"], rhs)
    return to_jsonable(_analyse(entry, sig, traj))


def _quartic_summary(q) -> dict:
    out = {
        "case": q.case.value,
        "constants": {"E": q.E, "J": q.J, "lam": q.lam},
        "coefficients": list(q.coeffs),
        "roots": [{"value": r.value, "multiplicity": r.multiplicity} for r in q.roots],
        "root_count": sum(r.multiplicity for r in q.roots),
        "intervals": [list(iv) for iv in q.intervals],
        "endpoint_values": list(q.endpoint_values()),
    }
    return out


def _table_out(rc, names, rows, report):
    out = rc.get("out")
    if out:
        pre = _prefix(out)
        write_csv(pre + ".csv", names, rows)
        report["table"] = pre + ".csv"
        write_json(pre + ".json", report)
    else:
        write_json(None, report)


def cmd_quadrature(rc: dict) -> int:
    case = rc.get("case") or rc.get("metric")
    if case not in _QUAD_CASES:
        raise ConfigurationError(f"quadrature case must be one of {', '.join(_QUAD_CASES)}")
    params = rc.get("params", {})
    cfg = _integrator_config(rc)
    report: dict = {"command": "quadrature"}
    names, rows = None, None
    if case in ("nil-r", "nil-l", "berger"):
        E, J = float(rc.get("E", 0.0)), float(rc.get("J", 0.0))
        lam = float(params.get("lam", 2.0 if case == "berger" else 1.0))
        q = berger_quartic(E, J, lam) if case == "berger" else nil_quartic(E, J, lam, 1 if case == "nil-r" else -1)
        report.update(_quartic_summary(q))
        if case == "berger":
            try:
                sp = berger_special(lam)
                report["special"] = {"k": sp.k, "mu": sp.mu}
            except InfeasibleError as err:
                report["special"] = {"exists": False, "reason": str(err)}
        if not q.intervals:
            write_json(rc.get("out") and _prefix(rc["out"]) + ".json", report)
            raise InfeasibleError(f"no allowed interval for E={E:g}, J={J:g}")
        if "gamma0" in rc:
            ev = gamma_evolve(q, float(rc["gamma0"]), int(rc.get("sign", 1)), (0.0, cfg.t_max), cfg)
            report["termination"] = ev.termination
            report["turning_points"] = ev.turning_points
            if ev.blowup is not None:
                report["blowup"] = {"t0": ev.blowup.t0, "residual": ev.blowup.residual}
            names, rows = ["t", "gamma", "dgamma"], np.column_stack([ev.t, ev.gamma, ev.dgamma])
    elif case == "axisym":
        entry = get_entry("axisym", **params)
        prof = entry.extras.get("radial")
        if prof is None:
            raise ConfigurationError("axisym quadrature needs a radial profile")
        if "radius" in rc:
            red = circular_orbit(prof, float(rc["radius"]))
            report["circular"] = {"radius": rc["radius"], "f2": circular_f2(prof, float(rc["radius"]))}
        else:
            if "q" not in rc or "C" not in rc:
                raise ConfigurationError("axisym quadrature needs q and C, or radius")
            red = RadialReduction(prof, float(rc["q"]), float(rc["C"]))
        r_hi = float(rc.get("r_hi", min(prof.r_max, 20.0)))
        r_lo = float(rc.get("r_lo", 1e-6))
        report.update({"case": case, "profile": prof.name, "q": red.q, "C": red.C,
                       "class": red.classify(), "turning_points": red.turning_points(r_lo, r_hi)})
        if "r_start" in rc:
            ev = red.evolve(float(rc["r_start"]), int(rc.get("sign", 1)), (0.0, cfg.t_max), cfg)
            names, rows = ["t", "r", "dr"], np.column_stack([ev.t, ev.gamma, ev.dgamma])
    elif case == "schw-radial":
        m = float(params.get("m", 1.0))
        if "a" not in rc or "r0" not in rc:
            raise ConfigurationError("schw-radial needs a and r0")
        sr = schwarzschild_radial(m, float(rc["a"]), float(rc["r0"]))
        report.update({"case": case, "m": m, "a": sr.a, "r0": sr.r0, "regime": sr.regime(),
                       "turning_points": sr.turning_points()})
        if sr.a != 0:
            rc_, r0c = critical_r0(m, sr.a)
            report["critical"] = {"r_c": rc_, "r0_c": r0c}
        if "r_start" in rc:
            ev = sr.evolve(float(rc["r_start"]), int(rc.get("sign", 1)), (0.0, cfg.t_max), cfg)
            report["termination"] = ev.termination
            names, rows = ["t", "r", "dr"], np.column_stack([ev.t, ev.gamma, ev.dgamma])
    else:
        m = float(params.get("m", 1.0))
        for k in ("q", "C", "r_ref"):
            if k not in rc:
                raise ConfigurationError(f"schw-equatorial needs {k}")
        red = schwarzschild_equatorial(m, float(rc["q"]), float(rc["C"]), float(rc["r_ref"]))
        r_hi = float(rc.get("r_hi", 50.0 * m))
        report.update({"case": case, "m": m, "q": red.q, "C": red.C, "r_ref": red.r_ref,
                       "turning_points": red.turning_points(float(rc.get("r_lo", 2 * m)), r_hi)})
    if names is not None:
        _table_out(rc, names, rows, report)
    else:
        write_json(rc.get("out") and _prefix(rc["out"]) + ".json", report)
    return EXIT_OK


def cmd_verify(rc: dict) -> int:
    entry = _entry(rc)
    sig = signature_from_name(rc.get("signature"), entry)
    state = _initial_state(entry, rc) if any(k in rc for k in ("x0", "E", "J")) else None
    cfg = _integrator_config(rc, 20.0)
    rep = run_suite(entry, sig, cfg, t_max=cfg.t_max, state=state)
    write_json(rc.get("out") and _prefix(rc["out"]) + ".json", rep.to_dict())
    return EXIT_OK if rep.passed else EXIT_CONFIG


def _pick_gamma0(q) -> float | None:
    """A starting gamma inside the first usable allowed interval."""
    for lo, hi in q.intervals:
        if q.case.riemannian and (lo <= -1 or hi >= 1) and lo != hi:
            lo, hi = max(lo, -1 + 1e-6), min(hi, 1 - 1e-6)
        if lo == hi:
            return lo
        if np.isinf(lo) and np.isinf(hi):
            return 0.0
        if np.isinf(lo):
            return hi - 0.5
        if np.isinf(hi):
            return lo + 0.5
        return 0.5 * (lo + hi)
    return None


def _scan_row(task) -> dict:
    index, metric, params, point, rc = task
    row = {"index": index, **point}
    try:
        if "radius" in point:
            entry = get_entry(metric, **params)
            sr = stability_scan(entry, [point["radius"]])[0]
            row.update({"verdict": sr.flag, "f2": sr.f2, "q": sr.q, "C": sr.C})
            return row
        lam = float(point.get("lam", params.get("lam", 2.0 if metric == "berger" else 1.0)))
        entry = get_entry(metric, **{**params, "lam": lam})
        E, J = float(point.get("E", 0.0)), float(point.get("J", 0.0))
        q = berger_quartic(E, J, lam) if metric == "berger" else nil_quartic(E, J, lam, 1 if metric == "nil-r" else -1)
        row["root_count"] = sum(r.multiplicity for r in q.roots)
        row["distinct_roots"] = len(q.roots)
        g0 = _pick_gamma0(q)
        if g0 is None:
            row["verdict"] = "Infeasible"
            return row
        s = state_from_constants(metric, E, J, lam, g0, 1)
        if metric == "berger":
            s = CGState(np.array([np.pi / 2, 0.0, 0.0]), s.u, s.a)
        sig = entry.signature
        cfg = _integrator_config(rc, 40.0)
        tr = integrate(entry.rhs(sig), s.to_vector(), cfg, dim=entry.dim, ncoord=entry.ncoord)
        row["gamma0"] = g0
        row["termination"] = tr.termination
        try:
            v = classify_orbit(tr, entry)
            row["verdict"] = v.kind.value
            row["evidence"] = v.evidence
        except InsufficientDataError as err:
            row["verdict"] = "Undetermined"
            row["evidence"] = {"insufficient_data": str(err)}
    except ConfGeoError as err:
        row["verdict"] = None
        row["error"] = f"{type(err).__name__}: {err}"
    return to_jsonable(row)


def cmd_scan(rc: dict) -> int:
    metric = rc.get("metric")
    if metric is None:
        raise ConfigurationError("scan needs a metric")
    grid = rc.get("grid") or {}
    if not grid:
        raise ConfigurationError("scan needs a grid (--grid KEY=VALUES)")
    allowed = {"radius"} if metric == "axisym" else {"E", "J", "lam"}
    if metric not in ("axisym", "nil-r", "nil-l", "berger"):
        raise ConfigurationError("scan supports axisym, nil-r, nil-l and berger")
    for k in grid:
        if k not in allowed:
            raise ConfigurationError(f"grid key {k!r} not valid for {metric}; use {sorted(allowed)}")
    keys = [k for k in ("E", "J", "lam", "radius") if k in grid]
    points = [dict(zip(keys, vals)) for vals in itertools.product(*(grid[k] for k in keys))]
    params = rc.get("params", {})
    lean = {k: rc[k] for k in ("t_max", "rel_tol", "abs_tol", "integrator") if k in rc}
    tasks = [(i, metric, params, p, lean) for i, p in enumerate(points)]
    jobs = int(rc.get("jobs", 1))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_scan_row, tasks))
    else:
        rows = [_scan_row(t) for t in tasks]
    report = {"command": "scan", "metric": metric, "params": params, "grid": grid, "rows": rows}
    out = rc.get("out")
    if out:
        pre = _prefix(out)
        cols = ["index"] + keys + ["verdict", "root_count", "detail"]
        with open(pre + ".csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(cols)
            for r in rows:
                detail = {k: v for k, v in r.items() if k not in cols}
                w.writerow([r.get("index")] + ["%.17g" % r[k] for k in keys]
                           + [r.get("verdict"), r.get("root_count", ""), json.dumps(detail, sort_keys=True)])
        report["table"] = pre + ".csv"
        write_json(pre + ".json", report)
    else:
        write_json(None, report)
    return EXIT_OK


_FLAT_DEFAULTS = {
    "circle": ([0, 0, 0], [1, 0, 0], [0, 1, 0]),
    "geodesic": ([0, 0, 0], [1, 0, 0], [0, 0, 0]),
    "timelike-hyperbola": ([0, 0, 0], [1, 0, 0], [0, 1, 0]),
    "spacelike-hyperbola": ([0, 0, 0], [0, 1, 0], [1, 0, 0]),
    "null-accel-parabola": ([0, 0, 0], [0, 1, 0], [1, 0, 1]),
}


def cmd_exact(rc: dict) -> int:
    kind = rc.get("kind")
    if kind not in _EXACT_KINDS:
        raise ConfigurationError(f"exact needs --kind, one of {', '.join(_EXACT_KINDS)}")
    params = rc.get("params", {})
    t_max = float(rc.get("t_max", 10.0))
    n = int(rc.get("samples", 201))
    ts = np.linspace(0.0, t_max, n)
    report: dict = {"command": "exact", "kind": kind, "params": params}
    if kind in _FLAT_DEFAULTS:
        x0, u0, a0 = (rc.get(k, d) for k, d in zip(("x0", "u0", "a0"), _FLAT_DEFAULTS[kind]))
        states = [flat_explicit_state(kind, x0, u0, a0, t) for t in ts]
        names = ["t", "x_0", "x_1", "x_2", "u_0", "u_1", "u_2", "a_0", "a_1", "a_2"]
        rows = np.array([np.concatenate([[t], s.x, s.u, s.a]) for t, s in zip(ts, states)])
    elif kind == "nil-sech":
        lam = float(params.get("lam", 1.0))
        names, rows = ["t", "gamma"], np.column_stack([ts, nil_riem_sech(lam, ts)])
    elif kind == "berger-sech":
        sp = berger_special(float(params.get("lam", 2.0)))
        report["special"] = {"k": sp.k, "mu": sp.mu}
        names, rows = ["t", "gamma"], np.column_stack([ts, sp.gamma(ts)])
    else:
        sub = kind[len("nil-lor-"):]
        lam = float(params.get("lam", 1.0))
        if sub == "sec":
            t0 = np.pi / (lam * np.sqrt(3))
            ts = np.linspace(0.0, min(t_max, 0.99 * t0), n)
            report["t0"] = t0
        d = nil_lor_special(sub, params, ts)
        cols = ("alpha", "beta", "gamma", "a1", "a2", "a3")
        names = ["t", *cols]
        rows = np.column_stack([ts] + [np.broadcast_to(d[c], ts.shape) for c in cols])
        report["constants"] = {"E": d["E"], "J": d["J"]}
    _table_out(rc, names, rows, report)
    return EXIT_OK


_COMMANDS = {"integrate": cmd_integrate, "quadrature": cmd_quadrature, "verify": cmd_verify,
             "scan": cmd_scan, "exact": cmd_exact}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        rc = _run_config(args)
        return _COMMANDS[args.command](rc)
    except ConfigurationError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except (InfeasibleError, SingularParametrizationError) as err:
        print(f"infeasible: {err}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except DomainError as err:
        print(f"domain exit: {err}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
