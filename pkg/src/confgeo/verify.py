"""Invariant suites run against a catalogue entry.

Each check yields a measured value and a tolerance; a suite passes when
every check does.  ``rhs_override`` replaces the specialised right-hand
side, which is how a corrupted system is shown to be caught.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .analysis import SpiralVerdict, killing_trajectory_test, spiral_check
from .catalog.base import CatalogEntry
from .core import CGState, ConfGeoError, Signature
from .integrator import IntegratorConfig, integrate, monitor
from .quadratures import (
    berger_constants,
    berger_quartic,
    gamma_evolve,
    nil_constants,
    nil_quartic,
    radial_horizon_state,
    state_from_constants,
)

__all__ = ["CheckResult", "VerifyReport", "default_state", "run_suite"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float
    tolerance: float
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "value": float(self.value),
                "tolerance": self.tolerance, "detail": self.detail}


@dataclass
class VerifyReport:
    entry_id: str
    params: dict
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {"metric": self.entry_id, "params": self.params, "passed": self.passed,
                "checks": [c.to_dict() for c in self.checks]}


def default_state(entry: CatalogEntry) -> CGState:
    """A generic valid initial state for each catalogue entry."""
    eid = entry.id
    if eid in ("e3", "s3", "h3"):
        return CGState(np.array([0.1, 0.2, 0.0]), np.array([0.6, 0.0, 0.8]), np.array([0.0, 0.5, 0.0]))
    if eid == "m3":
        ch, sh = np.cosh(0.3), np.sinh(0.3)
        return CGState(np.zeros(3), np.array([ch, sh, 0.0]), np.array([0.0, 0.0, 0.2]))
    if eid == "nil-r":
        return state_from_constants("nil-r", 0.3, 0.1, entry.params["lam"], 0.2, chi0=0.4)
    if eid == "nil-l":
        return CGState(np.zeros(3), np.array([1.0, 0.0, 0.0]), np.array([0.0, 0.3, 0.2]))
    if eid == "berger":
        return CGState(np.array([np.pi / 2, 0.0, 0.0]), np.array([0.6, 0.0, 0.8]), np.array([0.0, 0.5, 0.0]))
    if eid == "schw-ext":
        m = entry.params["m"]
        b = 0.3
        u = np.array([np.cosh(b), 0.6 * np.sinh(b), 0.0, 0.8 * np.sinh(b)])
        return CGState(np.array([0.0, 20.0 * m, np.pi / 2 - 0.3, 0.0]), u, np.array([0.0, 0.0, 0.05, 0.0]))
    if eid == "schw-hor":
        y = radial_horizon_state(entry.params["m"], 0.3, 3.0 * entry.params["m"], 0.2)
        return CGState(y[:4], y[4:8], y[8:12])
    if eid == "axisym":
        chi, q = 0.3, 0.4
        return CGState(np.array([1.0, 0.0, 0.0]), np.array([np.cos(chi), np.sin(chi), 0.0]),
                       np.array([-q * np.sin(chi), q * np.cos(chi), 0.0]))
    raise ConfGeoError(f"no default state for {eid}")


def _conserved(entry: CatalogEntry, sig: Signature) -> dict:
    consts = dict(entry.constant_functions(sig))
    if entry.id == "axisym" and entry.extras.get("radial") is None:
        consts.pop("q", None)
    return consts


def run_suite(entry: CatalogEntry, sig: Signature | None = None, cfg: IntegratorConfig | None = None,
              t_max: float = 20.0, rhs_override=None, state: CGState | None = None) -> VerifyReport:
    sig = sig or entry.signature
    cfg = (cfg or IntegratorConfig()).replace(t_max=t_max)
    rep = VerifyReport(entry.id, dict(entry.params))
    s0 = state or default_state(entry)

    try:
        r = entry.check_initial(s0, sig)
        rep.checks.append(CheckResult("initial-state", True, max(r.norm_error, r.orthogonality_error), r.tol))
    except ConfGeoError as err:
        rep.checks.append(CheckResult("initial-state", False, np.inf, 1e-9, str(err)))
        return rep

    rhs = rhs_override or entry.rhs(sig)
    consts = _conserved(entry, sig)
    tr = integrate(rhs, s0.to_vector(), cfg, dim=entry.dim, ncoord=entry.ncoord)

    if entry.metric is not None and (entry.specialized is not None or rhs_override is not None):
        generic = entry.rhs(sig, specialized=False)
        worst = 0.0
        for y in tr.y[np.linspace(0, len(tr) - 1, 9).astype(int)]:
            scale = max(1.0, float(np.max(np.abs(y)))) ** 2
            worst = max(worst, float(np.max(np.abs(rhs(0.0, y) - generic(0.0, y)))) / scale)
        rep.checks.append(CheckResult("oracle-equivalence", worst < 1e-10, worst, 1e-10,
                                      "specialised vs generic right-hand side on trajectory samples"))

    # constants are quadratic in the state, so roundoff in them grows like |y|^2
    size = max(1.0, float(np.max(np.abs(tr.y)))) ** 2
    ledger = monitor(tr, consts)
    for name, row in ledger.items():
        tol = 1e-7
        rel = row["max_drift"] / size
        rep.checks.append(CheckResult(f"drift:{name}", rel < tol, rel, tol,
                                      f"absolute {row['max_drift']:.3g}, t_end={tr.t_end:.6g}, "
                                      f"termination={tr.termination}"))

    if entry.id in ("nil-r", "nil-l", "berger"):
        rep.checks.append(_quadrature_check(entry, sig, s0, tr))

    for name, kf in entry.killing_fields.items():
        if not kf.hypersurface_orthogonal or entry.metric is None:
            continue
        try:
            res = killing_trajectory_test(entry, kf, s0.x)
        except ConfGeoError as err:
            rep.checks.append(CheckResult(f"killing:{name}", False, np.inf, 1e-8, str(err)))
            continue
        rep.checks.append(CheckResult(f"killing:{name}", res.passed, res.residual, 1e-8))

    sp = spiral_check(tr, sig)
    rep.checks.append(CheckResult("no-spiral", sp.verdict is SpiralVerdict.NO_SPIRAL,
                                  float(sp.shrinking_neighbourhood_detected), 0.5, sp.verdict.value))
    return rep


def _quadrature_check(entry, sig, s0, tr) -> CheckResult:
    lam = entry.params["lam"]
    if entry.id == "berger":
        E, J = berger_constants(s0, lam)
        q = berger_quartic(E, J, lam)
    else:
        eps = 1 if entry.id == "nil-r" else -1
        E, J = nil_constants(s0, lam, eps)
        q = nil_quartic(E, J, lam, eps)
    g0, dg0 = s0.u[2], s0.a[2]
    sign = 1 if dg0 >= 0 else -1
    t_end = tr.t_end
    if t_end <= tr.t[0]:
        return CheckResult("quadrature-oracle", False, np.inf, 1e-6, "empty trajectory")
    ev = gamma_evolve(q, g0, sign, (tr.t[0], t_end))
    upto = tr.t <= ev.t[-1]
    if not np.any(upto):
        return CheckResult("quadrature-oracle", False, np.inf, 1e-6, "no overlap")
    g = tr.y[upto, 5]
    err = float(np.max(np.abs(ev.at(tr.t[upto]) - g) / np.maximum(1.0, np.abs(g))))
    return CheckResult("quadrature-oracle", err < 1e-6, err, 1e-6,
                       "gamma from the quartic vs full system, relative once |gamma| > 1")
