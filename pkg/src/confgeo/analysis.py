"""Orbit classification, spiral checks and numerical theorem tests."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.spatial.distance import directed_hausdorff

from .catalog.axisym import RadialProfile, check_axis_regular
from .catalog.base import CatalogEntry, KillingField
from .core import (
    CGState,
    ConfigurationError,
    DomainError,
    InsufficientDataError,
    LORENTZ_SPACELIKE,
    LORENTZ_TIMELIKE,
    RIEMANNIAN,
    Signature,
    Trajectory,
    frame_norm,
)
from .dynamics import _third_order
from .integrator import IntegratorConfig, fit_blowup, integrate
from .quadratures import circular_f2, circular_orbit

__all__ = [
    "VerdictKind",
    "OrbitVerdict",
    "classify_orbit",
    "SpiralVerdict",
    "SpiralReport",
    "spiral_check",
    "KillingTestResult",
    "killing_trajectory_test",
    "killing_state",
    "LevelSet",
    "TotallyCGReport",
    "totally_cg_test",
    "StabilityRow",
    "stability_scan",
    "stability_threshold",
    "hausdorff",
    "curve_hausdorff",
    "CLOSURE_TOL",
    "ASYMPTOTIC_TOL",
]

CLOSURE_TOL = 1e-6
ASYMPTOTIC_TOL = 1e-4
MIN_SAMPLES = 8
# periodic coordinates per entry id: index -> period
_ANGLES = {
    "axisym": {1: 2 * np.pi},
    "berger": {1: 2 * np.pi, 2: 4 * np.pi},
    "schw-ext": {3: 2 * np.pi},
    "schw-hor": {3: 2 * np.pi},
}


class VerdictKind(str, enum.Enum):
    CLOSED = "Closed"
    ROSETTE_ANNULUS = "RosetteAnnulus"
    ASYMPTOTIC = "AsymptoticToGeodesic"
    BLOWUP = "BlowupFiniteTime"
    SECULAR = "SecularDivergent"
    CONSTANT = "ConstantFamily"
    UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class OrbitVerdict:
    kind: VerdictKind
    evidence: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "evidence": {k: _jsonable(v) for k, v in self.evidence.items()}}


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


def _layout(traj: Trajectory, entry: CatalogEntry):
    dim = traj.dim or entry.dim
    nc = traj.ncoord or entry.ncoord
    return dim, nc


def _dense_grid(traj: Trajectory, per_step: int = 8, minimum: int = 4000):
    n = max(minimum, per_step * len(traj))
    if traj.dense is None:
        return traj.t, traj.y
    ts = np.linspace(traj.t[0], traj.t[-1], n)
    ys = np.asarray(traj.dense(ts)).T
    return ts, ys


def _wrapped_delta(y, y0, angles: dict):
    d = y - y0
    for i, period in angles.items():
        d[..., i] = (d[..., i] + 0.5 * period) % period - 0.5 * period
    return d


def _observable(entry: CatalogEntry, nc: int) -> Callable[[np.ndarray], float]:
    if entry.observable is not None:
        return entry.observable[1]
    return lambda y: float(np.linalg.norm(y[:nc]))


def _extrema(ts, gs):
    """Indices of strict interior local extrema of a sampled series."""
    d = np.diff(gs)
    s = np.sign(d)
    idx = []
    for k in range(1, len(s)):
        if s[k - 1] != 0 and s[k] != 0 and s[k - 1] != s[k]:
            idx.append(k)
    return idx


def _refine_extremum(fun, t_lo, t_hi, maximise):
    sgn = -1.0 if maximise else 1.0
    res = minimize_scalar(lambda t: sgn * fun(t), bounds=(t_lo, t_hi), method="bounded",
                          options={"xatol": 1e-12})
    return float(res.x), float(fun(res.x))


def _closure(traj, ts, ys, angles, tol):
    """First recurrence time ``T`` with confirmation at ``2T``, or None."""
    y0 = ys[0]
    scale = max(1.0, float(np.max(np.abs(y0))))
    dist = np.max(np.abs(_wrapped_delta(ys, y0, angles)), axis=1) / scale
    span = ts[-1] - ts[0]
    leave = np.nonzero(dist > 100 * tol)[0]
    if leave.size == 0:
        return None
    start = leave[0]
    # coarse gate: a grid point within one step's travel of the initial state
    step = float(np.max(np.abs(np.diff(ys, axis=0)))) / scale
    gate = max(1e3 * tol, 2 * step)
    cand = [k for k in range(start + 1, len(ts) - 1)
            if dist[k] <= dist[k - 1] and dist[k] <= dist[k + 1] and dist[k] < gate]
    if not cand:
        return None

    def sq(t):
        y = np.asarray(traj.dense(t)) if traj.dense is not None else np.array(
            [np.interp(t, ts, c) for c in ys.T])
        return float(np.sum(_wrapped_delta(y, y0, angles) ** 2)) / scale**2

    for k in cand:
        T, _ = _refine_extremum(sq, ts[k - 1], ts[k + 1], maximise=False)
        if np.sqrt(sq(T)) > tol:
            continue
        T = T - ts[0]
        if 2 * T > span + 1e-12:
            return None
        if np.sqrt(sq(ts[0] + 2 * T)) <= 2 * tol:
            return T
    return None


def classify_orbit(traj: Trajectory, entry: CatalogEntry, closure_tol: float = CLOSURE_TOL,
                   accel_tol: float = ASYMPTOTIC_TOL, sig: Signature | None = None) -> OrbitVerdict:
    """Classify a trajectory of ``entry`` from its samples and dense output.

    Checked in order: finite-time blow-up, closure (full state recurs at
    ``T`` and again at ``2T``), constant observable, decay of the
    acceleration, secular growth of the velocity components, and
    confinement of the observable between stable turning values.
    """
    if len(traj) < MIN_SAMPLES:
        raise InsufficientDataError(f"{len(traj)} samples; need at least {MIN_SAMPLES}")
    dim, nc = _layout(traj, entry)
    eta = entry.eta
    if traj.termination == "blowup":
        obs = entry.blowup_observable or (lambda y: float(np.max(np.abs(y))))
        g = np.array([obs(y) for y in traj.y])
        fit = fit_blowup(traj.t, g)
        return OrbitVerdict(VerdictKind.BLOWUP, {"t0": fit.t0, "fit_residual": fit.residual,
                                                  "rate": fit.rate, "t_end": traj.t_end})
    ts, ys = _dense_grid(traj)
    angles = _ANGLES.get(entry.id, {})
    T = _closure(traj, ts, ys, angles, closure_tol)
    if T is not None:
        return OrbitVerdict(VerdictKind.CLOSED, {"period": T})

    obs = _observable(entry, nc)
    gs = np.array([obs(y) for y in ys])
    g_scale = max(1.0, float(np.max(np.abs(gs))))
    if np.ptp(gs) <= 1e-9 * g_scale:
        return OrbitVerdict(VerdictKind.CONSTANT, {"value": float(gs[0])})

    acc = np.sqrt(np.abs([frame_norm(eta, y[nc + dim:nc + 2 * dim]) for y in ys]))
    q0 = len(acc) * 3 // 4
    tail = acc[q0:]
    if tail[-1] < accel_tol and np.all(np.diff(tail) <= 1e-12):
        ev = {"accel_final": float(tail[-1])}
        u_end = ys[-1][nc:nc + dim]
        if dim >= 2:
            ev["chi_final"] = float(np.arctan2(u_end[1], u_end[0]))
        return OrbitVerdict(VerdictKind.ASYMPTOTIC, ev)

    umax = np.max(np.abs(ys[:, nc:nc + dim]), axis=1)
    third = len(umax) // 3
    first, last = float(np.max(umax[:third])), float(np.max(umax[-third:]))
    if last > 10 * first:
        rate = np.log(last / first) / (ts[-1] - ts[0]) * 1.5
        return OrbitVerdict(VerdictKind.SECULAR, {"secular_rate": float(rate), "growth": last / first})

    idx = _extrema(ts, gs)
    if len(idx) < 3:
        raise InsufficientDataError(f"only {len(idx)} turning points of the observable")

    def g_at(t):
        y = np.asarray(traj.dense(t)) if traj.dense is not None else np.array(
            [np.interp(t, ts, c) for c in ys.T])
        return obs(y)

    maxima, minima, t_max = [], [], []
    for k in idx:
        is_max = gs[k] >= gs[k - 1]
        t_ext, v = _refine_extremum(g_at, ts[k - 1], ts[k + 1], is_max)
        (maxima if is_max else minima).append(v)
        if is_max:
            t_max.append(t_ext)
    if not maxima or not minima:
        return OrbitVerdict(VerdictKind.UNDETERMINED, {"turning_points": len(idx)})
    spread = max(np.ptp(maxima), np.ptp(minima))
    width = max(maxima) - min(minima)
    if spread > 1e-3 * max(width, 1e-300):
        return OrbitVerdict(VerdictKind.UNDETERMINED, {"turning_points": len(idx), "bound_spread": spread})
    ev = {"lower": float(np.mean(minima)), "upper": float(np.mean(maxima)), "turning_points": len(idx)}
    if len(t_max) >= 2:
        ev["period"] = float(np.mean(np.diff(t_max)))
    return OrbitVerdict(VerdictKind.ROSETTE_ANNULUS, ev)


class SpiralVerdict(str, enum.Enum):
    NO_SPIRAL = "NoSpiral"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class SpiralReport:
    shrinking_neighbourhood_detected: bool
    acceleration_bounded: bool
    verdict: SpiralVerdict
    evidence: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"shrinking_neighbourhood_detected": self.shrinking_neighbourhood_detected,
                "acceleration_bounded": self.acceleration_bounded,
                "verdict": self.verdict.value,
                "evidence": {k: _jsonable(v) for k, v in self.evidence.items()}}


def _segment_diameters(t, pts, segments: int):
    edges = np.linspace(t[0], t[-1], segments + 1)
    out = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        sel = pts[(t >= lo) & (t <= hi)]
        if len(sel) < 2:
            out.append(np.nan)
        else:
            out.append(float(np.linalg.norm(np.ptp(sel, axis=0))))
    return np.array(out)


def spiral_check(traj: Trajectory, sig: Signature, ncoord: int | None = None, dim: int | None = None,
                 bound: float = 1e6, segments: int = 8) -> SpiralReport:
    """Look for trapping in shrinking sets and decide whether a spiral is excluded.

    A spiral needs the acceleration (Riemannian) or the velocity and
    acceleration (Lorentzian) to diverge.  A bounded run, or one whose
    coordinates escape, is reported as ``NoSpiral``.
    """
    dim = dim or traj.dim
    nc = ncoord or traj.ncoord or dim
    if dim is None:
        raise ConfigurationError("trajectory layout unknown; pass dim")
    ys = traj.y
    pts = ys[:, :nc]
    diam = _segment_diameters(traj.t, pts, segments)
    tail = diam[-4:]
    ratios = tail[1:] / tail[:-1]
    shrinking = bool(np.all(np.isfinite(ratios)) and np.all(ratios < 0.9))

    u = ys[:, nc:nc + dim]
    a = ys[:, nc + dim:nc + 2 * dim]
    finite = bool(np.all(np.isfinite(ys)))
    if sig.lorentzian:
        peak = float(max(np.max(np.abs(u)), np.max(np.abs(a)))) if finite else np.inf
    else:
        peak = float(np.max(np.linalg.norm(a, axis=1))) if finite else np.inf
    bounded = finite and traj.termination != "blowup" and peak < bound

    ev = {"peak": peak, "segment_diameters": [float(v) for v in diam]}
    norms = np.linalg.norm(pts - pts[0], axis=1)
    early = traj.t <= 0.5 * (traj.t[0] + traj.t[-1])
    escaping = bool(norms[-1] > 10 * float(np.max(norms[early])) and norms[-1] > norms[-2])
    ev["coordinate_escape"] = escaping
    if nc >= 2:
        ev["x_plus_y_end"] = float(pts[-1, 0] + pts[-1, 1])
        ev["x_minus_y_end"] = float(pts[-1, 0] - pts[-1, 1])
    verdict = SpiralVerdict.NO_SPIRAL if bounded or (escaping and not shrinking) else SpiralVerdict.INCONCLUSIVE
    return SpiralReport(shrinking, bounded, verdict, ev)


@dataclass(frozen=True)
class KillingTestResult:
    passed: bool
    residual: float
    state: CGState

    def __bool__(self) -> bool:
        return self.passed


def _stencil(fun, h):
    """Five-point first derivative of ``fun(s)`` at ``s = 0``."""
    return (fun(-2 * h) - 8 * fun(-h) + 8 * fun(h) - fun(2 * h)) / (12 * h)


def _killing_vector(K) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(K, KillingField):
        v = K.vector
        return lambda x: v
    if callable(K):
        return lambda x: np.asarray(K(x), dtype=float)
    v = np.asarray(K, dtype=float)
    return lambda x: v


def killing_state(entry: CatalogEntry, K, x0, h: float = 1e-3):
    """Unit velocity ``K/|K|``, its acceleration at ``x0``, the signature and the acceleration field."""
    metric = entry.metric
    if metric is None:
        raise ConfigurationError(f"{entry.id} has no frame metric; use the exterior entry")
    eta = metric.eta_array
    if isinstance(K, str):
        try:
            K = entry.killing_fields[K]
        except KeyError:
            raise ConfigurationError(f"{entry.id} has no Killing field {K!r}") from None
    Kc = _killing_vector(K)
    x0 = np.asarray(x0, dtype=float)

    def ufield(x):
        kf = np.linalg.solve(metric.frame(x), Kc(x))
        n2 = frame_norm(eta, kf)
        if abs(n2) < 1e-14:
            raise DomainError("Killing field is null or zero here", x, kind="degenerate")
        return kf / np.sqrt(abs(n2))

    n2 = frame_norm(eta, np.linalg.solve(metric.frame(x0), Kc(x0)))
    if abs(n2) < 1e-14:
        raise DomainError("Killing field is null or zero at x0", x0, kind="degenerate")
    if metric.lorentzian:
        sig = LORENTZ_TIMELIKE if n2 < 0 else LORENTZ_SPACELIKE
    else:
        sig = RIEMANNIAN

    def afield(x):
        u = ufield(x)
        xd = metric.frame(x) @ u
        du = _stencil(lambda s: ufield(x + s * xd), h)
        return du + np.einsum("ijk,j,k->i", metric.gamma(x), u, u)

    return CGState(x0, ufield(x0), afield(x0)), sig, afield


def killing_trajectory_test(entry: CatalogEntry, K, x0, tol: float = 1e-8,
                            h_inner: float = 1e-3, h_outer: float = 2e-3) -> KillingTestResult:
    """Is the integral curve of ``K`` through ``x0`` a conformal geodesic?

    ``u = K/|K|`` and ``a = nabla_u u`` are built by finite differences;
    the residual is the gap between the derivative of ``a`` along the
    flow and the third-order right-hand side.
    """
    if isinstance(K, str):
        try:
            K = entry.killing_fields[K]
        except KeyError:
            raise ConfigurationError(f"{entry.id} has no Killing field {K!r}") from None
    s, sig, afield = killing_state(entry, K, x0, h_inner)
    metric = entry.metric
    xd, ud, ad = _third_order(metric, sig.epsilon, s.x, s.u, s.a)
    ad_flow = _stencil(lambda t: afield(s.x + t * xd), h_outer)
    res = float(np.max(np.abs(ad_flow - ad)))
    return KillingTestResult(res < tol, res, s)


@dataclass(frozen=True)
class LevelSet:
    """Hypersurface ``x[coord] = value`` with unit normal along frame vector ``normal``."""

    coord: int
    value: float
    normal: int
    name: str = ""


def _level_set(entry: CatalogEntry, spec) -> LevelSet:
    if isinstance(spec, LevelSet):
        return spec
    if entry.id == "axisym" and spec in ("z=0", None):
        return LevelSet(2, 0.0, 2, "z=0")
    if entry.id == "schw-ext" and spec in ("equatorial", "theta=pi/2", None):
        return LevelSet(2, np.pi / 2, 2, "equatorial")
    raise ConfigurationError(f"unsupported hypersurface {spec!r} for {entry.id}")


@dataclass
class TotallyCGReport:
    passed: bool
    second_fundamental_max: float
    normal_schouten_max: float
    confinement_max: float
    normal_velocity_max: float
    normal_accel_max: float
    samples: int
    hypersurface: str

    def to_dict(self) -> dict:
        return {k: _jsonable(v) for k, v in self.__dict__.items()}


def _sample_points(entry: CatalogEntry, ls: LevelSet, n: int):
    if entry.id == "axisym":
        r_hi = min(3.0, 0.9 * entry.extras["surface"].r_max)
        rs = np.linspace(0.3, r_hi, n)
        return [np.array([r, 0.0, ls.value]) for r in rs]
    m = entry.params["m"]
    rs = np.linspace(2.5 * m, 10 * m, n)
    return [np.array([0.0, r, ls.value, 0.0]) for r in rs]


def totally_cg_test(entry: CatalogEntry, hypersurface=None, sample_count: int = 12, t_max: float = 50.0,
                    tol: float = 1e-8, cfg: IntegratorConfig | None = None) -> TotallyCGReport:
    """Second fundamental form and normal Schouten components on a level set,
    plus confinement of a trajectory started tangent to it."""
    metric = entry.metric
    if metric is None:
        raise ConfigurationError(f"{entry.id} has no frame metric")
    ls = _level_set(entry, hypersurface)
    eta = metric.eta_array
    n = ls.normal
    tang = [i for i in range(metric.dim) if i != n]
    kmax = lmax = 0.0
    angles = np.linspace(0, np.pi, 7)
    for x in _sample_points(entry, ls, sample_count):
        gam = metric.gamma(x)
        L = metric.schouten(x)
        # K(e_a, e_b) = g(nabla_{e_a} N, e_b) = eta_b Gamma[b, n, a]
        Kab = np.array([[eta[b] * gam[b, n, a] for b in tang] for a in tang])
        Kab = 0.5 * (Kab + Kab.T)
        kmax = max(kmax, float(np.max(np.abs(Kab))))
        lmax = max(lmax, float(np.max(np.abs(L[n, tang]))))
        for th in angles:
            w = np.zeros(len(tang))
            w[0], w[-1] = np.cos(th), np.sin(th)
            kmax = max(kmax, abs(float(w @ Kab @ w)))

    sig, y0 = _tangent_start(entry, ls)
    cfg = (cfg or IntegratorConfig()).replace(t_max=t_max)
    tr = integrate(entry.rhs(sig, specialized=False), y0, cfg, dim=metric.dim, ncoord=metric.dim)
    dim = metric.dim
    conf = float(np.max(np.abs(tr.y[:, ls.coord] - ls.value)))
    q1 = float(np.max(np.abs(tr.y[:, dim + n])))
    q2 = float(np.max(np.abs(tr.y[:, 2 * dim + n])))
    passed = kmax < 1e-10 and lmax < 1e-10 and conf < tol and q1 < tol and q2 < tol
    return TotallyCGReport(passed, kmax, lmax, conf, q1, q2, sample_count, ls.name)


def _tangent_start(entry: CatalogEntry, ls: LevelSet):
    if entry.id == "axisym":
        chi = 0.4
        q = 0.3
        y0 = np.array([1.0, 0.0, ls.value, np.cos(chi), np.sin(chi), 0.0,
                       -q * np.sin(chi), q * np.cos(chi), 0.0])
        return RIEMANNIAN, y0
    from .quadratures import equatorial_state
    m = entry.params["m"]
    return LORENTZ_SPACELIKE, equatorial_state(m, 6.0 * m, 0.7, 0.05)


@dataclass(frozen=True)
class StabilityRow:
    radius: float
    q: float
    C: float
    f2: float
    flag: str

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _radial_profile(entry) -> RadialProfile:
    if isinstance(entry, RadialProfile):
        return entry
    radial = entry.extras.get("radial") if isinstance(entry, CatalogEntry) else None
    if radial is None:
        raise ConfigurationError("stability scan needs a radial axisymmetric profile")
    return radial


def stability_scan(entry, radii, tol: float = 1e-12) -> list[StabilityRow]:
    """Circular orbits at each radius with ``f''(a)`` and a stability flag.

    Reports data only; a positive ``f''`` marks a circle that could be
    the limit set of a spiral.
    """
    prof = _radial_profile(entry)
    if not check_axis_regular(prof.as_2d()):
        raise ConfigurationError(f"profile {prof.name} is not regular on the axis")
    rows = []
    for a in radii:
        red = circular_orbit(prof, float(a))
        f2 = circular_f2(prof, float(a))
        flag = "stable" if f2 < -tol else ("unstable" if f2 > tol else "marginal")
        rows.append(StabilityRow(float(a), red.q, red.C, float(f2), flag))
    return rows


def stability_threshold(entry, radii) -> float:
    """Smallest scanned radius whose circle is not stable (``inf`` if none)."""
    for row in stability_scan(entry, sorted(radii)):
        if row.flag != "stable":
            return row.radius
    return float("inf")


def hausdorff(A, B) -> float:
    """Symmetric Hausdorff distance between two sampled curves."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    return float(max(directed_hausdorff(A, B)[0], directed_hausdorff(B, A)[0]))


def _directed_curve(pts, t, curve) -> float:
    """Max over ``pts`` of the distance to the curve ``curve(t)``, refined
    between the neighbours of the closest sample."""
    samples = np.array([curve(tt) for tt in t])
    worst = 0.0
    for p in pts:
        d = np.linalg.norm(samples - p, axis=1)
        k = int(np.argmin(d))
        lo, hi = t[max(k - 1, 0)], t[min(k + 1, len(t) - 1)]
        best = float(d[k])
        if hi > lo:
            res = minimize_scalar(lambda s: float(np.linalg.norm(curve(s) - p)), bounds=(lo, hi),
                                  method="bounded", options={"xatol": 1e-12 * max(1.0, abs(hi))})
            best = min(best, float(res.fun))
        worst = max(worst, best)
    return worst


def curve_hausdorff(curve_a: Callable, span_a, curve_b: Callable, span_b, samples: int = 400) -> float:
    """Hausdorff distance between two parametrised curves.

    Each curve is sampled on ``samples`` points and every sample is
    projected onto the other curve by a bounded 1D minimisation, so the
    result is limited by the curves' accuracy rather than by the sampling.
    """
    ta = np.linspace(*span_a, samples)
    tb = np.linspace(*span_b, samples)
    pa = np.array([curve_a(t) for t in ta])
    pb = np.array([curve_b(t) for t in tb])
    return max(_directed_curve(pa, tb, curve_b), _directed_curve(pb, ta, curve_a))
