"""Adaptive explicit integration with dense output, events and blow-up handling.

The Runge-Kutta core is scipy's Dormand-Prince 8(5,3) stepper driven one
step at a time; everything around it (event localisation on the dense
output, blow-up and step-underflow termination, chart-exit recovery, drift
monitoring) lives here.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.integrate import DOP853, OdeSolution
from scipy.optimize import brentq

from .core import ConfigurationError, DomainError, Event, EventKind, Trajectory

__all__ = [
    "IntegratorConfig",
    "EventSpec",
    "integrate",
    "monitor",
    "fit_blowup",
    "BlowupFit",
]

log = logging.getLogger(__name__)

# interior points per step probed for guard sign changes
_GUARD_PROBES = 4
# how many times a step is shrunk after a chart exit before giving up
_MAX_DOMAIN_RETRIES = 60


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-12
    abs_tol: float = 1e-13
    max_step: float = math.inf
    min_step: float | None = None
    t_max: float = 10.0
    blowup_threshold: float = 1e12
    event_tol: float = 1e-13
    t0: float = 0.0
    stall_factor: float = 1e-4
    stall_size: float = 1e3
    max_steps: int = 2_000_000

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "max_step", "t_max", "blowup_threshold", "event_tol",
                     "stall_size", "max_steps"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"{name} must be positive")
        if self.t_max <= self.t0:
            raise ConfigurationError("t_max must exceed t0")
        if self.min_step is not None and not (0 < self.min_step < self.max_step):
            raise ConfigurationError("need 0 < min_step < max_step")
        if self.stall_factor < 0:
            raise ConfigurationError("stall_factor must be non-negative")

    @property
    def effective_min_step(self) -> float:
        if self.min_step is not None:
            return self.min_step
        return 1e-14 * max(abs(self.t_max), abs(self.t_max - self.t0))

    def replace(self, **changes) -> "IntegratorConfig":
        values = {k: getattr(self, k) for k in self.__dataclass_fields__}
        values.update(changes)
        return IntegratorConfig(**values)


@dataclass(frozen=True)
class EventSpec:
    """A scalar guard whose sign change along the solution marks an event.

    ``direction`` is +1 (rising), -1 (falling) or 0 (either).  A terminal
    event stops the integration at the located time.
    """

    kind: EventKind
    guard: Callable[[float, np.ndarray], float]
    direction: int = 0
    terminal: bool = False
    name: str = ""


@dataclass
class _Guard:
    spec: EventSpec
    last: float


def _crossed(g0: float, g1: float, direction: int) -> bool:
    if g0 == 0.0 or not (np.isfinite(g0) and np.isfinite(g1)):
        return False
    if np.sign(g0) == np.sign(g1) and g1 != 0.0:
        return False
    rising = g1 > g0
    return direction == 0 or (direction > 0) == rising


def _stalled(h: float, y: np.ndarray, f: np.ndarray, cfg: IntegratorConfig) -> bool:
    i = int(np.argmax(np.abs(y)))
    big = abs(y[i])
    if big < cfg.stall_size or cfg.stall_factor == 0:
        return False
    rate = abs(f[i])
    return rate > 0 and h < cfg.stall_factor * big / rate


def _new_solver(fun, t, y, cfg: IntegratorConfig, first_step=None):
    return DOP853(fun, t, y, cfg.t_max, rtol=cfg.rel_tol, atol=cfg.abs_tol,
                  max_step=cfg.max_step, first_step=first_step)


def integrate(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    y0,
    cfg: IntegratorConfig | None = None,
    events: Sequence[EventSpec] = (),
    *,
    invariants: Mapping[str, Callable[[np.ndarray], float]] | None = None,
    drift_limit: float | None = None,
    project: Callable[[np.ndarray], np.ndarray] | None = None,
    dim: int | None = None,
    ncoord: int | None = None,
) -> Trajectory:
    """Integrate ``y' = rhs(t, y)`` from ``cfg.t0`` to ``cfg.t_max``.

    Termination reasons recorded in ``Trajectory.termination``:
    ``"t_max"``, ``"blowup"``, ``"event:<name>"`` for terminal events,
    ``"domain_exit"`` / ``"frame_singularity"`` when ``rhs`` raises
    :class:`DomainError` at every retried step size, and ``"max_steps"``.

    Blow-up means a component above ``blowup_threshold``, a step below
    ``min_step``, or a precision stall: the largest component exceeds
    ``stall_size`` and the accepted step is below ``stall_factor`` times its
    growth time ``|y_i| / |y_i'|``.  The last case catches escapes along
    null directions, where cancellation in the right-hand side drives the
    step controller to the roundoff floor long before either threshold.

    ``invariants`` are checked after every step; the first time one drifts
    from its initial value by more than ``drift_limit`` a
    ``NORM_DRIFT_EXCEEDED`` event is recorded.  ``project``, when given, maps
    each accepted state back onto a constraint set; it is off by default so
    that drift stays visible.
    """
    cfg = cfg or IntegratorConfig()
    if hasattr(y0, "to_vector"):
        y0 = y0.to_vector()
    y0 = np.array(y0, dtype=float)
    t = cfg.t0

    def fun(tt, yy):
        return np.asarray(rhs(tt, yy), dtype=float)

    ts = [t]
    ys = [y0.copy()]
    interps = []
    found: list[Event] = []
    termination = "t_max"

    guards = [_Guard(spec, float(spec.guard(t, y0))) for spec in events]
    inv0 = {k: float(f(y0)) for k, f in (invariants or {}).items()}
    drift_flagged: set[str] = set()

    min_step = cfg.effective_min_step
    solver = _new_solver(fun, t, y0, cfg)
    retries = 0
    h_try = 0.0
    nsteps = 0
    while True:
        if solver.status != "running":
            break
        if nsteps >= cfg.max_steps:
            termination = "max_steps"
            break
        nsteps += 1
        t_old, y_old = solver.t, solver.y.copy()
        try:
            msg = solver.step()
        except DomainError as err:
            # a fresh solver has no step_size yet, so keep the last attempt
            if retries == 0:
                h_try = solver.step_size or getattr(solver, "h_abs", None) or (cfg.t_max - t_old)
            h = h_try = h_try / 4.0
            retries += 1
            if h < min_step or retries > _MAX_DOMAIN_RETRIES:
                termination = err.kind
                kind = EventKind.FRAME_SINGULARITY if err.kind == "frame_singularity" else EventKind.DOMAIN_EXIT
                found.append(Event(t_old, kind, str(err), y_old))
                break
            solver = _new_solver(fun, t_old, y_old, cfg, first_step=h)
            continue
        if solver.status == "failed":
            termination = "blowup"
            found.append(Event(t_old, EventKind.BLOWUP, f"step failure: {msg}", y_old))
            break
        retries = 0
        t_new, y_new = solver.t, solver.y.copy()
        interp = solver.dense_output()

        # event localisation on the dense interpolant
        stop_at = None
        probe_ts = np.linspace(t_old, t_new, _GUARD_PROBES + 2)[1:]
        for gd in guards:
            g_prev, t_prev = gd.last, t_old
            for tp in probe_ts:
                yp = y_new if tp == t_new else interp(tp)
                g_now = float(gd.spec.guard(tp, yp))
                if _crossed(g_prev, g_now, gd.spec.direction):
                    def gfun(s, _gd=gd):
                        return float(_gd.spec.guard(s, interp(s)))
                    te = brentq(gfun, t_prev, tp, xtol=cfg.event_tol, rtol=4 * np.finfo(float).eps)
                    ye = interp(te)
                    found.append(Event(te, gd.spec.kind, gd.spec.name, ye))
                    if gd.spec.terminal and (stop_at is None or te < stop_at[0]):
                        stop_at = (te, ye, gd.spec.name)
                g_prev, t_prev = g_now, tp
            gd.last = g_prev

        if stop_at is not None:
            te, ye, name = stop_at
            # drop events located after the terminal one
            found = [e for e in found if e.t <= te]
            if te > ts[-1]:
                ts.append(te)
                ys.append(ye)
                interps.append(interp)
            termination = f"event:{name}"
            break

        if project is not None:
            y_new = np.asarray(project(y_new), dtype=float)
            solver = _new_solver(fun, t_new, y_new, cfg, first_step=solver.step_size)

        ts.append(t_new)
        ys.append(y_new)
        interps.append(interp)

        for k, f in (invariants or {}).items():
            if k in drift_flagged or drift_limit is None:
                continue
            if abs(float(f(y_new)) - inv0[k]) > drift_limit:
                drift_flagged.add(k)
                found.append(Event(t_new, EventKind.NORM_DRIFT_EXCEEDED, k, y_new))

        if not np.all(np.isfinite(y_new)) or np.max(np.abs(y_new)) > cfg.blowup_threshold:
            termination = "blowup"
            found.append(Event(t_new, EventKind.BLOWUP, "threshold", y_new))
            break
        if solver.status == "running" and solver.step_size is not None and solver.step_size < min_step:
            termination = "blowup"
            found.append(Event(t_new, EventKind.BLOWUP, "step underflow", y_new))
            break
        if solver.status == "running" and _stalled(t_new - t_old, y_new, solver.f, cfg):
            termination = "blowup"
            found.append(Event(t_new, EventKind.BLOWUP, "precision stall", y_new))
            break

    dense = None
    if interps:
        sol = OdeSolution(np.array(ts), interps)
        dense = sol
    traj = Trajectory(np.array(ts), np.array(ys), found, termination, dense, dim, ncoord)
    log.debug("integration finished at t=%g (%s), %d samples", traj.t_end, termination, len(traj))
    return traj


def monitor(traj: Trajectory, quantities: Mapping[str, Callable[[np.ndarray], float]]) -> dict:
    """Per-quantity max ``|value - value(t0)|`` and the time it occurs.

    The result is also merged into ``traj.drift``.
    """
    ledger = {}
    for name, fn in quantities.items():
        vals = np.array([float(fn(y)) for y in traj.y])
        dev = np.abs(vals - vals[0])
        k = int(np.argmax(dev))
        ledger[name] = {"max_drift": float(dev[k]), "t": float(traj.t[k]), "initial": float(vals[0])}
    traj.drift.update(ledger)
    return ledger


@dataclass(frozen=True)
class BlowupFit:
    t0: float
    residual: float
    samples: int
    rate: float = field(default=float("nan"))


def fit_blowup(t, g, decade: float = 10.0) -> BlowupFit:
    """Estimate the escape time of ``|g| ~ 1/(c (t0 - t))``.

    Least squares on ``1/|g|`` against ``t`` over the final stretch where
    ``|g|`` lies within one ``decade`` of its last value.
    """
    t = np.asarray(t, dtype=float)
    g = np.abs(np.asarray(g, dtype=float))
    g_end = g[-1]
    if not g_end > 0:
        raise ValueError("series does not grow")
    k = len(g) - 1
    while k > 0 and g[k - 1] >= g_end / decade and g[k - 1] <= g[k]:
        k -= 1
    tt, inv = t[k:], 1.0 / g[k:]
    if tt.size < 3:
        tt, inv = t[-3:], 1.0 / g[-3:]
    coef = np.polyfit(tt, inv, 1)
    slope, icpt = coef
    t0 = -icpt / slope
    resid = float(np.sqrt(np.mean((np.polyval(coef, tt) - inv) ** 2)))
    return BlowupFit(float(t0), resid, int(tt.size), float(-slope))
