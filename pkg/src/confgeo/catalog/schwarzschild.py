"""Schwarzschild: exterior orthonormal frame and a horizon-regular null frame.

Exterior state ``(t, r, theta, phi, alpha, beta, gamma, delta, a0, a1, a2, a3)``
with orthonormal coframe ``(V dt, dr / V, r dtheta, r sin theta dphi)``.

Horizon state ``(u, r, theta, phi, lam, nu, gamma, delta, aL, aN, a2, a3)``
where ``lam = V (alpha + beta) / 2``, ``nu = (alpha - beta) / V`` and
likewise for the acceleration.  ``u = t - r_*`` is the outgoing null
coordinate; in ``(u, r)`` the velocity is ``u' = nu``,
``r' = lam - nu V^2 / 2``, both finite at ``r = 2m``.
"""
from __future__ import annotations

import numpy as np

from ..core import (
    Chart,
    ConfigurationError,
    DomainError,
    FrameMetric,
    LORENTZ_TIMELIKE,
    Signature,
)
from .base import CatalogEntry, KillingField, antisymmetric_connection

__all__ = [
    "schwarzschild_entry",
    "exterior_to_horizon",
    "horizon_to_exterior",
    "tortoise",
    "POLE_TOL",
    "HORIZON_TOL",
]

POLE_TOL = 1e-6
# relative distance to r = 2m below which the static frame is treated as singular
HORIZON_TOL = 1e-6
ETA4 = (-1.0, 1.0, 1.0, 1.0)


def tortoise(r, m):
    """``r_* = r + 2m log(r/2m - 1)`` for ``r > 2m``."""
    return r + 2.0 * m * np.log(r / (2.0 * m) - 1.0)


def _pole(x):
    if abs(np.sin(x[2])) < POLE_TOL:
        raise DomainError("polar chart degenerates at sin(theta) = 0", x, kind="frame_singularity")


def _exterior_check(m):
    def check(x):
        if not x[1] > 2.0 * m:
            raise DomainError("left the exterior region r > 2m", x)
        if x[1] - 2.0 * m < HORIZON_TOL * 2.0 * m:
            raise DomainError("static frame degenerates at the horizon; use the horizon-regular system",
                              x, kind="frame_singularity")
        _pole(x)
    return check


def _exterior_metric(m) -> FrameMetric:
    def V(r):
        return np.sqrt(1.0 - 2.0 * m / r)

    def frame(x):
        r, th = x[1], x[2]
        v = V(r)
        return np.diag([1.0 / v, v, 1.0 / r, 1.0 / (r * np.sin(th))])

    e = np.eye(4)

    def w01(x):
        r = x[1]
        v = V(r)
        return (m / (r * r * v)) * e[0]

    def w12(x):
        return -(V(x[1]) / x[1]) * e[2]

    def w13(x):
        return -(V(x[1]) / x[1]) * e[3]

    def w23(x):
        return -(np.cos(x[2]) / (np.sin(x[2]) * x[1])) * e[3]

    gamma = antisymmetric_connection(4, ETA4, {(0, 1): w01, (1, 2): w12, (1, 3): w13, (2, 3): w23})
    zero = np.zeros((4, 4))
    return FrameMetric(4, ETA4, gamma, lambda x: zero, frame,
                       Chart(("t", "r", "theta", "phi"), _exterior_check(m)), name="schw-ext")


def _exterior_rhs(m, eps):
    def rhs(t, y):
        x = y[:4]
        _exterior_check(m)(x)
        r, th = x[1], x[2]
        al, be, ga, de, a0, a1, a2, a3 = y[4:12]
        V = np.sqrt(1.0 - 2.0 * m / r)
        Vp = m / (r * r * V)
        cot = np.cos(th) / np.sin(th)
        A = -a0 * a0 + a1 * a1 + a2 * a2 + a3 * a3
        return np.array([
            al / V, V * be, ga / r, de / (r * np.sin(th)),
            a0 - al * be * Vp,
            a1 - al * al * Vp + (ga * ga + de * de) * V / r,
            a2 - be * ga * V / r + de * de * cot / r,
            a3 - be * de * V / r - ga * de * cot / r,
            -eps * A * al - al * a1 * Vp,
            -eps * A * be - al * a0 * Vp + (ga * a2 + de * a3) * V / r,
            -eps * A * ga - ga * a1 * V / r + de * a3 * cot / r,
            -eps * A * de - de * a1 * V / r - de * a2 * cot / r,
        ])
    return rhs


def _horizon_check(x):
    if not x[1] > 0:
        raise DomainError("reached r = 0", x)
    _pole(x)


def _horizon_rhs(m, eps):
    def rhs(t, y):
        x = y[:4]
        _horizon_check(x)
        r, th = x[1], x[2]
        lam, nu, ga, de, aL, aN, a2, a3 = y[4:12]
        V2 = 1.0 - 2.0 * m / r
        VVp = m / (r * r)
        cot = np.cos(th) / np.sin(th)
        A = -2.0 * aL * aN + a2 * a2 + a3 * a3
        radial = lam - 0.5 * nu * V2
        aradial = aL - 0.5 * aN * V2
        mix = nu * aL + lam * aN
        return np.array([
            nu, radial, ga / r, de / (r * np.sin(th)),
            aL + V2 / (2 * r) * (2 * lam * nu + eps) - VVp * lam * nu,
            aN - (2 * lam * nu + eps) / r + VVp * nu * nu,
            a2 - ga / r * radial + de * de * cot / r,
            a3 - de / r * radial - ga * de * cot / r,
            -eps * A * lam - VVp * nu * aL + V2 / (2 * r) * mix,
            -eps * A * nu + VVp * nu * aN - mix / r,
            -eps * A * ga - ga / r * aradial + de * a3 * cot / r,
            -eps * A * de - de / r * aradial - de * a2 * cot / r,
        ])
    return rhs


def exterior_to_horizon(y, m) -> np.ndarray:
    """Map an exterior state to horizon variables (requires ``r > 2m``)."""
    y = np.asarray(y, dtype=float)
    t, r, th, ph = y[:4]
    if not r > 2 * m:
        raise DomainError("exterior state must have r > 2m", y[:4])
    V = np.sqrt(1.0 - 2.0 * m / r)
    al, be, ga, de, a0, a1, a2, a3 = y[4:12]
    return np.array([t - tortoise(r, m), r, th, ph,
                     0.5 * V * (al + be), (al - be) / V, ga, de,
                     0.5 * V * (a0 + a1), (a0 - a1) / V, a2, a3])


def horizon_to_exterior(y, m) -> np.ndarray:
    """Inverse of :func:`exterior_to_horizon`, valid where ``r > 2m``."""
    y = np.asarray(y, dtype=float)
    u, r, th, ph = y[:4]
    if not r > 2 * m:
        raise DomainError("horizon state is not in the exterior", y[:4])
    V = np.sqrt(1.0 - 2.0 * m / r)
    lam, nu, ga, de, aL, aN, a2, a3 = y[4:12]
    al = lam / V + 0.5 * V * nu
    be = lam / V - 0.5 * V * nu
    a0 = aL / V + 0.5 * V * aN
    a1 = aL / V - 0.5 * V * aN
    return np.array([u + tortoise(r, m), r, th, ph, al, be, ga, de, a0, a1, a2, a3])


def _ext_constants(m, eps):
    eta = np.array(ETA4)

    def q_re(y):
        r = y[1]
        V = np.sqrt(1.0 - 2.0 * m / r)
        al, be, a0, a1 = y[4], y[5], y[8], y[9]
        return float(r * (be * a0 - al * a1) - eps * al * V)

    def q_im(y):
        return float(y[1] * (y[7] * y[10] - y[6] * y[11]))

    return {
        "Q_re": q_re,
        "Q_im": q_im,
        "A": lambda y: float(np.dot(eta, y[8:12] ** 2)),
        "norm_u": lambda y: float(np.dot(eta, y[4:8] ** 2)),
        "u_dot_a": lambda y: float(np.dot(eta, y[4:8] * y[8:12])),
    }


def _hor_norm(y):
    return float(-2.0 * y[4] * y[5] + y[6] ** 2 + y[7] ** 2)


def _hor_orth(y):
    return float(-(y[4] * y[9] + y[5] * y[8]) + y[6] * y[10] + y[7] * y[11])


def _hor_constants(m, eps):
    def q_re(y):
        r = y[1]
        V2 = 1.0 - 2.0 * m / r
        lam, nu, aL, aN = y[4], y[5], y[8], y[9]
        return float(r * (lam * aN - nu * aL) - eps * (lam + 0.5 * V2 * nu))

    return {
        "Q_re": q_re,
        "Q_im": lambda y: float(y[1] * (y[7] * y[10] - y[6] * y[11])),
        "A": lambda y: float(-2.0 * y[8] * y[9] + y[10] ** 2 + y[11] ** 2),
        "norm_u": _hor_norm,
        "u_dot_a": _hor_orth,
    }


def schwarzschild_entry(m: float = 1.0, horizon: bool = False) -> CatalogEntry:
    """Exterior entry (generic frame metric available) or the horizon-regular system.

    The horizon system has a non-diagonal null frame, so it carries only
    the specialised right-hand side and no :class:`FrameMetric`.
    """
    m = float(m)
    if not m > 0:
        raise ConfigurationError("mass must be positive")
    killing = {
        "t": KillingField("t", (1.0, 0.0, 0.0, 0.0), True),
        "phi": KillingField("phi", (0.0, 0.0, 0.0, 1.0), True),
    }

    def spec_ext(s: Signature):
        return _exterior_rhs(m, s.epsilon)

    def spec_hor(s: Signature):
        return _horizon_rhs(m, s.epsilon)

    if not horizon:
        return CatalogEntry("schw-ext", _exterior_metric(m), LORENTZ_TIMELIKE, {"m": m}, 4,
                            specialized=spec_ext,
                            constants=lambda s: _ext_constants(m, s.epsilon),
                            killing_fields=killing,
                            observable=("r", lambda y: float(y[1])),
                            flags=("einstein", "ricci-flat"))
    return CatalogEntry("schw-hor", None, LORENTZ_TIMELIKE, {"m": m}, 4,
                        specialized=spec_hor,
                        constants=lambda s: _hor_constants(m, s.epsilon),
                        killing_fields=killing,
                        observable=("r", lambda y: float(y[1])),
                        flags=("einstein", "ricci-flat", "null-frame"),
                        extras={"norm": _hor_norm, "orth": _hor_orth,
                                "chart": Chart(("u", "r", "theta", "phi"), _horizon_check)})
