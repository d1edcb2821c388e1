"""Berger sphere: SU(2) with the Hopf fibre scaled by ``lam``.

Euler-angle chart ``(theta, phi, psi)`` with left-invariant coframe
``sigma1 = cos psi dtheta + sin psi sin theta dphi``,
``sigma2 = sin psi dtheta - cos psi sin theta dphi``,
``sigma3 = dpsi + cos theta dphi`` and orthonormal coframe
``(sigma1, sigma2, lam sigma3)``.  ``lam = 1`` is the round sphere of
radius 2.
"""
from __future__ import annotations

import numpy as np

from ..core import Chart, ConfigurationError, DomainError, FrameMetric, RIEMANNIAN, Signature, frame_norm
from .base import CatalogEntry, KillingField, antisymmetric_connection

__all__ = ["berger_entry", "berger_frame", "berger_coefficients", "POLE_TOL"]

# sin(theta) below this is treated as the coordinate pole
POLE_TOL = 1e-6


def berger_coefficients(lam: float) -> tuple[float, float]:
    """``(A, C)`` with ``omega^2_3 = A th1``, ``omega^3_1 = A th2``, ``omega^1_2 = C th3``."""
    return 0.5 * lam, (2.0 - lam * lam) / (2.0 * lam)


def _check(x):
    if abs(np.sin(x[0])) < POLE_TOL:
        raise DomainError("Euler-angle chart degenerates at sin(theta) = 0", x, kind="frame_singularity")


def berger_frame(lam: float):
    def frame(x):
        th, psi = x[0], x[2]
        st, ct = np.sin(th), np.cos(th)
        cp, sp = np.cos(psi), np.sin(psi)
        return np.array([
            [cp, sp, 0.0],
            [sp / st, -cp / st, 0.0],
            [-sp * ct / st, cp * ct / st, 1.0 / lam],
        ])
    return frame


def _specialized(lam):
    A, C = berger_coefficients(lam)
    r11 = 1.0 - 0.5 * lam * lam
    r33 = 0.5 * lam * lam
    frame = berger_frame(lam)

    def rhs(t, y):
        x = y[:3]
        _check(x)
        al, be, ga, a1, a2, a3 = y[3:9]
        aa = a1 * a1 + a2 * a2 + a3 * a3
        ab2 = al * al + be * be
        return np.concatenate([frame(x) @ y[3:6], [
            a1 - (C - A) * be * ga,
            a2 + (C - A) * ga * al,
            a3,
            -C * ga * a2 + A * be * a3 - al * aa + r11 * al * (1 - ab2) - r33 * al * ga * ga,
            -A * al * a3 + C * ga * a1 - be * aa + r11 * be * (1 - ab2) - r33 * be * ga * ga,
            -A * be * a1 + A * al * a2 - ga * aa - r11 * ga * ab2 + r33 * ga * (1 - ga * ga),
        ]])
    return rhs


def berger_entry(lam: float = 2.0) -> CatalogEntry:
    lam = float(lam)
    if not lam > 0:
        raise ConfigurationError("Berger parameter must be positive")
    A, C = berger_coefficients(lam)
    e1, e2, e3 = np.eye(3)
    gamma = antisymmetric_connection(3, (1.0, 1.0, 1.0), {
        (0, 1): lambda x: C * e3,
        (1, 2): lambda x: A * e1,
        (0, 2): lambda x: -A * e2,
    })
    ric = np.diag([1.0 - 0.5 * lam * lam, 1.0 - 0.5 * lam * lam, 0.5 * lam * lam])
    metric = FrameMetric(3, (1.0, 1.0, 1.0), gamma, lambda x: ric, berger_frame(lam),
                         Chart(("theta", "phi", "psi"), _check), name="berger")

    def specialized(s: Signature):
        if s.epsilon != 1:
            raise ConfigurationError("Berger sphere is Riemannian")
        return _specialized(lam)

    def constants(s):
        return {
            "E": lambda y: float(y[6] ** 2 + y[7] ** 2 + y[8] ** 2 + (1 - lam * lam) * y[5] ** 2),
            "J": lambda y: float(y[6] * y[4] - y[7] * y[3] - A * y[5]),
            "norm_u": lambda y: frame_norm(np.ones(3), y[3:6]),
            "u_dot_a": lambda y: float(np.dot(y[3:6], y[6:9])),
        }

    flags = ("round-sphere",) if lam == 1.0 else ()
    return CatalogEntry(
        "berger", metric, RIEMANNIAN, {"lam": lam}, 3,
        specialized=specialized,
        constants=constants,
        killing_fields={
            "psi": KillingField("psi", (0.0, 0.0, 1.0)),
            "phi": KillingField("phi", (0.0, 1.0, 0.0)),
        },
        observable=("gamma", lambda y: float(y[5])),
        blowup_observable=lambda y: float(y[5]),
        flags=flags,
    )
