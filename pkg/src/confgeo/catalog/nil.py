"""Heisenberg group Nil with left-invariant Riemannian or Lorentzian metric.

Coordinates ``(x, y, z)``, coframe ``(dx, dy, dz - lam x dy)`` and frame
``e1 = d_x, e2 = d_y + lam x d_z, e3 = d_z``.  The Lorentzian metric makes
``e2`` time-like.
"""
from __future__ import annotations

import numpy as np

from ..core import (
    Chart,
    ConfigurationError,
    FrameMetric,
    LORENTZ_SPACELIKE,
    RIEMANNIAN,
    Signature,
    frame_norm,
)
from .base import CatalogEntry, KillingField, antisymmetric_connection

__all__ = ["nil_entry", "nil_frame", "nil_eta"]


def nil_eta(lorentzian: bool) -> tuple[float, float, float]:
    return (1.0, -1.0, 1.0) if lorentzian else (1.0, 1.0, 1.0)


def nil_frame(lam: float):
    def frame(x):
        return np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, lam * x[0], 1.0]])
    return frame


def _gamma(lam, lorentzian):
    h = 0.5 * lam
    e1, e2, e3 = np.eye(3)
    w23 = h * e1 if lorentzian else -h * e1
    return antisymmetric_connection(3, nil_eta(lorentzian), {
        (0, 1): lambda x: h * e3,
        (0, 2): lambda x: h * e2,
        (1, 2): lambda x: w23,
    })


def _ricci(lam, lorentzian):
    l2 = 0.5 * lam * lam
    r = np.diag([l2, -l2, -l2] if lorentzian else [-l2, -l2, l2])

    def ricci(x):
        return r
    return ricci


def _riemannian_rhs(lam):
    h = 0.5 * lam

    def rhs(t, y):
        x = y[0]
        al, be, ga, a1, a2, a3 = y[3:9]
        aa = a1 * a1 + a2 * a2 + a3 * a3
        l2g2 = lam * lam * ga * ga
        return np.array([
            al, be, ga + lam * x * be,
            a1 - lam * be * ga,
            a2 + lam * al * ga,
            a3,
            -h * ga * a2 - h * be * a3 - al * aa - l2g2 * al,
            h * ga * a1 + h * al * a3 - be * aa - l2g2 * be,
            h * be * a1 - h * al * a2 - ga * aa + lam * lam * ga * (al * al + be * be),
        ])
    return rhs


def _lorentzian_rhs(lam):
    h = 0.5 * lam

    def rhs(t, y):
        x = y[0]
        al, be, ga, a1, a2, a3 = y[3:9]
        aa = a1 * a1 - a2 * a2 + a3 * a3
        l2g2 = lam * lam * ga * ga
        return np.array([
            al, be, ga + lam * x * be,
            a1 - lam * be * ga,
            a2 - lam * al * ga,
            a3,
            -h * ga * a2 - h * be * a3 - al * aa + l2g2 * al,
            -h * ga * a1 - h * al * a3 - be * aa + l2g2 * be,
            h * be * a1 - h * al * a2 - ga * aa - lam * lam * ga * (1.0 - ga * ga),
        ])
    return rhs


def _constants(lam, lorentzian):
    eta = np.array(nil_eta(lorentzian))
    # E = |a|^2 - lam^2 gamma^2, sign of the gamma term flips for Lorentzian
    sgn = 1.0 if lorentzian else -1.0

    def energy(y):
        return frame_norm(eta, y[6:9]) + sgn * lam * lam * y[5] ** 2

    def angular(y):
        al, be, ga, a1, a2 = y[3], y[4], y[5], y[6], y[7]
        return be * a1 - al * a2 - sgn * 0.5 * lam * ga

    return {
        "E": energy,
        "J": angular,
        "norm_u": lambda y: frame_norm(eta, y[3:6]),
        "u_dot_a": lambda y: float(np.dot(eta, y[3:6] * y[6:9])),
    }


def nil_entry(eps: int = 1, lam: float = 1.0) -> CatalogEntry:
    """Catalogue entry for Nil; ``eps = -1`` selects the Lorentzian metric.

    The Lorentzian case integrates space-like curves only.
    """
    if eps not in (1, -1):
        raise ConfigurationError("eps must be +1 or -1")
    lam = float(lam)
    lorentzian = eps < 0
    flags = ("flat-limit",) if lam == 0 else ()
    metric = FrameMetric(3, nil_eta(lorentzian), _gamma(lam, lorentzian), _ricci(lam, lorentzian),
                         nil_frame(lam), Chart(("x", "y", "z")),
                         name="nil-l" if lorentzian else "nil-r")
    sig: Signature = LORENTZ_SPACELIKE if lorentzian else RIEMANNIAN

    def specialized(s: Signature):
        if s.epsilon != 1:
            raise ConfigurationError("the specialised Nil systems are for unit space-like curves")
        return _lorentzian_rhs(lam) if lorentzian else _riemannian_rhs(lam)

    killing = {
        "y": KillingField("y", (0.0, 1.0, 0.0)),
        "z": KillingField("z", (0.0, 0.0, 1.0)),
    }
    return CatalogEntry(
        "nil-l" if lorentzian else "nil-r", metric, sig, {"lam": lam, "eps": eps}, 3,
        specialized=specialized,
        constants=lambda s: _constants(lam, lorentzian),
        killing_fields=killing,
        observable=("gamma", lambda y: float(y[5])),
        blowup_observable=lambda y: float(y[5]),
        flags=flags,
    )
