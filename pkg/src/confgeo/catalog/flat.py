"""Conformally flat entries: E3, M3 and the round S3 / hyperbolic H3."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..core import (
    CGState,
    Chart,
    ConfigurationError,
    DomainError,
    FrameMetric,
    LORENTZ_TIMELIKE,
    RIEMANNIAN,
    frame_norm,
)
from .base import CatalogEntry, KillingField

__all__ = [
    "e3_entry",
    "m3_entry",
    "s3_entry",
    "h3_entry",
    "ConformalFactor",
    "STEREOGRAPHIC_SPHERE",
    "POINCARE_BALL",
    "FlatKind",
    "flat_explicit",
    "flat_explicit_state",
]


def _zero_gamma(dim):
    def gamma(x):
        return np.zeros((dim, dim, dim))
    return gamma


def _zero_ricci(dim):
    def ricci(x):
        return np.zeros((dim, dim))
    return ricci


def _identity_frame(dim):
    def frame(x):
        return np.eye(dim)
    return frame


def _flat_constants(eta):
    eta = np.asarray(eta, dtype=float)
    return {
        "norm_u": lambda y: frame_norm(eta, y[3:6]),
        "u_dot_a": lambda y: float(np.dot(eta, y[3:6] * y[6:9])),
        "a2": lambda y: frame_norm(eta, y[6:9]),
    }


def e3_entry() -> CatalogEntry:
    metric = FrameMetric(3, (1.0, 1.0, 1.0), _zero_gamma(3), _zero_ricci(3), _identity_frame(3),
                         Chart(("x", "y", "z")), name="E3")
    killing = {
        "tx": KillingField("tx", (1.0, 0.0, 0.0), True),
        "ty": KillingField("ty", (0.0, 1.0, 0.0), True),
        "tz": KillingField("tz", (0.0, 0.0, 1.0), True),
    }
    return CatalogEntry("e3", metric, RIEMANNIAN, {}, 3,
                        constants=lambda sig: _flat_constants((1.0, 1.0, 1.0)),
                        killing_fields=killing,
                        closed_forms={"explicit": flat_explicit},
                        flags=("einstein", "conformally-flat"))


def m3_entry() -> CatalogEntry:
    metric = FrameMetric(3, (-1.0, 1.0, 1.0), _zero_gamma(3), _zero_ricci(3), _identity_frame(3),
                         Chart(("t", "x", "y")), name="M3")
    return CatalogEntry("m3", metric, LORENTZ_TIMELIKE, {}, 3,
                        constants=lambda sig: _flat_constants((-1.0, 1.0, 1.0)),
                        closed_forms={"explicit": flat_explicit},
                        flags=("einstein", "conformally-flat"))


@dataclass(frozen=True)
class ConformalFactor:
    """An analytic factor ``omega(x)`` on E3 with ``upsilon = d log omega``.

    ``curvature`` is the sectional curvature of ``omega^2 delta``.
    """

    name: str
    omega: Callable[[np.ndarray], float]
    upsilon: Callable[[np.ndarray], np.ndarray]
    curvature: float
    domain: Callable[[np.ndarray], bool]


STEREOGRAPHIC_SPHERE = ConformalFactor(
    "stereographic-sphere",
    lambda x: 2.0 / (1.0 + float(np.dot(x, x))),
    lambda x: -2.0 * np.asarray(x, dtype=float) / (1.0 + float(np.dot(x, x))),
    1.0,
    lambda x: True,
)

POINCARE_BALL = ConformalFactor(
    "poincare-ball",
    lambda x: 2.0 / (1.0 - float(np.dot(x, x))),
    lambda x: 2.0 * np.asarray(x, dtype=float) / (1.0 - float(np.dot(x, x))),
    -1.0,
    lambda x: float(np.dot(x, x)) < 1.0,
)


def _conformal_entry(ident: str, cf: ConformalFactor) -> CatalogEntry:
    # metric omega^2 delta on the E3 chart, frame e_i = d_i / omega
    def frame(x):
        return np.eye(3) / cf.omega(x)

    def gamma(x):
        om = cf.omega(x)
        ups = cf.upsilon(x)
        eye = np.eye(3)
        # omega^i_j(e_k) = (Y_j delta_ik - Y_i delta_jk) / omega
        return (np.einsum("j,ik->ijk", ups, eye) - np.einsum("i,jk->ijk", ups, eye)) / om

    def ricci(x):
        return 2.0 * cf.curvature * np.eye(3)

    def check(x):
        if not cf.domain(x):
            raise DomainError(f"{ident}: point outside the conformal chart", x)

    metric = FrameMetric(3, (1.0, 1.0, 1.0), gamma, ricci, frame, Chart(("x", "y", "z"), check), name=ident)
    return CatalogEntry(ident, metric, RIEMANNIAN, {}, 3,
                        constants=lambda sig: {"norm_u": lambda y: frame_norm(np.ones(3), y[3:6])},
                        flags=("einstein", "conformally-flat", "conformal-wrapper"),
                        extras={"conformal": cf})


def s3_entry() -> CatalogEntry:
    """Unit round S3 in stereographic coordinates, as a rescaling of E3."""
    return _conformal_entry("s3", STEREOGRAPHIC_SPHERE)


def h3_entry() -> CatalogEntry:
    """Unit hyperbolic space on the Poincare ball, as a rescaling of E3."""
    return _conformal_entry("h3", POINCARE_BALL)


class FlatKind(str, enum.Enum):
    CIRCLE = "circle"
    GEODESIC = "geodesic"
    TIMELIKE_HYPERBOLA = "timelike-hyperbola"
    SPACELIKE_HYPERBOLA = "spacelike-hyperbola"
    NULL_ACCEL_PARABOLA = "null-accel-parabola"


_ETA = {
    FlatKind.CIRCLE: None,
    FlatKind.GEODESIC: None,
    FlatKind.TIMELIKE_HYPERBOLA: (-1.0, 1.0, 1.0),
    FlatKind.SPACELIKE_HYPERBOLA: (-1.0, 1.0, 1.0),
    FlatKind.NULL_ACCEL_PARABOLA: (-1.0, 1.0, 1.0),
}


def flat_explicit_state(kind, x0, u0, a0, t, eta=None) -> CGState:
    """Closed-form conformal geodesic in E3 or M3 as a full state.

    ``eta`` defaults to Euclidean for circles and geodesics and to
    ``(-1, 1, 1)`` for the Lorentzian kinds.
    """
    kind = FlatKind(kind)
    x0, u0, a0 = (np.asarray(v, dtype=float) for v in (x0, u0, a0))
    if eta is None:
        eta = _ETA[kind] or (1.0,) * x0.size
    eta = np.asarray(eta, dtype=float)
    a2 = frame_norm(eta, a0)
    if kind is FlatKind.GEODESIC:
        if np.any(a0 != 0):
            raise ConfigurationError("geodesic kind needs a0 = 0")
        return CGState(x0 + t * u0, u0, a0, t)
    if kind is FlatKind.NULL_ACCEL_PARABOLA:
        if abs(a2) > 1e-12 * max(1.0, float(np.dot(a0, a0))):
            raise ConfigurationError("null-acceleration kind needs g(a0, a0) = 0")
        return CGState(x0 + t * u0 + 0.5 * t * t * a0, u0 + t * a0, a0, t)
    if kind is FlatKind.CIRCLE:
        if a2 < 0:
            raise ConfigurationError("circle kind needs space-like a0")
        A = np.sqrt(a2)
        if A == 0:
            raise ConfigurationError("A = 0: use the geodesic kind")
        c, s = np.cos(A * t), np.sin(A * t)
        x = x0 + u0 * s / A + a0 * (1 - c) / A**2
        return CGState(x, u0 * c + a0 * s / A, -A * u0 * s + a0 * c, t)
    # hyperbolae: u'' = A^2 u with A^2 = |g(a0, a0)|
    A = np.sqrt(abs(a2))
    if A == 0:
        raise ConfigurationError("A = 0: use the geodesic kind")
    if kind is FlatKind.TIMELIKE_HYPERBOLA and a2 <= 0:
        raise ConfigurationError("time-like curves have space-like acceleration")
    if kind is FlatKind.SPACELIKE_HYPERBOLA and a2 >= 0:
        raise ConfigurationError("space-like hyperbola needs time-like acceleration")
    ch, sh = np.cosh(A * t), np.sinh(A * t)
    x = x0 + u0 * sh / A + a0 * (ch - 1) / A**2
    return CGState(x, u0 * ch + a0 * sh / A, A * u0 * sh + a0 * ch, t)


def flat_explicit(kind, x0, u0, a0, t, eta=None) -> np.ndarray:
    """Closed-form position of a flat-space conformal geodesic at time ``t``.

    >>> flat_explicit("circle", [0, 0, 0], [1, 0, 0], [0, 1, 0], np.pi).round(12)
    array([0., 2., 0.])
    """
    return flat_explicit_state(kind, x0, u0, a0, t, eta).x
