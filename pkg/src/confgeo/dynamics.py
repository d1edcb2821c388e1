"""Conformal-geodesic equations in (v, b) and third-order form.

Third-order form, with ``eps = g(u, u)``::

    nabla_u u = a
    nabla_u a = u (-eps |a|^2 - L(u,u)) + eps L(u)^#

which covers both the Riemannian/space-like and the time-like system.  The
(v, b) system is integrated in the projective parameter ``tau``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    CGState,
    ConfigurationError,
    DomainError,
    EventKind,
    FrameMetric,
    Signature,
    SingularParametrizationError,
    Trajectory,
    VBState,
    frame_dot,
    frame_norm,
)
from .integrator import EventSpec, IntegratorConfig, integrate

__all__ = [
    "third_order_rhs",
    "make_third_order_rhs",
    "b_from_state",
    "vb_from_cg",
    "vb_rhs",
    "make_vb_rhs",
    "ChiPair",
    "chi_evolve",
    "MobiusMap",
    "mobius_reparametrize",
    "conformal_transform",
    "accel_magnitude_rate",
    "killing_constant_Q",
    "DegenerateRepresentativeError",
]


class DegenerateRepresentativeError(DomainError):
    """``g(v, v)`` vanished: the (v, b) representative is degenerate."""

    def __init__(self, message, x=None):
        super().__init__(message, x, kind="degenerate_representative")


def _split(y, dim):
    return y[:dim], y[dim:2 * dim], y[2 * dim:3 * dim]


def _third_order(metric: FrameMetric, eps: int, x, u, a):
    metric.chart.validate(x)
    eta = metric.eta_array
    gam = metric.gamma(x)
    lsch = metric.schouten(x)
    xdot = metric.frame(x) @ u
    udot = a - np.einsum("ijk,j,k->i", gam, u, u)
    a2 = float(np.dot(eta, a * a))
    lu = lsch @ u
    luu = float(np.dot(u, lu))
    # equals -eps*a2 - luu when g(u,u) = eps; dividing by g(u,u) keeps g(u,a) = 0
    # invariant off the constraint set, so roundoff there cannot grow
    nn = float(np.dot(eta, u * u))
    coef = -(a2 + eps * luu) / nn if nn != 0 else -eps * a2 - luu
    adot = -np.einsum("ijk,j,k->i", gam, a, u) + u * coef + eps * lu / eta
    return xdot, udot, adot


def third_order_rhs(metric: FrameMetric, s: CGState, sig: Signature) -> np.ndarray:
    """Derivative of ``(x, u, a)`` along a unit-speed conformal geodesic.

    Raises :class:`DomainError` if ``s.x`` is outside the chart.
    """
    xdot, udot, adot = _third_order(metric, sig.epsilon, s.x, s.u, s.a)
    return np.concatenate([xdot, udot, adot])


def make_third_order_rhs(metric: FrameMetric, sig: Signature):
    """Flat ``rhs(t, y)`` for :func:`confgeo.integrator.integrate`."""
    dim, eps = metric.dim, sig.epsilon

    def rhs(t, y):
        x, u, a = _split(y, dim)
        return np.concatenate(_third_order(metric, eps, x, u, a))

    return rhs


def b_from_state(metric: FrameMetric, s: CGState, sig: Signature, chi: float = 1.0,
                 chi_dot: float = 0.0):
    """Covariant frame components of ``b`` and the scalar ``u.b``.

    ``u.b = -2 chi_dot / chi``; ``b^c = a^c + (u.b) u^c`` for ``eps = +1`` and
    ``b^c = -a^c - (u.b) u^c`` for time-like curves.
    """
    if chi == 0:
        raise SingularParametrizationError("chi = 0 is a pole of the projective parameter")
    ub = -2.0 * chi_dot / chi
    b_up = s.a + ub * s.u if sig.epsilon > 0 else -s.a - ub * s.u
    return metric.eta_array * b_up, ub


def vb_from_cg(metric: FrameMetric, s: CGState, sig: Signature, chi: float = 1.0,
               chi_dot: float = 0.0, tau: float = 0.0) -> VBState:
    """The (v, b) representative with ``v = chi^2 u`` built from a third-order state."""
    b, _ = b_from_state(metric, s, sig, chi, chi_dot)
    return VBState(s.x, chi * chi * s.u, b, tau)


def _vb(metric: FrameMetric, x, v, b):
    metric.chart.validate(x)
    eta = metric.eta_array
    vv = float(np.dot(eta, v * v))
    if abs(vv) < 1e-30 or not np.isfinite(vv):
        raise DegenerateRepresentativeError("g(v, v) vanished", x)
    gam = metric.gamma(x)
    lsch = metric.schouten(x)
    vb = float(np.dot(v, b))
    bb = float(np.dot(b * b, 1.0 / eta))
    xdot = metric.frame(x) @ v
    vdot = -np.einsum("ijk,j,k->i", gam, v, v) - 2.0 * vb * v + (b / eta) * vv
    bdot = np.einsum("jik,j,k->i", gam, b, v) + vb * b - 0.5 * eta * v * bb + lsch @ v
    return xdot, vdot, bdot


def vb_rhs(metric: FrameMetric, s: VBState) -> np.ndarray:
    """Derivative of ``(x, v, b, tau)`` with respect to ``tau``."""
    xdot, vdot, bdot = _vb(metric, s.x, s.v, s.b)
    return np.concatenate([xdot, vdot, bdot, [1.0]])


def make_vb_rhs(metric: FrameMetric):
    dim = metric.dim

    def rhs(t, y):
        x, v, b = _split(y, dim)
        return np.concatenate([*_vb(metric, x, v, b), [1.0]])

    return rhs


@dataclass
class ChiPair:
    """Two solutions of the chi equation and the projective parameter."""

    t: np.ndarray
    chi1: np.ndarray
    chi2: np.ndarray
    dchi1: np.ndarray
    dchi2: np.ndarray
    wronskian: float
    poles: list[float] = field(default_factory=list)

    @property
    def wronskian_series(self) -> np.ndarray:
        return self.chi1 * self.dchi2 - self.chi2 * self.dchi1

    @property
    def wronskian_drift(self) -> float:
        return float(np.max(np.abs(self.wronskian_series - self.wronskian)))

    @property
    def tau(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.chi2 / self.chi1


def chi_coefficient(metric: FrameMetric, sig: Signature, x, u, a) -> float:
    """``k`` in ``chi'' = k chi``: ``-(eps |a|^2 + 2 L(u,u)) / 4``."""
    eta = metric.eta_array
    a2 = float(np.dot(eta, a * a))
    luu = float(u @ metric.schouten(x) @ u)
    return -0.25 * (sig.epsilon * a2 + 2.0 * luu)


def chi_evolve(traj: Trajectory, metric: FrameMetric, sig: Signature,
               basis=((1.0, 0.0), (0.0, 1.0)), cfg: IntegratorConfig | None = None) -> ChiPair:
    """Integrate the chi equation along a finished third-order trajectory.

    ``basis`` gives ``(chi, chi')`` at the trajectory start for the two
    solutions; the default pair has unit Wronskian.  Zeros of ``chi1``
    (poles of ``tau = chi2/chi1``) are located as events.
    """
    if traj.dense is None:
        raise ValueError("trajectory has no dense output")
    dim = metric.dim
    nc = traj.ncoord or dim
    t0, t1 = float(traj.t[0]), float(traj.t[-1])

    def rhs(t, y):
        st = traj.dense(t)
        k = chi_coefficient(metric, sig, st[:nc], st[nc:nc + dim], st[nc + dim:nc + 2 * dim])
        return np.array([y[1], k * y[0], y[3], k * y[2]])

    (c1, d1), (c2, d2) = basis
    y0 = np.array([c1, d1, c2, d2], dtype=float)
    w0 = c1 * d2 - c2 * d1
    if w0 == 0:
        raise ConfigurationError("basis solutions must be independent")
    cfg = (cfg or IntegratorConfig()).replace(t0=t0, t_max=t1, max_step=max((t1 - t0) / 50, 1e-3))
    zero = EventSpec(EventKind.CHI_ZERO, lambda t, y: y[0], name="chi1")
    res = integrate(rhs, y0, cfg, [zero])
    return ChiPair(res.t, res.y[:, 0], res.y[:, 2], res.y[:, 1], res.y[:, 3], w0,
                   [e.t for e in res.events if e.kind is EventKind.CHI_ZERO])


@dataclass(frozen=True)
class MobiusMap:
    """``tau -> (a tau + b) / (c tau + d)``."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        if self.det == 0:
            raise ConfigurationError("Mobius map needs ad - bc != 0")

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def __call__(self, tau: float) -> float:
        den = self.c * tau + self.d
        if den == 0:
            raise SingularParametrizationError("c tau + d = 0")
        return (self.a * tau + self.b) / den

    def inverse(self) -> "MobiusMap":
        return MobiusMap(self.d, -self.b, -self.c, self.a)


def mobius_reparametrize(m: MobiusMap, s: VBState, eta) -> VBState:
    """Reparametrize a (v, b) state under a projective change of ``tau``.

    ``v -> (c tau + d)^2 v / det`` (the factor ``1/det`` keeps
    ``v(tau_hat) = 1``; it is 1 for unimodular maps) and
    ``b -> b + f g(v, .)`` with ``f = -2 c / (g(v,v) (c tau + d))``.
    """
    eta = np.asarray(eta, dtype=float)
    den = m.c * s.tau + m.d
    if den == 0:
        raise SingularParametrizationError("c tau + d = 0")
    vv = frame_norm(eta, s.v)
    f = -2.0 * m.c / (vv * den)
    return VBState(s.x, den * den * s.v / m.det, s.b + f * eta * s.v, m(s.tau))


def conformal_transform(s: VBState, omega: float, upsilon) -> VBState:
    """Carry a (v, b) state to the rescaled metric ``omega^2 g``.

    The velocity is unchanged as a vector and ``b -> b - Upsilon`` as a
    one-form, with ``Upsilon = d(log omega)``.  Components here are frame
    components: ``upsilon`` in the source frame on input, and the result in
    the rescaled frame ``e_i / omega``, so ``v -> omega v`` and
    ``b -> (b - upsilon) / omega`` componentwise.
    """
    if not omega > 0:
        raise ConfigurationError("conformal factor must be positive")
    ups = np.asarray(upsilon, dtype=float)
    return VBState(s.x, omega * s.v, (s.b - ups) / omega, s.tau)


def accel_magnitude_rate(metric: FrameMetric, s: CGState, sig: Signature) -> float:
    """Rate of change of ``q = sqrt(|g(a, a)|)``.

    ``q' = eps * sign(g(a,a)) * L(w, u)`` with ``w = a / q``.  Returns 0 when
    ``a = 0``, where ``w`` is undefined and ``q`` is at its minimum.
    """
    eta = metric.eta_array
    aa = frame_norm(eta, s.a)
    if aa == 0.0:
        return 0.0
    q = np.sqrt(abs(aa))
    w = s.a / q
    lwu = float(w @ metric.schouten(s.x) @ s.u)
    return float(sig.epsilon * np.sign(aa) * lwu)


def killing_constant_Q(Kval, Mval, Rscalar: float, s: CGState, eta=None) -> float:
    """``M_ab u^a a^b - R K_a u^a / 6`` for constant-curvature 3-metrics.

    ``Kval`` are contravariant frame components of the Killing vector,
    ``Mval`` the covariant frame components of ``nabla_a K_b``.
    """
    K = np.asarray(Kval, dtype=float)
    eta = np.ones_like(K) if eta is None else np.asarray(eta, dtype=float)
    M = np.asarray(Mval, dtype=float)
    return float(s.u @ M @ s.a - Rscalar * frame_dot(eta, K, s.u) / 6.0)
