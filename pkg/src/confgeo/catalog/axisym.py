"""Axisymmetric 3-metrics ``dr^2 + F^2 dphi^2 + H^2 dz^2``.

Coordinates ``(r, phi, z)`` with orthonormal coframe ``(dr, F dphi, H dz)``.
``H = 1`` with ``F = F(r)`` is the product of a surface of revolution with
a line; the general case allows ``F(r, z)``, ``H(r, z)``.  Profiles supply
their partial derivatives analytically.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad

from ..core import Chart, ConfigurationError, DomainError, FrameMetric, RIEMANNIAN, Signature
from .base import CatalogEntry, KillingField, antisymmetric_connection

__all__ = [
    "Partials",
    "Profile2D",
    "RadialProfile",
    "AxisymSurface",
    "axisym_entry",
    "flat_profile",
    "sphere_profile",
    "hyperbolic_profile",
    "bump_profile",
    "PRESETS",
    "preset",
    "planar_Q",
]


@dataclass(frozen=True)
class Partials:
    """Value and partial derivatives of a profile at a point."""

    f: float
    r: float
    z: float
    rr: float
    zz: float
    rz: float


@dataclass(frozen=True)
class Profile2D:
    """A positive function of ``(r, z)`` with analytic partials."""

    name: str
    evaluate: Callable[[float, float], Partials]
    even_in_z: bool = True

    def __call__(self, r, z=0.0) -> Partials:
        return self.evaluate(float(r), float(z))


@dataclass(frozen=True)
class RadialProfile:
    """``F(r)`` with ``F', F''`` and optionally a closed-form ``G = int_0^r F``."""

    name: str
    F: Callable[[float], float]
    dF: Callable[[float], float]
    d2F: Callable[[float], float]
    G: Callable[[float], float] | None = None
    r_max: float = np.inf

    def integral(self, r: float) -> float:
        """``G(r) = int_0^r F``, by quadrature when no closed form is known."""
        if self.G is not None:
            return float(self.G(r))
        val, _ = quad(self.F, 0.0, r, epsabs=1e-14, epsrel=1e-13, limit=200)
        return float(val)

    def as_2d(self) -> Profile2D:
        def ev(r, z):
            return Partials(self.F(r), self.dF(r), 0.0, self.d2F(r), 0.0, 0.0)
        return Profile2D(self.name, ev, True)


def _one(r, z):
    return Partials(1.0, 0.0, 0.0, 0.0, 0.0, 0.0)


UNIT = Profile2D("one", _one, True)


def flat_profile() -> RadialProfile:
    return RadialProfile("flat", lambda r: r, lambda r: 1.0, lambda r: 0.0, lambda r: 0.5 * r * r)


def sphere_profile() -> RadialProfile:
    return RadialProfile("sin", np.sin, np.cos, lambda r: -np.sin(r), lambda r: 1.0 - np.cos(r), np.pi)


def hyperbolic_profile() -> RadialProfile:
    return RadialProfile("sinh", np.sinh, np.cosh, np.sinh, lambda r: np.cosh(r) - 1.0)


def bump_profile(kappa: float = 0.5) -> RadialProfile:
    """``F = r (1 + kappa r^2 exp(-r^2))``: flat near the axis and at infinity."""
    if kappa <= -np.e:
        raise ConfigurationError("bump profile needs kappa > -e for F > 0")

    def F(r):
        return r + kappa * r**3 * np.exp(-r * r)

    def dF(r):
        return 1.0 + kappa * (3 * r**2 - 2 * r**4) * np.exp(-r * r)

    def d2F(r):
        return kappa * (6 * r - 14 * r**3 + 4 * r**5) * np.exp(-r * r)

    def G(r):
        return 0.5 * r * r + 0.5 * kappa * (1.0 - (1.0 + r * r) * np.exp(-r * r))

    return RadialProfile(f"bump({kappa:g})", F, dF, d2F, G)


def rcoshz_pair() -> tuple[Profile2D, Profile2D]:
    """``F = r cosh z``, ``H = 1``."""
    def ev(r, z):
        c, s = np.cosh(z), np.sinh(z)
        return Partials(r * c, c, r * s, 0.0, r * c, s)
    return Profile2D("r cosh z", ev, True), UNIT


def even_pair(kappa: float = 0.5, nu: float = 0.3, mu: float = 0.2) -> tuple[Profile2D, Profile2D]:
    """Bump in ``r`` times ``1 + nu z^2``, with ``H = 1 + mu z^2 r^2 / (1 + r^2)``."""
    B = bump_profile(kappa)

    def F(r, z):
        Z, Zp, Zpp = 1 + nu * z * z, 2 * nu * z, 2 * nu
        b, bp, bpp = B.F(r), B.dF(r), B.d2F(r)
        return Partials(b * Z, bp * Z, b * Zp, bpp * Z, b * Zpp, bp * Zp)

    def H(r, z):
        q = 1 + r * r
        s, sp, spp = r * r / q, 2 * r / q**2, (2 - 6 * r * r) / q**3
        return Partials(1 + mu * z * z * s, mu * z * z * sp, 2 * mu * z * s, mu * z * z * spp,
                        2 * mu * s, 2 * mu * z * sp)

    return Profile2D("even", F, True), Profile2D("even-H", H, True)


def odd_pair(kappa: float = 0.5, slope: float = 0.4) -> tuple[Profile2D, Profile2D]:
    """Bump in ``r`` times ``1 + slope z``; not even in ``z``."""
    B = bump_profile(kappa)

    def F(r, z):
        Z = 1 + slope * z
        b, bp, bpp = B.F(r), B.dF(r), B.d2F(r)
        return Partials(b * Z, bp * Z, b * slope, bpp * Z, 0.0, bp * slope)

    return Profile2D("odd", F, False), UNIT


def _connection_terms(Fp: Partials, Hp: Partials):
    a = Fp.r / Fp.f
    b = Hp.r / Hp.f
    c = Fp.z / (Fp.f * Hp.f)
    return a, b, c


def axisym_ricci(Fp: Partials, Hp: Partials) -> np.ndarray:
    """Frame Ricci tensor of ``dr^2 + F^2 dphi^2 + H^2 dz^2``."""
    F, H = Fp.f, Hp.f
    cross = -Fp.zz / (F * H * H) + Fp.z * Hp.z / (F * H**3) - Fp.r * Hp.r / (F * H)
    r11 = -Fp.rr / F - Hp.rr / H
    r22 = -Fp.rr / F + cross
    r33 = -Hp.rr / H + cross
    r13 = -(Fp.rz / (F * H) - Fp.z * Hp.r / (F * H * H))
    return np.array([[r11, 0.0, r13], [0.0, r22, 0.0], [r13, 0.0, r33]])


@dataclass(frozen=True)
class AxisymSurface:
    F: Profile2D
    H: Profile2D
    radial: RadialProfile | None = None
    r_max: float = np.inf

    def check(self, x):
        r = x[0]
        if not r > 0:
            raise DomainError("reached the symmetry axis r = 0", x, kind="frame_singularity")
        if not r < self.r_max:
            raise DomainError("left the profile domain", x)
        if not (self.F(r, x[2]).f > 0 and self.H(r, x[2]).f > 0):
            raise DomainError("profile is not positive here", x)

    def metric(self) -> FrameMetric:
        e = np.eye(3)

        def frame(x):
            Fp, Hp = self.F(x[0], x[2]), self.H(x[0], x[2])
            return np.diag([1.0, 1.0 / Fp.f, 1.0 / Hp.f])

        def terms(x):
            return _connection_terms(self.F(x[0], x[2]), self.H(x[0], x[2]))

        gamma = antisymmetric_connection(3, (1.0, 1.0, 1.0), {
            (0, 1): lambda x: -terms(x)[0] * e[1],
            (0, 2): lambda x: -terms(x)[1] * e[2],
            (1, 2): lambda x: terms(x)[2] * e[1],
        })

        def ricci(x):
            return axisym_ricci(self.F(x[0], x[2]), self.H(x[0], x[2]))

        return FrameMetric(3, (1.0, 1.0, 1.0), gamma, ricci, frame,
                           Chart(("r", "phi", "z"), self.check), name="axisym")


def check_axis_regular(F: Profile2D, tol: float = 1e-6, z: float = 0.0) -> bool:
    """``F -> 0`` and ``F_r -> 1`` at the axis, so the plane has no cone point."""
    p = F(0.0, z)
    return abs(p.f) < tol and abs(p.r - 1.0) < tol


def planar_Q(Fp: Partials, Hp: Partials) -> float:
    """Curvature combination driving ``q' = alpha beta Q`` in the plane ``z = 0``."""
    return -Hp.rr / Hp.f + Fp.zz / (Fp.f * Hp.f**2) + Fp.r * Hp.r / (Fp.f * Hp.f)


def _planar_rhs(F: Profile2D, H: Profile2D):
    # state (r, phi, z, alpha, beta, gamma, a1, a2, a3) with z = gamma = a3 = 0
    def rhs(t, y):
        r = y[0]
        if not r > 0:
            raise DomainError("reached the symmetry axis r = 0", y[:3], kind="frame_singularity")
        Fp, Hp = F(r, 0.0), H(r, 0.0)
        k = Fp.r / Fp.f
        Q = planar_Q(Fp, Hp)
        al, be, a1, a2 = y[3], y[4], y[6], y[7]
        aa = a1 * a1 + a2 * a2
        return np.array([
            al, be / Fp.f, 0.0,
            a1 + k * be * be,
            a2 - k * al * be,
            0.0,
            k * be * a2 - aa * al + al * be * be * Q,
            -k * be * a1 - aa * be - al * al * be * Q,
            0.0,
        ])
    return rhs


def axisym_entry(F=None, H=None, require_even: bool = True, **kw) -> CatalogEntry:
    """Entry for an axisymmetric metric.

    ``F`` may be a :class:`RadialProfile` (then ``H = 1``), a
    :class:`Profile2D`, or the name of a preset.  With ``require_even`` a
    profile not even in ``z`` is rejected, since only then is ``z = 0``
    totally geodesic.
    """
    if F is None or isinstance(F, str):
        F, H = preset(F or "flat", **kw)
    radial = None
    r_max = np.inf
    if isinstance(F, RadialProfile):
        radial, r_max = F, F.r_max
        F = F.as_2d()
        H = H or UNIT
    if H is None:
        H = UNIT
    if require_even and not (F.even_in_z and H.even_in_z):
        raise ConfigurationError("profile is not even in z; pass require_even=False to accept")
    if not check_axis_regular(F):
        raise ConfigurationError("profile is not regular on the axis (need F(0)=0, F_r(0)=1)")
    surf = AxisymSurface(F, H, radial, r_max)
    metric = surf.metric()

    even = F.even_in_z and H.even_in_z

    def specialized(s: Signature):
        if s.epsilon != 1:
            raise ConfigurationError("axisymmetric metrics are Riemannian")
        return _planar_rhs(F, H)

    def constants(s):
        out = {
            "norm_u": lambda y: float(np.dot(y[3:6], y[3:6])),
            "u_dot_a": lambda y: float(np.dot(y[3:6], y[6:9])),
        }
        # q = a2 alpha - a1 beta; only conserved when Q = 0
        out["q"] = lambda y: float(y[7] * y[3] - y[6] * y[4])
        if radial is not None:
            q = out["q"]

            def C(y):
                r = y[0]
                return float(radial.F(r) * y[4] - q(y) * radial.integral(r))
            out["C"] = C
        return out

    flags = ("planar",) if even else ()
    return CatalogEntry(
        "axisym", metric, RIEMANNIAN,
        {"F": F.name, "H": H.name, **kw}, 3,
        specialized=specialized if even else None,
        constants=constants,
        killing_fields={"phi": KillingField("phi", (0.0, 1.0, 0.0), True)},
        observable=("r", lambda y: float(y[0])),
        flags=flags,
        extras={"surface": surf, "radial": radial},
    )


PRESETS = {
    "flat": lambda **kw: (flat_profile(), None),
    "sin": lambda **kw: (sphere_profile(), None),
    "sinh": lambda **kw: (hyperbolic_profile(), None),
    "bump": lambda kappa=0.5, **kw: (bump_profile(kappa), None),
    "rcoshz": lambda **kw: rcoshz_pair(),
    "even": lambda **kw: even_pair(**kw),
    "odd": lambda **kw: odd_pair(**kw),
}


def preset(name: str, **kw):
    try:
        return PRESETS[name](**kw)
    except KeyError:
        raise ConfigurationError(f"unknown axisymmetric profile {name!r}; choose from {sorted(PRESETS)}") from None
