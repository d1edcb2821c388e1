"""Reductions to quadratures and closed-form special solutions.

These are independent of the third-order integrator and serve as its
oracles: the Nil and Berger quartics ``gamma'^2 = F(gamma)``, the
axisymmetric radial potential, and the Schwarzschild radial and
equatorial reductions.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .catalog.axisym import RadialProfile
from .catalog.berger import berger_coefficients
from .core import (
    CGState,
    ConfigurationError,
    EventKind,
    InfeasibleError,
    SingularParametrizationError,
)
from .integrator import BlowupFit, EventSpec, IntegratorConfig, fit_blowup, integrate
from .polyroots import Root, polyval, real_roots

__all__ = [
    "QuarticCase",
    "QuarticReduction",
    "nil_constants",
    "nil_quartic",
    "berger_constants",
    "berger_quartic",
    "GammaEvolution",
    "gamma_evolve",
    "potential_evolve",
    "chi_rate",
    "state_from_constants",
    "nil_riem_sech",
    "NilLorKind",
    "nil_lor_special",
    "const_gamma_k",
    "BergerSpecial",
    "berger_reduction",
    "berger_special",
    "RadialReduction",
    "axisym_reduction",
    "circular_orbit",
    "circular_f2",
    "SchwarzschildRadial",
    "schwarzschild_radial",
    "critical_r0",
    "radial_horizon_state",
    "radial_chi_integral",
    "radial_r0",
    "EquatorialReduction",
    "schwarzschild_equatorial",
    "equatorial_state",
    "DOUBLE_ROOT_TOL",
]

# gamma0 this close to a double root of F gives the constant solution
DOUBLE_ROOT_TOL = 1e-10
# distance from gamma^2 = 1 treated as on the singular set of chi'
CHI_SINGULAR_TOL = 1e-12


class QuarticCase(str, enum.Enum):
    NIL_RIEM = "nil-r"
    NIL_LOR = "nil-l"
    BERGER = "berger"

    @property
    def riemannian(self) -> bool:
        return self is not QuarticCase.NIL_LOR


@dataclass(frozen=True)
class QuarticReduction:
    """``gamma'^2 = F(gamma)`` with ``F = c4 g^4 + c3 g^3 + c2 g^2 + c1 g + c0``.

    ``intervals`` are the maximal closed sets where ``F >= 0`` (unbounded
    ends as ``+-inf``), intersected with ``[-1, 1]`` in the Riemannian
    cases.  A degenerate interval ``(r, r)`` is an isolated double root.
    """

    coeffs: tuple[float, float, float, float, float]
    constants: tuple[float, float, float]
    case: QuarticCase
    roots: tuple[Root, ...]
    intervals: tuple[tuple[float, float], ...]

    @property
    def E(self) -> float:
        return self.constants[0]

    @property
    def J(self) -> float:
        return self.constants[1]

    @property
    def lam(self) -> float:
        return self.constants[2]

    def F(self, g):
        return np.polyval(self.coeffs, g)

    def dF(self, g):
        return np.polyval(np.polyder(self.coeffs), g)

    def endpoint_values(self) -> tuple[float, float]:
        """``(F(+1), F(-1))``; compare with :meth:`endpoint_expected`."""
        return float(polyval(self.coeffs, 1.0)), float(polyval(self.coeffs, -1.0))

    def endpoint_expected(self) -> tuple[float, float]:
        E, J, lam = self.constants
        if self.case is QuarticCase.NIL_RIEM:
            return -(J - lam / 2) ** 2, -(J + lam / 2) ** 2
        if self.case is QuarticCase.NIL_LOR:
            return (J + lam / 2) ** 2, (J - lam / 2) ** 2
        A = lam / 2
        return -(J + A) ** 2, -(J - A) ** 2

    def double_roots(self) -> list[float]:
        return [r.value for r in self.roots if r.multiplicity >= 2]

    def interval_containing(self, g: float, tol: float = 1e-12) -> tuple[float, float]:
        for lo, hi in self.intervals:
            if lo - tol <= g <= hi + tol:
                return lo, hi
        raise InfeasibleError(f"F({g:g}) = {self.F(g):.3g} < 0: gamma outside every allowed interval")

    def strictly_inside_unit(self, g: float) -> bool:
        """True when the allowed interval through ``g`` stays inside ``(-1, 1)``."""
        lo, hi = self.interval_containing(g)
        return -1.0 < lo and hi < 1.0


def _intervals(coeffs, roots, riemannian: bool):
    pts = sorted({r.value for r in roots})
    lo_end, hi_end = (-1.0, 1.0) if riemannian else (-np.inf, np.inf)
    pts = [p for p in pts if lo_end <= p <= hi_end]
    knots = [lo_end] + pts + [hi_end]
    pieces = []
    for a, b in zip(knots[:-1], knots[1:]):
        if b <= a:
            continue
        if np.isinf(a) and np.isinf(b):
            mid = 0.0
        elif np.isinf(a):
            mid = b - 1.0
        elif np.isinf(b):
            mid = a + 1.0
        else:
            mid = 0.5 * (a + b)
        if polyval(coeffs, mid) >= 0:
            pieces.append([a, b])
    merged: list[list[float]] = []
    for a, b in pieces:
        if merged and merged[-1][1] == a:
            merged[-1][1] = b
        else:
            merged.append([a, b])
    covered = lambda p: any(a <= p <= b for a, b in merged)  # noqa: E731
    for r in roots:
        if lo_end <= r.value <= hi_end and not covered(r.value):
            merged.append([r.value, r.value])
    merged.sort()
    return tuple((float(a), float(b)) for a, b in merged)


def _reduction(coeffs, constants, case) -> QuarticReduction:
    coeffs = tuple(float(c) for c in coeffs)
    roots = tuple(real_roots(coeffs))
    return QuarticReduction(coeffs, tuple(float(c) for c in constants), case, roots,
                            _intervals(coeffs, roots, case.riemannian))


def nil_constants(s: CGState, lam: float, eps: int) -> tuple[float, float]:
    """``(E, J)`` for a Nil state; ``eps = -1`` for the Lorentzian metric."""
    al, be, ga = s.u
    a1, a2, a3 = s.a
    if eps > 0:
        return a1 * a1 + a2 * a2 + a3 * a3 - lam * lam * ga * ga, a1 * be - a2 * al + 0.5 * lam * ga
    return a1 * a1 - a2 * a2 + a3 * a3 + lam * lam * ga * ga, a1 * be - a2 * al - 0.5 * lam * ga


def nil_quartic(E: float, J: float, lam: float, eps: int) -> QuarticReduction:
    if lam == 0:
        raise ConfigurationError("the Nil quartic needs lam != 0")
    l2 = lam * lam
    if eps > 0:
        coeffs = (-l2, 0.0, 0.75 * l2 - E, lam * J, E - J * J)
        case = QuarticCase.NIL_RIEM
    else:
        coeffs = (l2, 0.0, -(0.75 * l2 + E), lam * J, E + J * J)
        case = QuarticCase.NIL_LOR
    return _reduction(coeffs, (E, J, lam), case)


def berger_constants(s: CGState, lam: float) -> tuple[float, float]:
    al, be, ga = s.u
    a1, a2, a3 = s.a
    A, _ = berger_coefficients(lam)
    return a1 * a1 + a2 * a2 + a3 * a3 + (1 - lam * lam) * ga * ga, a1 * be - a2 * al - A * ga


def berger_quartic(E: float, J: float, lam: float) -> QuarticReduction:
    if not lam > 0:
        raise ConfigurationError("Berger parameter must be positive")
    A = 0.5 * lam
    k = 1.0 - lam * lam
    coeffs = (k, 0.0, -k - (E + A * A), -2 * A * J, E - J * J)
    return _reduction(coeffs, (E, J, lam), QuarticCase.BERGER)


@dataclass
class GammaEvolution:
    """Samples of ``gamma`` and ``gamma'``; ``t`` runs in the requested direction."""

    t: np.ndarray
    gamma: np.ndarray
    dgamma: np.ndarray
    turning_points: list[float]
    termination: str
    constant: bool = False
    blowup: BlowupFit | None = None
    dense: object = None
    direction: int = 1

    def at(self, t):
        """Dense evaluation of ``gamma`` at times inside the computed span."""
        t = np.asarray(t, dtype=float)
        if self.constant or self.dense is None:
            return np.full_like(t, self.gamma[0])
        return np.asarray(self.dense(self.direction * (t - self.t[0])))[0]


def potential_evolve(P, dP, x0: float, sign: int = 1, tspan=(0.0, 10.0),
                     cfg: IntegratorConfig | None = None, fixed_points=(), tol: float = 1e-12) -> GammaEvolution:
    """Solve ``x'^2 = P(x)`` through ``x'' = P'(x) / 2``.

    ``sign`` picks the branch of ``x'(t0)`` and ``tspan`` may run
    backwards.  Starting within ``DOUBLE_ROOT_TOL`` of one of
    ``fixed_points`` (double roots of ``P``) gives the constant solution.
    Turning points are located as events; a finite-time escape
    terminates the run with a blow-up fit attached.
    """
    t0, t1 = (float(v) for v in tspan)
    if t1 == t0:
        raise ConfigurationError("empty time span")
    P0 = float(P(x0))
    if P0 < -tol:
        raise InfeasibleError(f"P({x0:g}) = {P0:.3g} < 0")
    for d in fixed_points:
        if abs(x0 - d) <= DOUBLE_ROOT_TOL:
            ts = np.array([t0, t1])
            return GammaEvolution(ts, np.full(2, d), np.zeros(2), [], "constant", constant=True)
    if sign not in (1, -1):
        raise ConfigurationError("sign must be +1 or -1")
    direction = 1 if t1 > t0 else -1
    v0 = sign * np.sqrt(max(P0, 0.0)) * direction

    def rhs(s, y):
        return np.array([y[1], 0.5 * dP(y[0])])

    cfg = (cfg or IntegratorConfig()).replace(t0=0.0, t_max=abs(t1 - t0))
    turn = EventSpec(EventKind.TURNING_POINT, lambda s, y: y[1], name="turning_point")
    tr = integrate(rhs, np.array([x0, v0]), cfg, [turn])
    t = t0 + direction * tr.t
    fit = None
    if tr.termination == "blowup":
        s_fit = fit_blowup(tr.t, tr.y[:, 0])
        fit = BlowupFit(t0 + direction * s_fit.t0, s_fit.residual, s_fit.samples, s_fit.rate)
    turning = [t0 + direction * e.t for e in tr.events if e.kind is EventKind.TURNING_POINT]
    return GammaEvolution(t, tr.y[:, 0], direction * tr.y[:, 1], turning, tr.termination,
                          blowup=fit, dense=tr.dense, direction=direction)


def gamma_evolve(q: QuarticReduction, gamma0: float, sign: int = 1, tspan=(0.0, 10.0),
                 cfg: IntegratorConfig | None = None) -> GammaEvolution:
    """``gamma(t)`` from the quartic; see :func:`potential_evolve`.

    In the Lorentzian case ``gamma`` can escape in finite time, and the
    attached fit then estimates the escape time.
    """
    scale = float(np.sum(np.abs(q.coeffs) * np.abs(gamma0) ** np.arange(4, -1, -1)))
    dcoeffs = np.polyder(q.coeffs)
    return potential_evolve(lambda g: polyval(q.coeffs, g), lambda g: polyval(dcoeffs, g), gamma0, sign,
                            tspan, cfg, q.double_roots(), tol=1e-12 * max(scale, 1.0))


def _chi_parts(gamma, J, lam, case: QuarticCase):
    """Numerator and denominator polynomials (highest degree first) of chi'."""
    if case is QuarticCase.NIL_RIEM:
        return [-lam, 0.0, 1.5 * lam, -J], [-1.0, 0.0, 1.0]
    if case is QuarticCase.NIL_LOR:
        return [-lam, 0.0, 1.5 * lam, J], [1.0, 0.0, -1.0]
    A, C = berger_coefficients(lam)
    # -(J + A g - (C - A) g (1 - g^2))
    return [-(C - A), 0.0, (C - A) - A, -J], [-1.0, 0.0, 1.0]


def chi_rate(gamma: float, J: float, lam: float, case) -> float:
    """Rate of the angle of ``(alpha, beta)`` in the Nil and Berger reductions.

    At ``gamma^2 = 1`` the expression is 0/0 only when the numerator also
    vanishes; the removable value is then taken by l'Hopital's rule.
    Otherwise :class:`SingularParametrizationError` is raised.
    """
    case = QuarticCase(case)
    num, den = _chi_parts(gamma, J, lam, case)
    d = polyval(den, gamma)
    if abs(d) > CHI_SINGULAR_TOL:
        return polyval(num, gamma) / d
    n = polyval(num, gamma)
    if abs(n) > 1e-9 * max(1.0, abs(J), abs(lam)):
        raise SingularParametrizationError(
            f"chi' is singular at gamma = {gamma:g} (numerator {n:.3g}); switch parametrisation")
    return polyval(np.polyder(num), gamma) / polyval(np.polyder(den), gamma)


def state_from_constants(case, E: float, J: float, lam: float, gamma0: float, sign: int = 1,
                         chi0: float = 0.0, x0=None) -> CGState:
    """A unit-speed state with the given ``(E, J)`` and ``gamma = gamma0``.

    The velocity angle ``chi0`` is circular for the Riemannian cases and
    hyperbolic for Lorentzian Nil.  ``gamma'`` is ``sign * sqrt(F(gamma0))``.
    """
    case = QuarticCase(case)
    q = berger_quartic(E, J, lam) if case is QuarticCase.BERGER else nil_quartic(
        E, J, lam, -1 if case is QuarticCase.NIL_LOR else 1)
    F0 = float(q.F(gamma0))
    if F0 < -1e-12:
        raise InfeasibleError(f"F(gamma0) = {F0:.3g} < 0")
    dg = sign * np.sqrt(max(F0, 0.0))
    g2 = gamma0 * gamma0
    if abs(1 - g2) < 1e-14:
        raise SingularParametrizationError("gamma0^2 = 1 leaves (alpha, beta) undetermined")
    R = np.sqrt(abs(1 - g2))
    if case is QuarticCase.NIL_LOR:
        if g2 < 1:
            al, be = R * np.cosh(chi0), R * np.sinh(chi0)
        else:
            al, be = R * np.sinh(chi0), R * np.cosh(chi0)
        M = np.array([[be, -al], [al, -be]])
        rhs = np.array([J + 0.5 * lam * gamma0, -gamma0 * dg])
    else:
        if g2 > 1:
            raise InfeasibleError("Riemannian unit velocity needs gamma^2 <= 1")
        al, be = R * np.cos(chi0), R * np.sin(chi0)
        M = np.array([[be, -al], [al, be]])
        shift = -0.5 * lam * gamma0 if case is QuarticCase.NIL_RIEM else berger_coefficients(lam)[0] * gamma0
        rhs = np.array([J + shift, -gamma0 * dg])
    a1, a2 = np.linalg.solve(M, rhs)
    if x0 is None:
        x0 = (np.pi / 2, 0.0, 0.0) if case is QuarticCase.BERGER else (0.0, 0.0, 0.0)
    return CGState(np.asarray(x0, dtype=float), np.array([al, be, gamma0]), np.array([a1, a2, dg]))


def nil_riem_sech(lam: float, t):
    """``gamma = (sqrt3/2) sech(sqrt3 lam t / 2)``: the E = J = 0 Riemannian solution."""
    return np.sqrt(3) / 2 / np.cosh(np.sqrt(3) * lam * np.asarray(t, dtype=float) / 2)


class NilLorKind(str, enum.Enum):
    SEC = "sec"
    CONST_GAMMA = "const-gamma"
    ALPHA_EQ_BETA = "alpha-eq-beta"


def const_gamma_k(lam: float, gamma0: float) -> tuple[float, float]:
    """Both roots ``k`` of ``gamma0 k^2 - lam k / 2 - lam^2 gamma0 = 0``.

    These are the values of ``a1 / beta`` for which ``gamma = gamma0`` is
    consistent with the third acceleration equation.
    """
    if gamma0 == 0:
        return (-2.0 * lam, -2.0 * lam)
    disc = np.sqrt(lam * lam / 4 + 4 * lam * lam * gamma0 * gamma0)
    return ((lam / 2 + disc) / (2 * gamma0), (lam / 2 - disc) / (2 * gamma0))


def nil_lor_special(kind, params: dict, t) -> dict:
    """Closed-form Lorentzian Nil families evaluated at times ``t``.

    Returns arrays ``alpha, beta, gamma, a1, a2, a3`` and the constants.

    ``sec``: ``params = {lam, C1}`` (``C2 = 1/C1``).
    ``const-gamma``: ``{lam, gamma0, branch (0|1), chi0}``.
    ``alpha-eq-beta``: ``{lam, alpha0, dalpha0}`` with ``gamma = 1``.
    """
    kind = NilLorKind(kind)
    t = np.asarray(t, dtype=float)
    lam = float(params.get("lam", 1.0))
    if kind is NilLorKind.SEC:
        C1 = float(params.get("C1", 1.0))
        if C1 == 0:
            raise ConfigurationError("C1 must be nonzero")
        C2 = 1.0 / C1
        w = lam * np.sqrt(3) / 2
        om = w * t
        if np.any(np.abs(om) >= np.pi / 2):
            raise ConfigurationError("sec solution exists only for |t| < pi / (lam sqrt 3)")
        s, c = np.sin(om), np.cos(om)
        p = C1 * (1 - 2 * s) / (2 * (1 + s))
        m = C2 * (1 + 2 * s) / (2 * (1 - s))
        dp = C1 * w * c * (-3) / (2 * (1 + s) ** 2)
        dm = C2 * w * c * 3 / (2 * (1 - s) ** 2)
        al, be = 0.5 * (p + m), 0.5 * (p - m)
        dal, dbe = 0.5 * (dp + dm), 0.5 * (dp - dm)
        ga = np.sqrt(3) / 2 / c
        dga = ga * w * np.tan(om)
        return {"alpha": al, "beta": be, "gamma": ga,
                "a1": dal + lam * be * ga, "a2": dbe + lam * al * ga, "a3": dga,
                "E": 0.0, "J": 0.0, "t0": np.pi / (lam * np.sqrt(3))}
    if kind is NilLorKind.CONST_GAMMA:
        g0 = float(params["gamma0"])
        if abs(g0 * g0 - 1) < 1e-14:
            raise ConfigurationError("constant-gamma family needs gamma0^2 != 1")
        k = const_gamma_k(lam, g0)[int(params.get("branch", 0))]
        Om = k - lam * g0
        chi0 = float(params.get("chi0", 0.0))
        R = np.sqrt(abs(1 - g0 * g0))
        if g0 * g0 < 1:
            a0, b0 = R * np.cosh(chi0), R * np.sinh(chi0)
        else:
            a0, b0 = R * np.sinh(chi0), R * np.cosh(chi0)
        ch, sh = np.cosh(Om * t), np.sinh(Om * t)
        al = a0 * ch + b0 * sh
        be = b0 * ch + a0 * sh
        J = k * (g0 * g0 - 1) - 0.5 * lam * g0
        E = k * k * (g0 * g0 - 1) + lam * lam * g0 * g0
        return {"alpha": al, "beta": be, "gamma": np.full_like(t, g0),
                "a1": k * be, "a2": k * al, "a3": np.zeros_like(t),
                "E": E, "J": J, "k": k, "Omega": Om}
    # alpha = beta, gamma = 1: alpha'' + 1.5 lam alpha' - 0.5 lam^2 alpha = 0
    s1, s2 = lam * (-3 + np.sqrt(17)) / 4, lam * (-3 - np.sqrt(17)) / 4
    x0, v0 = float(params.get("alpha0", 1.0)), float(params.get("dalpha0", 0.0))
    c2 = (v0 - s1 * x0) / (s2 - s1)
    c1 = x0 - c2
    al = c1 * np.exp(s1 * t) + c2 * np.exp(s2 * t)
    dal = c1 * s1 * np.exp(s1 * t) + c2 * s2 * np.exp(s2 * t)
    acc = dal + lam * al
    return {"alpha": al, "beta": al, "gamma": np.ones_like(t), "a1": acc, "a2": acc,
            "a3": np.zeros_like(t), "roots": (s1, s2), "E": lam * lam, "J": -0.5 * lam}


@dataclass(frozen=True)
class BergerSpecial:
    k: float
    mu: float

    def gamma(self, t):
        return self.k / np.cosh(self.mu * np.asarray(t, dtype=float))


def berger_special(lam: float) -> BergerSpecial:
    """The ``E = J = 0`` solution ``gamma = k sech(mu t)``; needs ``lam^2 > 4/3``."""
    l2 = lam * lam
    if not l2 > 4.0 / 3.0:
        raise InfeasibleError("the E = J = 0 Berger solution exists only for lam^2 > 4/3")
    k = np.sqrt((0.75 * l2 - 1) / (l2 - 1))
    return BergerSpecial(float(k), float(k * np.sqrt(l2 - 1)))


def berger_reduction(lam: float, s: CGState | None = None, E: float | None = None,
                     J: float | None = None) -> QuarticReduction:
    """Berger quartic from a state or from explicit constants."""
    if s is not None:
        E, J = berger_constants(s, lam)
    if E is None or J is None:
        raise ConfigurationError("give a state or both E and J")
    return berger_quartic(E, J, lam)


def _brackets(fun, lo: float, hi: float, n: int = 2000):
    """Sign-change brackets of ``fun`` on a uniform grid, polished by Brent."""
    xs = np.linspace(lo, hi, n + 1)
    vals = np.array([fun(x) for x in xs])
    roots = []
    for i in range(n):
        v0, v1 = vals[i], vals[i + 1]
        if v0 == 0.0:
            roots.append(float(xs[i]))
        elif v0 * v1 < 0:
            roots.append(float(brentq(fun, xs[i], xs[i + 1], xtol=1e-13, rtol=4 * np.finfo(float).eps)))
    if vals[-1] == 0.0:
        roots.append(float(xs[-1]))
    return roots


@dataclass(frozen=True)
class RadialReduction:
    """Planar conformal geodesics of ``dr^2 + F^2 dphi^2 + dz^2``.

    ``F sin chi - q G = C`` with ``G = int_0^r F`` gives
    ``r'^2 = f(r) = 1 - (C + q G)^2 / F^2``.
    """

    profile: RadialProfile
    q: float
    C: float

    def G(self, r: float) -> float:
        return self.profile.integral(r)

    def f(self, r: float) -> float:
        w = self.C + self.q * self.G(r)
        return 1.0 - w * w / self.profile.F(r) ** 2

    def orbit_integrand(self, r: float) -> float:
        """``dphi/dr`` along the orbit; raises where ``f(r) < 0``."""
        F = self.profile.F(r)
        w = self.C + self.q * self.G(r)
        rad = F * F - w * w
        if rad < 0:
            raise InfeasibleError(f"orbit radicand negative at r = {r:g}")
        return w / (F * np.sqrt(rad))

    def df(self, r: float) -> float:
        F = self.profile.F(r)
        w = self.C + self.q * self.G(r)
        return 2.0 * w * (w * self.profile.dF(r) - self.q * F * F) / F**3

    def evolve(self, r0: float, sign: int = 1, tspan=(0.0, 10.0), cfg: IntegratorConfig | None = None):
        """``r(t)`` from ``r'^2 = f(r)``."""
        return potential_evolve(self.f, self.df, r0, sign, tspan, cfg)

    def classify(self) -> str:
        if self.q == 0:
            return "metric-geodesic"
        if self.C == 0:
            return "rosette-through-origin"
        return "bounded-below"

    def turning_points(self, r_lo: float, r_hi: float, n: int = 2000) -> list[float]:
        return _brackets(self.f, r_lo, r_hi, n)

    def allowed_band(self, r0: float, r_hi: float | None = None, n: int = 4000) -> tuple[float, float]:
        """The interval of ``f >= 0`` containing ``r0``."""
        if self.f(r0) < -1e-12:
            raise InfeasibleError(f"f({r0:g}) < 0")
        r_hi = r_hi if r_hi is not None else min(self.profile.r_max, 1e3)
        eps = 1e-9
        roots = self.turning_points(eps, r_hi - eps, n)
        below = [r for r in roots if r <= r0 + 1e-12]
        above = [r for r in roots if r > r0 + 1e-12]
        return (below[-1] if below else 0.0, above[0] if above else np.inf)

    @classmethod
    def from_state(cls, profile: RadialProfile, y) -> "RadialReduction":
        y = np.asarray(y, dtype=float)
        r, al, be, a1, a2 = y[0], y[3], y[4], y[6], y[7]
        q = a2 * al - a1 * be
        return cls(profile, float(q), float(profile.F(r) * be - q * profile.integral(r)))


def axisym_reduction(profile: RadialProfile, q: float, C: float) -> RadialReduction:
    return RadialReduction(profile, float(q), float(C))


def circular_orbit(profile: RadialProfile, a: float, sign: int = 1) -> RadialReduction:
    """``(q, C)`` for which ``r = a`` is a conformal geodesic."""
    F, dF = profile.F(a), profile.dF(a)
    q = sign * dF / F
    C = sign * (F * F - dF * profile.integral(a)) / F
    return RadialReduction(profile, float(q), float(C))


def circular_f2(profile: RadialProfile, a: float) -> float:
    """``f''(a) = 2 (F F'' - F'^2) / F^2`` at a circular orbit."""
    F, dF, d2F = profile.F(a), profile.dF(a), profile.d2F(a)
    return 2.0 * (F * d2F - dF * dF) / (F * F)


@dataclass(frozen=True)
class SchwarzschildRadial:
    """Radial time-like conformal geodesics: ``r'^2 = a^2 (r - r0)^2 - V^2``."""

    m: float
    a: float
    r0: float

    def V2(self, r):
        return 1.0 - 2.0 * self.m / r

    def rdot2(self, r):
        return self.a * self.a * (r - self.r0) ** 2 - self.V2(r)

    def h(self, r):
        """``V^2 - a^2 (r - r0)^2``; turning points are its zeros."""
        return -self.rdot2(r)

    def evolve(self, r_start: float, sign: int = 1, tspan=(0.0, 10.0), cfg: IntegratorConfig | None = None):
        """``r(t)`` from ``r'^2 = a^2 (r - r0)^2 - V^2``."""
        cfg = cfg or IntegratorConfig()
        dP = lambda r: 2 * self.a**2 * (r - self.r0) - 2 * self.m / r**2  # noqa: E731
        return potential_evolve(self.rdot2, dP, r_start, sign, tspan, cfg)

    def peak(self) -> float:
        """The unique maximiser of ``h`` on ``r > 0`` (``a != 0``)."""
        m, a2, r0 = self.m, self.a * self.a, self.r0
        g = lambda r: 2 * m / r**2 - 2 * a2 * (r - r0)  # noqa: E731
        hi = max(r0, 1.0) + 1.0
        while g(hi) > 0:
            hi *= 2
        lo = 1e-12
        return float(brentq(g, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps))

    def regime(self, tol: float = 1e-12) -> str:
        if self.a == 0:
            return "boundary"
        rp = self.peak()
        if rp <= 2 * self.m:
            return "none"
        hp = self.h(rp)
        if abs(hp) <= tol:
            return "tangent"
        return "two-roots" if hp > 0 else "none"

    def turning_points(self) -> list[float]:
        if self.a == 0:
            return [2.0 * self.m]
        reg = self.regime()
        rp = self.peak()
        if reg == "none":
            return []
        if reg == "tangent":
            return [rp]
        lo = 2.0 * self.m
        r_left = float(brentq(self.h, lo, rp, xtol=1e-14)) if self.h(lo) < 0 else lo
        hi = rp + 1.0
        while self.h(hi) > 0:
            hi = rp + 2 * (hi - rp)
        r_right = float(brentq(self.h, rp, hi, xtol=1e-14))
        return [r_left, r_right]


def schwarzschild_radial(m: float, a: float, r0: float) -> SchwarzschildRadial:
    if not m > 0:
        raise ConfigurationError("mass must be positive")
    return SchwarzschildRadial(float(m), float(a), float(r0))


def critical_r0(m: float, a: float) -> tuple[float, float]:
    """Tangency radius ``r_c`` and the critical ``r0`` for acceleration ``a``.

    ``r_c`` solves ``1 - 2m/r - m^2/(a^2 r^4) = 0``; there the static
    trajectory has acceleration ``V'(r_c) = a``.
    """
    if a == 0:
        raise ConfigurationError("no tangency for a = 0")
    a2 = a * a
    g = lambda r: 1 - 2 * m / r - m * m / (a2 * r**4)  # noqa: E731
    hi = 4 * m
    while g(hi) < 0:
        hi *= 2
    rc = float(brentq(g, 2 * m * (1 + 1e-15), hi, xtol=1e-15, rtol=4 * np.finfo(float).eps))
    return rc, rc - m / (a2 * rc * rc)


def radial_horizon_state(m: float, a: float, r: float, chi: float, u: float = 0.0,
                         theta: float = np.pi / 2) -> np.ndarray:
    """Horizon-system state of a radial time-like conformal geodesic.

    ``lam = e^chi / 2``, ``nu = e^-chi``, ``aL = a e^chi / 2``, ``aN = -a e^-chi``.
    """
    e = np.exp(chi)
    return np.array([u, r, theta, 0.0, 0.5 * e, 1.0 / e, 0.0, 0.0, 0.5 * a * e, -a / e, 0.0, 0.0])


def radial_chi_integral(y, m: float, a: float) -> float:
    """``e^chi + V^2 e^-chi - 2 a r``, constant along radial solutions."""
    r, lam, nu = y[1], y[4], y[5]
    return float(2 * lam + (1 - 2 * m / r) * nu - 2 * a * r)


def radial_r0(y, m: float, a: float) -> float:
    """``r0`` of :class:`SchwarzschildRadial` for a radial horizon-system state."""
    if a == 0:
        raise ConfigurationError("r0 is undefined for a = 0")
    return -radial_chi_integral(y, m, a) / (2 * a)


@dataclass(frozen=True)
class EquatorialReduction:
    """Space-like equatorial conformal geodesics of Schwarzschild.

    ``r sin chi = G + C`` with ``G' = q r / V`` and ``G(r_ref) = 0``, so
    ``r'^2 = V^2 (1 - (G + C)^2 / r^2)``.
    """

    m: float
    q: float
    C: float
    r_ref: float

    def V(self, r):
        return np.sqrt(1 - 2 * self.m / r)

    def G(self, r: float) -> float:
        if self.q == 0:
            return 0.0
        # s = 2m + v^2 removes the inverse square root at the horizon
        two_m = 2 * self.m
        v0, v1 = np.sqrt(self.r_ref - two_m), np.sqrt(max(r - two_m, 0.0))
        val, _ = quad(lambda v: 2 * (two_m + v * v) ** 1.5, v0, v1, epsabs=1e-13, epsrel=1e-13, limit=200)
        return float(self.q * val)

    def rdot2(self, r: float) -> float:
        w = self.G(r) + self.C
        return (1 - 2 * self.m / r) * (1 - w * w / (r * r))

    def turning_points(self, r_lo: float, r_hi: float, n: int = 2000) -> list[float]:
        return _brackets(self.rdot2, max(r_lo, 2 * self.m * (1 + 1e-9)), r_hi, n)

    @classmethod
    def from_state(cls, y, m: float) -> "EquatorialReduction":
        y = np.asarray(y, dtype=float)
        r, be, de, a1, a3 = y[1], y[5], y[7], y[9], y[11]
        q = a3 * be - a1 * de
        return cls(float(m), float(q), float(r * de), float(r))


def schwarzschild_equatorial(m: float, q: float, C: float, r_ref: float) -> EquatorialReduction:
    if not r_ref > 2 * m:
        raise ConfigurationError("reference radius must lie outside r = 2m")
    return EquatorialReduction(float(m), float(q), float(C), float(r_ref))


def equatorial_state(m: float, r: float, chi: float, q: float, t: float = 0.0, phi: float = 0.0) -> np.ndarray:
    """Exterior state in the equatorial plane with ``beta = cos chi``, ``delta = sin chi``."""
    if not r > 2 * m:
        raise ConfigurationError("r must exceed 2m")
    c, s = np.cos(chi), np.sin(chi)
    return np.array([t, r, np.pi / 2, phi, 0.0, c, 0.0, s, 0.0, -q * s, 0.0, q * c])
