import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from confgeo.catalog import bump_profile, flat_profile, get_entry
from confgeo.core import (
    InfeasibleError,
    LORENTZ_SPACELIKE,
    LORENTZ_TIMELIKE,
    RIEMANNIAN,
    SingularParametrizationError,
)
from confgeo.integrator import IntegratorConfig, integrate
from confgeo.quadratures import (
    EquatorialReduction,
    RadialReduction,
    berger_constants,
    berger_quartic,
    berger_special,
    chi_rate,
    circular_f2,
    circular_orbit,
    const_gamma_k,
    critical_r0,
    equatorial_state,
    gamma_evolve,
    nil_constants,
    nil_lor_special,
    nil_quartic,
    nil_riem_sech,
    radial_chi_integral,
    radial_horizon_state,
    radial_r0,
    schwarzschild_radial,
    state_from_constants,
)

unit = st.floats(-0.95, 0.95)
ang = st.floats(0, 2 * np.pi)
mag = st.floats(-1.5, 1.5)
lam_s = st.floats(0.3, 2.5)


def _random_state(g, chi, amag, psi):
    """Unit u with u3 = g and an acceleration orthogonal to it."""
    R = np.sqrt(1 - g * g)
    u = np.array([R * np.cos(chi), R * np.sin(chi), g])
    e1 = np.cross(u, [0.3, -0.7, 0.2])
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(u, e1)
    return u, amag * (np.cos(psi) * e1 + np.sin(psi) * e2)


@given(g=unit, chi=ang, amag=mag, psi=ang, lam=lam_s)
def test_nil_quartic_matches_generic_dynamics(g, chi, amag, psi, lam):
    e = get_entry("nil-r", lam=lam)
    u, a = _random_state(g, chi, amag, psi)
    y = np.concatenate([np.zeros(3), u, a])
    from confgeo.core import CGState
    E, J = nil_constants(CGState(y[:3], u, a), lam, 1)
    q = nil_quartic(E, J, lam, 1)
    gdot = e.rhs(specialized=False)(0.0, y)[5]
    assert q.F(g) == pytest.approx(gdot**2, abs=1e-11 * max(1, E * E))


@given(g=unit, chi=ang, amag=mag, psi=ang, lam=lam_s)
def test_berger_quartic_matches_generic_dynamics(g, chi, amag, psi, lam):
    from confgeo.core import CGState
    e = get_entry("berger", lam=lam)
    u, a = _random_state(g, chi, amag, psi)
    y = np.concatenate([[np.pi / 2, 0.0, 0.0], u, a])
    E, J = berger_constants(CGState(y[:3], u, a), lam)
    gdot = e.rhs(specialized=False)(0.0, y)[5]
    assert berger_quartic(E, J, lam).F(g) == pytest.approx(gdot**2, abs=1e-11 * max(1, E * E))


@given(g=st.floats(-3, 3), chi=st.floats(-1.5, 1.5), a3=mag, a1=mag, lam=lam_s)
def test_nil_lorentzian_quartic(g, chi, a3, a1, lam):
    from confgeo.core import CGState
    if abs(g * g - 1) < 1e-2:
        return
    R = np.sqrt(abs(1 - g * g))
    al, be = (R * np.cosh(chi), R * np.sinh(chi)) if g * g < 1 else (R * np.sinh(chi), R * np.cosh(chi))
    u = np.array([al, be, g])
    # a2 fixed by orthogonality: -al a1 + be a2 + g a3 = 0 (eta = (1, -1, 1) on u = (alpha, beta, gamma))
    eta = get_entry("nil-l").eta
    if abs(eta[1] * be) < 1e-3:
        return
    a2 = -(eta[0] * al * a1 + eta[2] * g * a3) / (eta[1] * be)
    a = np.array([a1, a2, a3])
    y = np.concatenate([np.zeros(3), u, a])
    E, J = nil_constants(CGState(y[:3], u, a), lam, -1)
    gdot = get_entry("nil-l", lam=lam).rhs(LORENTZ_SPACELIKE, specialized=False)(0.0, y)[5]
    assert nil_quartic(E, J, lam, -1).F(g) == pytest.approx(gdot**2, rel=1e-9, abs=1e-9)


def test_sech_quartic_roots():
    q = nil_quartic(0.0, 0.0, 1.0, 1)
    vals = [(round(r.value, 12), r.multiplicity) for r in q.roots]
    assert vals == [(round(-np.sqrt(3) / 2, 12), 1), (0.0, 2), (round(np.sqrt(3) / 2, 12), 1)]


def test_berger_unit_lambda_is_quadratic():
    assert berger_quartic(0.2, 0.1, 1.0).coeffs[0] == 0.0


def test_gamma_evolve_sech_both_directions():
    lam = 1.3
    q = nil_quartic(0.0, 0.0, lam, 1)
    fwd = gamma_evolve(q, np.sqrt(3) / 2, -1, (0.0, 8.0))
    t = np.linspace(0, 8, 40)
    np.testing.assert_allclose(fwd.at(t), nil_riem_sech(lam, t), atol=1e-9)
    back = gamma_evolve(q, np.sqrt(3) / 2, 1, (0.0, -8.0))
    np.testing.assert_allclose(back.at(-t), nil_riem_sech(lam, -t), atol=1e-9)


def test_gamma_evolve_constant_at_double_root():
    q = nil_quartic(0.0, 0.0, 1.0, 1)
    ev = gamma_evolve(q, 0.0, 1, (0.0, 5.0))
    assert ev.constant and ev.at(3.0) == 0.0


def test_sec_blowup_fit():
    lam = 1.0
    q = nil_quartic(0.0, 0.0, lam, -1)
    ev = gamma_evolve(q, np.sqrt(3) / 2, 1, (0.0, 5.0))
    assert ev.termination == "blowup"
    assert ev.blowup.t0 == pytest.approx(np.pi / (lam * np.sqrt(3)), abs=1e-6)


@pytest.mark.parametrize("kind,params", [
    ("sec", {"lam": 1.0, "C1": 1.3}),
    ("const-gamma", {"lam": 1.0, "gamma0": 0.5, "branch": 0, "chi0": 0.2}),
    ("alpha-eq-beta", {"lam": 1.0, "alpha0": 0.7, "dalpha0": 0.3}),
])
def test_nil_lorentzian_families_solve_the_system(kind, params):
    t = np.linspace(0.0, 1.5, 7)
    d = nil_lor_special(kind, params, t)
    keys = ("alpha", "beta", "gamma", "a1", "a2", "a3")
    y0 = np.array([0.0, 0.0, 0.0] + [float(d[k][0]) for k in keys])
    e = get_entry("nil-l", lam=params["lam"])
    tr = integrate(e.rhs(LORENTZ_SPACELIKE), y0, IntegratorConfig(t_max=1.5))
    got = np.array([tr.at(tt)[3:] for tt in t])
    np.testing.assert_allclose(got, np.array([d[k] for k in keys]).T, atol=1e-8)
    from confgeo.core import CGState
    E, J = nil_constants(CGState(y0[:3], y0[3:6], y0[6:]), params["lam"], -1)
    assert (E, J) == (pytest.approx(d["E"], abs=1e-12), pytest.approx(d["J"], abs=1e-12))


def test_const_gamma_roots_satisfy_quadratic():
    lam, g0 = 1.3, 0.4
    for k in const_gamma_k(lam, g0):
        assert g0 * k * k - lam * k / 2 - lam * lam * g0 == pytest.approx(0.0, abs=1e-12)


def test_berger_special_values():
    bs = berger_special(2.0)
    assert bs.k**2 == pytest.approx(2.0 / 3.0, rel=1e-14)
    assert bs.mu == pytest.approx(np.sqrt(2.0), rel=1e-14)
    with pytest.raises(InfeasibleError):
        berger_special(1.1)


@given(g=unit, chi=ang, amag=mag, psi=ang, lam=lam_s)
def test_chi_rate_matches_dynamics(g, chi, amag, psi, lam):
    from confgeo.core import CGState
    u, a = _random_state(g, chi, amag, psi)
    y = np.concatenate([np.zeros(3), u, a])
    d = get_entry("nil-r", lam=lam).rhs()(0.0, y)
    rate = (u[0] * d[4] - u[1] * d[3]) / (u[0] ** 2 + u[1] ** 2)
    _, J = nil_constants(CGState(y[:3], u, a), lam, 1)
    assert chi_rate(g, J, lam, "nil-r") == pytest.approx(rate, rel=1e-9, abs=1e-9)


def test_chi_rate_removable_and_singular():
    lam = 1.0
    # at gamma = 1 the numerator vanishes when J = lam / 2
    near = chi_rate(1 - 1e-7, 0.5, lam, "nil-r")
    assert chi_rate(1.0, 0.5, lam, "nil-r") == pytest.approx(near, abs=1e-5)
    with pytest.raises(SingularParametrizationError):
        chi_rate(1.0, 0.2, lam, "nil-r")


def test_state_from_constants_round_trip():
    s = state_from_constants("nil-r", 0.3, 0.1, 1.2, 0.2, 1, chi0=0.4)
    E, J = nil_constants(s, 1.2, 1)
    assert (E, J) == (pytest.approx(0.3, abs=1e-13), pytest.approx(0.1, abs=1e-13))
    with pytest.raises(InfeasibleError):
        state_from_constants("nil-r", 0.0, 0.0, 1.0, 0.95)


def test_circular_orbit_is_double_root():
    p = bump_profile(1.0)
    for a in (0.5, 1.2, 2.5):
        red = circular_orbit(p, a)
        assert red.f(a) == pytest.approx(0.0, abs=1e-13)
        assert red.df(a) == pytest.approx(0.0, abs=1e-12)
        h = 1e-4
        fd = (red.f(a + h) - 2 * red.f(a) + red.f(a - h)) / h**2
        assert circular_f2(p, a) == pytest.approx(fd, abs=1e-5)


def test_flat_circles_all_stable():
    p = flat_profile()
    for a in (0.3, 1.0, 4.0):
        assert circular_f2(p, a) == pytest.approx(-2.0 / a**2, rel=1e-12)


def test_radial_reduction_df_matches_difference():
    red = RadialReduction(bump_profile(0.5), 0.4, 0.3)
    h = 1e-6
    for r in (0.7, 1.3, 2.2):
        assert red.df(r) == pytest.approx((red.f(r + h) - red.f(r - h)) / (2 * h), abs=1e-7)


def test_schwarzschild_turning_points_match_cubic():
    m, a, r0 = 1.0, 0.5, 10.0
    sr = schwarzschild_radial(m, a, r0)
    # r * rdot2 = a^2 r (r - r0)^2 - r + 2m
    cubic = [a * a, -2 * a * a * r0, a * a * r0 * r0 - 1.0, 2 * m]
    ref = sorted(r.real for r in np.roots(cubic) if abs(r.imag) < 1e-12 and r.real > 2 * m)
    np.testing.assert_allclose(sr.turning_points(), ref, rtol=1e-12)
    assert sr.turning_points() == [pytest.approx(8.2589, abs=1e-4), pytest.approx(11.8230, abs=1e-4)]


def test_critical_tangency():
    m, a = 1.0, 0.3
    rc, r0c = critical_r0(m, a)
    sr = schwarzschild_radial(m, a, r0c)
    assert sr.regime() == "tangent"
    assert sr.h(rc) == pytest.approx(0.0, abs=1e-12)
    # the static observer at r_c has acceleration m / (r^2 V) = a
    assert m / (rc**2 * np.sqrt(1 - 2 * m / rc)) == pytest.approx(a, rel=1e-12)


def test_radial_chi_integral_conserved():
    m, a = 1.0, 0.3
    y0 = radial_horizon_state(m, a, 3.0, 0.2)
    e = get_entry("schw-hor", m=m)
    tr = integrate(e.rhs(LORENTZ_TIMELIKE), y0, IntegratorConfig(t_max=10.0))
    vals = [radial_chi_integral(y, m, a) for y in tr.y]
    assert np.ptp(vals) < 1e-8
    sr = schwarzschild_radial(m, a, radial_r0(y0, m, a))
    for y in tr.y[:: max(1, len(tr) // 40)]:
        rdot = y[4] - 0.5 * y[5] * (1 - 2 * m / y[1])
        assert rdot**2 == pytest.approx(sr.rdot2(y[1]), abs=1e-8)


def test_equatorial_reduction_along_integration():
    m = 1.0
    y0 = equatorial_state(m, 6.0, 0.7, 0.05)
    tr = integrate(get_entry("schw-ext", m=m).rhs(LORENTZ_SPACELIKE), y0, IntegratorConfig(t_max=10.0))
    red = EquatorialReduction.from_state(y0, m)
    for y in tr.y[:: max(1, len(tr) // 30)]:
        assert (y[5] * np.sqrt(1 - 2 * m / y[1])) ** 2 == pytest.approx(red.rdot2(y[1]), abs=1e-9)
