import numpy as np
import pytest

from confgeo.analysis import (
    SpiralVerdict,
    VerdictKind,
    classify_orbit,
    curve_hausdorff,
    hausdorff,
    killing_state,
    killing_trajectory_test,
    spiral_check,
    stability_scan,
    stability_threshold,
    totally_cg_test,
)
from confgeo.catalog import get_entry
from confgeo.core import (
    CGState,
    ConfigurationError,
    DomainError,
    InsufficientDataError,
    LORENTZ_SPACELIKE,
    RIEMANNIAN,
    Trajectory,
)
from confgeo.integrator import IntegratorConfig, integrate
from confgeo.quadratures import RadialReduction, nil_lor_special, nil_quartic, state_from_constants


def _run(e, y0, t_max, sig=None, max_step=np.inf):
    cfg = IntegratorConfig(t_max=t_max, max_step=max_step)
    return integrate(e.rhs(sig or e.signature), y0, cfg, dim=e.dim, ncoord=e.ncoord)


def test_flat_circle_closed_with_period():
    e = get_entry("e3")
    s = CGState(np.zeros(3), [1.0, 0.0, 0.0], [0.0, 2.0, 0.0])
    v = classify_orbit(_run(e, s.to_vector(), 10 * np.pi), e)
    assert v.kind is VerdictKind.CLOSED
    assert v.evidence["period"] == pytest.approx(np.pi, rel=1e-8)


def test_nil_generic_is_rosette_within_quartic_band():
    e = get_entry("nil-r")
    s = state_from_constants("nil-r", 0.3, 0.1, 1.0, 0.2, 1, chi0=0.4)
    v = classify_orbit(_run(e, s.to_vector(), 40.0), e)
    assert v.kind is VerdictKind.ROSETTE_ANNULUS
    lo, hi = nil_quartic(0.3, 0.1, 1.0, 1).interval_containing(0.2)
    assert v.evidence["lower"] == pytest.approx(lo, abs=1e-8)
    assert v.evidence["upper"] == pytest.approx(hi, abs=1e-8)


def test_sech_asymptotic():
    e = get_entry("nil-r")
    s = state_from_constants("nil-r", 0.0, 0.0, 1.0, np.sqrt(3) / 2, -1)
    v = classify_orbit(_run(e, s.to_vector(), 14.0), e)
    assert v.kind is VerdictKind.ASYMPTOTIC


def test_constant_family():
    # gamma = 0 with E = J = 0 is a metric geodesic with constant gamma
    e = get_entry("nil-r")
    s = CGState(np.zeros(3), [1.0, 0.0, 0.0], [0.0, 0.0, 0.0])
    v = classify_orbit(_run(e, s.to_vector(), 5.0, max_step=0.1), e)
    assert v.kind is VerdictKind.CONSTANT


def test_blowup_verdict_and_spiral():
    e = get_entry("nil-l")
    d = nil_lor_special("sec", {"lam": 1.0}, 0.0)
    y0 = np.array([0.0, 0.0, 0.0] + [float(d[k]) for k in ("alpha", "beta", "gamma", "a1", "a2", "a3")])
    tr = _run(e, y0, 5.0, LORENTZ_SPACELIKE)
    v = classify_orbit(tr, e)
    assert v.kind is VerdictKind.BLOWUP
    assert v.evidence["t0"] == pytest.approx(np.pi / np.sqrt(3), abs=1e-3)
    sp = spiral_check(tr, LORENTZ_SPACELIKE)
    assert sp.verdict is SpiralVerdict.NO_SPIRAL
    assert not sp.acceleration_bounded


def test_insufficient_data():
    e = get_entry("nil-r")
    tr = Trajectory(np.linspace(0, 1, 4), np.tile(np.array([0, 0, 0, 0.6, 0, 0.8, 0, 0.1, 0.0]), (4, 1)) +
                    np.linspace(0, 1, 4)[:, None] * np.eye(9)[5], dim=3, ncoord=3)
    with pytest.raises(InsufficientDataError):
        classify_orbit(tr, e)


def test_synthetic_shrinking_spiral_is_flagged():
    # a planar spiral into the origin with divergent curvature
    t = np.linspace(0, 1 - 1e-4, 4000)
    r = 1 - t
    th = -np.log(r) * 20
    x = np.stack([r * np.cos(th), r * np.sin(th), 0 * t], axis=1)
    a = np.stack([1 / r**2, 0 * t, 0 * t], axis=1)
    y = np.hstack([x, np.tile([1.0, 0.0, 0.0], (len(t), 1)), a])
    tr = Trajectory(t, y, dim=3, ncoord=3)
    sp = spiral_check(tr, RIEMANNIAN)
    assert sp.shrinking_neighbourhood_detected
    assert sp.verdict is SpiralVerdict.INCONCLUSIVE


def test_killing_iff_hypersurface_orthogonal_on_nil():
    e = get_entry("nil-r")
    assert killing_trajectory_test(e, "z", np.zeros(3)).passed
    assert killing_trajectory_test(e, "y", np.zeros(3)).passed
    assert not killing_trajectory_test(e, lambda x: np.array([0.0, 1.0, 1.0]), np.zeros(3)).passed


def test_killing_state_degenerate():
    e = get_entry("m3")
    with pytest.raises(DomainError):
        killing_state(e, lambda x: np.array([1.0, 1.0, 0.0]), np.zeros(3))


def test_killing_state_accepts_field_names():
    e = get_entry("nil-r")
    by_name = killing_state(e, "z", np.zeros(3))
    by_field = killing_state(e, e.killing_fields["z"], np.zeros(3))
    np.testing.assert_array_equal(by_name[0].u, by_field[0].u)
    with pytest.raises(ConfigurationError):
        killing_state(e, "w", np.zeros(3))


def test_totally_cg_even_vs_odd():
    assert totally_cg_test(get_entry("axisym", profile="even")).passed
    rep = totally_cg_test(get_entry("axisym", profile="odd", require_even=False))
    assert not rep.passed
    assert rep.second_fundamental_max > 1e-3
    with pytest.raises(ConfigurationError):
        totally_cg_test(get_entry("nil-r"))


def test_stability_scan_flat_and_bump():
    rows = stability_scan(get_entry("axisym", profile="flat"), [0.5, 1.0, 2.0])
    assert [r.flag for r in rows] == ["stable"] * 3
    assert rows[0].f2 == pytest.approx(-8.0, rel=1e-12)
    thr = stability_threshold(get_entry("axisym", profile="bump", kappa=1.0), np.linspace(0.05, 5, 100))
    assert 1.5 < thr < 2.0


def test_axisym_rosette_band():
    e = get_entry("axisym", profile="bump", kappa=0.5)
    chi, q = 0.3, 0.4
    y0 = np.array([1.0, 0, 0, np.cos(chi), np.sin(chi), 0, -q * np.sin(chi), q * np.cos(chi), 0])
    v = classify_orbit(_run(e, y0, 60.0), e)
    lo, hi = RadialReduction.from_state(e.extras["radial"], y0).allowed_band(1.0, 10)
    assert v.kind is VerdictKind.ROSETTE_ANNULUS
    assert v.evidence["lower"] == pytest.approx(lo, abs=1e-7)
    assert v.evidence["upper"] == pytest.approx(hi, abs=1e-7)


def test_hausdorff_distances():
    A = np.array([[0.0, 0.0], [1.0, 0.0]])
    B = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert hausdorff(A, B) == 1.0
    d = curve_hausdorff(lambda t: np.array([t, 0.0]), (0, 1), lambda t: np.array([t**2, 1e-3]), (0, 1), samples=50)
    assert d == pytest.approx(1e-3, abs=1e-9)
