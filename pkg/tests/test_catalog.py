import numpy as np
import pytest

from confgeo.catalog import (
    ENTRY_IDS,
    bump_profile,
    check_axis_regular,
    exterior_to_horizon,
    get_entry,
    horizon_to_exterior,
    nil_entry,
)
from confgeo.core import ConfigurationError, DomainError
from oracles import frame_brackets, koszul_connection, ricci_fd

POINTS = {
    "e3": [0.1, 0.2, 0.3],
    "m3": [0.1, 0.2, 0.3],
    "s3": [0.3, -0.2, 0.4],
    "h3": [0.3, -0.2, 0.4],
    "nil-r": [0.7, -0.3, 0.2],
    "nil-l": [0.7, -0.3, 0.2],
    "berger": [1.1, 0.4, -0.6],
    "schw-ext": [0.0, 7.0, 1.1, 0.3],
    "axisym": [1.3, 0.4, 0.2],
}

METRIC_IDS = [e for e in ENTRY_IDS if e != "schw-hor"]


@pytest.mark.parametrize("eid", METRIC_IDS)
def test_connection_matches_koszul_oracle(eid):
    m = get_entry(eid).metric
    x = np.array(POINTS[eid])
    c = frame_brackets(m, x)
    np.testing.assert_allclose(m.gamma(x), koszul_connection(c, m.eta), atol=2e-8)


@pytest.mark.parametrize("eid", METRIC_IDS)
def test_ricci_matches_finite_differences(eid):
    m = get_entry(eid).metric
    x = np.array(POINTS[eid])
    np.testing.assert_allclose(m.ricci(x), ricci_fd(m, x), atol=1e-6)


@pytest.mark.parametrize("eid", METRIC_IDS)
def test_connection_is_metric(eid):
    m = get_entry(eid).metric
    G = m.gamma(np.array(POINTS[eid]))
    eta = m.eta_array
    low = eta[:, None, None] * G
    np.testing.assert_allclose(low, -np.transpose(low, (1, 0, 2)), atol=1e-14)


@pytest.mark.parametrize("lam", [0.5, 1.0, 2.0])
def test_nil_scalar_curvature(lam):
    for eps in (1, -1):
        m = nil_entry(eps, lam).metric
        assert m.scalar_curvature(np.array([0.3, 0.1, 0.0])) == pytest.approx(-eps * lam**2 / 2, abs=1e-12)


def test_schwarzschild_is_ricci_flat():
    m = get_entry("schw-ext", m=1.5).metric
    for r in (3.5, 10.0, 40.0):
        assert np.max(np.abs(m.ricci(np.array([0.0, r, 0.8, 0.0])))) < 1e-12


def test_schwarzschild_chart_limits():
    e = get_entry("schw-ext", m=1.0)
    with pytest.raises(DomainError):
        e.metric.chart.validate(np.array([0.0, 1.5, 1.0, 0.0]))
    with pytest.raises(DomainError) as err:
        e.metric.chart.validate(np.array([0.0, 2.0 + 1e-9, 1.0, 0.0]))
    assert err.value.kind == "frame_singularity"
    with pytest.raises(DomainError):
        e.metric.chart.validate(np.array([0.0, 5.0, 0.0, 0.0]))


def test_horizon_chart_round_trip():
    m = 1.0
    b = 0.3
    u = [np.cosh(b), 0.6 * np.sinh(b), 0.0, 0.8 * np.sinh(b)]
    for r in (2.5, 4.0, 12.0):
        y = np.array([1.3, r, 0.9, 0.2, *u, 0.0, 0.0, 0.05, 0.0])
        back = horizon_to_exterior(exterior_to_horizon(y, m), m)
        np.testing.assert_allclose(back, y, rtol=1e-12, atol=1e-12)


def test_unknown_entry_and_parameters():
    with pytest.raises(ConfigurationError):
        get_entry("kerr")
    with pytest.raises(ConfigurationError):
        get_entry("axisym", profile="nonsense")


def test_bump_profile_regular_and_asymptotically_flat():
    p = bump_profile(1.0)
    assert check_axis_regular(p.as_2d())
    assert p.F(30.0) / 30.0 == pytest.approx(1.0, abs=1e-12)
    h = 1e-6
    r = 1.3
    assert (p.G(r + h) - p.G(r - h)) / (2 * h) == pytest.approx(p.F(r), rel=1e-8)


def test_odd_profile_rejected_when_even_required():
    with pytest.raises(ConfigurationError):
        get_entry("axisym", profile="odd")
    assert get_entry("axisym", profile="odd", require_even=False).id == "axisym"
