import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from combfol.cutoffs import PROFILE
from combfol.foliation import (PointBelowFoliation, RegionTag, T_flat, T_of, build_chart, classify,
                               cone_radius, dT_ds, dT_dx, flat_radius, lambda_gap, normal_and_volume,
                               s_of)
from combfol.verify.geometry import jacobian_envelope


def _T_by_quad(s, x):
    """Independent route: integrate the slope from the axis with adaptive quadrature."""
    r = abs(x)
    a = cone_radius(s)
    head = math.sqrt(s * s + min(r, a) ** 2)
    if r <= a:
        return head

    def slope(y):
        return PROFILE.xi_value(s, y) * y / math.sqrt(s * s + y * y)

    tail, _ = quad(slope, a, min(r, a + 1.0), epsabs=1e-13, epsrel=1e-13, limit=200)
    return head + tail


def test_T_examples():
    assert T_of(2.0, 0.0) == 2.0
    for s in (2.0, 3.0, 5.0):
        assert T_of(s, cone_radius(s)) == pytest.approx(0.5 * (s * s + 1.0), abs=1e-12)
    t23 = T_of(2.0, 3.0)
    assert 2.5 <= t23 <= math.sqrt(41.0) / 2.0
    assert t23 == pytest.approx(_T_by_quad(2.0, 3.0), abs=1e-10)


@settings(max_examples=60, deadline=None)
@given(st.floats(2.0, 12.0), st.floats(0.0, 1.2))
def test_T_matches_quadrature_on_band(s, frac):
    x = cone_radius(s) + frac
    assert T_of(s, x) == pytest.approx(_T_by_quad(s, x), abs=1e-10)


def test_T_is_even_and_flat_outside_band():
    s = 3.0
    x = np.linspace(0.0, 30.0, 301)
    assert np.array_equal(T_of(s, x), T_of(s, -x))
    far = x[x >= flat_radius(s)]
    assert np.all(T_of(s, far) == T_flat(s))


def test_flat_height_bounds():
    for s in (2.0, 3.0, 5.0, 10.0):
        assert flat_radius(s) <= T_flat(s) <= 0.5 * math.sqrt(s**4 + 6 * s**2 + 1)


def test_dT_dx_examples():
    assert dT_dx(2.0, 0.0) == 0.0
    assert dT_dx(2.0, 1.0) == pytest.approx(1.0 / math.sqrt(5.0), rel=1e-15)
    assert dT_dx(2.0, 3.0) == 0.0


@pytest.mark.parametrize("s", [2.0, 3.0, 5.0, 10.0, 20.0])
def test_slices_are_spacelike(s):
    x = np.linspace(-3 * s * s, 3 * s * s, 20_001)
    assert np.max(np.abs(dT_dx(s, x))) < 1.0
    assert np.array_equal(dT_dx(s, -x), -dT_dx(s, x))


def test_dT_ds_examples():
    for s in (2.0, 4.0, 7.5):
        assert dT_ds(s, 0.0) == 1.0
    assert dT_ds(2.0, 1.0) == pytest.approx(2.0 / math.sqrt(5.0), rel=1e-15)
    j = dT_ds(2.0, 2.7)
    lo, hi = jacobian_envelope(2.0, 2.7)
    assert lo <= j <= hi
    h = 1e-5
    fd = (-3 * T_of(2.0, 2.7) + 4 * T_of(2.0 + h, 2.7) - T_of(2.0 + 2 * h, 2.7)) / (2 * h)
    assert fd == pytest.approx(j, rel=1e-7)


@settings(max_examples=60, deadline=None)
@given(st.floats(2.5, 15.0), st.floats(-1.0, 1.0))
def test_dT_ds_matches_differences(s, frac):
    x = frac * (flat_radius(s) + 2.0)
    h = 1e-5
    fd = (T_of(s + h, x) - T_of(s - h, x)) / (2 * h)
    assert fd == pytest.approx(dT_ds(s, x), rel=1e-7)
    assert dT_ds(s, x) > 0.0


@pytest.mark.parametrize("s", [2.0, 3.0, 5.0])
def test_C1_gluing_at_band_edges(s):
    def one_sided(x0, h, side):
        f = lambda y: T_of(s, y)
        return side * (-3 * f(x0) + 4 * f(x0 + side * h) - f(x0 + 2 * side * h)) / (2 * h)

    for edge in (cone_radius(s), flat_radius(s)):
        gaps = [abs(one_sided(edge, h, -1) - one_sided(edge, h, 1)) for h in (2e-3, 1e-3)]
        assert gaps[1] < 1e-5
        assert abs(one_sided(edge, 1e-3, 1) - dT_dx(s, edge)) < 1e-5


@settings(max_examples=80, deadline=None)
@given(st.floats(2.0, 20.0), st.floats(-1.0, 1.0))
def test_inverse_consistency(s, frac):
    x = 3.0 * s * s * frac
    assert abs(s_of(T_of(s, x), x) - s) <= 1e-8


@settings(max_examples=60, deadline=None)
@given(st.floats(2.0, 20.0), st.floats(0.01, 3.0), st.floats(-60.0, 60.0))
def test_monotone_in_s(s1, ds, x):
    assert T_of(s1 + ds, x) > T_of(s1, x)


def test_s_of_examples():
    assert s_of(5.0, 3.0) == pytest.approx(4.0, abs=1e-14)
    assert s_of(T_of(2.0, 2.2), 2.2) == pytest.approx(2.0, abs=1e-10)
    assert s_of(T_of(3.0, 10.0), 10.0) == pytest.approx(3.0, abs=1e-10)


def test_s_of_rejects_points_below_first_slice():
    with pytest.raises(PointBelowFoliation):
        s_of(1.0, 0.0)
    with pytest.raises(PointBelowFoliation):
        s_of(2.0, 40.0)


def test_time_derivative_of_s_inverts_jacobian():
    for s, x in ((2.5, 4.0), (3.0, 4.4), (4.0, 30.0), (3.0, 1.0)):
        t = T_of(s, x)
        h = 1e-6
        ds_dt = (s_of(t + h, x) - s_of(t - h, x)) / (2 * h)
        assert ds_dt * dT_ds(s, x) == pytest.approx(1.0, rel=1e-6)


def test_classify_examples():
    assert classify(5.0, 3.0) is RegionTag.HYPERBOLIC
    assert classify(T_of(2.0, 2.2), 2.2) is RegionTag.TRANSITION
    assert classify(T_of(2.0, 4.0), 4.0) is RegionTag.FLAT
    assert classify(T_of(3.0, 4.0), -4.0) is RegionTag.CONE_BOUNDARY


def test_normal_and_volume_examples():
    n, vol = normal_and_volume(2.0, 0.0)
    assert np.allclose(n, (1.0, 0.0)) and vol == 1.0
    n, vol = normal_and_volume(2.0, 1.0)
    expected = math.sqrt(5.0) / math.sqrt(6.0) * np.array([1.0, -1.0 / math.sqrt(5.0)])
    assert np.allclose(n, expected, atol=1e-15)
    assert vol == pytest.approx(math.sqrt(6.0) / math.sqrt(5.0), rel=1e-15)
    n, vol = normal_and_volume(2.0, 4.0)
    assert np.allclose(n, (1.0, 0.0)) and vol == 1.0


def test_normal_is_unit_and_orthogonal_to_tangent():
    s = 3.0
    x = np.linspace(-10.0, 10.0, 401)
    n, vol = normal_and_volume(s, x)
    n = np.asarray(n)
    assert n.shape == (x.size, 2)
    n = n.T
    assert np.allclose(np.hypot(n[0], n[1]), 1.0, atol=1e-14)
    slope = dT_dx(s, x)
    # tangent (dT/dx, 1) in (t, x) components
    assert np.allclose(n[0] * slope + n[1], 0.0, atol=1e-14)
    assert np.allclose(vol, np.sqrt(1.0 + slope**2), rtol=1e-14)


def test_lambda_gap_examples():
    for s in (2.0, 5.0):
        assert lambda_gap(s, cone_radius(s)) == pytest.approx(1.0, abs=1e-12)
    assert lambda_gap(2.0, 0.0) == 2.0
    # T >= (s^2 + 1)/2 on the band, so the gap at the outer edge is nonnegative;
    # the sign reading is recorded in the decisions ledger
    gap = lambda_gap(2.0, 2.5)
    assert 0.0 < gap < 1.0
    assert gap == pytest.approx(_T_by_quad(2.0, 2.5) - 2.5, abs=1e-10)


def test_lambda_gap_strictly_decreasing():
    s = 3.0
    r = np.linspace(0.0, flat_radius(s) + 3.0, 2001)
    assert np.all(np.diff(lambda_gap(s, r)) < 0.0)


def test_build_chart_regions_and_symmetry(tmp_path):
    grid = np.round(np.arange(-500, 501) * 0.01, 12)
    chart = build_chart(2.0, grid)
    inside = (np.abs(grid) > 1.5) & (np.abs(grid) < 2.5)
    assert np.array_equal(chart.mask(RegionTag.TRANSITION), inside)
    assert np.max(np.abs(chart.T - chart.T[::-1])) <= 1e-14
    lo, hi = jacobian_envelope(2.0, grid)
    assert np.all((chart.dTds >= lo - 1e-12) & (chart.dTds <= hi + 1e-12))
    path = tmp_path / "chart.csv"
    chart.to_csv(path)
    header = path.read_text().splitlines()[0]
    assert header == "x,T,dTdx,dTds,region,n_t,n_x,vol"


def test_build_chart_rejects_bad_grids():
    with pytest.raises(ValueError):
        build_chart(2.0, np.array([0.0, 1.0, 0.5]))
    with pytest.raises(ValueError):
        build_chart(2.0, np.linspace(-1.0, 2.0, 11))
    with pytest.raises(ValueError):
        build_chart(1.5, np.linspace(-1.0, 1.0, 11))
