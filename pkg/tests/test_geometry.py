import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chartfree.geometry import (
    Chart,
    ChartError,
    embed_sphere,
    geo_stereo_map,
    metric_at,
    metric_diag,
    warp_derivative,
    warp_forward,
    warp_inverse,
)

LAM = 100.0


def test_warp_forward_values():
    assert warp_forward(0.0, LAM) == 0.0
    assert warp_forward(100.0, LAM) == pytest.approx(100.0, rel=1e-15)
    assert warp_forward(50.0, LAM) == pytest.approx(31.25, rel=1e-15)


def test_warp_forward_odd():
    y = np.linspace(0.0, 150.0, 301)
    assert np.allclose(warp_forward(-y, LAM), -warp_forward(y, LAM), rtol=0, atol=0)


def test_warp_forward_strictly_increasing():
    y = np.linspace(-LAM, LAM, 1000)
    x = warp_forward(y, LAM)
    assert np.all(np.diff(x) > 0)


def test_warp_inverse_values():
    assert warp_inverse(0.0, LAM) == pytest.approx(0.0, abs=1e-12)
    assert warp_inverse(31.25, LAM) == pytest.approx(50.0, rel=1e-12)


def test_warp_roundtrip_1000_points():
    y = np.linspace(-LAM, LAM, 1000)
    back = warp_inverse(warp_forward(y, LAM), LAM)
    assert np.abs(back - y).max() <= 1e-9


@given(st.floats(min_value=-1e3, max_value=1e3),
       st.floats(min_value=1e-2, max_value=1e4))
@settings(max_examples=200, deadline=None)
def test_warp_roundtrip_property(y, lam):
    assert warp_inverse(warp_forward(y, lam), lam) == pytest.approx(
        y, rel=1e-9, abs=1e-9 * lam)


def test_warp_derivative_values():
    assert warp_derivative(0.0, LAM) == 0.5
    assert warp_derivative(LAM, LAM) == 2.0


def test_warp_derivative_matches_finite_difference():
    y = np.linspace(-90.0, 90.0, 100)
    h = 1e-5
    fd = (warp_forward(y + h, LAM) - warp_forward(y - h, LAM)) / (2 * h)
    assert np.abs(fd / warp_derivative(y, LAM) - 1.0).max() <= 1e-8


def _charts():
    return [
        Chart("cartesian1d", ((-10.0, 10.0),)),
        Chart("warped1d", ((-100.0, 100.0),), lam=LAM),
        Chart("cartesian2d", ((-5.0, 5.0), (-5.0, 5.0))),
        Chart("warped2d", ((-100.0, 100.0), (-100.0, 100.0)), lam=LAM),
        Chart("cartesian3d", ((-1.0, 1.0),) * 3),
        Chart("sphere_geographic", ((0.2, 3.0), (0.0, math.pi / 2)), radius=200.0),
        Chart("sphere_stereographic", ((50.0, 200.0), (0.0, math.pi / 2)), radius=200.0),
    ]


def test_metric_at_cartesian():
    ms = metric_at(Chart("cartesian1d", ((-10.0, 10.0),)), (3.7,))
    assert ms.g_diag == (1.0,)
    assert ms.sqrt_det_g == 1.0


def test_metric_at_warped_origin():
    ms = metric_at(Chart("warped1d", ((-100.0, 100.0),), lam=LAM), (0.0,))
    assert ms.g_diag[0] == pytest.approx(0.25, rel=1e-15)


def test_metric_at_sphere_equator():
    chart = Chart("sphere_geographic", ((0.2, 3.0), (0.0, 2.0)), radius=200.0)
    ms = metric_at(chart, (math.pi / 2, 1.0))
    assert ms.g_diag[0] == pytest.approx(40000.0, rel=1e-15)
    assert ms.g_diag[1] == pytest.approx(40000.0, rel=1e-15)


def test_metric_sample_invariants():
    rng = np.random.default_rng(3)
    for chart in _charts():
        for _ in range(20):
            pt = tuple(rng.uniform(lo, hi) for lo, hi in chart.bounds)
            ms = metric_at(chart, pt)
            for g, gi in zip(ms.g_diag, ms.g_inv_diag):
                assert g > 0
                assert g * gi == pytest.approx(1.0, rel=1e-12)
            assert ms.sqrt_det_g == pytest.approx(
                math.sqrt(math.prod(ms.g_diag)), rel=1e-12)


def test_metric_at_rejects_out_of_bounds():
    with pytest.raises(ChartError):
        metric_at(Chart("cartesian1d", ((-10.0, 10.0),)), (11.0,))


def test_geo_stereo_values():
    rho, phi = geo_stereo_map((math.pi / 2, 0.3), "geo_to_stereo", 200.0)
    assert rho == pytest.approx(200.0, rel=1e-15)
    assert phi == 0.3
    theta, _ = geo_stereo_map((50.0, 0.0), "stereo_to_geo", 200.0)
    assert theta == pytest.approx(2.0 * math.atan(0.25), rel=1e-15)


def test_geo_stereo_roundtrip():
    theta = np.linspace(0.3, 1.5, 100)
    rho, _ = geo_stereo_map((theta, 0.0), "geo_to_stereo", 200.0)
    back, _ = geo_stereo_map((rho, 0.0), "stereo_to_geo", 200.0)
    assert np.abs(back - theta).max() <= 1e-12


def test_geo_stereo_rejects_pole():
    with pytest.raises(ChartError):
        geo_stereo_map((0.0, 0.0), "geo_to_stereo", 200.0)
    with pytest.raises(ChartError):
        geo_stereo_map((0.0, 0.0), "stereo_to_geo", 200.0)


def test_embed_sphere_values():
    x, y, z = embed_sphere(0.0, 0.0, 5.0)
    assert (x, y, z) == (0.0, 0.0, 5.0)
    x, y, z = embed_sphere(math.pi / 2, 0.0, 200.0)
    assert abs(x) < 1e-13 and y == pytest.approx(200.0) and abs(z) < 1e-13


def test_embed_sphere_norm():
    rng = np.random.default_rng(7)
    theta = rng.uniform(0.01, math.pi - 0.01, 1000)
    phi = rng.uniform(0.0, 2 * math.pi, 1000)
    x, y, z = embed_sphere(theta, phi, 200.0)
    r = np.sqrt(x * x + y * y + z * z)
    assert np.abs(r / 200.0 - 1.0).max() <= 1e-12


def test_stereo_metric_consistent_with_pulled_back_geo_metric():
    # push the stereographic coordinates through the chart map and compare the
    # finite-difference pullback of the geographic metric
    radius = 200.0
    rng = np.random.default_rng(11)
    rho = rng.uniform(50.0, 200.0, 200)
    h = 1e-4
    dtheta_drho = (2 * np.arctan((rho + h) / radius)
                   - 2 * np.arctan((rho - h) / radius)) / (2 * h)
    theta = 2 * np.arctan(rho / radius)
    g_theta = radius**2
    g_phi = radius**2 * np.sin(theta) ** 2
    pulled_rho = dtheta_drho**2 * g_theta
    chart = Chart("sphere_stereographic", ((50.0, 200.0), (0.0, 2.0)), radius=radius)
    g = metric_diag(chart, [rho, np.zeros_like(rho)])
    assert np.abs(pulled_rho / g[0] - 1.0).max() <= 1e-6
    assert np.abs(g_phi / g[1] - 1.0).max() <= 1e-6


@pytest.mark.parametrize("kind,kwargs", [
    ("warped1d", dict(lam=-1.0)),
    ("warped1d", dict()),
    ("sphere_geographic", dict(radius=-5.0)),
])
def test_chart_parameter_validation(kind, kwargs):
    bounds = ((0.2, 1.0), (0.0, 1.0)) if kind.startswith("sphere") else ((-1.0, 1.0),)
    with pytest.raises(ChartError):
        Chart(kind, bounds, **kwargs)


def test_chart_rejects_pole_bounds():
    with pytest.raises(ChartError):
        Chart("sphere_geographic", ((0.0, 1.0), (0.0, 1.0)), radius=1.0)
    with pytest.raises(ChartError):
        Chart("sphere_stereographic", ((0.0, 1.0), (0.0, 1.0)), radius=1.0)


def test_chart_dim_mismatch():
    with pytest.raises(ChartError):
        Chart("cartesian2d", ((-1.0, 1.0),))
