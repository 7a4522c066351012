import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chartfree.geometry import Chart
from chartfree.grid import GridError, GridSpec, ScalarField, d1, d2, ghost_index, make_grid


def periodic_grid(n=200, half=100.0):
    return make_grid(Chart("cartesian1d", ((-half, half),)), n, ("periodic",))


def neumann_grid(n=200, half=100.0):
    return make_grid(Chart("cartesian1d", ((-half, half),)), n, ("neumann",))


def test_ghost_index_rules():
    gp = periodic_grid(200)
    gn = neumann_grid(200)
    assert ghost_index(gp, 0, -1) == 199
    assert ghost_index(gp, 0, 200) == 0
    assert ghost_index(gn, 0, -1) == 0
    assert ghost_index(gn, 0, 200) == 199
    assert ghost_index(gp, 0, 5) == 5
    assert ghost_index(gn, 0, 5) == 5
    with pytest.raises(GridError):
        ghost_index(gp, 0, 201)
    with pytest.raises(GridError):
        ghost_index(gn, 0, -2)


def test_d1_constant_is_zero():
    g = periodic_grid(64)
    f = ScalarField(g, np.full(64, 4.2))
    assert np.all(d1(f, 0).values == 0.0)
    assert np.all(d2(f, 0).values == 0.0)


def test_d1_exact_on_linear_interior():
    g = neumann_grid(201)  # spacing 1
    x = g.axis_coords(0)
    out = d1(ScalarField(g, x), 0).values
    assert np.allclose(out[1:-1], 1.0, rtol=0, atol=1e-13)


def test_d2_exact_on_quadratic_interior():
    g = neumann_grid(201)
    x = g.axis_coords(0)
    out = d2(ScalarField(g, x * x), 0).values
    assert np.allclose(out[1:-1], 2.0, rtol=0, atol=1e-9)


def _max_err_d1(n):
    g = periodic_grid(n)
    x = g.axis_coords(0)
    k = 2 * np.pi / 200.0
    got = d1(ScalarField(g, np.sin(k * x)), 0).values
    return np.abs(got - k * np.cos(k * x)).max()


def _max_err_d2(n):
    g = periodic_grid(n)
    x = g.axis_coords(0)
    k = 2 * np.pi / 200.0
    got = d2(ScalarField(g, np.sin(k * x)), 0).values
    return np.abs(got + k * k * np.sin(k * x)).max()


@pytest.mark.parametrize("err_fn", [_max_err_d1, _max_err_d2])
def test_second_order_convergence(err_fn):
    ratio = err_fn(100) / err_fn(200)
    assert 3.2 <= ratio <= 4.8


def test_linearity_of_stencils():
    rng = np.random.default_rng(0)
    g = periodic_grid(64)
    for _ in range(50):
        f = rng.standard_normal(64)
        h = rng.standard_normal(64)
        a, b = rng.standard_normal(2)
        lhs = d1(ScalarField(g, a * f + b * h), 0).values
        rhs = a * d1(ScalarField(g, f), 0).values + b * d1(ScalarField(g, h), 0).values
        scale = np.abs(rhs).max() + 1.0
        assert np.abs(lhs - rhs).max() <= 1e-13 * scale


@given(st.integers(min_value=1, max_value=63))
@settings(max_examples=30, deadline=None)
def test_periodic_shift_equivariance_bitwise(k):
    rng = np.random.default_rng(42)
    g = periodic_grid(64)
    f = rng.standard_normal(64)
    for op in (d1, d2):
        shifted_then_op = op(ScalarField(g, np.roll(f, k)), 0).values
        op_then_shifted = np.roll(op(ScalarField(g, f), 0).values, k)
        assert np.array_equal(shifted_then_op, op_then_shifted)


def test_neumann_d1_zero_for_field_flat_at_wall():
    # value-copy ghosts give exactly zero one-sided slope only when the two
    # cells nearest the wall agree; a bump well inside the domain does that
    g = neumann_grid(201)
    x = g.axis_coords(0)
    f = np.exp(-(x**2) / 50.0)
    out = d1(ScalarField(g, f), 0).values
    assert out[0] == (f[1] - f[0]) / 2.0  # ghost copies the wall value
    flat = f.copy()
    flat[:2] = 3.0
    flat[-2:] = 4.0
    out = d1(ScalarField(g, flat), 0).values
    assert out[0] == 0.0 and out[-1] == 0.0


def test_2d_axis_independence():
    chart = Chart("cartesian2d", ((-8.0, 8.0), (-4.0, 4.0)))
    g = make_grid(chart, (32, 16), ("periodic", "periodic"))
    mesh = g.coord_mesh()
    fx = np.broadcast_to(np.sin(2 * np.pi * mesh[0] / 16.0), g.shape)
    f = ScalarField(g, fx.reshape(-1).copy())
    assert np.abs(d1(f, 1).values).max() == 0.0
    assert np.abs(d2(f, 1).values).max() == 0.0


def test_gridspec_validation():
    chart = Chart("cartesian1d", ((-1.0, 1.0),))
    with pytest.raises(GridError):
        GridSpec(chart, (3,), (1.0,), ("periodic",))
    with pytest.raises(GridError):
        GridSpec(chart, (10,), (1.0,), ("periodic",))  # 10 * 1 != 2
    with pytest.raises(GridError):
        make_grid(chart, 10, ("robin",))


def test_field_length_validation():
    g = periodic_grid(16)
    with pytest.raises(GridError):
        ScalarField(g, np.zeros(15))


def test_axis_coords_span():
    gp = periodic_grid(200)
    assert gp.axis_coords(0)[0] == -100.0
    assert gp.axis_coords(0)[-1] == pytest.approx(99.0)
    gn = neumann_grid(201)
    assert gn.axis_coords(0)[-1] == pytest.approx(100.0)
