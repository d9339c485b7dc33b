import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlskdv.errors import GridError
from nlskdv.grid import (
    apply_polylaplacian,
    ball_volume,
    default_grid,
    default_radius,
    dirichlet_form,
    integrate,
    make_grid,
    sobolev_inner,
)
from helpers import line_grid, observed_order, smooth_field
from nlskdv.exact import soliton_U1, soliton_V2


def test_line_grid_constructor():
    g = make_grid(1, 1, 40.0, 4001)
    assert g.spacing == pytest.approx(0.02, abs=1e-15)
    assert g.points == 4001
    assert np.all(np.diff(g.nodes) > 0)
    np.testing.assert_allclose(g.nodes, -g.nodes[::-1], atol=1e-12)
    assert list(g.boundary) == [0, 4000]


def test_radial_weights_n3():
    g = make_grid(3, 1, 20.0, 2001)
    h = g.spacing
    assert h == pytest.approx(0.01)
    r = g.nodes
    np.testing.assert_allclose(g.weights[1:-1], 4 * math.pi * r[1:-1] ** 2 * h, rtol=1e-14)
    assert g.weights[-1] == pytest.approx(0.5 * 4 * math.pi * 20.0 ** 2 * h)
    assert g.weights[0] > 0


@pytest.mark.parametrize("N,m", [(4, 1), (5, 1), (8, 2)])
def test_dimension_outside_validity_rejected(N, m):
    with pytest.raises(GridError, match="validity range"):
        make_grid(N, m, 10.0, 101)


@pytest.mark.parametrize("args", [(0, 1, 1.0, 100), (1, 3, 1.0, 100), (1, 1, -1.0, 100),
                                  (1, 1, 1.0, 7)])
def test_bad_constructor_arguments(args):
    with pytest.raises(GridError):
        make_grid(*args)


@pytest.mark.parametrize("N", [1, 2, 3, 5, 7])
def test_weights_positive_and_ball_volume(N):
    m = 1 if N <= 3 else 2
    g = make_grid(N, m, 5.0, 2001)
    assert np.all(g.weights > 0)
    vol = ball_volume(N) * 5.0 ** N if N > 1 else 10.0
    assert integrate(g, np.ones(g.points)) == pytest.approx(vol, rel=10 * g.spacing ** 2)


def test_integrate_cosh4_and_zero():
    g = line_grid()
    assert integrate(g, np.cosh(g.nodes) ** -4) == pytest.approx(4 / 3, abs=1e-8)
    assert integrate(g, g.zeros()) == 0.0


def test_integrate_gaussian_3d():
    g = make_grid(3, 1, 20.0, 2001)
    assert integrate(g, np.exp(-g.nodes ** 2)) == pytest.approx(math.pi ** 1.5, abs=1e-6)


def test_laplacian_of_r_squared():
    for N in (1, 2, 3):
        g = make_grid(N, 1, 10.0, 201)
        lap = apply_polylaplacian(g, g.radii ** 2)
        np.testing.assert_allclose(lap[g.interior], -2.0 * N, atol=1e-9)


def test_bilaplacian_of_r_fourth_power():
    # Delta^2 r^4 = 8 N (N + 2).  The intermediate Laplacian 4(N+2) r^2 does not
    # vanish at R, and the composed stencil has an O(1) local error at the
    # regularized origin, so compare on an annulus.
    N = 3
    g = make_grid(N, 2, 10.0, 401)
    out = apply_polylaplacian(g, g.radii ** 4)
    inner = (g.radii > 10 * g.spacing) & (g.radii < 8.0)
    np.testing.assert_allclose(out[inner], 8.0 * N * (N + 2), rtol=1e-5)


def test_polylaplacian_of_zero():
    for m in (1, 2):
        g = line_grid(order=m, points=201)
        assert not np.any(apply_polylaplacian(g, g.zeros()))


def test_v2_residual_second_order():
    errs = []
    for n in (1001, 2001, 4001):
        g = line_grid(points=n)
        v = g.field(lambda x: soliton_V2(x, 1.0))
        res = apply_polylaplacian(g, v) + v - 0.5 * v * v
        errs.append(np.max(np.abs(res[g.interior])))
    for k in observed_order(errs):
        assert k == pytest.approx(2.0, abs=0.1)


def test_sobolev_inner_properties():
    g = line_grid(points=801)
    rng = np.random.default_rng(1)
    f = smooth_field(g, rng)
    h = smooth_field(g, rng)
    assert sobolev_inner(g, f, f, 1.5) >= 1.5 * integrate(g, f * f)
    assert sobolev_inner(g, f, g.zeros(), 1.0) == 0.0
    assert sobolev_inner(g, f, h, 2.0) == pytest.approx(sobolev_inner(g, h, f, 2.0), rel=1e-13)


def test_norm_of_u1():
    g = line_grid()
    u = g.field(lambda x: soliton_U1(x, 1.0))
    assert sobolev_inner(g, u, u, 1.0) == pytest.approx(16 / 3, abs=1e-4)


@pytest.mark.parametrize("N,m", [(1, 1), (3, 1), (1, 2), (5, 2)])
def test_summation_by_parts(N, m):
    g = make_grid(N, m, 20.0, 801)
    rng = np.random.default_rng(N + 10 * m)
    f = smooth_field(g, rng)
    k = smooth_field(g, rng)
    lhs = dirichlet_form(g, f, k)
    rhs = integrate(g, k * apply_polylaplacian(g, f))
    assert lhs == pytest.approx(rhs, rel=1e-11, abs=1e-11)


def test_metric_solver_is_cached_and_consistent():
    g = line_grid(order=2, points=401)
    a = g.metric_solver(1.0)
    assert g.metric_solver(1.0) is a
    x = np.random.default_rng(0).standard_normal(g.n_interior)
    np.testing.assert_allclose(g.metric_matrix(1.0) @ a.solve(x), x, atol=1e-9)


def test_default_radius_and_grid():
    assert default_radius(1.0, 4.0, 1) == pytest.approx(40.0)
    assert default_radius(0.25, 4.0, 1) == pytest.approx(80.0)
    assert default_radius(1 / 16, 1.0, 2) == pytest.approx(80.0)
    g = default_grid(3, 1, 1.0, 1.0)
    assert (g.points, g.radius) == (2001, 40.0)


def test_field_shape_mismatch():
    g = line_grid(points=101)
    with pytest.raises(GridError):
        integrate(g, np.ones(100))


@settings(max_examples=30, deadline=None)
@given(N=st.integers(1, 3), n=st.integers(8, 300), R=st.floats(0.5, 50.0))
def test_grid_invariants(N, n, R):
    g = make_grid(N, 1, R, n)
    assert np.all(g.weights > 0)
    assert np.all(np.diff(g.nodes) > 0)
    assert g.nodes[-1] == pytest.approx(R)
    lap = g.laplacian_matrix()
    # K is symmetric so W L is symmetric
    wl = (np.diag(g.weights[g.interior]) @ lap.toarray())
    np.testing.assert_allclose(wl, wl.T, atol=1e-9 * np.abs(wl).max())
