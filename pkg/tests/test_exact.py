import math

import numpy as np
import pytest
from scipy.optimize import brentq

from nlskdv.errors import ParameterError, ProfileRequiredError, ThresholdNotFound
from nlskdv.exact import (
    COSH_INTEGRALS,
    WaveParams,
    ansatz_params,
    base_profile,
    diag_energy_gap,
    diag_gap_from_moments,
    diag_nehari_t,
    lambda2_threshold,
    semitrivial_profile,
    soliton_U1,
    soliton_V,
    soliton_V2,
)
from nlskdv.grid import integrate, make_grid, sobolev_inner
from nlskdv.model import StatePair, energy_J
from nlskdv.nehari import project
from helpers import line_grid, model


def test_soliton_V_values():
    assert soliton_V(0.0) == 1.5
    th = np.random.default_rng(0).uniform(-10, 10, 50)
    np.testing.assert_array_equal(soliton_V(th), soliton_V(-th))


@pytest.mark.parametrize("theta", [0.5, 1.0, 2.0])
def test_soliton_V_ode_residual(theta):
    # V = 1.5 sech^2(s), s = theta/2; d/dtheta = (1/2) d/ds
    s = theta / 2
    sech, tanh = 1 / math.cosh(s), math.tanh(s)
    v = 1.5 * sech ** 2
    vpp = 0.25 * 1.5 * (4 * sech ** 2 * tanh ** 2 - 2 * sech ** 4)
    assert abs(vpp - v + v * v) < 1e-12
    assert float(soliton_V(theta)) == pytest.approx(v, rel=1e-15)


def test_soliton_V2_values():
    assert float(soliton_V2(0.0, 1.0)) == pytest.approx(3.0)
    assert float(soliton_V2(0.0, 4.0)) == pytest.approx(12.0)
    with pytest.raises(ParameterError):
        soliton_V2(0.0, 0.0)
    with pytest.raises(ProfileRequiredError):
        soliton_V2(0.0, 1.0, m=2)


def test_soliton_U1_values():
    assert float(soliton_U1(0.0, 2.0)) == pytest.approx(2.0)
    x = np.linspace(-5, 5, 11)
    np.testing.assert_array_equal(soliton_U1(x, 1.3), soliton_U1(-x, 1.3))
    with pytest.raises(ParameterError):
        soliton_U1(0.0, -1.0)


def test_U1_on_its_own_nehari_manifold():
    g = line_grid()
    x = g.nodes
    for lam in (1.0, 2.5):
        u = g.field(lambda x: soliton_U1(x, lam))
        du = -math.sqrt(lam) * u * np.tanh(math.sqrt(lam) * x)
        quartic = integrate(g, u ** 4)
        assert integrate(g, du ** 2 + lam * u * u) == pytest.approx(quartic, rel=1e-6)
        # the finite-difference Dirichlet form is second order in h
        lhs = sobolev_inner(g, u, u, lam)
        assert lhs == pytest.approx(quartic, rel=lam * g.spacing ** 2)


def test_ansatz_params():
    assert ansatz_params(WaveParams(0.0, 2.0)) == (1.0, 2.0)
    assert ansatz_params(WaveParams(1.0, 2.0)) == (2.0, 2.0)
    with pytest.raises(ParameterError):
        ansatz_params(WaveParams(-1.0, 1.0))


def test_cosh_integrals_on_default_grid():
    g = line_grid()
    for k, val in COSH_INTEGRALS.items():
        assert integrate(g, np.cosh(g.nodes) ** -k) == pytest.approx(val, abs=1e-8)


def test_diag_nehari_t_examples():
    t = diag_nehari_t(1.0, 1.0, 1.0)
    assert t == pytest.approx(7 * (-2 + 10 / math.sqrt(7)) / 36, rel=1e-14)
    assert t == pytest.approx(0.34604, abs=1e-5)
    for l1, l2, b in [(1, 1, 1), (2, 0.5, 0.3), (0.4, 3, 7)]:
        t = diag_nehari_t(l1, l2, b)
        resid = 18 / 7 * l2 * t * t + 0.5 * t * (1 + 3 * b) - (1 + 5 * (l1 - l2) / (12 * l2))
        assert abs(resid) < 1e-12
    ts = [diag_nehari_t(1.0, 1.0, b) for b in (1.0, 10.0, 100.0)]
    assert ts[0] > ts[1] > ts[2] > 0
    with pytest.raises(ParameterError):
        diag_nehari_t(0.0, 1.0, 1.0)


def test_diag_nehari_t_matches_projection():
    g = line_grid()
    v = g.field(lambda x: soliton_V2(x, 1.0))
    t = diag_nehari_t(1.0, 1.0, 1.0)
    proj = project(model(beta=1.0), StatePair(t * v, t * v, g))
    assert proj.scaling == pytest.approx(1.0, abs=1e-5)


def _grid_gap(g, l1, l2, beta):
    p = model(lambda1=l1, lambda2=l2, beta=beta)
    v = g.field(lambda x: soliton_V2(x, l2))
    diag = project(p, StatePair(v, v, g)).state
    return energy_J(p, diag) - energy_J(p, StatePair(g.zeros(), v, g))


def test_diag_energy_gap_sign_matches_grid():
    g = line_grid()
    for l1, l2, b in [(1, 1, 1), (1, 0.2, 1), (1, 5, 0.1), (1, 0.3, 0.1)]:
        closed = diag_energy_gap(l1, l2, b)
        assert np.sign(closed) == np.sign(_grid_gap(g, l1, l2, b))


def test_diag_energy_gap_limits():
    gaps = [diag_energy_gap(1.0, l2, 1.0) for l2 in (1e2, 1e4, 1e6)]
    assert abs(gaps[-1] + 1) < 1e-2
    assert abs(gaps[0] + 1) > abs(gaps[1] + 1) > abs(gaps[2] + 1)
    betas = np.linspace(1e-3, 1e-2, 10)
    vals = np.array([diag_energy_gap(1.0, 1.0, b) for b in betas])
    assert np.max(np.abs(np.diff(vals))) < 1e-2


def test_threshold_brackets_sign_change():
    res = lambda2_threshold(1.0, 1.0)
    assert res.value > 0
    assert res.upper - res.lower <= 1e-6
    d = 1e-4
    assert diag_energy_gap(1.0, res.value + d, 1.0) < 0
    assert diag_energy_gap(1.0, res.value - d, 1.0) > 0
    assert res.gap_lower > 0 > res.gap_upper


def test_threshold_decreases_with_beta():
    vals = [lambda2_threshold(1.0, b).value for b in (0.1, 1.0, 10.0)]
    assert vals[0] > vals[1] > vals[2] > 0


def test_threshold_grid_cross_check():
    # bisect the directly evaluated grid energy gap at two resolutions
    ref = lambda2_threshold(1.0, 1.0).value
    roots = []
    for n in (2001, 4001):
        g = make_grid(1, 1, 40.0, n)
        roots.append(brentq(lambda l2: _grid_gap(g, 1.0, l2, 1.0), 0.3, 0.7, xtol=1e-9))
    assert abs(roots[1] - roots[0]) < 1e-4
    assert abs(roots[1] - ref) < 1e-4


def test_threshold_not_found_reports_bracket():
    with pytest.raises(ThresholdNotFound) as exc:
        lambda2_threshold(1.0, 1.0, bracket=(10.0, 100.0))
    assert exc.value.bracket == (10.0, 100.0)
    assert len(exc.value.values) == 2
    with pytest.raises(ParameterError):
        lambda2_threshold(1.0, 0.0)


def test_fourth_order_profile_and_rescaling():
    prof = base_profile(1)
    g = prof.grid
    v = prof.values
    assert v[g.points // 2] > 0
    np.testing.assert_allclose(v, v[::-1], atol=1e-12)
    assert float(soliton_V2(0.0, 1.0, m=2, profile=prof)) == pytest.approx(v[g.points // 2])
    base = prof.moments()
    for lam in (1.0, 2.0, 4.0):
        gl = make_grid(1, 2, 40.0, 4001)
        vl = gl.field(lambda x: soliton_V2(x, lam, m=2, profile=prof))
        for k, key in ((2, "V2"), (3, "V3"), (4, "V4")):
            expected = lam ** (k - 0.25) * base[key]
            assert integrate(gl, vl ** k) == pytest.approx(expected, rel=1e-4)


def test_semitrivial_profile_fourth_order_matches_rescaled_base():
    prof = base_profile(1)
    g = make_grid(1, 2, 40.0, 4001)
    p = model(order=2, lambda2=2.0)
    direct = semitrivial_profile(p, g)
    rescaled = g.field(lambda x: soliton_V2(x, 2.0, m=2, profile=prof))
    assert np.max(np.abs(direct - rescaled)) < 1e-3 * np.max(direct)


def test_fourth_order_threshold():
    prof = base_profile(1)
    res = lambda2_threshold(1.0, 0.1, order=2, profile=prof)
    mom = prof.moments()
    assert diag_gap_from_moments(1.0, res.value + 1e-4, 0.1, mom, 1) < 0
    assert diag_gap_from_moments(1.0, res.value - 1e-4, 0.1, mom, 1) > 0
