import numpy as np
import pytest

from occuq import (FluidModel, OccupationQuery, ZeroDenominator,
                   cdf_transform, double_transform, invert_cdf,
                   mean_occupation)
from occuq.occupation_transform import cdf_curve, density_curve
from occuq.simulator import mean_with_se, simulate_occupation


def test_transform_at_zero_theta_is_one_over_q(fluid_coxian, mg1_erlang2):
    for model in (fluid_coxian, mg1_erlang2):
        for q in (0.1, 0.5, 1.0, 5.0):
            got = double_transform(model, q, 0.0)
            assert abs(got - 1.0 / q) <= 1e-10 * abs(1.0 / q)


def test_cdf_transform_is_definition(fluid_coxian):
    q, th = 0.5, 0.5
    assert cdf_transform(fluid_coxian, q, th) == \
        double_transform(fluid_coxian, q, th) / th


def test_domain_guards(fluid_coxian):
    with pytest.raises(ZeroDenominator):
        cdf_transform(fluid_coxian, 0.5, 0.0)
    with pytest.raises(ValueError):
        double_transform(fluid_coxian, -0.1, 0.5)
    with pytest.raises(ValueError):
        double_transform(fluid_coxian, 0.5, -0.6)
    with pytest.raises(ValueError):
        OccupationQuery(t=0.0, s=0.0)


def test_mean_occupation_full_threshold(fluid_coxian):
    model = FluidModel(lam=fluid_coxian.lam, on=fluid_coxian.on,
                       r1=fluid_coxian.r1, r_pos=fluid_coxian.r_pos,
                       K=fluid_coxian.K, tau=fluid_coxian.K)
    t = 5.0
    assert abs(mean_occupation(model, t) - t) <= 1e-4 * t


def test_mean_occupation_monotone_in_threshold(fluid_coxian):
    lower = FluidModel(lam=fluid_coxian.lam, on=fluid_coxian.on,
                       r1=fluid_coxian.r1, r_pos=fluid_coxian.r_pos,
                       K=fluid_coxian.K, tau=0.4)
    t = 50.0
    assert mean_occupation(fluid_coxian, t) >= mean_occupation(lower, t)


def test_mean_occupation_matches_simulation(fluid_coxian):
    t = 100.0
    samples = simulate_occupation(fluid_coxian, t, n_paths=30000, seed=20)
    est, se = mean_with_se(samples)
    assert abs(mean_occupation(fluid_coxian, t) - est) <= 3.0 * se


def test_double_transform_matches_path_quadrature(fluid_coxian):
    # independent oracle: G(q, theta) = int e^{-qt} E e^{-theta a(t)} dt,
    # with the expectation estimated from fresh paths at Gauss nodes
    q, th = 0.5, 0.5
    nodes, weights = np.polynomial.legendre.leggauss(32)
    hi = 40.0  # e^{-q t} tail beyond is ~4e-9
    ts = 0.5 * hi * (nodes + 1.0)
    ws = 0.5 * hi * weights
    total = 0.0
    var = 0.0
    for j, (t, w) in enumerate(zip(ts, ws)):
        samples = np.exp(-th * simulate_occupation(fluid_coxian, float(t),
                                                   n_paths=4000,
                                                   seed=1000 + j))
        m, se = mean_with_se(samples)
        total += w * np.exp(-q * t) * m
        var += (w * np.exp(-q * t) * se) ** 2
    exact = double_transform(fluid_coxian, q, th).real
    assert abs(total - exact) <= 3.0 * np.sqrt(var) + 1e-6


def test_invert_cdf_endpoints(fluid_coxian):
    assert invert_cdf(fluid_coxian, 10.0, -0.5) == 0.0
    assert invert_cdf(fluid_coxian, 10.0, 11.0) == 1.0
    assert invert_cdf(fluid_coxian, 100.0, 100.0) == pytest.approx(
        1.0, abs=1e-3)


def test_cdf_curve_monotone(fluid_coxian):
    t = 8.0
    s = np.linspace(0.5, 8.0, 10)
    F = cdf_curve(fluid_coxian, t, s)
    assert np.all(np.diff(F) >= -1e-4)
    assert np.all((F >= 0.0) & (F <= 1.0))


def test_density_curve_differences_cdf(mg1_erlang2):
    t = 8.0
    s = np.linspace(1.0, 7.0, 7)
    F = cdf_curve(mg1_erlang2, t, s)
    f = density_curve(mg1_erlang2, t, s)
    inner = (F[2:] - F[:-2]) / (s[2:] - s[:-2])
    np.testing.assert_allclose(f[1:-1], inner, rtol=0.0, atol=1e-12)
    assert np.all(f >= -1e-4)
    with pytest.raises(ValueError):
        density_curve(mg1_erlang2, t, s[:2])
