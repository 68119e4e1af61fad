import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from stou.core import ModelParams
from stou.levy import GammaSeed, Gaussian
from stou.predict import DuplicateSites, SingularCorrelation, SiteList, build_covariance, predict_gaussian
from stou.theory import NotGaussian, acf_st

P = ModelParams(1.0, 1.0)
SEED = Gaussian(0.2, 0.1)


def brute_condition(params, seed, sites, values, target):
    allsites = np.vstack([np.asarray(target, float)[None, :], sites])
    cov = build_covariance(params, seed.tau, allsites)
    m = 2 * params.c * seed.mu / params.lam**2
    s01, s11 = cov[0, 1:], cov[1:, 1:]
    w = np.linalg.solve(s11, s01)
    return m + w @ (values - m), cov[0, 0] - w @ s01


def test_covariance_examples():
    assert build_covariance(P, 0.1, [(0.0, 0.0)]) == pytest.approx(np.array([[0.005]]))
    cov = build_covariance(P, 0.1, [(0, 0), (1, 2)])
    assert cov[0, 1] == pytest.approx(0.005 * math.exp(-2), rel=1e-15)
    with pytest.raises(DuplicateSites):
        build_covariance(P, 0.1, [(0, 0), (0, 0)])


def test_covariance_psd_random():
    rng = np.random.default_rng(0)
    for _ in range(50):
        sites = rng.uniform(0, 3, size=(6, 2))
        ev = np.linalg.eigvalsh(build_covariance(ModelParams(rng.uniform(0.2, 3), rng.uniform(0.2, 3)), 1.0, sites))
        assert ev.min() >= -1e-10 * ev.max()


def test_interpolation_at_observed_site():
    obs = SiteList([(0, 0), (0.5, 1.0), (2, 0.3)], [0.41, 0.37, 0.45])
    mu, var = predict_gaussian(P, SEED, obs, (0.5, 1.0))
    assert mu == pytest.approx(0.37, abs=1e-10) and var <= 1e-10 * 0.005


def test_single_observation():
    obs = SiteList([(0.0, 0.0)], [0.5])
    rho = acf_st(P, 0.3, 0.7)
    mu, var = predict_gaussian(P, SEED, obs, (0.3, 0.7))
    assert mu == pytest.approx(0.4 + rho * 0.1, abs=1e-14)
    assert var == pytest.approx(0.005 * (1 - rho**2), abs=1e-15)


def test_two_observations_brute_force():
    rng = np.random.default_rng(1)
    for _ in range(20):
        params = ModelParams(rng.uniform(0.3, 2), rng.uniform(0.3, 2))
        seed = Gaussian(rng.uniform(-1, 1), rng.uniform(0.05, 2))
        sites = rng.uniform(0, 2, size=(2, 2))
        vals = rng.normal(size=2)
        target = rng.uniform(0, 2, size=2)
        got = predict_gaussian(params, seed, SiteList(sites, vals), target)
        ref = brute_condition(params, seed, sites, vals, target)
        assert got.mean == pytest.approx(ref[0], abs=1e-10)
        assert got.variance == pytest.approx(ref[1], abs=1e-10)


@given(st.integers(0, 2**31), st.integers(1, 8))
def test_variance_bounds_and_monotone(s, k):
    rng = np.random.default_rng(s)
    sites = rng.uniform(0, 3, size=(k + 1, 2))
    vals = rng.normal(0.4, 0.07, size=k + 1)
    target = rng.uniform(0, 3, size=2)
    fewer = predict_gaussian(P, SEED, SiteList(sites[:k], vals[:k]), target)
    more = predict_gaussian(P, SEED, SiteList(sites, vals), target)
    assert 0 <= more.variance <= fewer.variance + 1e-15 <= 0.005 + 1e-15


@given(st.integers(0, 2**31), st.floats(-50, 50), st.floats(-50, 50))
def test_translation_invariance(s, sx, st_):
    rng = np.random.default_rng(s)
    sites = rng.uniform(0, 3, size=(4, 2))
    vals = rng.normal(0.4, 0.07, size=4)
    target = rng.uniform(0, 3, size=2)
    shift = np.array([sx, st_])
    a = predict_gaussian(P, SEED, SiteList(sites, vals), target)
    b = predict_gaussian(P, SEED, SiteList(sites + shift, vals), target + shift)
    assert b.mean == pytest.approx(a.mean, abs=1e-9) and b.variance == pytest.approx(a.variance, abs=1e-12)


def test_errors_and_nugget():
    with pytest.raises(DuplicateSites):
        predict_gaussian(P, SEED, SiteList([(0, 0), (0, 0)], [1, 1]), (1, 1))
    with pytest.raises(NotGaussian):
        predict_gaussian(P, GammaSeed(1, 1), SiteList([(0, 0)], [1]), (1, 1))
    # sites a hair apart: the correlation matrix is numerically singular
    near = SiteList([(0, 0), (0, 1e-17 + 1e-300), (1e-16, 0)], [0.4, 0.4, 0.4])
    try:
        predict_gaussian(P, SEED, near, (1, 1))
    except SingularCorrelation:
        pred = predict_gaussian(P, SEED, near, (1, 1), nugget=1e-10)
        assert pred.nugget_used == 1e-10
