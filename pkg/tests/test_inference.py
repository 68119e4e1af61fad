import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import brentq

from stou.core import FieldData, GridSpec, ModelParams, checkerboard
from stou.inference import (
    DegenerateVariogram, Invalid, NoPairs, OptimizerNoBracket, TooFewPoints, empirical_variogram,
    fit_rate, invert_variogram, k_statistics, ls_fit, mm_fit, usable_lags,
)
from stou.levy import Gaussian, NIG, RngStream
from stou.simulate import simulate_dg, simulate_rg
from stou.theory import variogram_s, variogram_t

P = ModelParams(1.0, 1.0)


def field(values, dx=0.05, dt=0.05, mask=None):
    values = np.asarray(values, dtype=float)
    return FieldData(GridSpec(0, 0, dx, dt, *values.shape), values, mask)


def test_variogram_zero_for_constant_rows():
    f = field(np.repeat(np.arange(4.0)[:, None], 6, axis=1))
    assert empirical_variogram(f, "time", [1, 2, 5]) == [0, 0, 0]


def test_variogram_hand_example():
    assert empirical_variogram(field([[0, 1, 0]]), "time", [1]) == [pytest.approx(3.0, rel=1e-15)]


def test_variogram_dg_lag_one_empty():
    f = field(np.ones((5, 5)) + np.arange(5), mask=checkerboard(5, 5))
    with pytest.raises(NoPairs):
        empirical_variogram(f, "time", [1])
    with pytest.raises(NoPairs):
        empirical_variogram(f, "space", [1])
    assert usable_lags(f, "time", 2) == [2, 4]


def test_variogram_excludes_masked_pairs():
    vals = np.array([[0.0, 5.0, 1.0, 2.0]])
    mask = np.array([[True, False, True, True]])
    f = field(vals, mask=mask)
    k2 = np.var([0.0, 1.0, 2.0], ddof=1)
    assert empirical_variogram(f, "time", [1]) == [pytest.approx(1.0 / k2)]
    assert empirical_variogram(f, "time", [2]) == [pytest.approx(1.0 / k2)]


def test_k_statistics_examples():
    assert k_statistics(field(np.full((3, 3), 2.5))) == (2.5, 0.0, 0.0, 0.0)
    assert k_statistics([1.0, 2.0, 3.0], 3) == pytest.approx((2.0, 1.0, 0.0), abs=1e-15)
    with pytest.raises(TooFewPoints):
        k_statistics([1.0, 2.0, 3.0])


def test_k_statistics_match_displayed_power_sums():
    y = np.random.default_rng(3).gamma(2.0, size=57)
    D = y.size
    S1, S2, S3, S4 = (np.sum(y**k) for k in (1, 2, 3, 4))
    ref = (
        S1 / D,
        (D * S2 - S1**2) / (D * (D - 1)),
        (D**2 * S3 - 3 * D * S2 * S1 + 2 * S1**3) / (D * (D - 1) * (D - 2)),
        ((D**3 + D**2) * S4 - 4 * (D**2 + D) * S3 * S1 - 3 * (D**2 - D) * S2**2
         + 12 * D * S2 * S1**2 - 6 * S1**4) / (D * (D - 1) * (D - 2) * (D - 3)),
    )
    assert k_statistics(y) == pytest.approx(ref, rel=1e-9)


def test_k_statistics_normal_sample():
    _, k2, _, k4 = k_statistics(np.random.default_rng(0).standard_normal(10**6))
    assert abs(k2 - 1) < 0.01 and abs(k4) < 0.05


def test_mm_exact_inversion():
    # a time-constant component inflates the variance without touching the
    # temporal variogram; scale it until the lag-1 value hits 2(1 - e^{-0.05})
    rng = np.random.default_rng(5)
    base = rng.standard_normal((6, 8))
    spatial = np.arange(6.0)[:, None] * np.ones((1, 8))
    target = 2 * (1 - math.exp(-0.05))

    def gap(a):
        return empirical_variogram(field(base + a * spatial), "time", [1])[0] - target

    a = brentq(gap, 0.0, 1e4, xtol=1e-14, rtol=1e-15)
    est = mm_fit(field(base + a * spatial))
    assert est.lambda_hat == pytest.approx(1.0, rel=1e-10)


def test_mm_degenerate():
    with pytest.raises(DegenerateVariogram):
        invert_variogram(2.1, 0.05)
    with pytest.raises(DegenerateVariogram):
        invert_variogram(0.0, 0.05)
    alternating = np.tile([0.0, 1.0], (4, 5)) + np.arange(4)[:, None] * 0.01
    with pytest.raises(DegenerateVariogram):
        mm_fit(field(alternating))


def test_mm_rejects_off_grid_lag():
    f = simulate_rg(P, Gaussian(0.2, 0.1), GridSpec(0, 0, 0.05, 0.05, 12, 12), 10, 10, RngStream(1))
    with pytest.raises(Exception):
        mm_fit(f, dt_lag=0.07)


@given(st.floats(0.05, 5), st.floats(0.01, 0.2), st.integers(2, 30))
def test_fit_rate_exact_inputs(lam, d, n):
    dists = np.arange(1, n + 1) * d
    gam = variogram_t(ModelParams(lam, 1.0), dists)
    assert fit_rate(gam, dists) == pytest.approx(lam, rel=1e-8)


def test_ls_exact_15_lags():
    dists = np.arange(1, 16) * 0.05
    lam = fit_rate(variogram_t(P, dists), dists)
    theta = fit_rate(variogram_s(P, dists), dists)
    assert lam == pytest.approx(1.0, abs=1e-8) and lam / theta == pytest.approx(1.0, abs=1e-8)
    p2 = ModelParams(1.7, 0.6)
    lam = fit_rate(variogram_t(p2, dists), dists)
    theta = fit_rate(variogram_s(p2, dists), dists)
    assert lam == pytest.approx(1.7, rel=1e-8) and lam / theta == pytest.approx(0.6, rel=1e-8)


def test_fit_rate_no_bracket():
    with pytest.raises(OptimizerNoBracket):
        fit_rate([2.5, 2.6, 2.7], [0.05, 0.1, 0.15])


def _sim(alg="rg", n=41, seed=Gaussian(0.2, 0.1), s=0):
    g = GridSpec(0, 0, 0.05, 0.05, n, n)
    fn = simulate_rg if alg == "rg" else simulate_dg
    return fn(P, seed, g, 100, 100, RngStream(11, s))


def test_ls_single_lag_equals_mm():
    for alg in ("rg", "dg"):
        f = _sim(alg)
        a, b = mm_fit(f), ls_fit(f, 1)
        assert (a.lambda_hat, a.c_hat, a.seed_hat) == (b.lambda_hat, b.c_hat, b.seed_hat)


def test_dg_defaults_to_two_step_lags():
    f = _sim("dg")
    k2 = k_statistics(f, 2)[1]
    gt = empirical_variogram(f, "time", [2], k2)[0]
    assert mm_fit(f).lambda_hat == pytest.approx(invert_variogram(gt, 0.1), rel=1e-15)
    assert mm_fit(f, dt_lag=0.1, dx_lag=0.1).lambda_hat == mm_fit(f).lambda_hat


def test_gaussian_seed_recovery_formula():
    f = _sim()
    est = mm_fit(f)
    k1, k2 = est.field_cumulants[:2]
    lam, c = est.lambda_hat, est.c_hat
    assert est.seed_hat.mu == pytest.approx(k1 * lam**2 / (2 * c), rel=1e-12)
    assert est.seed_hat.tau == pytest.approx(math.sqrt(2 * k2 * lam**2 / c), rel=1e-12)


def test_nig_invalid_recorded_not_raised():
    # a smooth ramp has a uniform-like marginal; its negative excess kurtosis
    # violates the NIG constraint
    vals = np.add.outer(np.arange(20) * 20.0, np.arange(20.0)) / 400
    est = mm_fit(field(vals), family="nig")
    assert isinstance(est.seed_hat, Invalid) and not est.valid
    assert est.diagnostics == {"alpha": False, "beta": False, "mu": False, "delta": False}


@given(st.floats(1e-3, 1e3))
def test_scale_consistency(k):
    f = _sim(n=21)
    g = FieldData(f.grid, f.values * k, f.mask)
    a, b = mm_fit(f), mm_fit(g)
    assert b.lambda_hat == pytest.approx(a.lambda_hat, rel=1e-10)
    assert b.c_hat == pytest.approx(a.c_hat, rel=1e-10)
    for l, (x, y) in enumerate(zip(a.field_cumulants, b.field_cumulants), start=1):
        assert y == pytest.approx(k**l * x, rel=1e-9, abs=1e-300)


@pytest.mark.slow
def test_spread_shrinks_with_domain():
    def spread(n):
        cs = [mm_fit(simulate_rg(P, Gaussian(0.2, 0.1), GridSpec(0, 0, 0.05, 0.05, n, n), 150, 150,
                                 RngStream(23, r))).lambda_hat for r in range(24)]
        return np.subtract(*np.percentile(cs, [75, 25]))

    assert spread(121) < spread(61)
