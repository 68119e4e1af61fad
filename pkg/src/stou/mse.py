"""Mean-squared simulation error of the RG and DG algorithms (c = 1).

With kernel k = exp(-lam w) 1{|u| <= w} and its discrete approximation h,

    MSE = mu^2 (int (k - h))^2 + tau^2 int (k - h)^2.

The finite sums below are the closed slab-by-slab evaluations of those two
integrals.  :func:`mse_cellwise` evaluates the same integrals independently
from the piecewise-constant h, one time slab at a time, and is used as an
oracle.
"""

from __future__ import annotations

import math

import numpy as np

from .core import DataError, ModelParams

ALGORITHMS = ("rg", "dg")


class UnsupportedShape(DataError):
    pass


class NonIntegerTruncation(DataError):
    pass


def _check(params: ModelParams, tau, delta, R=None) -> int | None:
    if abs(params.c - 1.0) > 1e-12:
        raise UnsupportedShape(f"MSE sums are only available for c = 1, got c={params.c}")
    if not delta > 0:
        raise DataError(f"delta must be positive, got {delta}")
    if tau < 0:
        raise DataError(f"tau must be non-negative, got {tau}")
    if R is None:
        return None
    if not R > 0:
        raise DataError(f"R must be positive, got {R}")
    ratio = R / delta
    p = round(ratio)
    if p < 1 or abs(ratio - p) > 1e-9 * max(1.0, ratio):
        raise NonIntegerTruncation(f"R/delta = {ratio!r} is not a positive integer")
    return int(p)


def _alg(alg: str) -> str:
    key = alg.lower()
    if key not in ALGORITHMS:
        raise DataError(f"unknown algorithm {alg!r}; expected rg or dg")
    return key


def mse_components(alg: str, params: ModelParams, mu, tau, delta, R) -> tuple[float, float]:
    """(squared bias, variance term) of the simulation error, both >= 0."""
    alg = _alg(alg)
    p = _check(params, tau, delta, R)
    lam, d = params.lam, delta
    j = np.arange(p + 1, dtype=float)
    decay = np.exp(-lam * j * d)
    decay2 = decay * decay
    if alg == "rg":
        mean_sum = math.fsum((2 * j + 1) * d * d * decay)
        bias = 2 * mu / lam**2 - mu * mean_sum
        terms = decay2 * (
            -4 * j * d / lam
            + 4 / lam**2 * math.expm1(-lam * d / 2)
            + 2 * (2 * j + 1) * d / lam * math.exp(-lam * d)
            + (2 * j + 1) * d * d
        )
    else:
        mean_sum = math.fsum(2 * (j + 1) * d * d * decay)
        bias = 2 * mu / lam**2 - mu * mean_sum
        terms = 2 * (j + 1) * decay2 * (d * d - 2 / lam**2 * math.expm1(-lam * d) ** 2)
    var = tau**2 * math.fsum(np.append(terms, 1 / (2 * lam**2)))
    # roundoff can leave a tiny negative remainder when the true value is ~0
    return bias * bias, max(var, 0.0)


def mse_rg(params: ModelParams, mu, tau, delta, R) -> float:
    """MSE of the rectangular-grid algorithm with dt = dx = delta and p = q = R/delta."""
    return sum(mse_components("rg", params, mu, tau, delta, R))


def mse_dg(params: ModelParams, mu, tau, delta, R) -> float:
    """MSE of the diamond-grid algorithm on an underlying grid of spacing delta."""
    return sum(mse_components("dg", params, mu, tau, delta, R))


def mse(alg: str, params, mu, tau, delta, R) -> float:
    return sum(mse_components(alg, params, mu, tau, delta, R))


def mse_closed_form(alg: str, params: ModelParams, mu, tau, delta, R) -> float:
    """Geometric-series evaluation of the same sums (cross-check only)."""
    alg = _alg(alg)
    p = _check(params, tau, delta, R)
    lam, d = params.lam, delta
    x = math.exp(-lam * d)
    y = x * x
    n = p + 1

    def s0(r):  # sum_{j<n} r^j
        return (1 - r**n) / (1 - r)

    def s1(r):  # sum_{j<n} j r^j
        return r * (1 - n * r ** (n - 1) + (n - 1) * r**n) / (1 - r) ** 2

    if alg == "rg":
        bias = 2 * mu / lam**2 - mu * d * d * (2 * s1(x) + s0(x))
        var = 1 / (2 * lam**2) + s1(y) * (-4 * d / lam + 4 * d * x / lam + 2 * d * d) + s0(y) * (
            -4 / lam**2 * (1 - math.exp(-lam * d / 2)) + 2 * d * x / lam + d * d
        )
    else:
        bias = 2 * mu / lam**2 - 2 * mu * d * d * (s1(x) + s0(x))
        var = 1 / (2 * lam**2) + 2 * (s1(y) + s0(y)) * (d * d - 2 / lam**2 * (1 - x) ** 2)
    return bias * bias + tau**2 * var


def mse_limit_fixed_delta(alg: str, params: ModelParams, mu, tau, delta) -> float:
    """Limit of the MSE as R -> infinity with delta held fixed."""
    alg = _alg(alg)
    _check(params, tau, delta)
    lam, d = params.lam, delta
    x = math.exp(-lam * d)
    one_x = -math.expm1(-lam * d)
    one_y = -math.expm1(-2 * lam * d)
    ld = lam * d
    if alg == "rg":
        bias = 4 * mu**2 / lam**4 * (1 - ld**2 / one_x**2 * (1 + x) / 2) ** 2
        var = (1 / (2 * lam**2)) * (1 - (2 * one_x / ld - 1) * 4 * ld**2 * x * x / one_y**2) + (
            x / lam**2 + d / (2 * lam) + math.expm1(-ld / 2) / (lam**2 * ld / 2)
        ) * 2 * ld / one_y
    else:
        bias = 4 * mu**2 / lam**4 * (1 - ld**2 / one_x**2) ** 2
        var = 1 / (2 * lam**2) * (1 - (2 * one_x**2 / ld**2 - 1) * 4 * ld**2 / one_y**2)
    return bias + tau**2 * var


def mse_leading_fixed_R(alg: str, params: ModelParams, mu, tau, R) -> float:
    """Leading (delta -> 0) term of the MSE at fixed truncation range R.

    The same expression holds for both algorithms.
    """
    _alg(alg)
    lam = params.lam
    if not R > 0:
        raise DataError(f"R must be positive, got {R}")
    return (
        4 * mu**2 / lam**4 * (1 + lam * R) ** 2 + tau**2 / (2 * lam**2) * (1 + 2 * lam * R)
    ) * math.exp(-2 * R * lam)


# -- per-slab oracle ---------------------------------------------------------

_GL_X, _GL_W = np.polynomial.legendre.leggauss(24)


def _gl(f, lo, hi):
    """Gauss-Legendre integral of a vectorised f(v) over [lo, hi] (v along last axis)."""
    half = (hi - lo) / 2
    v = lo + half * (_GL_X + 1)
    return half * (f(v) @ _GL_W)


def mse_cellwise(alg: str, params: ModelParams, mu, tau, delta, R) -> tuple[float, float]:
    """(squared bias, variance term) by direct integration of k - h slab by slab.

    On the time slab w in [j delta, (j+1) delta] the u-integral is done exactly
    (h is piecewise constant in u) and the remaining smooth pieces in w are
    integrated by Gauss-Legendre, which is exact to rounding for these
    exponential-polynomial integrands.  Differences e^{-lam w} - h are formed
    with expm1 so small per-slab errors are not lost to cancellation.
    """
    alg = _alg(alg)
    p = _check(params, tau, delta, R)
    lam, d = params.lam, delta
    j = np.arange(p + 1, dtype=float)[:, None]
    a = np.exp(-lam * j * d)

    if alg == "rg":
        b = (j + 0.5) * d

        def sq_lo(v):
            w = j * d + v
            return 2 * w * (a * np.expm1(-lam * v)) ** 2 + 2 * a * a * (d / 2 - v)

        def sq_hi(v):
            return 2 * b * (a * np.expm1(-lam * v)) ** 2 + 2 * (v - d / 2) * (a * np.exp(-lam * v)) ** 2

        def diff(v):
            return 2 * a * ((j * d + v) * np.exp(-lam * v) - b)

        sq = _gl(sq_lo, 0.0, d / 2).sum() + _gl(sq_hi, d / 2, d).sum()
        mean_diff = _gl(diff, 0.0, d / 2).sum() + _gl(diff, d / 2, d).sum()
        edge = (p + 1) * d
    else:
        a_prev = np.exp(-lam * (j - 1) * d)

        def sq_f(v):
            grow = 2 * v * (j + 1) * (a * np.expm1(-lam * v)) ** 2
            shrink = 2 * (d - v) * j * (a_prev * np.expm1(-lam * (d + v))) ** 2
            return grow + shrink

        def diff(v):
            w = j * d + v
            return 2 * w * np.exp(-lam * w) - 2 * v * (j + 1) * a - 2 * (d - v) * j * a_prev

        a_p = math.exp(-lam * p * d)
        w0 = (p + 1) * d

        def sq_last(v):
            shrink = 2 * (d - v) * (p + 1) * (a_p * np.expm1(-lam * (d + v))) ** 2
            uncovered = 2 * v * (p + 2) * np.exp(-2 * lam * (w0 + v))
            return shrink + uncovered

        def diff_last(v):
            w = w0 + v
            return 2 * w * np.exp(-lam * w) - 2 * (d - v) * (p + 1) * a_p

        sq = _gl(sq_f, 0.0, d).sum() + _gl(sq_last, 0.0, d)
        mean_diff = _gl(diff, 0.0, d).sum() + _gl(diff_last, 0.0, d)
        edge = (p + 2) * d

    # beyond the truncation range h = 0: int_W^inf 2w e^{-2 lam w}, int_W^inf 2w e^{-lam w}
    sq += math.exp(-2 * lam * edge) * (edge / lam + 1 / (2 * lam**2))
    mean_diff += 2 * math.exp(-lam * edge) * (edge / lam + 1 / lam**2)
    return (mu * mean_diff) ** 2, tau**2 * float(sq)
