"""Moment-based estimation of (lam, c) and the Levy seed from gridded data.

Both estimators work on normalised empirical variograms along the two grid
axes.  Lags are counted in grid steps; on diamond-grid data axis-aligned
neighbours at odd lags never coexist, so the smallest usable lag is 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.stats import kstat

from .core import DataError, FieldData, ModelParams, NumericError
from .levy import InvalidCumulants, LevySeed, PARAM_NAMES, solve_seed_from_cumulants

AXES = ("space", "time")
LAMBDA_BOUNDS = (1e-6, 1e3)


class NoPairs(DataError):
    def __init__(self, lag, axis="time"):
        super().__init__(f"no valid pairs at {axis} lag {lag}")
        self.lag = lag
        self.axis = axis


class TooFewPoints(DataError):
    pass


class DegenerateVariogram(NumericError):
    pass


class OptimizerNoBracket(NumericError):
    pass


@dataclass(frozen=True)
class Invalid:
    """Placeholder for a seed estimate outside the family's parameter space."""

    reason: str


@dataclass(frozen=True)
class EstimationResult:
    lambda_hat: float
    c_hat: float
    seed_hat: Union[LevySeed, Invalid]
    method: str  # "MM" or "LS"
    lags_used: int
    field_cumulants: tuple
    diagnostics: dict = field(default_factory=dict)

    @property
    def params(self) -> ModelParams:
        return ModelParams(self.lambda_hat, self.c_hat)

    @property
    def valid(self) -> bool:
        return not isinstance(self.seed_hat, Invalid)


def _values(data) -> np.ndarray:
    if isinstance(data, FieldData):
        return data.valid_values
    return np.asarray(data, dtype=float).ravel()


def k_statistics(data, max_order: int = 4) -> tuple:
    """Unbiased cumulant estimates (k-statistics) of orders 1..max_order.

    ``data`` is a FieldData (valid points only) or a 1-d sample.  Orders 2-4
    are shift invariant, so they are computed on centred data to keep the
    power sums well conditioned.
    """
    y = _values(data)
    if y.size < max(max_order, 2):
        raise TooFewPoints(f"need at least {max(max_order, 2)} points, got {y.size}")
    mean = float(y.mean())
    z = y - mean
    return (mean,) + tuple(float(kstat(z, n)) for n in range(2, max_order + 1))


def _axis_pairs(field_: FieldData, axis: str, lag: int):
    v, mk = field_.values, field_.mask
    if axis == "time":
        a, b = v[:, :-lag], v[:, lag:]
        ok = mk[:, :-lag] & mk[:, lag:]
    elif axis == "space":
        a, b = v[:-lag, :], v[lag:, :]
        ok = mk[:-lag, :] & mk[lag:, :]
    else:
        raise DataError(f"axis must be 'space' or 'time', got {axis!r}")
    return a[ok], b[ok]


def _axis_len(field_: FieldData, axis: str) -> int:
    return field_.grid.n if axis == "space" else field_.grid.m


def pair_count(field_: FieldData, axis: str, lag: int) -> int:
    if lag >= _axis_len(field_, axis):
        return 0
    return _axis_pairs(field_, axis, lag)[0].size


def empirical_variogram(field_: FieldData, axis: str, lags, kappa2: float | None = None) -> list:
    """Normalised empirical variogram at integer ``lags`` along ``axis``.

    Each value is the mean of (Y_i - Y_j)^2 over valid pairs at that exact
    separation, divided by the k-statistic variance of all valid points.
    """
    if kappa2 is None:
        kappa2 = k_statistics(field_, 2)[1]
    if not kappa2 > 0:
        raise DegenerateVariogram("sample variance is zero; variogram undefined")
    out = []
    for lag in lags:
        if int(lag) != lag or lag < 1:
            raise DataError(f"lags must be positive integers, got {lag}")
        lag = int(lag)
        if lag >= _axis_len(field_, axis):
            raise NoPairs(lag, axis)
        a, b = _axis_pairs(field_, axis, lag)
        if a.size == 0:
            raise NoPairs(lag, axis)
        out.append(float(np.mean((a - b) ** 2)) / kappa2)
    return out


def usable_lags(field_: FieldData, axis: str, count: int) -> list:
    """The first ``count`` positive lags with at least one valid pair."""
    lags = []
    for lag in range(1, _axis_len(field_, axis)):
        if pair_count(field_, axis, lag):
            lags.append(lag)
            if len(lags) == count:
                return lags
    raise NoPairs(len(lags) + 1, axis)


def invert_variogram(gamma: float, d: float) -> float:
    """Rate r with 2(1 - exp(-r d)) = gamma."""
    if not (0 < gamma < 2):
        raise DegenerateVariogram(f"normalised variogram {gamma} outside (0, 2)")
    return -math.log1p(-gamma / 2) / d


def _to_steps(dist, step, axis):
    k = dist / step
    if abs(k - round(k)) > 1e-9 * max(1.0, k) or round(k) < 1:
        raise DataError(f"{axis} lag {dist} is not a positive multiple of the grid step {step}")
    return int(round(k))


def _recover_seed(family, cumul, lam, c):
    scale = [l * l * lam * lam / (2 * c) for l in (1, 2, 3, 4)]
    seed_k = [k * s for k, s in zip(cumul, scale)]
    names = PARAM_NAMES[family]
    try:
        seed = solve_seed_from_cumulants(family, *seed_k)
    except InvalidCumulants as exc:
        return Invalid(exc.reason), {k: False for k in names}
    return seed, {k: True for k in names}


def _finish(field_, family, lam, c, method, lags_used):
    family = family.lower()
    order = 4 if family == "nig" else 2
    cumul = k_statistics(field_, order)
    cumul = cumul + (0.0,) * (4 - len(cumul))
    seed, diag = _recover_seed(family, cumul, lam, c)
    return EstimationResult(lam, c, seed, method, lags_used, cumul, diag)


def mm_fit(field_: FieldData, dt_lag: float | None = None, dx_lag: float | None = None,
           family: str = "gaussian") -> EstimationResult:
    """Moments-matching fit from one temporal and one spatial variogram value.

    By default each lag is the smallest one with data: one grid step on a
    full grid, two on a diamond-grid mask.
    """
    g = field_.grid
    kt = usable_lags(field_, "time", 1)[0] if dt_lag is None else _to_steps(dt_lag, g.dt, "time")
    kx = usable_lags(field_, "space", 1)[0] if dx_lag is None else _to_steps(dx_lag, g.dx, "space")
    kappa2 = k_statistics(field_, 2)[1]
    gt = empirical_variogram(field_, "time", [kt], kappa2)[0]
    gs = empirical_variogram(field_, "space", [kx], kappa2)[0]
    lam = invert_variogram(gt, kt * g.dt)
    c = lam / invert_variogram(gs, kx * g.dx)
    return _finish(field_, family, lam, c, "MM", 1)


def fit_rate(gammas, dists) -> float:
    """Least-squares rate r for gammas ~ 2(1 - exp(-r d))."""
    gammas = np.asarray(gammas, dtype=float)
    dists = np.asarray(dists, dtype=float)
    if len(gammas) == 1:
        return invert_variogram(gammas[0], dists[0])

    def sse(r):
        return float(np.sum((gammas + 2 * np.expm1(-r * dists)) ** 2))

    lo, hi = math.log(LAMBDA_BOUNDS[0]), math.log(LAMBDA_BOUNDS[1])
    res = minimize_scalar(lambda s: sse(math.exp(s)), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-10})
    r = math.exp(res.x)
    # an interior minimum must beat both ends of the search interval
    if not (sse(r) < sse(LAMBDA_BOUNDS[0]) and sse(r) < sse(LAMBDA_BOUNDS[1])) \
            or min(res.x - lo, hi - res.x) < 1e-4:
        raise OptimizerNoBracket(f"no interior least-squares minimum (search ended at rate {r:g})")
    # Gauss-Newton polish; the bounded search stops at a loose tolerance in r
    for _ in range(20):
        e = np.exp(-r * dists)
        resid = gammas - 2 * (1 - e)
        jac = -2 * dists * e
        if not float(jac @ jac) > 0:
            break
        step = -float(jac @ resid) / float(jac @ jac)
        if not (r + step > 0) or sse(r + step) > sse(r):
            break
        r += step
        if abs(step) <= 1e-15 * r:
            break
    return r


def ls_fit(field_: FieldData, n_lags: int = 15, family: str = "gaussian") -> EstimationResult:
    """Least-squares fit of the theoretical variograms over the first ``n_lags`` usable lags.

    lam is fitted to the temporal variogram, then lam/c to the spatial one.
    With a single lag this reduces to :func:`mm_fit` with default lags.
    """
    if int(n_lags) != n_lags or n_lags < 1:
        raise DataError(f"n_lags must be a positive integer, got {n_lags}")
    g = field_.grid
    kappa2 = k_statistics(field_, 2)[1]
    lt = usable_lags(field_, "time", n_lags)
    lx = usable_lags(field_, "space", n_lags)
    gt = empirical_variogram(field_, "time", lt, kappa2)
    gs = empirical_variogram(field_, "space", lx, kappa2)
    lam = fit_rate(gt, np.array(lt) * g.dt)
    theta = fit_rate(gs, np.array(lx) * g.dx)
    return _finish(field_, family, lam, lam / theta, "LS", int(n_lags))


def fit(field_: FieldData, method: str = "mm", n_lags: int = 15, family: str = "gaussian"):
    method = method.lower()
    if method == "mm":
        return mm_fit(field_, family=family)
    if method == "ls":
        return ls_fit(field_, n_lags, family)
    raise DataError(f"unknown method {method!r}; expected mm or ls")
