"""Gaussian conditional prediction (simple kriging) for the canonical field."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .core import DataError, ModelParams, NumericError
from .levy import Gaussian
from .theory import NotGaussian, acf_st


class DuplicateSites(DataError):
    pass


class SingularCorrelation(NumericError):
    pass


@dataclass(frozen=True)
class SiteList:
    """Observation sites (x, t) and, optionally, the values observed there."""

    sites: np.ndarray
    values: np.ndarray | None = None

    def __post_init__(self):
        sites = np.array(self.sites, dtype=float).reshape(-1, 2)
        if not np.all(np.isfinite(sites)):
            raise DataError("site coordinates must be finite")
        object.__setattr__(self, "sites", sites)
        if self.values is not None:
            values = np.array(self.values, dtype=float).ravel()
            if values.size != len(sites):
                raise DataError(f"{values.size} values for {len(sites)} sites")
            if not np.all(np.isfinite(values)):
                raise DataError("observed values must be finite")
            object.__setattr__(self, "values", values)

    def __len__(self):
        return len(self.sites)


def _check_distinct(sites: np.ndarray):
    if len(np.unique(sites, axis=0)) != len(sites):
        raise DuplicateSites("observation sites must be pairwise distinct")


def correlation_matrix(params: ModelParams, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float).reshape(-1, 2)
    b = np.asarray(b, dtype=float).reshape(-1, 2)
    dx = a[:, None, 0] - b[None, :, 0]
    dt = a[:, None, 1] - b[None, :, 1]
    return np.asarray(acf_st(params, dx, dt)).reshape(len(a), len(b))


def build_covariance(params: ModelParams, tau: float, sites) -> np.ndarray:
    """Covariance c tau^2 / (2 lam^2) * acf between every pair of ``sites``."""
    sites = sites.sites if isinstance(sites, SiteList) else np.asarray(sites, dtype=float).reshape(-1, 2)
    _check_distinct(sites)
    scale = params.c * tau**2 / (2 * params.lam**2)
    return scale * correlation_matrix(params, sites, sites)


@dataclass(frozen=True)
class Prediction:
    mean: float
    variance: float
    nugget_used: float = 0.0

    def __iter__(self):
        return iter((self.mean, self.variance))


def predict_gaussian(params: ModelParams, seed: Gaussian, obs: SiteList, target,
                     nugget: float = 0.0) -> Prediction:
    """Conditional mean and variance of Y at ``target`` = (x, t) given ``obs``.

    The correlation matrix is Cholesky-factored.  If that fails and
    ``nugget`` > 0, ``nugget`` is added to its diagonal and the factorisation
    retried; the returned :class:`Prediction` records the jitter used.

    Raises
    ------
    SingularCorrelation
        The correlation matrix is not numerically positive definite.
    """
    if not isinstance(seed, Gaussian):
        raise NotGaussian("prediction requires a Gaussian seed")
    if obs.values is None or len(obs) == 0:
        raise DataError("need at least one observation with a value")
    _check_distinct(obs.sites)
    lam, c = params.lam, params.c
    mean0 = 2 * c * seed.mu / lam**2
    prior = c * seed.tau**2 / (2 * lam**2)

    corr = correlation_matrix(params, obs.sites, obs.sites)
    r = correlation_matrix(params, np.asarray(target, dtype=float), obs.sites)[0]
    used = 0.0
    try:
        factor = cho_factor(corr, lower=True)
    except LinAlgError:
        if not nugget > 0:
            raise SingularCorrelation("correlation matrix is not positive definite") from None
        try:
            factor = cho_factor(corr + nugget * np.eye(len(corr)), lower=True)
        except LinAlgError:
            raise SingularCorrelation(
                f"correlation matrix is singular even with nugget {nugget}"
            ) from None
        used = nugget
    weights = cho_solve(factor, r)
    mu_star = mean0 + float(weights @ (obs.values - mean0))
    # rounding can push 1 - r R^-1 r' slightly outside [0, 1]
    frac = min(max(1.0 - float(weights @ r), 0.0), 1.0)
    return Prediction(mu_star, prior * frac, used)
