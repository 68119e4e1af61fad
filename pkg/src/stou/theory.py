"""Closed-form second-order and marginal properties of the canonical field.

The canonical field integrates exp(-lam (t - s)) over the backward cone
|xi - x| <= c (t - s).  Everything here is a pure function of (lam, c) and,
for marginal quantities, of the Levy seed.
"""

from __future__ import annotations

import math

import numpy as np

from .core import ModelParams, OUError
from .levy import Gaussian, LevySeed, seed_cumulants


class NotGaussian(OUError):
    pass


def acf_st(params: ModelParams, d_x, d_t):
    """Space-time autocorrelation min(exp(-lam|d_t|), exp(-lam|d_x|/c)).

    Accepts scalars or broadcastable arrays.
    """
    lam, c = params.lam, params.c
    d_x = np.abs(d_x)
    d_t = np.abs(d_t)
    out = np.minimum(np.exp(-lam * d_t), np.exp(-lam * d_x / c))
    return float(out) if np.ndim(out) == 0 else out


def acf_spatial_piecewise(lam: float, c1: float, c2: float, d_x):
    """Spatial ACF when the cone slope switches from c1 to c2 at lag time 1.

    For d_x <= 2 c1 the intersection apex sits in the first linear piece and

        rho = (c1 exp(-lam d_x / c1) + (c2 - c1) exp(-2 lam)) / D,

    otherwise the apex is at a = 1 + (d_x - 2 c1) / (2 c2) and
    rho = c2 exp(-2 lam a) / D, with D = c1 + (c2 - c1) exp(-2 lam).
    """
    d_x = np.abs(np.asarray(d_x, dtype=float))
    denom = c1 + (c2 - c1) * math.exp(-2 * lam)
    near = (c1 * np.exp(-lam * d_x / c1) + (c2 - c1) * math.exp(-2 * lam)) / denom
    apex = 1.0 + (d_x - 2 * c1) / (2 * c2)
    far = c2 * np.exp(-2 * lam * apex) / denom
    out = np.where(d_x <= 2 * c1, near, far)
    return float(out) if out.ndim == 0 else out


def variogram_t(params: ModelParams, d_t):
    """Normalised temporal variogram 2(1 - exp(-lam d_t))."""
    out = 2.0 * -np.expm1(-params.lam * np.asarray(d_t, dtype=float))
    return float(out) if out.ndim == 0 else out


def variogram_s(params: ModelParams, d_x):
    """Normalised spatial variogram 2(1 - exp(-lam d_x / c))."""
    out = 2.0 * -np.expm1(-params.lam * np.asarray(d_x, dtype=float) / params.c)
    return float(out) if out.ndim == 0 else out


def kernel_integral(params: ModelParams, l: int = 1) -> float:
    """Integral of exp(-l lam w) over the cone: 2c / (l lam)^2."""
    return 2.0 * params.c / (l * params.lam) ** 2


def cumulants_of_field(params: ModelParams, seed: LevySeed, l: int) -> float:
    """Marginal cumulant kappa_l(Y) = kappa_l(L') * 2c / (l^2 lam^2)."""
    return seed_cumulants(seed, l) * kernel_integral(params, l)


def ou_equivalent_params(params: ModelParams, seed: LevySeed) -> tuple[float, float]:
    """Seed (mean, sd) of the time-only OU process sharing the field's law at fixed x."""
    if not isinstance(seed, Gaussian):
        raise NotGaussian("OU-equivalent parameters are defined for Gaussian seeds only")
    lam, c = params.lam, params.c
    return 2 * c * seed.mu / lam, math.sqrt(c * seed.tau**2 / lam)
