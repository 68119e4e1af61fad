"""Levy seed families, their cumulants, moment inversion and increment samplers.

A homogeneous Levy basis L assigns to a cell E of area |E| a random variable
L(E) whose cumulants are |E| times those of the unit seed L'.  Each family
below is parametrised by its seed; :func:`sample_increment` draws L(E) for a
given cell area using the area-scaled law of the family.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .core import InvalidParams, NumericError

FAMILIES = ("gaussian", "ig", "nig", "gamma")


class InvalidCumulants(NumericError):
    """Cumulant estimates lie outside the family's parameter space."""

    def __init__(self, family: str, reason: str):
        super().__init__(f"{family}: {reason}")
        self.family = family
        self.reason = reason


def _positive(name, value):
    if not (np.isfinite(value) and value > 0):
        raise InvalidParams(f"{name} must be positive, got {value}")


@dataclass(frozen=True)
class Gaussian:
    mu: float
    tau: float
    family = "gaussian"

    def __post_init__(self):
        # tau == 0 is kept as a degenerate (deterministic) seed
        if not (np.isfinite(self.tau) and self.tau >= 0) or not np.isfinite(self.mu):
            raise InvalidParams(f"invalid Gaussian seed ({self.mu}, {self.tau})")


@dataclass(frozen=True)
class InverseGaussian:
    delta: float
    gamma: float
    family = "ig"

    def __post_init__(self):
        _positive("delta", self.delta)
        _positive("gamma", self.gamma)


@dataclass(frozen=True)
class NIG:
    alpha: float
    beta: float
    mu: float
    delta: float
    family = "nig"

    def __post_init__(self):
        _positive("alpha", self.alpha)
        _positive("delta", self.delta)
        if not (np.isfinite(self.beta) and abs(self.beta) < self.alpha):
            raise InvalidParams("NIG requires 0 <= |beta| < alpha")
        if not np.isfinite(self.mu):
            raise InvalidParams("NIG mu must be finite")

    @property
    def gamma(self) -> float:
        return math.sqrt(self.alpha**2 - self.beta**2)


@dataclass(frozen=True)
class GammaSeed:
    alpha: float
    beta: float
    family = "gamma"

    def __post_init__(self):
        _positive("alpha", self.alpha)
        _positive("beta", self.beta)


LevySeed = Union[Gaussian, InverseGaussian, NIG, GammaSeed]

_SEED_TYPES = {
    "gaussian": Gaussian,
    "ig": InverseGaussian,
    "nig": NIG,
    "gamma": GammaSeed,
}

PARAM_NAMES = {
    "gaussian": ("mu", "tau"),
    "ig": ("delta", "gamma"),
    "nig": ("alpha", "beta", "mu", "delta"),
    "gamma": ("alpha", "beta"),
}


def make_seed(family: str, **params) -> LevySeed:
    """Build a seed from a family tag and keyword parameters."""
    family = family.lower()
    if family not in _SEED_TYPES:
        raise InvalidParams(f"unknown basis family {family!r}; expected one of {FAMILIES}")
    names = PARAM_NAMES[family]
    missing = [k for k in names if k not in params]
    extra = [k for k in params if k not in names]
    if missing or extra:
        raise InvalidParams(
            f"{family} basis takes parameters {names}; missing {missing}, unexpected {extra}"
        )
    return _SEED_TYPES[family](**{k: float(params[k]) for k in names})


def seed_params(seed: LevySeed) -> dict:
    return {k: getattr(seed, k) for k in PARAM_NAMES[seed.family]}


def seed_cumulants(seed: LevySeed, l: int) -> float:
    """l-th cumulant (l = 1..4) of the unit-area seed."""
    if l not in (1, 2, 3, 4):
        raise ValueError("cumulant order must be 1, 2, 3 or 4")
    if isinstance(seed, Gaussian):
        return (seed.mu, seed.tau**2, 0.0, 0.0)[l - 1]
    if isinstance(seed, InverseGaussian):
        d, g = seed.delta, seed.gamma
        return (d / g, d / g**3, 3 * d / g**5, 15 * d / g**7)[l - 1]
    if isinstance(seed, GammaSeed):
        a, b = seed.alpha, seed.beta
        return (a / b, a / b**2, 2 * a / b**3, 6 * a / b**4)[l - 1]
    if isinstance(seed, NIG):
        a, b, mu, d = seed.alpha, seed.beta, seed.mu, seed.delta
        g2 = a * a - b * b
        if l == 1:
            return mu + d * b / math.sqrt(g2)
        if l == 2:
            return d * a * a / g2**1.5
        if l == 3:
            return 3 * d * b * a * a / g2**2.5
        return 3 * d * (a * a + 4 * b * b) * a * a / g2**3.5
    raise TypeError(f"not a Levy seed: {seed!r}")


def seed_mean_sd(seed: LevySeed) -> tuple[float, float]:
    return seed_cumulants(seed, 1), math.sqrt(seed_cumulants(seed, 2))


def solve_seed_from_cumulants(family, k1, k2, k3=0.0, k4=0.0) -> LevySeed:
    """Invert seed cumulants to family parameters.

    Gaussian uses (k1, k2); IG and Gamma use (k1, k2) and need k1 > 0.  NIG
    goes through standardised skewness s and excess kurtosis k: with
    xi = delta*gamma and rho = beta/alpha,

        xi = 9 / (3k - 4s^2),   rho^2 = s^2 / (3k - 4s^2),

    which is admissible exactly when 3*k4*k2 > 5*k3^2.

    Raises
    ------
    InvalidCumulants
        The cumulants fall outside the family's parameter space.
    """
    family = family.lower()
    if not all(np.isfinite(v) for v in (k1, k2, k3, k4)):
        raise InvalidCumulants(family, "non-finite cumulant estimate")
    if not k2 > 0:
        raise InvalidCumulants(family, f"variance cumulant must be positive (k2={k2})")
    if family == "gaussian":
        return Gaussian(mu=k1, tau=math.sqrt(k2))
    if family == "ig":
        if not k1 > 0:
            raise InvalidCumulants(family, f"mean must be positive (k1={k1})")
        gamma = math.sqrt(k1 / k2)
        return InverseGaussian(delta=k1 * gamma, gamma=gamma)
    if family == "gamma":
        if not k1 > 0:
            raise InvalidCumulants(family, f"mean must be positive (k1={k1})")
        return GammaSeed(alpha=k1 * k1 / k2, beta=k1 / k2)
    if family == "nig":
        if not 3 * k4 * k2 > 5 * k3 * k3:
            raise InvalidCumulants(family, "requires 3*k4*k2 > 5*k3^2")
        skew = k3 / k2**1.5
        kurt = k4 / k2**2
        denom = 3 * kurt - 4 * skew * skew
        xi = 9.0 / denom
        rho2 = skew * skew / denom
        if not rho2 < 1:
            raise InvalidCumulants(family, "implied |beta| >= alpha")
        gamma = math.sqrt(xi / (k2 * (1 - rho2)))
        delta = xi / gamma
        alpha = gamma / math.sqrt(1 - rho2)
        beta = math.copysign(math.sqrt(rho2), skew) * alpha
        mu = k1 - delta * beta / gamma
        return NIG(alpha=alpha, beta=beta, mu=mu, delta=delta)
    raise InvalidParams(f"unknown basis family {family!r}")


class RngStream:
    """Reproducible random stream keyed by ``(master_seed, stream_id)``.

    Backed by numpy's counter-based Philox generator.  The key is derived as
    ``SeedSequence(master_seed, spawn_key=(stream_id,))`` so distinct stream
    ids give statistically independent streams.  A stream is stateful: do
    not share one instance between concurrent tasks.
    """

    def __init__(self, master_seed: int, stream_id: int = 0):
        self.master_seed = int(master_seed)
        self.stream_id = int(stream_id)
        ss = np.random.SeedSequence(self.master_seed, spawn_key=(self.stream_id,))
        self.generator = np.random.Generator(np.random.Philox(ss))

    def __repr__(self):
        return f"RngStream(master_seed={self.master_seed}, stream_id={self.stream_id})"


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError("rng must be an RngStream or numpy Generator")


def sample_inverse_gaussian(delta, gamma, size, gen: np.random.Generator) -> np.ndarray:
    """IG(delta, gamma) draws by the Michael-Schucany-Haas transform.

    The smaller root of the quadratic is written as m / (1 + phi + sqrt(phi(phi+2)))
    to avoid the cancellation of the textbook form when delta is tiny.
    """
    mean = delta / gamma
    y = gen.standard_normal(size) ** 2
    phi = y / (2.0 * delta * gamma)
    x = mean / (1.0 + phi + np.sqrt(phi * (phi + 2.0)))
    u = gen.random(size)
    return np.where(u * (mean + x) <= mean, x, mean * mean / x)


def sample_increment(seed: LevySeed, area: float, rng, count) -> np.ndarray:
    """Draw ``count`` iid copies of L(E) for a cell E of the given area.

    ``count`` may be an int or a shape tuple.
    """
    if not area > 0:
        raise InvalidParams(f"cell area must be positive, got {area}")
    gen = _as_generator(rng)
    if isinstance(seed, Gaussian):
        z = gen.standard_normal(count)
        return seed.mu * area + seed.tau * math.sqrt(area) * z
    if isinstance(seed, GammaSeed):
        return gen.standard_gamma(seed.alpha * area, count) / seed.beta
    if isinstance(seed, InverseGaussian):
        return sample_inverse_gaussian(seed.delta * area, seed.gamma, count, gen)
    if isinstance(seed, NIG):
        v = sample_inverse_gaussian(seed.delta * area, seed.gamma, count, gen)
        z = gen.standard_normal(count)
        return seed.mu * area + seed.beta * v + np.sqrt(v) * z
    raise TypeError(f"not a Levy seed: {seed!r}")
