"""Shared domain types for the canonical spatio-temporal OU field.

Arrays are stored with the spatial index along rows and the temporal index
along columns (ascending time left to right).  Indices are 0-based in code;
parity rules are stated against 1-based positions and translated here so that
position (0, 0) counts as "even".
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class OUError(Exception):
    """Base class for every error raised by this package."""


class DataError(OUError):
    """Bad input data or configuration (CLI exit code 2)."""


class NumericError(OUError):
    """A computation could not produce a valid number (CLI exit code 3)."""


class InvalidGrid(DataError):
    pass


class InvalidParams(DataError):
    pass


@dataclass(frozen=True)
class ModelParams:
    """Rate ``lam`` (1/time) and cone slope ``c`` (space/time)."""

    lam: float
    c: float

    def __post_init__(self):
        if not (np.isfinite(self.lam) and self.lam > 0):
            raise InvalidParams(f"lambda must be positive, got {self.lam}")
        if not (np.isfinite(self.c) and self.c > 0):
            raise InvalidParams(f"c must be positive, got {self.c}")


@dataclass(frozen=True)
class GridSpec:
    x0: float
    t0: float
    dx: float
    dt: float
    n: int
    m: int

    @property
    def x(self) -> np.ndarray:
        return self.x0 + np.arange(self.n) * self.dx

    @property
    def t(self) -> np.ndarray:
        return self.t0 + np.arange(self.m) * self.dt

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n, self.m)


def validate_grid(grid: GridSpec) -> None:
    """Raise :class:`InvalidGrid` naming the first violated invariant."""
    for name in ("x0", "t0", "dx", "dt"):
        if not np.isfinite(getattr(grid, name)):
            raise InvalidGrid(f"{name} must be finite")
    if not grid.dx > 0:
        raise InvalidGrid(f"dx must be positive, got {grid.dx}")
    if not grid.dt > 0:
        raise InvalidGrid(f"dt must be positive, got {grid.dt}")
    if int(grid.n) != grid.n or grid.n < 1:
        raise InvalidGrid(f"n must be a positive integer, got {grid.n}")
    if int(grid.m) != grid.m or grid.m < 1:
        raise InvalidGrid(f"m must be a positive integer, got {grid.m}")


def checkerboard(n: int, m: int) -> np.ndarray:
    """Mask that is True where the 1-based index sum I + J is even."""
    i, j = np.indices((n, m))
    return (i + j) % 2 == 0


@dataclass(frozen=True)
class FieldData:
    """Values on a lattice plus a validity mask (True = value present)."""

    grid: GridSpec
    values: np.ndarray
    mask: np.ndarray = field(default=None)

    def __post_init__(self):
        validate_grid(self.grid)
        values = np.array(self.values, dtype=float)
        if values.shape != self.grid.shape:
            raise InvalidGrid(
                f"values have shape {values.shape}, grid expects {self.grid.shape}"
            )
        if self.mask is None:
            mask = np.ones(values.shape, dtype=bool)
        else:
            mask = np.array(self.mask, dtype=bool)
            if mask.shape != values.shape:
                raise InvalidGrid("mask shape does not match values")
        if not np.all(np.isfinite(values[mask])):
            raise InvalidGrid("values must be finite wherever mask is true")
        values[~mask] = 0.0
        values.setflags(write=False)
        mask.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "mask", mask)

    @property
    def valid_values(self) -> np.ndarray:
        return self.values[self.mask]

    @property
    def n_valid(self) -> int:
        return int(self.mask.sum())
