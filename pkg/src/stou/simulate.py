"""Discrete-convolution simulation on rectangular and diamond grids.

The field value at a lattice point is approximated by

    Y(x_I, t_J) ~ sum_{j=0..p} sum_{i=-q..q} h(u_i, w_j) W[I + i, J + j]

where W is iid Levy noise on an extended lattice of (n + 2q) x (m + p)
cells.  Noise columns run backwards in time (column J + j lies j steps in the
past of output column J); results are flipped at the end so that output
columns run forwards in time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import correlate, fftconvolve

from .core import DataError, FieldData, GridSpec, ModelParams, checkerboard, validate_grid
from .levy import LevySeed, sample_increment

FFT_MIN_LENGTH = 256
DIRECT_MAX_WORK = 5000  # measured crossover of scipy direct vs FFT
_TIE_RTOL = 1e-12


class OddTruncation(DataError):
    pass


class EvenExtent(DataError):
    pass


class GridMismatch(DataError):
    pass


class LengthMismatch(DataError):
    pass


@dataclass(frozen=True)
class KernelMatrix:
    """Truncated kernel weights; row k holds u = (k - q) du, column j holds w = j dw."""

    du: float
    dw: float
    p: int
    q: int
    entries: np.ndarray
    layout: str  # "RG" or "DG"

    @property
    def u(self) -> np.ndarray:
        return np.arange(-self.q, self.q + 1) * self.du

    @property
    def w(self) -> np.ndarray:
        return np.arange(self.p + 1) * self.dw


def _check_truncation(p, q):
    if int(p) != p or int(q) != q or p < 0 or q < 0:
        raise DataError(f"truncation counts must be non-negative integers, got p={p}, q={q}")


def build_kernel_rg(params: ModelParams, du: float, dw: float, p: int, q: int) -> KernelMatrix:
    _check_truncation(p, q)
    u = np.abs(np.arange(-q, q + 1) * du)[:, None]
    w = (np.arange(p + 1) * dw)[None, :]
    inside = u <= params.c * w * (1 + _TIE_RTOL)
    entries = np.where(inside, np.exp(-params.lam * w), 0.0)
    entries.setflags(write=False)
    return KernelMatrix(du, dw, int(p), int(q), entries, "RG")


def build_kernel_dg(params: ModelParams, dt: float, p: int, q: int) -> KernelMatrix:
    """Diamond-grid kernel: spatial step c*dt, zeros where i + j is odd."""
    _check_truncation(p, q)
    if p % 2 or q % 2:
        raise OddTruncation(f"diamond grid needs even p and q, got p={p}, q={q}")
    i = np.arange(-q, q + 1)[:, None]
    j = np.arange(p + 1)[None, :]
    # |i| du <= c j dt reduces to |i| <= j when du = c dt
    keep = (np.abs(i) <= j) & ((i + j) % 2 == 0)
    entries = np.where(keep, np.exp(-params.lam * j * dt), 0.0)
    entries.setflags(write=False)
    return KernelMatrix(params.c * dt, dt, int(p), int(q), entries, "DG")


def convolve_row(w_row, h_row, m: int) -> np.ndarray:
    """Sliding sum out[J] = sum_j h_row[j] * w_row[J + j] for J = 0..m-1."""
    w_row = np.asarray(w_row, dtype=float)
    h_row = np.asarray(h_row, dtype=float)
    p = h_row.size - 1
    if h_row.size < 1 or w_row.size != m + p:
        raise LengthMismatch(
            f"noise row has length {w_row.size}, expected m + p = {m + p}"
        )
    if w_row.size >= FFT_MIN_LENGTH:
        return fftconvolve(w_row, h_row[::-1], mode="valid")
    return np.correlate(w_row, h_row, mode="valid")


def convolve_field(noise: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Valid-mode 2-D sliding sum of ``kernel`` over ``noise``.

    Equal to summing :func:`convolve_row` over kernel rows.  The whole lattice
    goes through one scipy correlation: direct summation while the
    multiply-add count is small, FFT beyond that.
    """
    n = noise.shape[0] - kernel.shape[0] + 1
    m = noise.shape[1] - kernel.shape[1] + 1
    if n < 1 or m < 1:
        raise LengthMismatch("noise lattice smaller than kernel")
    work = n * m * np.count_nonzero(kernel)
    method = "direct" if work < DIRECT_MAX_WORK else "fft"
    return correlate(noise, kernel, mode="valid", method=method)


def _check_dg(params: ModelParams, grid: GridSpec, p: int, q: int):
    validate_grid(grid)
    _check_truncation(p, q)
    if p % 2 or q % 2:
        raise OddTruncation(f"diamond grid needs even p and q, got p={p}, q={q}")
    if grid.n % 2 == 0 or grid.m % 2 == 0:
        raise EvenExtent(f"diamond grid needs odd n and m, got n={grid.n}, m={grid.m}")
    if abs(grid.dx - params.c * grid.dt) > 1e-12 * params.c * grid.dt:
        raise GridMismatch(f"diamond grid needs dx = c*dt, got dx={grid.dx}, c*dt={params.c * grid.dt}")


def noise_lattice(alg: str, params: ModelParams, seed: LevySeed, grid: GridSpec,
                  p: int, q: int, rng) -> np.ndarray:
    """Draw the extended (n + 2q) x (m + p) noise lattice for ``alg`` in {"rg", "dg"}.

    Draws are taken in row-major order from ``rng``.  On the diamond grid only
    cells with even 1-based index sum are sampled (area 2 c dt^2); the rest
    are exactly zero.
    """
    shape = (grid.n + 2 * q, grid.m + p)
    alg = alg.lower()
    if alg == "rg":
        return sample_increment(seed, grid.dx * grid.dt, rng, shape)
    if alg == "dg":
        live = checkerboard(*shape)
        noise = np.zeros(shape)
        noise[live] = sample_increment(seed, 2 * params.c * grid.dt**2, rng, int(live.sum()))
        return noise
    raise ValueError(f"unknown lattice type {alg!r}")


def _assemble(kernel: KernelMatrix, noise: np.ndarray) -> np.ndarray:
    # column 0 of the convolution is the latest time; flip to ascending time
    return convolve_field(noise, kernel.entries)[:, ::-1]


def simulate_rg(params: ModelParams, seed: LevySeed, grid: GridSpec, p: int, q: int,
                rng) -> FieldData:
    """Rectangular-grid simulation with kernel steps du = grid.dx, dw = grid.dt."""
    validate_grid(grid)
    kernel = build_kernel_rg(params, grid.dx, grid.dt, p, q)
    noise = noise_lattice("rg", params, seed, grid, p, q, rng)
    return FieldData(grid, _assemble(kernel, noise))


def simulate_dg(params: ModelParams, seed: LevySeed, grid: GridSpec, p: int, q: int,
                rng) -> FieldData:
    """Diamond-grid simulation; values exist only where I + J is even (1-based)."""
    _check_dg(params, grid, p, q)
    kernel = build_kernel_dg(params, grid.dt, p, q)
    noise = noise_lattice("dg", params, seed, grid, p, q, rng)
    mask = checkerboard(grid.n, grid.m)
    return FieldData(grid, _assemble(kernel, noise), mask)


def refined_grid(grid: GridSpec) -> GridSpec:
    """Half-spacing lattice whose even-indexed points coincide with ``grid``."""
    return GridSpec(grid.x0, grid.t0, grid.dx / 2, grid.dt / 2, 2 * grid.n - 1, 2 * grid.m - 1)


def simulate_dg_full(params: ModelParams, seed: LevySeed, grid: GridSpec, p: int, q: int,
                     rng) -> FieldData:
    """Complete field on ``grid`` from a diamond grid of half the spacing.

    ``p`` and ``q`` are truncation counts on the refined lattice.  Every
    second row and column, starting from the first, is kept; all of those
    points are valid diamond-grid points.
    """
    validate_grid(grid)
    fine = simulate_dg(params, seed, refined_grid(grid), p, q, rng)
    return FieldData(grid, fine.values[::2, ::2])


SIMULATORS = {"rg": simulate_rg, "dg": simulate_dg, "dg-full": simulate_dg_full}


def simulate(alg: str, params, seed, grid, p, q, rng) -> FieldData:
    key = alg.lower().replace("_", "-")
    if key not in SIMULATORS:
        raise DataError(f"unknown algorithm {alg!r}; expected rg, dg or dg-full")
    return SIMULATORS[key](params, seed, grid, p, q, rng)
