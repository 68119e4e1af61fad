"""Long-format CSV reading and writing for gridded fields and result tables."""

from __future__ import annotations

import csv
import io as _io
import os

import numpy as np

from .core import DataError, FieldData, GridSpec

FIELD_HEADER = ["x", "t", "value"]
SPACING_RTOL = 1e-9


class ParseError(DataError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class NonUniformGrid(DataError):
    pass


def fmt(v) -> str:
    """17 significant digits: enough to round-trip any double."""
    if isinstance(v, (bool, np.bool_)):
        return str(v).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % v
    return str(v)


def _open_out(path):
    if path is None or path == "-":
        return None
    return open(path, "w", encoding="utf-8", newline="")


def write_table(rows, header, path=None, stream=None) -> str | None:
    """Write ``rows`` (sequences or dicts keyed by header) as CSV.

    Goes to ``path`` if given, else to ``stream``; with neither, the CSV text
    is returned.
    """
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        if isinstance(row, dict):
            row = [row.get(k, "") for k in header]
        w.writerow([fmt(v) for v in row])
    text = buf.getvalue()
    f = _open_out(path)
    if f is not None:
        with f:
            f.write(text)
        return None
    if stream is not None:
        stream.write(text)
        return None
    return text


def write_field_csv(field: FieldData, path=None, stream=None):
    """One ``x,t,value`` row per valid point, space-major order."""
    g = field.grid
    ii, jj = np.nonzero(field.mask)
    rows = zip(g.x[ii], g.t[jj], field.values[ii, jj])
    return write_table(rows, FIELD_HEADER, path, stream)


def read_xyz_csv(path_or_lines, header=FIELD_HEADER) -> np.ndarray:
    """Read a numeric CSV with the exact given header into an (N, 3) array."""
    if isinstance(path_or_lines, (str, os.PathLike)):
        with open(path_or_lines, encoding="utf-8", newline="") as f:
            lines = f.read().splitlines()
    else:
        lines = list(path_or_lines)
    reader = csv.reader(lines)
    try:
        first = next(reader)
    except StopIteration:
        raise ParseError(1, "empty file") from None
    if [h.strip() for h in first] != list(header):
        raise ParseError(1, f"header must be {','.join(header)}")
    out = []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise ParseError(lineno, f"expected {len(header)} fields, got {len(row)}")
        try:
            vals = [float(c) for c in row]
        except ValueError:
            raise ParseError(lineno, f"non-numeric field in {row!r}") from None
        if not all(np.isfinite(vals)):
            raise ParseError(lineno, "non-finite value")
        out.append(vals)
    if not out:
        raise ParseError(len(lines), "no data rows")
    return np.array(out)


def _axis(coords: np.ndarray, name: str):
    u = np.unique(coords)
    if len(u) == 1:
        return u, 1.0
    steps = np.diff(u)
    step = (u[-1] - u[0]) / (len(u) - 1)
    if np.max(np.abs(steps - step)) > SPACING_RTOL * step:
        raise NonUniformGrid(f"{name} coordinates are not uniformly spaced")
    return u, step


def read_field_csv(path) -> FieldData:
    """Rebuild a FieldData from ``x,t,value`` rows.

    The lattice is the span of the sorted unique coordinates; lattice points
    without a row are masked out.  A single distinct coordinate gives unit
    spacing on that axis.
    """
    data = read_xyz_csv(path)
    xs, dx = _axis(data[:, 0], "x")
    ts, dt = _axis(data[:, 1], "t")
    grid = GridSpec(float(xs[0]), float(ts[0]), float(dx), float(dt), len(xs), len(ts))
    i = np.searchsorted(xs, data[:, 0])
    j = np.searchsorted(ts, data[:, 1])
    values = np.zeros(grid.shape)
    mask = np.zeros(grid.shape, dtype=bool)
    for k, (a, b) in enumerate(zip(i, j)):
        if mask[a, b]:
            raise ParseError(k + 2, f"duplicate site ({data[k, 0]}, {data[k, 1]})")
        mask[a, b] = True
    values[i, j] = data[:, 2]
    return FieldData(grid, values, mask)
