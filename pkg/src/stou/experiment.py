"""Monte Carlo estimator study: simulate replicates, fit each, tabulate.

Replicate r draws its noise from ``RngStream(master_seed, r)``, so rows do
not depend on execution order or on how many worker processes are used.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .core import DataError, GridSpec, ModelParams, OUError
from .inference import fit
from .io import write_table
from .levy import PARAM_NAMES, LevySeed, RngStream, make_seed, seed_params
from .simulate import simulate

METHODS = ("mm", "ls")


@dataclass(frozen=True)
class ExperimentConfig:
    params: ModelParams = ModelParams(1.0, 1.0)
    seed: LevySeed = field(default_factory=lambda: make_seed("gaussian", mu=0.2, tau=0.1))
    grid: GridSpec = GridSpec(0.0, 0.0, 0.05, 0.05, 201, 201)
    p: int = 300
    q: int = 300
    algorithm: str = "dg"
    methods: tuple = METHODS
    n_lags: int = 15
    replicates: int = 50
    master_seed: int = 20240101
    output: str | None = None

    def __post_init__(self):
        if int(self.replicates) != self.replicates or self.replicates < 1:
            raise DataError(f"replicates must be a positive integer, got {self.replicates}")
        if self.algorithm not in ("rg", "dg", "dg-full"):
            raise DataError(f"unknown algorithm {self.algorithm!r}")
        bad = [m for m in self.methods if m not in METHODS]
        if bad or not self.methods:
            raise DataError(f"methods must be a non-empty subset of {METHODS}, got {self.methods}")
        if not 0 <= int(self.master_seed) < 2**64:
            raise DataError("master_seed must fit in 64 bits")


def _kv_list(text: str) -> dict:
    out = {}
    for part in filter(None, (s.strip() for s in text.split(","))):
        if "=" not in part:
            raise DataError(f"expected key=value, got {part!r}")
        k, v = part.split("=", 1)
        out[k.strip()] = v.strip()
    return out


_INT_KEYS = {"nx", "nt", "p", "q", "n_lags", "replicates", "master_seed"}
_FLOAT_KEYS = {"lambda", "c", "dx", "dt", "x0", "t0"}
_STR_KEYS = {"basis", "basis_params", "algorithm", "methods", "output"}


def parse_config_text(text: str) -> ExperimentConfig:
    """Parse ``key = value`` lines (``#`` starts a comment) into a config.

    Recognised keys: replicates, lambda, c, basis, basis_params (k=v,...),
    nx, nt, dx, dt, x0, t0, p, q, algorithm, methods (comma list), n_lags,
    master_seed, output.  ``dx`` defaults to c*dt for diamond grids and to
    dt otherwise.
    """
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DataError(f"config line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lower().replace("-", "_")
        if key not in _INT_KEYS | _FLOAT_KEYS | _STR_KEYS:
            raise DataError(f"config line {lineno}: unknown key {key!r}")
        try:
            if key in _INT_KEYS:
                raw[key] = int(value)
            elif key in _FLOAT_KEYS:
                raw[key] = float(value)
            else:
                raw[key] = value
        except ValueError:
            raise DataError(f"config line {lineno}: bad value for {key}: {value!r}") from None

    base = ExperimentConfig()
    params = ModelParams(raw.get("lambda", base.params.lam), raw.get("c", base.params.c))
    if "basis" in raw or "basis_params" in raw:
        seed = make_seed(raw.get("basis", "gaussian"), **_kv_list(raw.get("basis_params", "")))
    else:
        seed = base.seed
    algorithm = raw.get("algorithm", base.algorithm).lower().replace("_", "-")
    dt = raw.get("dt", base.grid.dt)
    dx = raw.get("dx", params.c * dt if algorithm != "rg" else dt)
    grid = GridSpec(raw.get("x0", 0.0), raw.get("t0", 0.0), dx, dt,
                    raw.get("nx", base.grid.n), raw.get("nt", base.grid.m))
    methods = tuple(m.strip().lower() for m in raw.get("methods", ",".join(base.methods)).split(",") if m.strip())
    return ExperimentConfig(
        params=params, seed=seed, grid=grid,
        p=raw.get("p", base.p), q=raw.get("q", base.q),
        algorithm=algorithm, methods=methods,
        n_lags=raw.get("n_lags", base.n_lags),
        replicates=raw.get("replicates", base.replicates),
        master_seed=raw.get("master_seed", base.master_seed),
        output=raw.get("output"),
    )


def load_config(path) -> ExperimentConfig:
    return parse_config_text(Path(path).read_text(encoding="utf-8"))


def result_header(family: str) -> list:
    return ["replicate", "stream", "method", "lambda_hat", "c_hat",
            *PARAM_NAMES[family], "status"]


def run_replicate(config: ExperimentConfig, replicate: int) -> tuple[list, float]:
    """Rows for one replicate (one per method) and the elapsed wall time."""
    family = config.seed.family
    names = PARAM_NAMES[family]
    start = time.perf_counter()
    blank = {k: "" for k in names}
    rows = []
    try:
        rng = RngStream(config.master_seed, replicate)
        data = simulate(config.algorithm, config.params, config.seed, config.grid,
                        config.p, config.q, rng)
    except OUError as exc:
        for m in config.methods:
            rows.append({"replicate": replicate, "stream": replicate, "method": m.upper(),
                         "lambda_hat": "", "c_hat": "", **blank,
                         "status": f"simulate:{type(exc).__name__}"})
        return rows, time.perf_counter() - start
    for m in config.methods:
        row = {"replicate": replicate, "stream": replicate, "method": m.upper()}
        try:
            est = fit(data, m, config.n_lags, family)
        except OUError as exc:
            row.update(lambda_hat="", c_hat="", status=type(exc).__name__, **blank)
        else:
            row.update(lambda_hat=est.lambda_hat, c_hat=est.c_hat)
            if est.valid:
                row.update(seed_params(est.seed_hat), status="ok")
            else:
                row.update(blank, status="invalid:" + est.seed_hat.reason.replace(",", ";"))
        rows.append(row)
    return rows, time.perf_counter() - start


def _run_one(args):
    return run_replicate(*args)


def run_experiment(config: ExperimentConfig, jobs: int = 1):
    """Run all replicates; returns (rows, wall_times) in replicate order."""
    tasks = [(config, r) for r in range(config.replicates)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_one, tasks))
    else:
        results = [_run_one(t) for t in tasks]
    rows = [row for rs, _ in results for row in rs]
    times = [t for _, t in results]
    return rows, times


def summarise(rows: list, family: str) -> list:
    """Median, IQR and invalid count per (method, parameter)."""
    out = []
    methods = sorted({r["method"] for r in rows})
    for m in methods:
        sub = [r for r in rows if r["method"] == m]
        for name in ("lambda_hat", "c_hat", *PARAM_NAMES[family]):
            vals = np.array([r[name] for r in sub if r[name] != "" and math.isfinite(r[name])], dtype=float)
            invalid = len(sub) - vals.size
            if vals.size:
                q1, med, q3 = np.percentile(vals, [25, 50, 75])
                out.append([m, name, vals.size, invalid, med, q3 - q1])
            else:
                out.append([m, name, 0, invalid, "", ""])
    return out


SUMMARY_HEADER = ["method", "parameter", "n_valid", "n_invalid", "median", "iqr"]


def _sidecar(path: str, suffix: str) -> str:
    p = Path(path)
    return str(p.with_name(p.stem + suffix + (p.suffix or ".csv")))


def write_experiment(config: ExperimentConfig, rows, times, path=None, stream=None):
    """Write the estimates table; with a path, also ``*_summary`` and ``*_timing`` files.

    Wall times live only in the timing file so that the estimates and summary
    files are a pure function of the config.
    """
    family = config.seed.family
    header = result_header(family)
    write_table(rows, header, path, stream)
    if path is None or path == "-":
        return
    write_table(summarise(rows, family), SUMMARY_HEADER, _sidecar(path, "_summary"))
    write_table(([r, t] for r, t in enumerate(times)), ["replicate", "wall_seconds"],
                _sidecar(path, "_timing"))


def with_overrides(config: ExperimentConfig, **kw) -> ExperimentConfig:
    return replace(config, **{k: v for k, v in kw.items() if v is not None})
