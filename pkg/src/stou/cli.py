"""Command-line entry point: ``stou <subcommand> ...``.

Every subcommand writes CSV to ``--out`` or standard output.  Exit codes:
0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import experiment as exp
from .core import DataError, GridSpec, ModelParams, NumericError, OUError
from .inference import fit
from .io import read_field_csv, read_xyz_csv, write_field_csv, write_table
from .levy import PARAM_NAMES, RngStream, make_seed, seed_params
from .mse import mse_components
from .predict import SiteList, predict_gaussian
from .simulate import simulate
from .theory import acf_spatial_piecewise, acf_st

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _kv(text):
    try:
        return exp._kv_list(text)
    except DataError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _pair(text):
    try:
        x, t = (float(s) for s in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,t, got {text!r}") from None
    return x, t


def sweep(text: str) -> list:
    """``v`` or inclusive ``start:stop:step``."""
    parts = text.split(":")
    try:
        nums = [float(s) for s in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number or sweep {text!r}") from None
    if len(nums) == 1:
        return nums
    if len(nums) != 3 or not nums[2] > 0 or nums[1] < nums[0]:
        raise argparse.ArgumentTypeError(f"sweep must be start:stop:step with step > 0, got {text!r}")
    start, stop, step = nums
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [start + k * step for k in range(count)]


def _grid_axis(limit, step):
    count = int(np.floor(limit / step + 1e-9)) + 1
    return [k * step for k in range(count)]


def cmd_simulate(a):
    params = ModelParams(a.lam, a.c)
    seed = make_seed(a.basis, **a.basis_params)
    dx = a.dx if a.dx is not None else (a.c * a.dt if a.alg != "rg" else a.dt)
    grid = GridSpec(0.0, 0.0, dx, a.dt, a.nx, a.nt)
    field = simulate(a.alg, params, seed, grid, a.p, a.q, RngStream(a.seed, a.stream))
    write_field_csv(field, a.out, sys.stdout)


def cmd_fit(a):
    field = read_field_csv(a.input)
    est = fit(field, a.method, a.lags, a.basis)
    names = PARAM_NAMES[a.basis]
    row = {"method": est.method, "lags_used": est.lags_used,
           "lambda_hat": est.lambda_hat, "c_hat": est.c_hat}
    if est.valid:
        row.update(seed_params(est.seed_hat), status="ok")
    else:
        row["status"] = "invalid:" + est.seed_hat.reason.replace(",", ";")
    write_table([row], ["method", "lags_used", "lambda_hat", "c_hat", *names, "status"],
                a.out, sys.stdout)


def cmd_acf(a):
    if (a.c1 is None) != (a.c2 is None):
        raise UsageError("acf: --c1 and --c2 must be given together")
    if a.dx_max < 0 or a.dt_max < 0 or not a.step > 0:
        raise UsageError("acf: need --dx-max, --dt-max >= 0 and --step > 0")
    rows = []
    if a.c1 is not None:
        for dx in _grid_axis(a.dx_max, a.step)[1:]:
            rows.append([dx, 0.0, acf_spatial_piecewise(a.lam, a.c1, a.c2, dx)])
    else:
        params = ModelParams(a.lam, a.c)
        for dx in _grid_axis(a.dx_max, a.step):
            for dt in _grid_axis(a.dt_max, a.step):
                if dx == 0 and dt == 0:
                    continue
                rows.append([dx, dt, acf_st(params, dx, dt)])
    write_table(rows, ["dx", "dt", "acf"], a.out, sys.stdout)


def cmd_mse(a):
    params = ModelParams(a.lam, 1.0)
    algs = ["rg", "dg"] if a.alg == "both" else [a.alg]
    rows = []
    for alg in algs:
        for d in a.delta:
            for R in a.R:
                b2, var = mse_components(alg, params, a.mu, a.tau, d, R)
                rows.append([alg, d, R, b2, var, b2 + var])
    write_table(rows, ["alg", "delta", "R", "bias2", "variance", "mse"], a.out, sys.stdout)


def cmd_predict(a):
    data = read_xyz_csv(a.obs)
    obs = SiteList(data[:, :2], data[:, 2])
    params = ModelParams(a.lam, a.c)
    seed = make_seed("gaussian", mu=a.mu, tau=a.tau)
    rows = []
    for x, t in a.at:
        pred = predict_gaussian(params, seed, obs, (x, t), nugget=a.nugget)
        rows.append([x, t, pred.mean, pred.variance, pred.nugget_used])
    write_table(rows, ["x", "t", "mean", "variance", "nugget"], a.out, sys.stdout)


def cmd_experiment(a):
    config = exp.load_config(a.config)
    config = exp.with_overrides(config, replicates=a.replicates, output=a.out)
    rows, times = exp.run_experiment(config, jobs=a.jobs)
    exp.write_experiment(config, rows, times, config.output, sys.stdout)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="stou", description="Spatio-temporal OU field toolkit.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", help="simulate a field on a grid")
    s.add_argument("--alg", choices=["rg", "dg", "dg-full"], default="dg")
    s.add_argument("--lambda", dest="lam", type=float, default=1.0)
    s.add_argument("--c", type=float, default=1.0)
    s.add_argument("--basis", choices=list(PARAM_NAMES), default="gaussian")
    s.add_argument("--basis-params", type=_kv, default={"mu": "0.2", "tau": "0.1"},
                   help="family parameters as k=v,...")
    s.add_argument("--nx", type=int, default=201)
    s.add_argument("--nt", type=int, default=201)
    s.add_argument("--dt", type=float, default=0.05)
    s.add_argument("--dx", type=float, default=None, help="defaults to c*dt (dg) or dt (rg)")
    s.add_argument("--p", type=int, default=300)
    s.add_argument("--q", type=int, default=300)
    s.add_argument("--seed", type=int, default=0, help="master seed")
    s.add_argument("--stream", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_simulate)

    f = sub.add_parser("fit", help="estimate parameters from a field CSV")
    f.add_argument("--method", choices=["mm", "ls"], default="mm")
    f.add_argument("--lags", type=int, default=15)
    f.add_argument("--basis", choices=list(PARAM_NAMES), default="gaussian")
    f.add_argument("--in", dest="input", required=True)
    f.add_argument("--out")
    f.set_defaults(func=cmd_fit)

    c = sub.add_parser("acf", help="tabulate the theoretical autocorrelation")
    c.add_argument("--lambda", dest="lam", type=float, default=1.0)
    c.add_argument("--c", type=float, default=1.0)
    c.add_argument("--c1", type=float)
    c.add_argument("--c2", type=float)
    c.add_argument("--dx-max", type=float, default=0.0)
    c.add_argument("--dt-max", type=float, default=0.0)
    c.add_argument("--step", type=float, default=1.0)
    c.add_argument("--out")
    c.set_defaults(func=cmd_acf)

    m = sub.add_parser("mse", help="simulation mean-squared error (c = 1)")
    m.add_argument("--alg", choices=["rg", "dg", "both"], default="both")
    m.add_argument("--mu", type=float, default=0.2)
    m.add_argument("--tau", type=float, default=0.1)
    m.add_argument("--delta", type=sweep, required=True, help="value or start:stop:step")
    m.add_argument("--R", type=sweep, required=True, help="value or start:stop:step")
    m.add_argument("--lambda", dest="lam", type=float, default=1.0)
    m.add_argument("--out")
    m.set_defaults(func=cmd_mse)

    r = sub.add_parser("predict", help="Gaussian conditional prediction")
    r.add_argument("--obs", required=True, help="CSV with header x,t,value")
    r.add_argument("--lambda", dest="lam", type=float, default=1.0)
    r.add_argument("--c", type=float, default=1.0)
    r.add_argument("--mu", type=float, default=0.2)
    r.add_argument("--tau", type=float, default=0.1)
    r.add_argument("--at", type=_pair, action="append", required=True, help="x,t (repeatable)")
    r.add_argument("--nugget", type=float, default=0.0)
    r.add_argument("--out")
    r.set_defaults(func=cmd_predict)

    e = sub.add_parser("experiment", help="run a Monte Carlo estimator study")
    e.add_argument("--config", required=True)
    e.add_argument("--jobs", type=int, default=1)
    e.add_argument("--replicates", type=int)
    e.add_argument("--out", help="overrides the config's output key")
    e.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.func(args)
    except UsageError as e:
        print(str(e).splitlines()[0], file=sys.stderr)
        return EXIT_USAGE
    except (DataError, FileNotFoundError, IsADirectoryError, PermissionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    except NumericError as e:
        print(f"numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except OUError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
