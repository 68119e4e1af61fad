import csv
import io
import math

import numpy as np
import pytest

from stou.cli import main, sweep
from stou.core import GridSpec, ModelParams
from stou.inference import ls_fit
from stou.levy import Gaussian, RngStream
from stou.mse import mse_components
from stou.simulate import simulate_rg


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_acf_rows(capsys):
    code, out, _ = run(capsys, "acf", "--lambda", "1", "--c", "1", "--dx-max", "0", "--dt-max", "3", "--step", "1")
    r = rows(out)
    assert code == 0 and len(r) == 3
    for row in r:
        assert float(row["acf"]) == pytest.approx(math.exp(-float(row["dt"])), rel=1e-15)


def test_acf_piecewise(capsys):
    code, out, _ = run(capsys, "acf", "--lambda", "1", "--c1", "0.5", "--c2", "1", "--dx-max", "1", "--step", "1")
    assert code == 0 and float(rows(out)[0]["acf"]) == pytest.approx(0.23840, abs=1e-5)


def test_sweep_inclusive():
    assert sweep("3:15:0.5")[-1] == pytest.approx(15) and len(sweep("3:15:0.5")) == 25
    assert sweep("0.05") == [0.05]


def test_mse_rows_match_module(capsys):
    code, out, _ = run(capsys, "mse", "--alg", "rg", "--delta", "0.05", "--R", "3:15:0.5")
    r = rows(out)
    assert code == 0 and len(r) == 25
    for row in r:
        b2, var = mse_components("rg", ModelParams(1, 1), 0.2, 0.1, 0.05, float(row["R"]))
        assert float(row["mse"]) == b2 + var


def test_usage_and_data_errors(capsys, tmp_path):
    assert run(capsys, "acf", "--nonsense")[0] == 1
    assert run(capsys, "mse", "--delta", "0.05")[0] == 1
    code, _, err = run(capsys, "fit", "--in", str(tmp_path / "missing.csv"))
    assert code == 2 and len(err.strip().splitlines()) == 1
    code, _, _ = run(capsys, "mse", "--alg", "rg", "--delta", "0.05", "--R", "3.01")
    assert code == 2
    code, _, _ = run(capsys, "simulate", "--alg", "dg", "--nx", "4", "--nt", "5", "--p", "2", "--q", "2")
    assert code == 2


def test_numeric_failure_exit(capsys, tmp_path):
    p = tmp_path / "alt.csv"
    vals = np.tile([0.0, 1.0], (4, 5)) + np.arange(4)[:, None] * 0.01
    lines = ["x,t,value"] + [f"{i},{j},{float(vals[i, j])!r}" for i in range(4) for j in range(10)]
    p.write_text("\n".join(lines) + "\n")
    assert run(capsys, "fit", "--in", str(p))[0] == 3


def _simulate_then_fit(capsys, tmp_path):
    field = tmp_path / "rg.csv"
    code, _, _ = run(capsys, "simulate", "--alg", "rg", "--nx", "201", "--nt", "201", "--dt", "0.05",
                     "--p", "300", "--q", "300", "--seed", "0", "--out", str(field))
    assert code == 0
    code, out, _ = run(capsys, "fit", "--method", "ls", "--lags", "15", "--in", str(field))
    r = rows(out)[0]
    assert code == 0 and r["status"] == "ok"
    lib = ls_fit(simulate_rg(ModelParams(1, 1), Gaussian(0.2, 0.1), GridSpec(0, 0, 0.05, 0.05, 201, 201),
                             300, 300, RngStream(0, 0)), 15)
    assert float(r["lambda_hat"]) == lib.lambda_hat and float(r["c_hat"]) == lib.c_hat
    return float(r["lambda_hat"])


def test_simulate_then_fit(capsys, tmp_path):
    assert _simulate_then_fit(capsys, tmp_path) > 0


@pytest.mark.slow
@pytest.mark.xfail(strict=False, reason="single-dataset LS lambda has ~15% spread and upward "
                   "finite-domain bias on [0,10]^2; roughly 4 in 10 seeds land in [0.9, 1.15]")
def test_simulate_then_fit_example_range(capsys, tmp_path):
    lam = _simulate_then_fit(capsys, tmp_path)
    assert 0.9 <= lam <= 1.15


def test_predict(capsys, tmp_path):
    obs = tmp_path / "obs.csv"
    obs.write_text("x,t,value\n0,0,0.41\n1,0.5,0.38\n")
    code, out, _ = run(capsys, "predict", "--obs", str(obs), "--at", "0,0", "--at", "3,3")
    r = rows(out)
    assert code == 0 and len(r) == 2
    assert float(r[0]["mean"]) == pytest.approx(0.41, abs=1e-10)
    assert float(r[1]["variance"]) <= 0.005


def test_simulate_stdout_dg(capsys):
    code, out, _ = run(capsys, "simulate", "--alg", "dg", "--nx", "5", "--nt", "5", "--p", "4", "--q", "4",
                       "--basis", "gamma", "--basis-params", "alpha=4.3,beta=21.5")
    assert code == 0 and len(rows(out)) == 13
