"""Predict a Gaussian field at unobserved sites from a sparse sample."""

import numpy as np

from stou import GridSpec, ModelParams, RngStream
from stou.levy import Gaussian
from stou.predict import SiteList, predict_gaussian
from stou.simulate import simulate_rg

params = ModelParams(1.0, 1.0)
seed = Gaussian(0.2, 0.1)
grid = GridSpec(0.0, 0.0, 0.1, 0.1, 41, 41)
field = simulate_rg(params, seed, grid, 150, 150, RngStream(3, 0))

rng = np.random.default_rng(3)
idx = rng.choice(grid.n * grid.m, size=40, replace=False)
i, j = np.unravel_index(idx, grid.shape)
obs = SiteList(np.column_stack([grid.x[i], grid.t[j]]), field.values[i, j])

errs = []
for a, b in rng.integers(0, 41, size=(10, 2)):
    pred = predict_gaussian(params, seed, obs, (grid.x[a], grid.t[b]))
    truth = field.values[a, b]
    errs.append((truth - pred.mean) / np.sqrt(max(pred.variance, 1e-300)))
    print(f"({grid.x[a]:.1f}, {grid.t[b]:.1f})  truth {truth:.4f}  pred {pred.mean:.4f} +- {np.sqrt(pred.variance):.4f}")
print("standardised errors:", np.round(errs, 2))
