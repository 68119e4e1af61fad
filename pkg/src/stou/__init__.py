"""Canonical spatio-temporal Ornstein-Uhlenbeck fields driven by Levy bases.

Simulation on rectangular and diamond grids, closed-form second-order
structure, simulation-error analysis, moment-based inference and Gaussian
prediction.
"""

from .core import (
    DataError,
    FieldData,
    GridSpec,
    InvalidGrid,
    InvalidParams,
    ModelParams,
    NumericError,
    OUError,
)
from .levy import (
    NIG,
    GammaSeed,
    Gaussian,
    InverseGaussian,
    RngStream,
    make_seed,
    sample_increment,
    seed_cumulants,
    solve_seed_from_cumulants,
)
from .theory import acf_st, cumulants_of_field, variogram_s, variogram_t
from .simulate import simulate, simulate_dg, simulate_dg_full, simulate_rg
from .mse import mse_dg, mse_rg
from .inference import empirical_variogram, k_statistics, ls_fit, mm_fit
from .predict import SiteList, predict_gaussian

__version__ = "0.1.0"
