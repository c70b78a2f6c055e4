"""Sparse reconstruction of dynamic inverse problems.

Thin wrapper over the C++ core. Arrays are NumPy; real-valued problems
return float64 and complex ones complex128.
"""

from ._core import (
    Config,
    ConfigError,
    DomainError,
    OverwriteError,
    Problem,
    SizeError,
    SolverError,
    admm,
    haar_analysis,
    haar_synthesis,
    ias,
    lsmr,
    nrmse,
    phantom,
    phantom_mask,
    reconstruct,
    soft_threshold,
    ssim,
    theta_update,
)

__all__ = [
    "Config",
    "ConfigError",
    "DomainError",
    "OverwriteError",
    "Problem",
    "SizeError",
    "SolverError",
    "admm",
    "haar_analysis",
    "haar_synthesis",
    "ias",
    "lsmr",
    "nrmse",
    "phantom",
    "phantom_mask",
    "reconstruct",
    "soft_threshold",
    "ssim",
    "theta_update",
]
