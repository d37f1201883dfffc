"""Robust fused-lasso penalized Huber regression via multi-block ADMM."""

__version__ = "0.1.0"

from .core import (
    Coefficients,
    IterateState,
    Loss,
    ProblemData,
    SolverConfig,
    apply_D,
    apply_Dt,
    huber_deriv,
    huber_loss,
    huber_scalar,
    objective,
)
from .metrics import estimation_error, kurtosis, mae, residual_std
from .prox import huber_prox, prox_conjugate_l1, soft_threshold
from .simulate import NoiseKind, SyntheticSpec, generate, make_beta_star
from .solver import (
    KktResiduals,
    SolveResult,
    SolveStatus,
    kkt_residuals,
    solve,
    solve_least_squares,
)
from .tune import TuneGrid, grid_search, tau_grid

__all__ = [
    "Coefficients",
    "IterateState",
    "KktResiduals",
    "Loss",
    "NoiseKind",
    "ProblemData",
    "SolveResult",
    "SolveStatus",
    "SolverConfig",
    "SyntheticSpec",
    "TuneGrid",
    "apply_D",
    "apply_Dt",
    "estimation_error",
    "generate",
    "grid_search",
    "huber_deriv",
    "huber_loss",
    "huber_prox",
    "huber_scalar",
    "kkt_residuals",
    "kurtosis",
    "mae",
    "make_beta_star",
    "objective",
    "prox_conjugate_l1",
    "residual_std",
    "soft_threshold",
    "solve",
    "solve_least_squares",
    "tau_grid",
]
