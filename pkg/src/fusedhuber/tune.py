"""Parameter grids and validation-based selection for (tau, lambda1, lambda2)."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Loss, ProblemData, SolverConfig
from .metrics import estimation_error, mae
from .solver import SolveStatus, solve

# traditional fixed choice (95% efficiency at the standard normal)
TAU_DEFAULT = 1.345

_DEFAULT_LAMBDAS = tuple(np.logspace(-3, 1, 9))


class TuningError(RuntimeError):
    pass


@dataclass(frozen=True)
class TuneGrid:
    taus: tuple = (TAU_DEFAULT,)
    lambda1s: tuple = _DEFAULT_LAMBDAS
    lambda2s: tuple = _DEFAULT_LAMBDAS

    def __post_init__(self):
        for name in ("taus", "lambda1s", "lambda2s"):
            vals = tuple(float(v) for v in getattr(self, name))
            if len(vals) == 0:
                raise ValueError(f"{name} must be nonempty")
            if not all(np.isfinite(v) for v in vals):
                raise ValueError(f"{name} contains non-finite values")
            object.__setattr__(self, name, vals)
        if any(t <= 0 for t in self.taus):
            raise ValueError("taus must be positive")
        if any(v < 0 for v in self.lambda1s + self.lambda2s):
            raise ValueError("lambda grids must be nonnegative")


def tau_grid(n: int, p: int) -> list[float]:
    """The adaptive grid a * sqrt(n / ln p) for a = 0.4, 0.45, ..., 1.5 (23 values)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if p < 2:
        raise ValueError("p must be >= 2 (needs ln p > 0)")
    scale = float(np.sqrt(n / np.log(p)))
    a_values = np.round(np.arange(0.40, 1.5001, 0.05), 10)
    return [float(a) * scale for a in a_values]


def grid_search(
    train: ProblemData,
    validation: ProblemData,
    grid: TuneGrid,
    loss: Loss = Loss.HUBER,
    *,
    beta_star=None,
    sigma: float = 0.1,
    pi: float = 1.0,
    tol: float = 1e-3,
    max_iter: int = 2000,
):
    """Fit every (tau, lambda1, lambda2) on train and score MAE on validation.

    Returns (best SolverConfig, score table).  The table has one row per
    combination, in deterministic grid order, with keys tau, lambda1,
    lambda2, mae, status, iterations (plus estimation_error when the truth
    is supplied).  Selection minimizes validation MAE; exact ties prefer
    larger (lambda1, lambda2) lexicographically, then smaller tau.  Failed
    solves are recorded with mae = nan and excluded from the argmin.
    """
    loss = Loss(loss)
    table = []
    best_key = None
    best_cfg = None
    for tau in grid.taus:
        for lam1 in grid.lambda1s:
            for lam2 in grid.lambda2s:
                cfg = SolverConfig(
                    tau=tau, lambda1=lam1, lambda2=lam2,
                    sigma=sigma, pi=pi, tol=tol, max_iter=max_iter, loss=loss,
                )
                row = {"tau": tau, "lambda1": lam1, "lambda2": lam2}
                try:
                    result = solve(train, cfg)
                    row["mae"] = mae(validation, result.beta)
                    row["status"] = result.status.value
                    row["iterations"] = result.iterations
                    if beta_star is not None:
                        row["estimation_error"] = estimation_error(result.beta, beta_star)
                except Exception as exc:
                    row["mae"] = float("nan")
                    row["status"] = f"error: {exc}"
                    row["iterations"] = 0
                    table.append(row)
                    continue
                table.append(row)
                key = (row["mae"], -lam1, -lam2, tau)
                if np.isfinite(row["mae"]) and (best_key is None or key < best_key):
                    best_key = key
                    best_cfg = cfg
    if best_cfg is None:
        raise TuningError("every grid point failed to solve")
    return best_cfg, table
