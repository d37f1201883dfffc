"""Domain types, the Huber loss, and the first-difference operator."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

# upper limit for the ADMM dual step length
MAX_STEP_LENGTH = (1.0 + math.sqrt(5.0)) / 2.0


class Loss(str, Enum):
    HUBER = "huber"
    SQUARED = "squared"


def _as_float_vector(v, name):
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a 1-D vector, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class ProblemData:
    """A regression instance: design matrix X (n x p) and response y (n)."""

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        y = _as_float_vector(self.y, "y")
        if X.ndim != 2:
            raise ValueError(f"X must be a 2-D matrix, got shape {X.shape}")
        n, p = X.shape
        if n < 1:
            raise ValueError("X must have at least one row")
        if p < 2:
            raise ValueError("X must have at least two columns (the difference operator needs p >= 2)")
        if y.shape[0] != n:
            raise ValueError(f"y has length {y.shape[0]}, expected {n}")
        if not np.all(np.isfinite(X)):
            raise ValueError("X contains non-finite entries")
        if not np.all(np.isfinite(y)):
            raise ValueError("y contains non-finite entries")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]


# Coefficient vectors are plain 1-D float arrays of length p.
Coefficients = np.ndarray


@dataclass(frozen=True)
class SolverConfig:
    """Parameters of the penalized Huber regression and its ADMM solver."""

    tau: float = 1.345
    lambda1: float = 0.0
    lambda2: float = 0.0
    sigma: float = 0.1
    pi: float = 1.0
    tol: float = 1e-3
    max_iter: int = 2000
    loss: Loss = Loss.HUBER

    def __post_init__(self):
        object.__setattr__(self, "loss", Loss(self.loss))
        if self.loss is Loss.HUBER and not (np.isfinite(self.tau) and self.tau > 0):
            raise ValueError(f"tau must be positive for the huber loss, got {self.tau}")
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise ValueError("lambda1 and lambda2 must be nonnegative")
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not (0 < self.pi < MAX_STEP_LENGTH):
            raise ValueError(f"pi must lie in (0, (1+sqrt(5))/2), got {self.pi}")
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be a positive integer, got {self.max_iter}")


@dataclass
class IterateState:
    """Primal blocks (z, alpha, gamma, beta) and multipliers (mu_z, mu_alpha, mu_gamma)."""

    z: np.ndarray
    alpha: np.ndarray
    gamma: np.ndarray
    beta: np.ndarray
    mu_z: np.ndarray
    mu_alpha: np.ndarray
    mu_gamma: np.ndarray

    def __post_init__(self):
        n = len(self.z)
        p = len(self.beta)
        if len(self.alpha) != p or len(self.mu_alpha) != p:
            raise ValueError("alpha and mu_alpha must have length p")
        if len(self.gamma) != p - 1 or len(self.mu_gamma) != p - 1:
            raise ValueError("gamma and mu_gamma must have length p - 1")
        if len(self.mu_z) != n:
            raise ValueError("mu_z must have length n")

    @classmethod
    def zeros(cls, n: int, p: int) -> "IterateState":
        return cls(
            z=np.zeros(n),
            alpha=np.zeros(p),
            gamma=np.zeros(p - 1),
            beta=np.zeros(p),
            mu_z=np.zeros(n),
            mu_alpha=np.zeros(p),
            mu_gamma=np.zeros(p - 1),
        )

    def copy(self) -> "IterateState":
        return IterateState(
            z=self.z.copy(),
            alpha=self.alpha.copy(),
            gamma=self.gamma.copy(),
            beta=self.beta.copy(),
            mu_z=self.mu_z.copy(),
            mu_alpha=self.mu_alpha.copy(),
            mu_gamma=self.mu_gamma.copy(),
        )


def huber_scalar(x: float, tau: float) -> float:
    """Huber function: x^2/2 inside [-tau, tau], tau*|x| - tau^2/2 outside."""
    if not np.isfinite(x):
        raise ValueError(f"x must be finite, got {x}")
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    ax = abs(x)
    if ax <= tau:
        return 0.5 * x * x
    return tau * ax - 0.5 * tau * tau


def huber_vec(x: np.ndarray, tau: float) -> np.ndarray:
    """Elementwise Huber function."""
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    return np.where(ax <= tau, 0.5 * x * x, tau * ax - 0.5 * tau * tau)


def huber_loss(residuals, tau: float) -> float:
    """Mean of the componentwise Huber function, (1/n) sum_i h_tau(r_i)."""
    r = _as_float_vector(residuals, "residuals")
    if r.size == 0:
        raise ValueError("residuals must be nonempty")
    if not np.all(np.isfinite(r)):
        raise ValueError("residuals contain non-finite entries")
    return float(np.mean(huber_vec(r, tau)))


def huber_deriv(x, tau: float):
    """Derivative of the Huber function: x clipped to [-tau, tau]."""
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("x must be finite")
    out = np.clip(x, -tau, tau)
    return float(out) if out.ndim == 0 else out


def apply_D(beta) -> np.ndarray:
    """First differences: (beta_2 - beta_1, ..., beta_p - beta_{p-1})."""
    b = _as_float_vector(beta, "beta")
    if b.shape[0] < 2:
        raise ValueError("apply_D requires a vector of length >= 2")
    return b[1:] - b[:-1]


def apply_Dt(v) -> np.ndarray:
    """Adjoint of apply_D: <D beta, v> == <beta, D^T v> for all inputs."""
    w = _as_float_vector(v, "v")
    if w.shape[0] < 1:
        raise ValueError("apply_Dt requires a vector of length >= 1")
    out = np.zeros(w.shape[0] + 1)
    out[:-1] -= w
    out[1:] += w
    return out


def objective(data: ProblemData, beta, cfg: SolverConfig) -> float:
    """Penalized loss: L_tau(y - X beta) + lambda1*||beta||_1 + lambda2*||D beta||_1."""
    b = _as_float_vector(beta, "beta")
    if b.shape[0] != data.p:
        raise ValueError(f"beta has length {b.shape[0]}, expected {data.p}")
    r = data.y - data.X @ b
    if cfg.loss is Loss.HUBER:
        fit = huber_loss(r, cfg.tau)
    else:
        fit = 0.5 * float(r @ r) / data.n
    return fit + cfg.lambda1 * float(np.sum(np.abs(b))) + cfg.lambda2 * float(
        np.sum(np.abs(apply_D(b)))
    )
