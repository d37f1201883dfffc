"""Synthetic benchmark data: AR(1) Gaussian designs, a piecewise-constant
sparse truth, and three noise laws (gaussian / student-t / lognormal).

All generators are pure functions of their seed; numpy's PCG64 stream
(np.random.default_rng) is pinned as the generator so outputs are
reproducible bitwise across runs.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import ProblemData

BETA_HEAD = np.array([1, 1, 1, 1, 1, 1, 2, 1.5, 1.5, 1.5, 1.5])


class NoiseKind(str, Enum):
    GAUSSIAN = "gaussian"
    STUDENT_T = "student_t"
    LOGNORMAL = "lognormal"


@dataclass(frozen=True)
class SyntheticSpec:
    n: int = 100
    n_test: int = 100
    p: int = 50
    rho: float = 0.5
    noise: NoiseKind = NoiseKind.GAUSSIAN
    seed: int = 0
    gaussian_sd: float = 0.05
    t_df: float = 1.5
    lognormal_sd: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "noise", NoiseKind(self.noise))
        if self.n < 1 or self.n_test < 0:
            raise ValueError("n must be >= 1 and n_test >= 0")
        if self.p < 12:
            raise ValueError(f"p must be >= 12 so the full truth pattern fits, got {self.p}")
        if not (0 <= self.rho < 1):
            raise ValueError(f"rho must lie in [0, 1), got {self.rho}")


def make_beta_star(p: int) -> np.ndarray:
    """Truth vector: (1,1,1,1,1,1, 2, 1.5,1.5,1.5,1.5) padded with p-11 zeros."""
    if p < 12:
        raise ValueError(f"p must be >= 12, got {p}")
    beta = np.zeros(p)
    beta[: len(BETA_HEAD)] = BETA_HEAD
    return beta


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def sample_design(n: int, p: int, rho: float, seed) -> np.ndarray:
    """Rows i.i.d. N(0, Sigma) with Sigma_ij = rho^|i-j| via the AR(1) recursion."""
    if not (0 <= rho < 1):
        raise ValueError(f"rho must lie in [0, 1), got {rho}")
    rng = _rng(seed)
    e = rng.standard_normal((n, p))
    X = np.empty((n, p))
    X[:, 0] = e[:, 0]
    scale = np.sqrt(1.0 - rho * rho)
    for j in range(1, p):
        X[:, j] = rho * X[:, j - 1] + scale * e[:, j]
    return X


def sample_noise(kind, n: int, seed, *, sd: float = 0.05, df: float = 1.5, lognormal_sd: float = 2.0) -> np.ndarray:
    """i.i.d. draws: N(0, sd^2), t(df) as normal/sqrt(chi2(df)/df), or exp(N(0, lognormal_sd^2))."""
    kind = NoiseKind(kind)
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = _rng(seed)
    if kind is NoiseKind.GAUSSIAN:
        return sd * rng.standard_normal(n)
    if kind is NoiseKind.STUDENT_T:
        g = rng.standard_normal(n)
        chi2 = rng.chisquare(df, size=n)
        return g / np.sqrt(chi2 / df)
    return np.exp(lognormal_sd * rng.standard_normal(n))


def generate(spec: SyntheticSpec):
    """Train/test ProblemData with independent designs and noise, plus the truth.

    Returns (train, test, beta_star); test is None when n_test = 0.
    """
    beta_star = make_beta_star(spec.p)
    streams = np.random.SeedSequence(spec.seed).spawn(4)
    kwargs = dict(sd=spec.gaussian_sd, df=spec.t_df, lognormal_sd=spec.lognormal_sd)

    X_train = sample_design(spec.n, spec.p, spec.rho, np.random.default_rng(streams[0]))
    eps_train = sample_noise(spec.noise, spec.n, np.random.default_rng(streams[1]), **kwargs)
    train = ProblemData(X=X_train, y=X_train @ beta_star + eps_train)

    test = None
    if spec.n_test > 0:
        X_test = sample_design(spec.n_test, spec.p, spec.rho, np.random.default_rng(streams[2]))
        eps_test = sample_noise(spec.noise, spec.n_test, np.random.default_rng(streams[3]), **kwargs)
        test = ProblemData(X=X_test, y=X_test @ beta_star + eps_test)

    return train, test, beta_star
