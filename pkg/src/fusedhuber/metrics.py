"""Evaluation metrics: coefficient error, prediction MAE, residual spread,
and the kurtosis statistic used for heavy-tail screening."""
from __future__ import annotations

import numpy as np

from .core import ProblemData


def estimation_error(beta_hat, beta_star) -> float:
    """l2 distance ||beta_hat - beta_star||_2.

    Reported under the name "MSE" in benchmark tables for compatibility
    with the usual presentation, but it is the plain l2 norm of the
    coefficient error (not squared, not averaged).
    """
    a = np.asarray(beta_hat, dtype=float)
    b = np.asarray(beta_star, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def mae(test: ProblemData, beta_hat) -> float:
    """Mean absolute prediction error on a held-out set."""
    if test.n < 1:
        raise ValueError("test set is empty")
    pred = test.X @ np.asarray(beta_hat, dtype=float)
    return float(np.mean(np.abs(test.y - pred)))


def residual_std(data: ProblemData, beta_hat) -> float:
    """Sample standard deviation (divisor n-1) of the residuals y - X beta_hat."""
    if data.n < 2:
        raise ValueError("residual_std needs at least 2 samples")
    r = data.y - data.X @ np.asarray(beta_hat, dtype=float)
    return float(np.std(r, ddof=1))


def kurtosis(v) -> float:
    """Non-excess sample kurtosis m4 / m2^2 (normal ~ 3).

    Uses the biased moment-ratio estimator; the screening thresholds of
    interest (3 and 9) do not need small-sample corrections.
    """
    x = np.asarray(v, dtype=float)
    if x.ndim != 1 or x.size < 4:
        raise ValueError("kurtosis needs a 1-D sample of length >= 4")
    centered = x - x.mean()
    m2 = np.mean(centered**2)
    if m2 <= 0:
        raise ValueError("kurtosis undefined for a degenerate (zero-variance) sample")
    m4 = np.mean(centered**4)
    return float(m4 / m2**2)
