"""Proximal operators used by the ADMM subproblems and KKT residuals."""
from __future__ import annotations

import numpy as np


def soft_threshold(v, c: float):
    """Elementwise sgn(v) * max(|v| - c, 0), the prox of c*||.||_1."""
    if not c >= 0:
        raise ValueError(f"threshold must be nonnegative, got {c}")
    v = np.asarray(v, dtype=float)
    out = np.sign(v) * np.maximum(np.abs(v) - c, 0.0)
    return float(out) if out.ndim == 0 else out


def prox_conjugate_l1(v, c: float):
    """Prox of the conjugate of c*||.||_1 via Moreau's identity.

    Equals clamping each component to [-c, c]; computed as the Moreau
    complement of soft_threshold so the identity v = S_c(v) + result is
    exact by construction.
    """
    if not c > 0:
        raise ValueError(f"c must be positive, got {c}")
    v = np.asarray(v, dtype=float)
    out = v - soft_threshold(v, c)
    return float(out) if np.ndim(out) == 0 else out


def huber_prox(v, tau: float, c: float, n: int):
    """Minimizer of (1/n) h_tau(x) + (1/(2c)) (x - v)^2.

    Quadratic regime (|v| <= tau*(n+c)/n): x = v * n / (n + c).
    Linear regime: x = v - (c*tau/n) * sgn(v).
    The two branches agree in value at the regime boundary; ties go to the
    quadratic branch.
    """
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    if not c > 0:
        raise ValueError(f"c must be positive, got {c}")
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    v = np.asarray(v, dtype=float)
    if not np.all(np.isfinite(v)):
        raise ValueError("v must be finite")
    boundary = tau * (n + c) / n
    quad = v * (n / (n + c))
    lin = v - (c * tau / n) * np.sign(v)
    out = np.where(np.abs(v) <= boundary, quad, lin)
    return float(out) if out.ndim == 0 else out
