"""Empirical instrumentation of the estimation theory: Bregman divergences,
the Huber Hessian, restricted-eigenvalue estimates, a local-cone check,
and error-vs-sample-size rate experiments."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .core import Loss, ProblemData, SolverConfig, huber_deriv
from .metrics import estimation_error
from .simulate import NoiseKind, SyntheticSpec, generate, make_beta_star
from .tune import TuneGrid, grid_search

# max row sum of the first-difference operator
D_INF_NORM = 2.0


@dataclass(frozen=True)
class TheoryParams:
    """Constants of the nonasymptotic error bound and its parameter schedules."""

    delta: float = 1.0
    tau0: float = 1.0
    t: float = 1.0
    s: int = 11
    c0: float = 1.0
    b: float = 1.0
    d: float = D_INF_NORM
    m: int = 11
    r: float = 1.0
    kappa_low: float = 0.1
    kappa_up: float = 10.0

    def __post_init__(self):
        if min(self.delta, self.tau0, self.t, self.c0, self.b, self.d, self.r) <= 0:
            raise ValueError("delta, tau0, t, c0, b, d, r must all be positive")
        if self.kappa_low <= 0 or self.kappa_low > self.kappa_up:
            raise ValueError("need 0 < kappa_low <= kappa_up")
        if self.s < 1 or self.m < self.s:
            raise ValueError("need 1 <= s <= m")

    def tau_schedule(self, n: int) -> float:
        """tau = tau0 * (n/t)^max{1/(1+delta), 1/2}."""
        expo = max(1.0 / (1.0 + self.delta), 0.5)
        return self.tau0 * (n / self.t) ** expo

    def lambda1_schedule(self, n: int) -> float:
        """Smallest admissible lambda1 = 4*tau0*(t/n)^min{delta/(1+delta), 1/2}."""
        expo = min(self.delta / (1.0 + self.delta), 0.5)
        return 4.0 * self.tau0 * (self.t / n) ** expo

    def error_bound(self) -> float:
        """lambda1 * kappa_low^{-1} * sqrt(s) for lambda1 at its schedule value."""
        return np.sqrt(self.s) / self.kappa_low


def huber_gradient(data: ProblemData, beta, tau: float) -> np.ndarray:
    """Gradient of the mean Huber loss: -(1/n) X^T clip(y - X beta, -tau, tau)."""
    b = np.asarray(beta, dtype=float)
    r = data.y - data.X @ b
    return -(data.X.T @ huber_deriv(r, tau)) / data.n


def bregman_symmetric(beta1, beta2, data: ProblemData, tau: float) -> float:
    """<grad L(b1) - grad L(b2), b1 - b2>; nonnegative by convexity."""
    b1 = np.asarray(beta1, dtype=float)
    b2 = np.asarray(beta2, dtype=float)
    if b1.shape != b2.shape:
        raise ValueError(f"length mismatch: {b1.shape} vs {b2.shape}")
    g1 = huber_gradient(data, b1, tau)
    g2 = huber_gradient(data, b2, tau)
    return float((g1 - g2) @ (b1 - b2))


def gram_matrix(data: ProblemData) -> np.ndarray:
    """Empirical Gram matrix (1/n) sum_i x_i x_i^T."""
    return data.X.T @ data.X / data.n


def huber_hessian(data: ProblemData, beta, tau: float) -> np.ndarray:
    """(1/n) sum over samples with |residual| <= tau of x_i x_i^T."""
    b = np.asarray(beta, dtype=float)
    if b.shape[0] != data.p:
        raise ValueError(f"beta has length {b.shape[0]}, expected {data.p}")
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    r = data.y - data.X @ b
    active = data.X[np.abs(r) <= tau]
    return active.T @ active / data.n


def restricted_eigenvalue_estimate(
    M: np.ndarray,
    support,
    m: int,
    c0: float,
    samples: int = 2000,
    seed: int = 0,
    max_p: int = 20,
):
    """Sampled extremal Rayleigh quotients of M over the l1 cone.

    For every superset J of `support` with |J| <= m, random directions are
    shrunk into {u : ||u_{J^c}||_1 <= c0 ||u_J||_1} and their Rayleigh
    quotients recorded.  Returns (rho_minus_est, rho_plus_est): an upper
    bound for the restricted minimum eigenvalue and a lower bound for the
    restricted maximum.  Sampling estimates, not certificates; subset
    enumeration restricts use to small p.
    """
    M = np.asarray(M, dtype=float)
    p = M.shape[0]
    if M.shape != (p, p):
        raise ValueError("M must be square")
    if p > max_p:
        raise ValueError(f"p = {p} too large for subset enumeration (max {max_p})")
    support = sorted(set(int(j) for j in support))
    if any(j < 0 or j >= p for j in support):
        raise ValueError("support indices out of range")
    if m < len(support):
        raise ValueError("m must be at least |support|")
    rng = np.random.default_rng(seed)
    rest = [j for j in range(p) if j not in support]
    lo, hi = np.inf, -np.inf
    for extra in range(0, m - len(support) + 1):
        for added in itertools.combinations(rest, extra):
            J = np.array(support + list(added), dtype=int)
            mask = np.zeros(p, dtype=bool)
            mask[J] = True
            for _ in range(max(1, samples // max(1, extra + 1))):
                u = rng.standard_normal(p)
                inside = np.abs(u[mask]).sum()
                outside = np.abs(u[~mask]).sum()
                if outside > c0 * inside and outside > 0:
                    u[~mask] *= c0 * inside / outside
                denom = float(u @ u)
                if denom == 0:
                    continue
                q = float(u @ M @ u) / denom
                lo = min(lo, q)
                hi = max(hi, q)
    return lo, hi


def cone_check(
    data: ProblemData,
    beta_hat,
    beta_star,
    tau: float,
    lambda1: float,
    lambda2: float,
    tol: float = 1e-3,
) -> dict:
    """Local l1-cone report for a fitted vector.

    When the gradient condition ||grad L(beta_star)||_inf <= lambda1/2
    holds, the error vector should satisfy
    ||err_{S^c}||_1 <= ((2bd+3)/(2bd+1)) ||err_S||_1 with b = lambda2/lambda1
    and d = 2.  Violations are reported in the returned dict, not raised.
    """
    bh = np.asarray(beta_hat, dtype=float)
    bs = np.asarray(beta_star, dtype=float)
    grad_inf = float(np.max(np.abs(huber_gradient(data, bs, tau))))
    gradient_condition = lambda1 > 0 and grad_inf <= lambda1 / 2.0
    err = bh - bs
    S = np.abs(bs) > 0
    lhs = float(np.sum(np.abs(err[~S])))
    if lambda1 > 0:
        b = lambda2 / lambda1
        c0 = (2 * b * D_INF_NORM + 3) / (2 * b * D_INF_NORM + 1)
    else:
        c0 = float("inf")
    rhs = c0 * float(np.sum(np.abs(err[S])))
    return {
        "gradient_condition": bool(gradient_condition),
        "grad_inf": grad_inf,
        "cone_constant": c0,
        "lhs": lhs,
        "rhs": rhs,
        "in_cone": bool(lhs <= rhs + tol),
    }


@dataclass
class RateResult:
    rows: list
    medians: dict
    slope: float | None


def rate_experiment(
    p: int,
    noise,
    n_list,
    replications: int,
    seed: int = 0,
    grid: TuneGrid | None = None,
    *,
    n_test: int = 100,
    sigma: float = 0.1,
    tol: float = 1e-3,
    max_iter: int = 2000,
    gaussian_sd: float = 0.05,
) -> RateResult:
    """Median estimation error vs sample size over tuned simulate->fit runs.

    Each (n, replication) cell generates data with seed = base + index,
    tunes on the train/validation split, and records the tuned fit's
    coefficient error.  Returns per-cell rows, per-n medians, and the
    fitted log-log slope of median error vs n (None when an error
    degenerates to ~0, e.g. noiseless data).
    """
    noise = NoiseKind(noise)
    if grid is None:
        grid = TuneGrid(
            taus=(1.345,),
            lambda1s=tuple(np.logspace(-4, 0, 5)),
            lambda2s=tuple(np.logspace(-4, 0, 3)),
        )
    rows = []
    medians = {}
    for i, n in enumerate(n_list):
        errs = []
        for rep in range(replications):
            spec = SyntheticSpec(
                n=int(n), n_test=n_test, p=p, noise=noise,
                seed=seed + 10_000 * i + rep, gaussian_sd=gaussian_sd,
            )
            train, validation, beta_star = generate(spec)
            cfg, _ = grid_search(
                train, validation, grid,
                beta_star=beta_star, sigma=sigma, tol=tol, max_iter=max_iter,
            )
            from .solver import solve

            result = solve(train, cfg)
            err = estimation_error(result.beta, beta_star)
            errs.append(err)
            rows.append({
                "n": int(n), "replication": rep,
                "tau": cfg.tau, "lambda1": cfg.lambda1, "lambda2": cfg.lambda2,
                "estimation_error": err,
            })
        medians[int(n)] = float(np.median(errs))
    med = np.array([medians[int(n)] for n in n_list])
    if np.any(med < 1e-12) or len(n_list) < 2:
        slope = None
    else:
        slope = float(np.polyfit(np.log(np.asarray(n_list, float)), np.log(med), 1)[0])
    return RateResult(rows=rows, medians=medians, slope=slope)
