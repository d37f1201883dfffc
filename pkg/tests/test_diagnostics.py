import numpy as np
import pytest

from fusedhuber.core import ProblemData
from fusedhuber.diagnostics import (
    TheoryParams,
    bregman_symmetric,
    cone_check,
    gram_matrix,
    huber_gradient,
    huber_hessian,
    rate_experiment,
    restricted_eigenvalue_estimate,
)
from fusedhuber.simulate import SyntheticSpec, generate


def random_instance(seed, n=20, p=6):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, p))
    y = X @ rng.standard_normal(p) + rng.standard_normal(n)
    return ProblemData(X=X, y=y)


class TestTheoryParams:
    def test_schedules(self):
        tp = TheoryParams(delta=1.0, tau0=2.0, t=1.0)
        assert tp.tau_schedule(100) == pytest.approx(2.0 * np.sqrt(100))
        assert tp.lambda1_schedule(100) == pytest.approx(8.0 / np.sqrt(100))

    def test_exponent_for_small_delta(self):
        # for delta < 1 the tau exponent is 1/(1+delta), above 1/2
        tp = TheoryParams(delta=0.5, tau0=1.0, t=1.0)
        assert tp.tau_schedule(64) == pytest.approx(64 ** (1 / 1.5))

    def test_validation(self):
        with pytest.raises(ValueError):
            TheoryParams(delta=-1.0)
        with pytest.raises(ValueError):
            TheoryParams(s=5, m=3)


class TestBregman:
    def test_zero_at_equal_points(self):
        d = random_instance(0)
        b = np.ones(6)
        assert bregman_symmetric(b, b, d, 1.0) == 0.0

    def test_nonnegative_and_symmetric(self):
        d = random_instance(1)
        rng = np.random.default_rng(2)
        for _ in range(50):
            b1, b2 = rng.standard_normal((2, 6))
            v12 = bregman_symmetric(b1, b2, d, 1.345)
            assert v12 >= -1e-10
            assert v12 == pytest.approx(bregman_symmetric(b2, b1, d, 1.345), abs=1e-12)

    def test_segment_scaling_inequality(self):
        d = random_instance(3)
        rng = np.random.default_rng(4)
        for _ in range(20):
            b1, b2 = rng.standard_normal((2, 6))
            full = bregman_symmetric(b1, b2, d, 1.0)
            for l in np.arange(0.1, 1.0, 0.1):
                bl = b2 + l * (b1 - b2)
                assert bregman_symmetric(bl, b2, d, 1.0) <= l * full + 1e-10


class TestGradient:
    def test_matches_finite_differences(self):
        from fusedhuber.core import huber_loss

        tau = 1.345
        rng = np.random.default_rng(5)
        for trial in range(10):
            d = random_instance(100 + trial, n=15, p=5)
            beta = rng.standard_normal(5)
            r = d.y - d.X @ beta
            if np.min(np.abs(np.abs(r) - tau)) < 1e-3:
                continue  # keep residuals away from the kink
            g = huber_gradient(d, beta, tau)
            h = 1e-6
            for j in range(5):
                e = np.zeros(5)
                e[j] = h
                fd = (
                    huber_loss(d.y - d.X @ (beta + e), tau)
                    - huber_loss(d.y - d.X @ (beta - e), tau)
                ) / (2 * h)
                assert abs(fd - g[j]) < 1e-5


class TestHessian:
    def test_large_tau_equals_gram(self):
        d = random_instance(6)
        H = huber_hessian(d, np.zeros(6), 1e9)
        assert np.allclose(H, gram_matrix(d))

    def test_tiny_tau_zero_matrix(self):
        d = random_instance(7)
        assert np.allclose(huber_hessian(d, np.zeros(6), 1e-12), 0.0)

    def test_hand_indicator_bookkeeping(self):
        X = np.array([[1.0, 2.0], [3.0, 4.0]])
        y = np.array([0.5, 10.0])
        d = ProblemData(X=X, y=y)
        # residuals at beta=0 are (0.5, 10); tau=1 keeps only row 1
        H = huber_hessian(d, np.zeros(2), 1.0)
        assert np.allclose(H, np.outer(X[0], X[0]) / 2)

    def test_sandwiched_between_zero_and_gram(self):
        rng = np.random.default_rng(8)
        for trial in range(20):
            d = random_instance(200 + trial, n=25, p=5)
            beta = rng.standard_normal(5)
            H = huber_hessian(d, beta, 1.0)
            S = gram_matrix(d)
            for _ in range(10):
                u = rng.standard_normal(5)
                assert u @ H @ u >= -1e-12
                assert u @ H @ u <= u @ S @ u + 1e-12

    def test_gram_matches_transpose_multiply(self):
        d = random_instance(9, n=13, p=4)
        manual = sum(np.outer(x, x) for x in d.X) / d.n
        assert np.allclose(gram_matrix(d), manual, atol=1e-12)


class TestRestrictedEigenvalue:
    def test_identity_gives_one(self):
        lo, hi = restricted_eigenvalue_estimate(np.eye(5), [0], m=2, c0=1.0, samples=200)
        assert lo == pytest.approx(1.0) and hi == pytest.approx(1.0)

    def test_estimates_within_spectrum(self):
        rng = np.random.default_rng(10)
        A = rng.standard_normal((6, 6))
        M = A @ A.T
        evals = np.linalg.eigvalsh(M)
        lo, hi = restricted_eigenvalue_estimate(M, [0, 1], m=3, c0=2.0, samples=500, seed=1)
        assert evals[0] - 1e-9 <= lo <= hi <= evals[-1] + 1e-9

    def test_loose_cone_reaches_top_eigenvalue(self):
        M = np.diag([1.0, 4.0])
        lo, hi = restricted_eigenvalue_estimate(M, [0], m=2, c0=100.0, samples=3000, seed=2)
        assert hi >= 3.6

    def test_rejects_large_p(self):
        with pytest.raises(ValueError):
            restricted_eigenvalue_estimate(np.eye(30), [0], m=2, c0=1.0)


class TestConeCheck:
    def test_reports_cone_membership(self):
        spec = SyntheticSpec(n=100, n_test=0, p=20, seed=11, gaussian_sd=0.05)
        train, _, beta_star = generate(spec)
        from fusedhuber.core import SolverConfig
        from fusedhuber.solver import solve

        lam1 = 0.05
        cfg = SolverConfig(tau=5.0, lambda1=lam1, lambda2=lam1)
        result = solve(train, cfg)
        report = cone_check(train, result.beta, beta_star, 5.0, lam1, lam1)
        assert set(report) >= {"gradient_condition", "lhs", "rhs", "in_cone"}
        if report["gradient_condition"]:
            assert report["in_cone"]

    def test_cone_constant_formula(self):
        d = random_instance(12)
        rep = cone_check(d, np.ones(6), np.ones(6), 1.0, lambda1=1.0, lambda2=2.0)
        b = 2.0
        assert rep["cone_constant"] == pytest.approx((2 * b * 2 + 3) / (2 * b * 2 + 1))


class TestRateExperiment:
    def test_noiseless_flags_undefined_slope(self):
        from fusedhuber.tune import TuneGrid

        grid = TuneGrid(taus=(10.0,), lambda1s=(1e-8,), lambda2s=(1e-8,))
        res = rate_experiment(
            p=12, noise="gaussian", n_list=[40, 80], replications=1,
            seed=0, grid=grid, n_test=20, gaussian_sd=0.0, tol=1e-8, max_iter=50_000,
        )
        assert all(v < 1e-3 for v in res.medians.values())

    def test_error_shrinks_with_n(self):
        res = rate_experiment(
            p=16, noise="gaussian", n_list=[50, 200], replications=3, seed=1, n_test=50,
        )
        assert res.medians[200] < res.medians[50]
        assert len(res.rows) == 6

    def test_deterministic_per_seed(self):
        kwargs = dict(p=12, noise="gaussian", n_list=[40], replications=2, seed=2, n_test=20)
        r1 = rate_experiment(**kwargs)
        r2 = rate_experiment(**kwargs)
        assert r1.medians == r2.medians
