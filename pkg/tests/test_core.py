import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fusedhuber.core import (
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

finite_floats = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)


class TestProblemData:
    def test_valid(self):
        d = ProblemData(X=np.ones((3, 2)), y=np.zeros(3))
        assert d.n == 3 and d.p == 2

    def test_rejects_single_column(self):
        with pytest.raises(ValueError, match="two columns"):
            ProblemData(X=np.ones((3, 1)), y=np.zeros(3))

    def test_rejects_nonfinite(self):
        X = np.ones((3, 2))
        X[1, 1] = np.nan
        with pytest.raises(ValueError, match="non-finite"):
            ProblemData(X=X, y=np.zeros(3))

    def test_rejects_length_mismatch(self):
        with pytest.raises(ValueError, match="length"):
            ProblemData(X=np.ones((3, 2)), y=np.zeros(4))


class TestSolverConfig:
    def test_defaults(self):
        cfg = SolverConfig()
        assert cfg.sigma == 0.1 and cfg.pi == 1.0
        assert cfg.tol == 1e-3 and cfg.max_iter == 2000

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"tau": 0.0},
            {"tau": -1.0},
            {"sigma": 0.0},
            {"pi": 0.0},
            {"pi": 1.7},
            {"tol": 0.0},
            {"max_iter": 0},
            {"lambda1": -0.1},
        ],
    )
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ValueError):
            SolverConfig(**kwargs)

    def test_pi_upper_limit_is_golden_ratio(self):
        SolverConfig(pi=1.61)
        with pytest.raises(ValueError):
            SolverConfig(pi=(1 + np.sqrt(5)) / 2)


class TestIterateState:
    def test_zeros_dimensions(self):
        s = IterateState.zeros(n=4, p=3)
        assert len(s.z) == 4 and len(s.beta) == 3
        assert len(s.gamma) == 2 and len(s.mu_gamma) == 2
        # theta = (z, alpha, gamma) has length n + 2p - 1
        assert len(s.z) + len(s.alpha) + len(s.gamma) == 4 + 2 * 3 - 1

    def test_rejects_wrong_gamma_length(self):
        with pytest.raises(ValueError):
            IterateState(
                z=np.zeros(4), alpha=np.zeros(3), gamma=np.zeros(3),
                beta=np.zeros(3), mu_z=np.zeros(4), mu_alpha=np.zeros(3),
                mu_gamma=np.zeros(3),
            )


class TestHuberScalar:
    def test_zero(self):
        assert huber_scalar(0.0, 1.345) == 0.0

    def test_breakpoint_continuity(self):
        # both branches give tau^2/2 at |x| = tau
        tau = 2.0
        assert huber_scalar(tau, tau) == pytest.approx(tau**2 / 2)
        assert huber_scalar(np.nextafter(tau, 10), tau) == pytest.approx(tau**2 / 2)

    def test_linear_branch(self):
        # tau*|x| - tau^2/2 at x=3, tau=1; cross-checked by quadrature of
        # the clipped derivative in test_deriv_integrates_to_loss
        assert huber_scalar(3.0, 1.0) == pytest.approx(2.5)

    def test_deriv_integrates_to_loss(self):
        from scipy.integrate import quad

        val, _ = quad(lambda t: min(abs(t), 1.0) * np.sign(t), 0, 3)
        assert huber_scalar(3.0, 1.0) == pytest.approx(val, abs=1e-9)

    def test_rejects_bad_args(self):
        with pytest.raises(ValueError):
            huber_scalar(np.inf, 1.0)
        with pytest.raises(ValueError):
            huber_scalar(1.0, 0.0)

    @given(x=finite_floats, tau=st.floats(min_value=1e-3, max_value=1e3))
    def test_even_nonnegative_and_bounded(self, x, tau):
        v = huber_scalar(x, tau)
        assert v >= 0
        assert v == huber_scalar(-x, tau)
        assert v <= 0.5 * x * x + 1e-9
        assert v <= tau * abs(x) + 1e-9

    def test_equals_quadratic_once_tau_reaches_x(self):
        x = 3.7
        assert huber_scalar(x, x) == 0.5 * x * x
        assert huber_scalar(x, 10 * x) == 0.5 * x * x
        assert huber_scalar(x, 0.99 * x) < 0.5 * x * x


class TestHuberLoss:
    def test_zeros(self):
        assert huber_loss(np.zeros(3), 1.0) == 0.0

    def test_mean_of_componentwise(self):
        assert huber_loss([3.0, -3.0], 1.0) == pytest.approx(2.5)

    def test_quadratic_branch(self):
        assert huber_loss([0.5], 1.0) == pytest.approx(0.125)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            huber_loss([], 1.0)


class TestHuberDeriv:
    def test_values(self):
        assert huber_deriv(0.0, 1.0) == 0.0
        assert huber_deriv(5.0, 1.0) == 1.0
        assert huber_deriv(0.7, 1.0) == pytest.approx(0.7)

    def test_odd_and_bounded(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal(100) * 3
        assert np.allclose(huber_deriv(-x, 1.3), -huber_deriv(x, 1.3))
        assert np.all(np.abs(huber_deriv(x, 1.3)) <= 1.3)

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(1)
        tau = 1.345
        h = 1e-6
        checked = 0
        while checked < 1000:
            x = float(rng.uniform(-5, 5))
            if abs(abs(x) - tau) < 1e-3:
                continue
            fd = (huber_scalar(x + h, tau) - huber_scalar(x - h, tau)) / (2 * h)
            assert abs(fd - huber_deriv(x, tau)) < 1e-6
            checked += 1


class TestDifferenceOperator:
    def test_constant_in_kernel(self):
        assert np.allclose(apply_D(np.full(7, 3.3)), 0)

    def test_direct_differencing(self):
        assert np.allclose(apply_D([1.0, 3.0, 2.0]), [2.0, -1.0])

    def test_adjoint_identity(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            p = int(rng.integers(2, 30))
            b = rng.standard_normal(p)
            v = rng.standard_normal(p - 1)
            assert abs(apply_D(b) @ v - b @ apply_Dt(v)) < 1e-12

    def test_dtd_matches_explicit_tridiagonal(self):
        from fusedhuber.solver import dtd_matrix

        rng = np.random.default_rng(3)
        for p in (2, 3, 10):
            b = rng.standard_normal(p)
            assert np.allclose(apply_Dt(apply_D(b)), dtd_matrix(p) @ b, atol=1e-12)

    def test_rejects_short_input(self):
        with pytest.raises(ValueError):
            apply_D([1.0])


class TestObjective:
    def test_zero_instance(self):
        d = ProblemData(X=np.eye(2), y=np.zeros(2))
        cfg = SolverConfig(tau=1.0, lambda1=3.0, lambda2=5.0)
        assert objective(d, np.zeros(2), cfg) == 0.0

    def test_penalty_only(self):
        d = ProblemData(X=np.eye(2), y=np.ones(2))
        cfg = SolverConfig(tau=1.0, lambda1=1.0, lambda2=1.0)
        # residual zero, ||beta||_1 = 2, D beta = 0
        assert objective(d, np.ones(2), cfg) == pytest.approx(2.0)

    def test_difference_penalty(self):
        beta = np.array([1.0, 0.0, 2.0])
        d = ProblemData(X=np.eye(3), y=beta.copy())
        cfg = SolverConfig(tau=1.0, lambda1=0.0, lambda2=1.0)
        assert objective(d, beta, cfg) == pytest.approx(3.0)

    def test_squared_loss(self):
        d = ProblemData(X=np.eye(2), y=np.array([2.0, 0.0]))
        cfg = SolverConfig(lambda1=0.0, lambda2=0.0, loss=Loss.SQUARED)
        assert objective(d, np.zeros(2), cfg) == pytest.approx(1.0)

    def test_rejects_dimension_mismatch(self):
        d = ProblemData(X=np.eye(2), y=np.zeros(2))
        with pytest.raises(ValueError):
            objective(d, np.zeros(3), SolverConfig())

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 10_000), lam=st.floats(0, 1))
    def test_convexity(self, seed, lam):
        rng = np.random.default_rng(seed)
        d = ProblemData(X=rng.standard_normal((6, 4)), y=rng.standard_normal(6))
        cfg = SolverConfig(tau=1.0, lambda1=0.3, lambda2=0.7)
        b1 = rng.standard_normal(4)
        b2 = rng.standard_normal(4)
        mix = objective(d, lam * b1 + (1 - lam) * b2, cfg)
        assert mix <= lam * objective(d, b1, cfg) + (1 - lam) * objective(d, b2, cfg) + 1e-10
