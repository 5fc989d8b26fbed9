import numpy as np
import pytest

from aagd.fixedpoint import FixedPointMap, NumericalError, OracleMeter, run_gd
from aagd.linalg import random_spd
from aagd.objectives import Objective, make_quadratic, make_student_t, synth_dataset
from aagd.records import BUDGET_EXHAUSTED, CONVERGED, SolverConfig


class TestMapAndMeter:
    def test_identity_quadratic_one_step(self):
        fp = FixedPointMap(make_quadratic(np.eye(2)))
        meter = OracleMeter()
        g = fp.g(np.array([2.0, 0.0]), meter)
        assert g == pytest.approx([0.0, 0.0])
        assert meter.grad_calls == 1 and meter.f_calls == 0

    def test_diagonal_step(self):
        fp = FixedPointMap(make_quadratic(np.diag([1.0, 2.0])))
        meter = OracleMeter()
        g = fp.g(np.array([1.0, 1.0]), meter)
        assert fp.objective.L == pytest.approx(2.0)
        assert g == pytest.approx([0.5, 0.0])

    def test_h_is_g_minus_x_exactly(self):
        data = synth_dataset(20, 5, seed=0)
        fp = FixedPointMap(make_student_t(data, lam=0.05))
        meter = OracleMeter()
        rng = np.random.default_rng(1)
        for _ in range(10):
            x = rng.standard_normal(5)
            g, h = fp.g_and_h(x, meter)
            assert np.array_equal(g - x, h)

    def test_h_norm_equals_grad_over_L(self):
        data = synth_dataset(20, 5, seed=0)
        obj = make_student_t(data, lam=0.05)
        fp = FixedPointMap(obj)
        meter = OracleMeter()
        rng = np.random.default_rng(2)
        for _ in range(50):
            x = rng.standard_normal(5)
            h = fp.h(x, meter)
            assert np.linalg.norm(h) == pytest.approx(
                np.linalg.norm(obj.grad(x)) / obj.L, rel=1e-15)

    def test_zero_gradient_gives_zero_h(self):
        fp = FixedPointMap(make_quadratic(np.eye(3)))
        assert fp.h(np.zeros(3), OracleMeter()) == pytest.approx([0.0, 0.0, 0.0])

    def test_h_for_identity_quadratic(self):
        fp = FixedPointMap(make_quadratic(np.eye(2)))
        assert fp.h(np.array([3.0, 4.0]), OracleMeter()) == pytest.approx([-3.0, -4.0])

    def test_each_call_charges_one_gradient(self):
        fp = FixedPointMap(make_quadratic(np.eye(2)))
        meter = OracleMeter()
        x = np.ones(2)
        fp.g(x, meter)
        fp.h(x, meter)
        fp.g_and_h(x, meter)
        assert meter.grad_calls == 3
        assert meter.total() == 3

    def test_contraction_on_strongly_convex_quadratic(self):
        B = random_spd(5, 3, 1.0, 4.0)
        obj = make_quadratic(B)
        fp = FixedPointMap(obj)
        meter = OracleMeter()
        factor = 1.0 - 1.0 / 4.0  # 1 - mu/L
        rng = np.random.default_rng(4)
        for _ in range(20):
            x, y = rng.standard_normal(5), rng.standard_normal(5)
            gx = fp.g(x, meter)
            gy = fp.g(y, meter)
            assert np.linalg.norm(gx - gy) <= factor * np.linalg.norm(x - y) + 1e-12

    def test_g_matches_finite_difference_oracle(self):
        data = synth_dataset(25, 4, seed=3)
        obj = make_student_t(data, lam=0.05)
        fp = FixedPointMap(obj)
        rng = np.random.default_rng(5)
        x = rng.standard_normal(4)
        step = 1e-6 * (1.0 + np.linalg.norm(x))
        g_fd = np.zeros(4)
        for i in range(4):
            e = np.zeros(4)
            e[i] = step
            g_fd[i] = (obj.f(x + e) - obj.f(x - e)) / (2.0 * step)
        expected = x - g_fd / obj.L
        assert fp.g(x, OracleMeter()) == pytest.approx(expected, abs=1e-5)

    def test_non_finite_gradient_raises(self):
        obj = Objective(n=1, f=lambda x: float("nan"),
                        grad=lambda x: np.array([float("nan")]), L=1.0)
        with pytest.raises(NumericalError):
            FixedPointMap(obj).g(np.zeros(1), OracleMeter())


class TestRunGd:
    def test_identity_quadratic_converges_immediately(self):
        obj = make_quadratic(np.eye(2))
        meter = OracleMeter()
        res = run_gd(obj, np.array([2.0, -1.0]), SolverConfig(m=1), meter)
        assert res.status == CONVERGED
        assert res.records[-1].oracle_calls <= 3

    def test_budget_zero_returns_initial_record_only(self):
        obj = make_quadratic(np.diag([1.0, 3.0]))
        res = run_gd(obj, np.ones(2), SolverConfig(m=1, oracle_budget=0), OracleMeter())
        assert res.status == BUDGET_EXHAUSTED
        assert len(res.records) == 1

    def test_oracle_calls_increase_strictly(self):
        B = random_spd(4, 5, 1.0, 6.0)
        obj = make_quadratic(B)
        res = run_gd(obj, np.ones(4), SolverConfig(m=1, grad_tol=1e-6), OracleMeter())
        calls = [row.oracle_calls for row in res.records]
        assert all(b > a for a, b in zip(calls, calls[1:]))

    def test_gd_monotone_decrease(self):
        B = random_spd(4, 6, 1.0, 6.0)
        obj = make_quadratic(B, shift=np.ones(4))
        res = run_gd(obj, np.zeros(4), SolverConfig(m=1, grad_tol=1e-8), OracleMeter())
        fs = [row.f for row in res.records]
        assert all(b <= a for a, b in zip(fs, fs[1:]))
