import os
import subprocess
import sys

import numpy as np
import pytest

from aagd import _kernels


@pytest.fixture(scope="module")
def problem():
    rng = np.random.default_rng(0)
    U = rng.standard_normal((120, 30))
    v = (rng.standard_normal(120) > 0).astype(float)
    x = rng.standard_normal(30)
    return U, v, x


needs_numba = pytest.mark.skipif(not _kernels.USE_NUMBA, reason="numba path disabled")


@needs_numba
class TestPathsAgree:
    def test_st_kernels(self, problem):
        U, v, x = problem
        assert _kernels._st_value_nb(U, v, x, 20.0, 1e-2) == pytest.approx(
            _kernels._st_value_np(U, v, x, 20.0, 1e-2), rel=1e-13)
        assert _kernels._st_grad_nb(U, v, x, 20.0, 1e-2) == pytest.approx(
            _kernels._st_grad_np(U, v, x, 20.0, 1e-2), abs=1e-13)

    def test_nls_kernels(self, problem):
        U, v, x = problem
        assert _kernels._nls_value_nb(U, v, x, 1e-2) == pytest.approx(
            _kernels._nls_value_np(U, v, x, 1e-2), rel=1e-13)
        assert _kernels._nls_grad_nb(U, v, x, 1e-2) == pytest.approx(
            _kernels._nls_grad_np(U, v, x, 1e-2), abs=1e-13)

    def test_lsqr(self):
        rng = np.random.default_rng(1)
        A = rng.standard_normal((40, 7))
        b = rng.standard_normal(40)
        xa = _kernels._lsqr_nb(A, b, 1e-16, 70)
        xb = _kernels._lsqr_np(A, b, 1e-16, 70)
        assert xa == pytest.approx(xb, abs=1e-12)


def test_env_flag_selects_numpy_path():
    code = (
        "import aagd._kernels as k; "
        "assert not k.USE_NUMBA; "
        "assert k.lsqr is k._lsqr_np"
    )
    env = dict(os.environ, AAGD_DISABLE_NUMBA="1")
    subprocess.run([sys.executable, "-c", code], check=True, env=env)


def test_sigmoid_saturates_without_overflow():
    z = np.array([-1e4, -31.0, 0.0, 31.0, 1e4])
    s = _kernels.sigmoid(z)
    assert np.all(np.isfinite(s))
    assert s[0] == pytest.approx(0.0, abs=1e-13)
    assert s[2] == pytest.approx(0.5)
    assert s[-1] == pytest.approx(1.0, abs=1e-13)


def test_lsqr_stops_at_normal_equation_tolerance():
    rng = np.random.default_rng(2)
    A = rng.standard_normal((30, 6))
    b = rng.standard_normal(30)
    x = _kernels.lsqr(A, b, 1e-16, 60)
    assert np.linalg.norm(A.T @ (A @ x - b)) < 1e-10 * np.linalg.norm(A.T @ b)
