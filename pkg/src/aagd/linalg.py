"""Dense least-squares solvers and spectral utilities.

Matrices are plain float64 numpy arrays; vectors are 1-d arrays.  Least
squares comes in two flavors: a direct minimum-norm solve (LAPACK, used as
the deterministic default) and LSQR with the normal-equation stopping rule
used for the AA subproblem.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels

#: singular values below RANK_TOL * sigma_max are treated as zero
RANK_TOL = 1e-15

#: default LSQR stop: ||A^T (A x - b)|| below this
LSQR_TOL = 1e-16


@dataclass(frozen=True)
class LeastSquaresSolution:
    solution: np.ndarray
    residual_norm: float
    rank_deficient: bool


def _as_matrix(A):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise ValueError(f"expected a 2-d matrix with at least one row and column, got shape {A.shape}")
    return A


def solve_least_squares(A, b, method="qr", lsqr_tol=LSQR_TOL):
    """Minimize ||A x - b||_2.

    method="qr" is a direct minimum-norm solve (rank detected at
    RANK_TOL * sigma_max).  method="lsqr" iterates until
    ||A^T (A x - b)|| < lsqr_tol or 10 * cols iterations.
    """
    A = _as_matrix(A)
    b = np.asarray(b, dtype=float)
    if b.shape != (A.shape[0],):
        raise ValueError(f"rhs has shape {b.shape}, expected ({A.shape[0]},)")

    if not np.any(A):
        # all-zero operator: minimum-norm minimizer is x = 0
        return LeastSquaresSolution(np.zeros(A.shape[1]), float(np.linalg.norm(b)), True)

    if method == "qr":
        x, _, rank, _ = np.linalg.lstsq(A, b, rcond=RANK_TOL)
        deficient = rank < A.shape[1]
    elif method == "lsqr":
        x = _kernels.lsqr(np.ascontiguousarray(A), np.ascontiguousarray(b),
                          float(lsqr_tol), 10 * A.shape[1])
        deficient = False
    else:
        raise ValueError(f"unknown least-squares method {method!r}")
    return LeastSquaresSolution(x, float(np.linalg.norm(A @ x - b)), deficient)


def condition_number_sq(A):
    """kappa(A^T A) = (sigma_max / sigma_min)^2, +inf when numerically singular."""
    A = _as_matrix(A)
    if not np.any(A):
        raise ValueError("condition number of the zero matrix is undefined")
    s = np.linalg.svd(A, compute_uv=False)
    smax, smin = s[0], s[-1]
    if A.shape[0] < A.shape[1]:
        smin = 0.0  # wide matrix: A^T A is singular
    if smin <= RANK_TOL * smax:
        return np.inf
    return float((smax / smin) ** 2)


def spectral_norm(A, tol=1e-10, max_iters=10000):
    """Largest singular value, by power iteration on A^T A."""
    A = _as_matrix(A)
    if not np.any(A):
        raise ValueError("spectral norm of the zero matrix is trivially 0; refusing ambiguous input")
    n = A.shape[1]
    # deterministic start with a mild ramp so no symmetry can trap the iteration
    x = 1.0 + np.arange(n) / max(n, 1)
    x /= np.linalg.norm(x)
    sigma = 0.0
    for _ in range(max_iters):
        y = A.T @ (A @ x)
        ny = np.linalg.norm(y)
        if ny == 0.0:
            # started orthogonal to the row space; nudge deterministically
            x = np.roll(x, 1) + 1e-3
            x /= np.linalg.norm(x)
            continue
        sigma_new = np.sqrt(ny)
        x = y / ny
        if abs(sigma_new - sigma) <= tol * sigma_new:
            return float(sigma_new)
        sigma = sigma_new
    return float(sigma)


def random_spd(n, seed, eig_low=1.0, eig_high=10.0):
    """Seeded SPD matrix with eigenvalues linspaced in [eig_low, eig_high]."""
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    eigs = np.linspace(eig_low, eig_high, n)
    return (Q * eigs) @ Q.T
