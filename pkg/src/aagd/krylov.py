"""GMRES, CR, and CG over explicit dense systems in anchored form
A (x - x0) = b, exposing full iterate traces and the CG internal
sequences needed for the identity checks.

GMRES uses Arnoldi with modified Gram-Schmidt and Givens rotations; the
trace reconstructs the iterate after every step.  CR is the standard
recurrence for SPD matrices.  CG follows the classical recurrence
verbatim and records r, p, a, b.
"""

import warnings
from dataclasses import dataclass, field
from typing import List

import numpy as np

from .objectives import Objective


class SpdViolationError(ArithmeticError):
    """The matrix failed a positive-definiteness check mid-recurrence."""


@dataclass(frozen=True)
class LinearSystem:
    A: np.ndarray
    b: np.ndarray
    x0: np.ndarray

    def __post_init__(self):
        n = self.A.shape[0]
        if self.A.shape != (n, n):
            raise ValueError("A must be square")
        if self.b.shape != (n,) or self.x0.shape != (n,):
            raise ValueError("b and x0 must be length-n vectors")

    def residual(self, x) -> np.ndarray:
        return self.A @ (x - self.x0) - self.b


@dataclass
class KrylovTrace:
    iterates: List[np.ndarray]
    residual_norms: List[float]
    breakdown: bool = False
    # CG internals (empty for GMRES/CR)
    cg_r: List[np.ndarray] = field(default_factory=list)
    cg_p: List[np.ndarray] = field(default_factory=list)
    cg_a: List[float] = field(default_factory=list)
    cg_b: List[float] = field(default_factory=list)


def _check_symmetric_spd(A):
    scale = max(1.0, float(np.abs(A).max()))
    if np.abs(A - A.T).max() > 1e-12 * scale:
        raise ValueError("matrix must be symmetric")


def gmres(sys: LinearSystem, max_iters: int) -> KrylovTrace:
    """Minimal-residual iterates over the growing Krylov spaces of A."""
    A, b, x0 = sys.A, sys.b, sys.x0
    n = b.shape[0]
    max_iters = min(max_iters, n)
    beta = float(np.linalg.norm(b))
    trace = KrylovTrace(iterates=[x0.copy()], residual_norms=[beta])
    if beta == 0.0:
        return trace

    V = np.zeros((n, max_iters + 1))
    Hm = np.zeros((max_iters + 1, max_iters))
    cs = np.zeros(max_iters)
    sn = np.zeros(max_iters)
    gvec = np.zeros(max_iters + 1)
    V[:, 0] = b / beta
    gvec[0] = beta
    scale = None

    for j in range(max_iters):
        w = A @ V[:, j]
        if scale is None:
            scale = max(1.0, float(np.linalg.norm(w)))
        for i in range(j + 1):
            Hm[i, j] = V[:, i] @ w
            w -= Hm[i, j] * V[:, i]
        hnext = float(np.linalg.norm(w))
        Hm[j + 1, j] = hnext
        stagnated = hnext < 1e-14 * scale
        if not stagnated:
            V[:, j + 1] = w / hnext

        # apply the accumulated rotations to the new column, then a new one
        for i in range(j):
            t = cs[i] * Hm[i, j] + sn[i] * Hm[i + 1, j]
            Hm[i + 1, j] = -sn[i] * Hm[i, j] + cs[i] * Hm[i + 1, j]
            Hm[i, j] = t
        denom = np.hypot(Hm[j, j], Hm[j + 1, j])
        if denom == 0.0:
            trace.breakdown = True
            break
        cs[j] = Hm[j, j] / denom
        sn[j] = Hm[j + 1, j] / denom
        Hm[j, j] = denom
        Hm[j + 1, j] = 0.0
        gvec[j + 1] = -sn[j] * gvec[j]
        gvec[j] = cs[j] * gvec[j]

        y = np.linalg.solve(np.triu(Hm[: j + 1, : j + 1]), gvec[: j + 1])
        x = x0 + V[:, : j + 1] @ y
        trace.iterates.append(x)
        trace.residual_norms.append(float(np.linalg.norm(sys.residual(x))))
        if stagnated:
            if trace.residual_norms[-1] > 1e-10 * beta:
                trace.breakdown = True
            break
        if trace.residual_norms[-1] < 1e-14 * beta:
            break
    return trace


def cr(sys: LinearSystem, max_iters: int) -> KrylovTrace:
    """Conjugate-residual recurrence; same minimizer sequence as GMRES on
    a symmetric positive definite system."""
    _check_symmetric_spd(sys.A)
    A, b, x0 = sys.A, sys.b, sys.x0
    max_iters = min(max_iters, b.shape[0])
    x = x0.copy()
    r = b.copy()
    trace = KrylovTrace(iterates=[x.copy()], residual_norms=[float(np.linalg.norm(r))])
    if trace.residual_norms[0] == 0.0:
        return trace
    p = r.copy()
    Ar = A @ r
    Ap = Ar.copy()
    rAr = float(r @ Ar)
    for _ in range(max_iters):
        if rAr <= 0.0:
            raise SpdViolationError("loss of positive definiteness in CR (r^T A r <= 0)")
        denom = float(Ap @ Ap)
        if denom == 0.0:
            break
        a = rAr / denom
        x = x + a * p
        r = r - a * Ap
        trace.iterates.append(x.copy())
        trace.residual_norms.append(float(np.linalg.norm(r)))
        if trace.residual_norms[-1] < 1e-14 * trace.residual_norms[0]:
            break
        Ar = A @ r
        rAr_new = float(r @ Ar)
        beta = rAr_new / rAr
        p = r + beta * p
        Ap = Ar + beta * Ap
        rAr = rAr_new
    return trace


def cg(sys: LinearSystem, max_iters: int) -> KrylovTrace:
    """Classical conjugate gradients with full internal trace (r, p, a, b)."""
    _check_symmetric_spd(sys.A)
    A, b, x0 = sys.A, sys.b, sys.x0
    max_iters = min(max_iters, b.shape[0])
    x = x0.copy()
    r = b.copy()
    p = r.copy()
    r0_norm = float(np.linalg.norm(r))
    trace = KrylovTrace(
        iterates=[x.copy()],
        residual_norms=[float(np.linalg.norm(sys.residual(x)))],
        cg_r=[r.copy()],
        cg_p=[p.copy()],
    )
    for _ in range(max_iters):
        rn2 = float(r @ r)
        if np.sqrt(rn2) <= 1e-15 * r0_norm:
            break
        Bp = A @ p
        pBp = float(p @ Bp)
        if pBp <= 0.0:
            raise SpdViolationError("loss of positive definiteness in CG (p^T A p <= 0)")
        a = rn2 / pBp
        x = x + a * p
        r_new = r - a * Bp
        bcoef = float(r_new @ r_new) / rn2
        p = r_new + bcoef * p
        r = r_new
        trace.iterates.append(x.copy())
        trace.residual_norms.append(float(np.linalg.norm(sys.residual(x))))
        trace.cg_r.append(r.copy())
        trace.cg_p.append(p.copy())
        trace.cg_a.append(a)
        trace.cg_b.append(bcoef)
    return trace


def gradient_post_steps(sys: LinearSystem, x, steps: int, L: float) -> np.ndarray:
    """Apply x <- x - (A(x - x0) - b)/L the given number of times (1 or 2)."""
    if steps not in (1, 2):
        raise ValueError("steps must be 1 or 2")
    out = np.asarray(x, dtype=float)
    for _ in range(steps):
        out = out - sys.residual(out) / L
    return out


def build_perturbed_A(objective: Objective, cycle_iterates) -> np.ndarray:
    """Linear model matrix interpolating the gradient differences along a
    cycle: A (x^i - x^0) = grad f(x^i) - grad f(x^0) for every i.

    A is the Hessian at the cycle anchor plus a correction built from the
    third-order remainders of the gradients.
    """
    iterates = [np.asarray(x, dtype=float) for x in cycle_iterates]
    if len(iterates) < 2:
        raise ValueError("need the anchor and at least one further iterate")
    x0 = iterates[0]
    Hess = _hessian(objective, x0)
    g0 = objective.grad(x0)
    cols_x = []
    cols_b = []
    for xi in iterates[1:]:
        dx = xi - x0
        cols_x.append(dx)
        cols_b.append(objective.grad(xi) - g0 - Hess @ dx)
    X = np.column_stack(cols_x)
    B = np.column_stack(cols_b)
    if np.linalg.matrix_rank(X, tol=1e-12 * max(1.0, float(np.abs(X).max()))) < X.shape[1]:
        warnings.warn("rank-deficient iterate differences; using the minimum-norm pseudo-inverse")
    E = B @ np.linalg.pinv(X)
    return Hess + E


def _hessian(objective: Objective, x) -> np.ndarray:
    if objective.hess is not None:
        return np.asarray(objective.hess(x), dtype=float)
    # central finite differences, diagnostic use only
    n = x.shape[0]
    H = np.zeros((n, n))
    step = 1e-5
    for j in range(n):
        e = np.zeros(n)
        e[j] = step
        H[:, j] = (objective.grad(x + e) - objective.grad(x - e)) / (2.0 * step)
    return 0.5 * (H + H.T)
