"""Hot numeric kernels: LSQR and the empirical-risk loss/gradient loops.

Every kernel exists twice: a numba ``@njit`` version and a pure-numpy
fallback.  The active path is chosen once at import time; set the
environment variable ``AAGD_DISABLE_NUMBA=1`` to force the numpy path
(``aagd bench`` compares both).  Both paths compute the same quantities;
they are not guaranteed to agree bitwise because summation order differs.
"""

import os

import numpy as np

USE_NUMBA = os.environ.get("AAGD_DISABLE_NUMBA", "") == ""

if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        USE_NUMBA = False

_SIG_CLIP = 30.0  # |z| beyond this, sigmoid is 0/1 to double precision


# ---------------------------------------------------------------------------
# pure-numpy implementations
# ---------------------------------------------------------------------------

def _sigmoid_np(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-np.minimum(z[pos], _SIG_CLIP)))
    ez = np.exp(np.maximum(z[~pos], -_SIG_CLIP))
    out[~pos] = ez / (1.0 + ez)
    return out


def _st_value_np(U, v, x, mu, lam):
    r = U @ x - v
    n = U.shape[0]
    return float(np.sum(np.log1p(r * r / mu)) / n + 0.5 * lam * (x @ x))


def _st_grad_np(U, v, x, mu, lam):
    r = U @ x - v
    n = U.shape[0]
    w = 2.0 * r / (mu + r * r) / n
    return U.T @ w + lam * x


def _nls_value_np(U, v, x, lam):
    z = _sigmoid_np(U @ x) - v
    n = U.shape[0]
    return float(np.sum(z * z) / n + 0.5 * lam * (x @ x))


def _nls_grad_np(U, v, x, lam):
    s = _sigmoid_np(U @ x)
    n = U.shape[0]
    w = 2.0 * (s - v) * s * (1.0 - s) / n
    return U.T @ w + lam * x


def _lsqr_np(A, b, atol, max_iters):
    """Paige-Saunders LSQR for min ||A x - b||, started at x = 0.

    Stops when ||A^T (A x - b)|| < atol (checked explicitly, which is the
    stopping rule the AA subproblem needs) or after max_iters iterations.
    """
    m, n = A.shape
    x = np.zeros(n)
    u = b.copy()
    beta = np.linalg.norm(u)
    if beta == 0.0:
        return x
    u /= beta
    vv = A.T @ u
    alpha = np.linalg.norm(vv)
    if alpha == 0.0:
        return x
    vv /= alpha
    w = vv.copy()
    phibar = beta
    rhobar = alpha
    for _ in range(max_iters):
        u = A @ vv - alpha * u
        beta = np.linalg.norm(u)
        if beta > 0.0:
            u /= beta
            vv = A.T @ u - beta * vv
            alpha = np.linalg.norm(vv)
            if alpha > 0.0:
                vv /= alpha
        rho = np.hypot(rhobar, beta)
        c = rhobar / rho
        s = beta / rho
        theta = s * alpha
        rhobar = -c * alpha
        phi = c * phibar
        phibar = s * phibar
        x += (phi / rho) * w
        w = vv - (theta / rho) * w
        if np.linalg.norm(A.T @ (A @ x - b)) < atol:
            break
    return x


# ---------------------------------------------------------------------------
# numba implementations (same algorithms, explicit loops)
# ---------------------------------------------------------------------------

if USE_NUMBA:

    @njit(cache=True)
    def _sigmoid_scalar(z):
        if z >= 0.0:
            if z > _SIG_CLIP:
                z = _SIG_CLIP
            return 1.0 / (1.0 + np.exp(-z))
        if z < -_SIG_CLIP:
            z = -_SIG_CLIP
        ez = np.exp(z)
        return ez / (1.0 + ez)

    @njit(cache=True)
    def _st_value_nb(U, v, x, mu, lam):
        n, d = U.shape
        acc = 0.0
        for i in range(n):
            r = -v[i]
            for j in range(d):
                r += U[i, j] * x[j]
            acc += np.log1p(r * r / mu)
        reg = 0.0
        for j in range(d):
            reg += x[j] * x[j]
        return acc / n + 0.5 * lam * reg

    @njit(cache=True)
    def _st_grad_nb(U, v, x, mu, lam):
        n, d = U.shape
        g = np.zeros(d)
        for i in range(n):
            r = -v[i]
            for j in range(d):
                r += U[i, j] * x[j]
            w = 2.0 * r / (mu + r * r) / n
            for j in range(d):
                g[j] += w * U[i, j]
        for j in range(d):
            g[j] += lam * x[j]
        return g

    @njit(cache=True)
    def _nls_value_nb(U, v, x, lam):
        n, d = U.shape
        acc = 0.0
        for i in range(n):
            z = 0.0
            for j in range(d):
                z += U[i, j] * x[j]
            e = _sigmoid_scalar(z) - v[i]
            acc += e * e
        reg = 0.0
        for j in range(d):
            reg += x[j] * x[j]
        return acc / n + 0.5 * lam * reg

    @njit(cache=True)
    def _nls_grad_nb(U, v, x, lam):
        n, d = U.shape
        g = np.zeros(d)
        for i in range(n):
            z = 0.0
            for j in range(d):
                z += U[i, j] * x[j]
            s = _sigmoid_scalar(z)
            w = 2.0 * (s - v[i]) * s * (1.0 - s) / n
            for j in range(d):
                g[j] += w * U[i, j]
        for j in range(d):
            g[j] += lam * x[j]
        return g

    @njit(cache=True)
    def _lsqr_nb(A, b, atol, max_iters):
        m, n = A.shape
        At = np.ascontiguousarray(A.T)
        x = np.zeros(n)
        u = b.copy()
        beta = np.linalg.norm(u)
        if beta == 0.0:
            return x
        u = u / beta
        vv = At @ u
        alpha = np.linalg.norm(vv)
        if alpha == 0.0:
            return x
        vv = vv / alpha
        w = vv.copy()
        phibar = beta
        rhobar = alpha
        for _ in range(max_iters):
            u = A @ vv - alpha * u
            beta = np.linalg.norm(u)
            if beta > 0.0:
                u = u / beta
                vv = At @ u - beta * vv
                alpha = np.linalg.norm(vv)
                if alpha > 0.0:
                    vv = vv / alpha
            rho = np.hypot(rhobar, beta)
            c = rhobar / rho
            s = beta / rho
            theta = s * alpha
            rhobar = -c * alpha
            phi = c * phibar
            phibar = s * phibar
            x = x + (phi / rho) * w
            w = vv - (theta / rho) * w
            if np.linalg.norm(At @ (A @ x - b)) < atol:
                break
        return x

    st_value = _st_value_nb
    st_grad = _st_grad_nb
    nls_value = _nls_value_nb
    nls_grad = _nls_grad_nb
    lsqr = _lsqr_nb
else:
    st_value = _st_value_np
    st_grad = _st_grad_np
    nls_value = _nls_value_np
    nls_grad = _nls_grad_np
    lsqr = _lsqr_np

sigmoid = _sigmoid_np
