"""Objective bundles: quadratic, student's-t, and sigmoid least-squares
losses, plus dataset synthesis and CSV ingestion.

An Objective carries raw callables (no oracle accounting); metering lives
in :mod:`aagd.fixedpoint`.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import _kernels
from .linalg import spectral_norm

DEFAULT_MU = 20.0
DEFAULT_LAMBDA = 1e-2


class CsvFormatError(ValueError):
    """Raised on malformed dataset files; message names the offending line."""


@dataclass(frozen=True)
class Objective:
    """f, its gradient, a Lipschitz constant for the gradient, and (when
    available in closed form) the Hessian."""

    n: int
    f: Callable[[np.ndarray], float]
    grad: Callable[[np.ndarray], np.ndarray]
    L: float
    hess: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = ""


@dataclass(frozen=True)
class Dataset:
    U: np.ndarray  # (n_samples, d), one feature row per sample
    v: np.ndarray  # (n_samples,), labels in {0, 1}

    def __post_init__(self):
        if self.U.ndim != 2:
            raise ValueError("feature matrix must be 2-d")
        if self.v.shape != (self.U.shape[0],):
            raise ValueError("label count must equal sample count")
        if not np.all((self.v == 0.0) | (self.v == 1.0)):
            raise ValueError("labels must be 0 or 1")


def make_quadratic(B, b=None, shift=None):
    """f(x) = 0.5 (x-shift)^T B (x-shift) - b^T (x-shift), B SPD."""
    B = np.asarray(B, dtype=float)
    n = B.shape[0]
    if B.shape != (n, n):
        raise ValueError("B must be square")
    scale = max(1.0, float(np.abs(B).max()))
    if np.abs(B - B.T).max() > 1e-12 * scale:
        raise ValueError("B must be symmetric")
    eigs = np.linalg.eigvalsh(B)
    if eigs[0] <= 0.0:
        raise ValueError("B must be positive definite")
    b = np.zeros(n) if b is None else np.asarray(b, dtype=float)
    shift = np.zeros(n) if shift is None else np.asarray(shift, dtype=float)

    def f(x):
        d = x - shift
        return float(0.5 * d @ (B @ d) - b @ d)

    def grad(x):
        return B @ (x - shift) - b

    return Objective(n=n, f=f, grad=grad, L=float(eigs[-1]), hess=lambda x: B, name="quadratic")


def make_student_t(data: Dataset, mu: float = DEFAULT_MU, lam: float = DEFAULT_LAMBDA):
    """Student's-t loss (1/n) sum log(1 + (u_i^T x - v_i)^2 / mu) + (lam/2)||x||^2."""
    if mu <= 0.0:
        raise ValueError("mu must be positive")
    n_samples, d = data.U.shape
    if n_samples == 0:
        raise ValueError("empty dataset")
    U = np.ascontiguousarray(data.U, dtype=float)
    v = np.ascontiguousarray(data.v, dtype=float)
    L = (2.0 / (mu * n_samples)) * spectral_norm(U) ** 2 + lam

    def f(x):
        return _kernels.st_value(U, v, np.ascontiguousarray(x, dtype=float), mu, lam)

    def grad(x):
        return _kernels.st_grad(U, v, np.ascontiguousarray(x, dtype=float), mu, lam)

    def hess(x):
        r = U @ x - v
        w = 2.0 * (mu - r * r) / (mu + r * r) ** 2 / n_samples
        return (U.T * w) @ U + lam * np.eye(d)

    return Objective(n=d, f=f, grad=grad, L=float(L), hess=hess, name="st")


def make_nls(data: Dataset, lam: float = DEFAULT_LAMBDA):
    """Sigmoid least squares (1/n) sum (sigma(u_i^T x) - v_i)^2 + (lam/2)||x||^2."""
    n_samples, d = data.U.shape
    if n_samples == 0:
        raise ValueError("empty dataset")
    U = np.ascontiguousarray(data.U, dtype=float)
    v = np.ascontiguousarray(data.v, dtype=float)
    L = (1.0 / (6.0 * n_samples)) * spectral_norm(U) ** 2 + lam

    def f(x):
        return _kernels.nls_value(U, v, np.ascontiguousarray(x, dtype=float), lam)

    def grad(x):
        return _kernels.nls_grad(U, v, np.ascontiguousarray(x, dtype=float), lam)

    def hess(x):
        s = _kernels.sigmoid(U @ x)
        sp = s * (1.0 - s)
        spp = sp * (1.0 - 2.0 * s)
        w = 2.0 * (sp * sp + (s - v) * spp) / n_samples
        return (U.T * w) @ U + lam * np.eye(d)

    return Objective(n=d, f=f, grad=grad, L=float(L), hess=hess, name="nls")


def synth_dataset(n_samples: int, dim: int, seed: int) -> Dataset:
    """Standard-normal features; binary labels from a seeded random hyperplane."""
    if n_samples < 1 or dim < 1:
        raise ValueError("n_samples and dim must be at least 1")
    rng = np.random.default_rng(seed)
    U = rng.standard_normal((n_samples, dim))
    w = rng.standard_normal(dim)
    v = (U @ w > 0.0).astype(float)
    return Dataset(U=U, v=v)


def load_csv(path) -> Dataset:
    """Read a header-less `label,f1,f2,...` file (labels 0/1, equal widths)."""
    rows = []
    labels = []
    width = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\r\n")
            if line == "":
                continue
            parts = line.split(",")
            if len(parts) < 2:
                raise CsvFormatError(f"line {lineno}: expected `label,feature...`, got {line!r}")
            try:
                values = [float(p) for p in parts]
            except ValueError as exc:
                raise CsvFormatError(f"line {lineno}: non-numeric field ({exc})") from None
            if values[0] not in (0.0, 1.0):
                raise CsvFormatError(f"line {lineno}: label must be 0 or 1, got {parts[0]}")
            if width is None:
                width = len(values) - 1
            elif len(values) - 1 != width:
                raise CsvFormatError(
                    f"line {lineno}: expected {width} features, got {len(values) - 1}"
                )
            labels.append(values[0])
            rows.append(values[1:])
    if not rows:
        raise CsvFormatError("empty dataset file")
    return Dataset(U=np.array(rows, dtype=float), v=np.array(labels, dtype=float))
