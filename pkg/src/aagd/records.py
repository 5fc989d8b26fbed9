"""Shared run-log record types and solver configuration."""

import warnings
from dataclasses import dataclass, field
from typing import List, Optional

# how an iterate was produced
PICARD_RESTART = "picard_restart"
PICARD_FALLBACK = "picard_fallback"
AA_STEP = "aa"

CONVERGED = "converged"
BUDGET_EXHAUSTED = "budget_exhausted"
DIVERGED = "diverged"


@dataclass(frozen=True)
class IterateRecord:
    """One row of a run log.

    ``step_kind`` names the step that produced iterate k (row 0 is the
    initial cycle anchor and is labeled picard_restart).  ``accepted`` and
    ``rho`` refer to the AA candidate formed *at* iteration k, so a row
    with accepted=False is followed by a picard_fallback row.
    """

    k: int
    oracle_calls: int
    f: float
    grad_norm: float
    step_kind: str
    accepted: bool = True
    rho: Optional[float] = None


@dataclass
class RunResult:
    records: List[IterateRecord]
    status: str
    # condition numbers kappa(H^T H) of the alpha-solves actually used for steps
    aa_conds: List[float] = field(default_factory=list)

    @property
    def final(self) -> IterateRecord:
        return self.records[-1]


@dataclass(frozen=True)
class GlobalizationParams:
    """Constants of the function-value acceptance test."""

    gamma: float
    nu: float = 2.1
    c1: float = 1.0
    c2: float = 0.0
    c3: float = 1.0

    @classmethod
    def defaults(cls, L: float, m: int) -> "GlobalizationParams":
        return cls(gamma=0.01 / (2.0 * L), nu=2.1, c1=1.0, c2=0.99 / (2.0 * m * L), c3=1.0)

    def is_compliant(self, L: float, m: int) -> bool:
        return (
            0.0 < self.gamma < 1.0 / (2.0 * L)
            and 2.0 < self.nu < 3.0
            and self.c1 > 0.0
            and self.c3 > 0.0
            and self.c2 < 1.0 / (2.0 * m * L)
        )

    def warn_if_noncompliant(self, L: float, m: int) -> None:
        if not self.is_compliant(L, m):
            warnings.warn(
                "globalization parameters are outside the guaranteed-convergence "
                f"ranges (need 0 < gamma < 1/(2L), nu in (2,3), c1,c3 > 0, "
                f"c2 < 1/(2mL); got {self})",
                stacklevel=3,
            )


@dataclass(frozen=True)
class SolverConfig:
    m: int = 10
    grad_tol: float = 1e-7
    oracle_budget: int = 3000
    alpha_method: str = "qr"  # "qr" | "lsqr"; the harness selects lsqr
    lsqr_tol: float = 1e-16
    cond_bound: Optional[float] = None  # restart when kappa(H^T H) exceeds this
    divergence_bound: float = 1e12
    # residual-based acceptance (aa-res solver only)
    res_eta: float = 1.0 - 1e-6
    res_restart: bool = True

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("memory parameter m must be at least 1")
        if self.grad_tol <= 0.0:
            raise ValueError("grad_tol must be positive")
        if self.oracle_budget < 0:
            raise ValueError("oracle_budget must be nonnegative")
