"""Gradient fixed-point map g(x) = x - grad f(x)/L, its residual
h(x) = g(x) - x, and per-evaluation oracle accounting.

One gradient evaluation yields both g and h, so callers use
:meth:`FixedPointMap.g_and_h` and are charged a single gradient call.
Function values are charged separately, only where an algorithm actually
needs f.  Diagnostic quantities (per-row f for logs, the rho statistic)
are charged to a *separate* meter so benchmark oracle counts stay honest.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .objectives import Objective
from .records import (
    BUDGET_EXHAUSTED,
    CONVERGED,
    DIVERGED,
    PICARD_RESTART,
    IterateRecord,
    RunResult,
    SolverConfig,
)


class NumericalError(ArithmeticError):
    """A map evaluation produced non-finite values."""


@dataclass
class OracleMeter:
    f_calls: int = 0
    grad_calls: int = 0

    def add_f(self) -> None:
        self.f_calls += 1

    def add_grad(self) -> None:
        self.grad_calls += 1

    def total(self) -> int:
        return self.f_calls + self.grad_calls


@dataclass(frozen=True)
class FixedPointMap:
    objective: Objective

    @property
    def step(self) -> float:
        return 1.0 / self.objective.L

    def g_and_h(self, x, meter: OracleMeter):
        """(g(x), h(x)) at the cost of one gradient call.

        h is computed literally as g - x so the identity holds bitwise.
        """
        meter.add_grad()
        grad = self.objective.grad(x)
        if not np.all(np.isfinite(grad)):
            raise NumericalError("gradient has non-finite components")
        g = x - grad / self.objective.L
        return g, g - x

    def g(self, x, meter: OracleMeter):
        return self.g_and_h(x, meter)[0]

    def h(self, x, meter: OracleMeter):
        return self.g_and_h(x, meter)[1]

    def f(self, x, meter: OracleMeter) -> float:
        meter.add_f()
        return self.objective.f(x)


@dataclass
class Iterate:
    """Everything a solver knows about the current point: one gradient
    evaluation worth of data, plus f(x) when some path already paid for it."""

    x: np.ndarray
    g: np.ndarray
    h: np.ndarray
    grad_norm: float
    f_paid: Optional[float] = None  # set only when charged to the main meter


def evaluate_iterate(fp: FixedPointMap, x, meter: OracleMeter) -> Iterate:
    g, h = fp.g_and_h(x, meter)
    return Iterate(x=x, g=g, h=h, grad_norm=float(fp.objective.L * np.linalg.norm(h)))


def drive(fp: FixedPointMap, x0, config: SolverConfig, meter: OracleMeter,
          step_fn, diag_meter: Optional[OracleMeter] = None) -> RunResult:
    """Shared solver loop.

    ``step_fn(k, it)`` performs iteration k from iterate ``it`` and returns
    ``(x_next, kind_next, accepted, rho)``.  The loop owns stopping
    (gradient tolerance, then strict-overshoot oracle budget), divergence
    detection, and the per-iterate records.
    """
    diag = diag_meter if diag_meter is not None else OracleMeter()
    rows = []
    result = RunResult(records=rows, status=BUDGET_EXHAUSTED)

    def emit(k, it, kind_in, accepted=True, rho=None):
        f_val = it.f_paid if it.f_paid is not None else _diag_f(fp, it.x, diag)
        rows.append(IterateRecord(
            k=k, oracle_calls=meter.total(), f=f_val, grad_norm=it.grad_norm,
            step_kind=kind_in, accepted=accepted, rho=rho,
        ))

    try:
        it = evaluate_iterate(fp, np.asarray(x0, dtype=float), meter)
    except NumericalError:
        result.status = DIVERGED
        return result

    k = 0
    kind_in = PICARD_RESTART
    while True:
        if it.grad_norm <= config.grad_tol:
            emit(k, it, kind_in)
            result.status = CONVERGED
            return result
        if meter.total() > config.oracle_budget:
            emit(k, it, kind_in)
            result.status = BUDGET_EXHAUSTED
            return result

        x_next, kind_next, accepted, rho = step_fn(k, it)
        emit(k, it, kind_in, accepted=accepted, rho=rho)

        if isinstance(x_next, Iterate):
            # step_fn already paid for the new iterate's gradient
            nxt, x_arr = x_next, x_next.x
        else:
            nxt, x_arr = None, x_next
        if not np.all(np.isfinite(x_arr)) or np.linalg.norm(x_arr) > config.divergence_bound:
            result.status = DIVERGED
            return result
        if nxt is None:
            try:
                nxt = evaluate_iterate(fp, x_arr, meter)
            except NumericalError:
                result.status = DIVERGED
                return result
        it = nxt
        k += 1
        kind_in = kind_next


def _diag_f(fp: FixedPointMap, x, diag: OracleMeter) -> float:
    diag.add_f()
    return float(fp.objective.f(x))


def run_gd(objective: Objective, x0, config: SolverConfig, meter: OracleMeter,
           diag_meter: Optional[OracleMeter] = None) -> RunResult:
    """Plain Picard iteration x <- g(x) (gradient descent with step 1/L)."""
    fp = FixedPointMap(objective)

    def step_fn(k, it):
        return it.g, PICARD_RESTART, True, None

    return drive(fp, x0, config, meter, step_fn, diag_meter)
