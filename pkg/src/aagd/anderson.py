"""Anderson mixing core: cycle history, coefficient solve, the restarted
scheme (AA-R), and the sliding-window variant without restarting.

History is stored as difference matrices against the cycle anchor
(iterate, map value, and residual at the cycle start), which is exactly
the data the mixing solve consumes.  The identity h = g - x makes
G = X + H column-wise.
"""

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .fixedpoint import FixedPointMap, Iterate, OracleMeter, drive, evaluate_iterate
from .linalg import condition_number_sq, solve_least_squares
from .objectives import Objective
from .records import AA_STEP, PICARD_RESTART, RunResult, SolverConfig

RHO_GUARD = 1e-300  # overflow guard for the rho denominator


class AAState:
    """Within-cycle history anchored at the cycle start."""

    def __init__(self, anchor: Iterate, m: int):
        n = anchor.x.shape[0]
        self.anchor_x = anchor.x
        self.anchor_g = anchor.g
        self.anchor_h = anchor.h
        self.anchor_grad_norm = anchor.grad_norm
        self.m = m
        self.mhat = 0
        self._X = np.zeros((n, m))
        self._H = np.zeros((n, m))
        self._G = np.zeros((n, m))

    @property
    def X(self):
        return self._X[:, : self.mhat]

    @property
    def H(self):
        return self._H[:, : self.mhat]

    @property
    def G(self):
        return self._G[:, : self.mhat]

    def push_history(self, x_new, g_new):
        if self.mhat >= self.m:
            raise RuntimeError("history full (mhat = m); restart the cycle before pushing")
        j = self.mhat
        self._X[:, j] = x_new - self.anchor_x
        self._G[:, j] = g_new - self.anchor_g
        self._H[:, j] = (g_new - x_new) - self.anchor_h
        self.mhat = j + 1


@dataclass(frozen=True)
class AAStepResult:
    alpha: np.ndarray
    x_aa: np.ndarray
    linearized_residual_norm: float
    cond_HtH: float
    degenerate: bool = False


def solve_alpha(state: AAState, method: str = "qr", lsqr_tol: float = 1e-16) -> AAStepResult:
    """Mixing coefficients minimizing ||anchor_h + H alpha||, and the
    candidate x_aa = anchor_g + G alpha."""
    if state.mhat < 1:
        raise ValueError("cannot solve with empty history")
    H, G = state.H, state.G
    if np.linalg.norm(H) <= 1e-14 * np.linalg.norm(state.anchor_h):
        # residual differences collapsed; fall back to the Picard value at
        # the anchor rather than dividing by noise
        return AAStepResult(
            alpha=np.zeros(state.mhat),
            x_aa=state.anchor_g.copy(),
            linearized_residual_norm=float(np.linalg.norm(state.anchor_h)),
            cond_HtH=np.inf,
            degenerate=True,
        )
    ls = solve_least_squares(H, -state.anchor_h, method=method, lsqr_tol=lsqr_tol)
    alpha = ls.solution
    return AAStepResult(
        alpha=alpha,
        x_aa=state.anchor_g + G @ alpha,
        linearized_residual_norm=float(np.linalg.norm(state.anchor_h + H @ alpha)),
        cond_HtH=condition_number_sq(H),
    )


def aa_r_step(state: Optional[AAState], it: Iterate, mhat: int, config: SolverConfig
              ) -> Tuple[np.ndarray, AAState, str, Optional[AAStepResult]]:
    """One AA-R iteration: Picard restart when mhat = 0, otherwise push the
    current iterate and take the mixing step from the cycle anchor."""
    if mhat == 0:
        return it.g, AAState(it, config.m), PICARD_RESTART, None
    state.push_history(it.x, it.g)
    sol = solve_alpha(state, method=config.alpha_method, lsqr_tol=config.lsqr_tol)
    return sol.x_aa, state, AA_STEP, sol


def rho_statistic(f_aa: float, f_g: float, grad_anchor_norm: float,
                  eps_guard: float = RHO_GUARD) -> float:
    """max{f(x_aa) - f(g(x)), 0} / ||grad f(anchor)||^3 (descent diagnostic)."""
    return max(f_aa - f_g, 0.0) / max(grad_anchor_norm ** 3, eps_guard)


def run_aa_r(objective: Objective, x0, config: SolverConfig, meter: OracleMeter,
             diag_meter: Optional[OracleMeter] = None, collect_rho: bool = False) -> RunResult:
    """Algorithm: restart with a Picard step every m+1 iterations, mix over
    the cycle history otherwise.  The optional condition-number safeguard
    forces an early restart when kappa(H^T H) exceeds config.cond_bound."""
    fp = FixedPointMap(objective)
    diag = diag_meter if diag_meter is not None else OracleMeter()
    state: Optional[AAState] = None
    cycle_start = 0
    conds: List[float] = []

    def step_fn(k, it):
        nonlocal state, cycle_start
        mhat = k - cycle_start
        if mhat > config.m:
            cycle_start = k
            mhat = 0
        x_next, new_state, kind, sol = aa_r_step(state, it, mhat, config)
        if sol is not None and config.cond_bound is not None and sol.cond_HtH > config.cond_bound:
            # safeguard restart: discard the solve, anchor a new cycle here
            cycle_start = k
            x_next, new_state, kind, sol = aa_r_step(None, it, 0, config)
        state = new_state
        rho = None
        if sol is not None:
            conds.append(sol.cond_HtH)
            if collect_rho:
                diag.add_f()
                f_g = objective.f(it.g)
                diag.add_f()
                f_aa = objective.f(x_next)
                rho = rho_statistic(f_aa, f_g, state.anchor_grad_norm)
        return x_next, kind, True, rho

    result = drive(fp, x0, config, meter, step_fn, diag)
    result.aa_conds = conds
    return result


def run_pure_aa(objective: Objective, x0, config: SolverConfig, meter: OracleMeter,
                diag_meter: Optional[OracleMeter] = None) -> RunResult:
    """AA over a sliding window of the last min(k, m) differences, never
    restarted.  Coincides with AA-R during the first cycle."""
    fp = FixedPointMap(objective)
    window: List[Iterate] = []

    def step_fn(k, it):
        window.append(it)
        if len(window) > config.m + 1:
            window.pop(0)
        if len(window) == 1:
            return it.g, PICARD_RESTART, True, None
        anchor = window[0]
        state = AAState(anchor, len(window) - 1)
        for w in window[1:]:
            state.push_history(w.x, w.g)
        sol = solve_alpha(state, method=config.alpha_method, lsqr_tol=config.lsqr_tol)
        return sol.x_aa, AA_STEP, True, None

    return drive(fp, x0, config, meter, step_fn, diag_meter)


def run_one_cycle(objective: Objective, x0, m: int, alpha_method: str = "qr",
                  lsqr_tol: float = 1e-16) -> List[np.ndarray]:
    """Iterates x^0 .. x^{m+1} of a single AA-R cycle (truncated early if the
    residual collapses to zero, in which case fewer iterates come back)."""
    fp = FixedPointMap(objective)
    meter = OracleMeter()
    config = SolverConfig(m=m, alpha_method=alpha_method, lsqr_tol=lsqr_tol)
    it = evaluate_iterate(fp, np.asarray(x0, dtype=float), meter)
    iterates = [it.x]
    state: Optional[AAState] = None
    for k in range(m + 1):
        if k > 0 and np.linalg.norm(it.h) == 0.0:
            break
        x_next, state, _, sol = aa_r_step(state, it, k, config)
        if sol is not None and sol.degenerate:
            break
        iterates.append(x_next)
        it = evaluate_iterate(fp, x_next, meter)
    return iterates
