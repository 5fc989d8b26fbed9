"""Function-value globalization of AA-R, and a residual-decrease
acceptance variant for comparison.

The function-value scheme accepts the AA candidate iff

    f(x_aa) <= f(x^k) - gamma ||grad f(x^k)||^2
               + min{c1 ||grad f(anchor)||^nu, c2 ||grad f(anchor)||^2, c3}

and falls back to the Picard step g(x^k) otherwise.  f(x^k) is cached from
the previous acceptance test when the candidate was accepted; after a
restart or a rejection the cache is cold and the next test pays one extra
f call.  g(x^k) is already in the history, so rejected steps charge no
extra gradient.
"""

from typing import List, Optional

import numpy as np

from .anderson import AAState, aa_r_step, rho_statistic, solve_alpha
from .fixedpoint import (
    FixedPointMap,
    Iterate,
    NumericalError,
    OracleMeter,
    drive,
    evaluate_iterate,
)
from .objectives import Objective
from .records import (
    AA_STEP,
    PICARD_FALLBACK,
    PICARD_RESTART,
    GlobalizationParams,
    RunResult,
    SolverConfig,
)


def descent_test(f_aa: float, f_k: float, grad_k_normsq: float,
                 grad_anchor_norm: float, params: GlobalizationParams) -> bool:
    """True iff the candidate value passes the sufficient-decrease condition."""
    slack = min(
        params.c1 * grad_anchor_norm ** params.nu,
        params.c2 * grad_anchor_norm ** 2,
        params.c3,
    )
    return f_aa <= f_k - params.gamma * grad_k_normsq + slack


def run_globalized_aa_r(objective: Objective, x0, config: SolverConfig,
                        params: GlobalizationParams, meter: OracleMeter,
                        diag_meter: Optional[OracleMeter] = None,
                        collect_rho: bool = False) -> RunResult:
    """AA-R with the function-value acceptance test."""
    params.warn_if_noncompliant(objective.L, config.m)
    fp = FixedPointMap(objective)
    diag = diag_meter if diag_meter is not None else OracleMeter()
    state: Optional[AAState] = None
    cycle_start = 0
    pending_f: Optional[float] = None  # f at the upcoming iterate, already charged
    conds: List[float] = []

    def step_fn(k, it):
        nonlocal state, cycle_start, pending_f
        if pending_f is not None:
            it.f_paid = pending_f
            pending_f = None
        mhat = k - cycle_start
        if mhat > config.m:
            cycle_start = k
            mhat = 0
        if mhat == 0:
            _, state_new, kind, _ = aa_r_step(None, it, 0, config)
            state = state_new
            return it.g, kind, True, None

        state.push_history(it.x, it.g)
        sol = solve_alpha(state, method=config.alpha_method, lsqr_tol=config.lsqr_tol)
        if config.cond_bound is not None and sol.cond_HtH > config.cond_bound:
            cycle_start = k
            _, state_new, kind, _ = aa_r_step(None, it, 0, config)
            state = state_new
            return it.g, kind, True, None
        conds.append(sol.cond_HtH)

        if it.f_paid is None:
            meter.add_f()
            it.f_paid = float(objective.f(it.x))
        f_k = it.f_paid
        meter.add_f()
        f_aa = float(objective.f(sol.x_aa))
        accepted = descent_test(f_aa, f_k, it.grad_norm ** 2,
                                state.anchor_grad_norm, params)
        rho = None
        if collect_rho:
            diag.add_f()
            f_g = float(objective.f(it.g))
            rho = rho_statistic(f_aa, f_g, state.anchor_grad_norm)
        if accepted:
            pending_f = f_aa
            return sol.x_aa, AA_STEP, True, rho
        return it.g, PICARD_FALLBACK, False, rho

    result = drive(fp, x0, config, meter, step_fn, diag)
    result.aa_conds = conds
    return result


def run_residual_globalized_aa(objective: Objective, x0, config: SolverConfig,
                               meter: OracleMeter,
                               diag_meter: Optional[OracleMeter] = None) -> RunResult:
    """Accept the AA candidate iff its residual norm does not exceed
    eta * max of the last m realized residual norms; Picard step otherwise.
    Restarting follows the AA-R cycle when config.res_restart is set,
    otherwise the window slides like pure AA.

    Testing the candidate requires its gradient, so a rejected iteration
    charges one extra gradient call; an accepted one reuses the evaluation
    as the next iterate's.
    """
    fp = FixedPointMap(objective)
    window: List[Iterate] = []  # realized iterates, for the sliding variant
    res_window: List[float] = []
    state: Optional[AAState] = None
    cycle_start = 0

    def push_res(value):
        res_window.append(value)
        if len(res_window) > config.m:
            res_window.pop(0)

    def step_fn(k, it):
        nonlocal state, cycle_start
        push_res(float(np.linalg.norm(it.h)))

        if config.res_restart:
            mhat = k - cycle_start
            if mhat > config.m:
                cycle_start = k
                mhat = 0
            if mhat == 0:
                _, state_new, kind, _ = aa_r_step(None, it, 0, config)
                state = state_new
                return it.g, kind, True, None
            state.push_history(it.x, it.g)
            sol = solve_alpha(state, method=config.alpha_method, lsqr_tol=config.lsqr_tol)
        else:
            window.append(it)
            if len(window) > config.m + 1:
                window.pop(0)
            if len(window) == 1:
                return it.g, PICARD_RESTART, True, None
            st = AAState(window[0], len(window) - 1)
            for w in window[1:]:
                st.push_history(w.x, w.g)
            sol = solve_alpha(st, method=config.alpha_method, lsqr_tol=config.lsqr_tol)

        if not np.all(np.isfinite(sol.x_aa)):
            return it.g, PICARD_FALLBACK, False, None
        try:
            cand = evaluate_iterate(fp, sol.x_aa, meter)
        except NumericalError:
            return it.g, PICARD_FALLBACK, False, None
        if np.linalg.norm(cand.h) <= config.res_eta * max(res_window):
            return cand, AA_STEP, True, None
        return it.g, PICARD_FALLBACK, False, None

    return drive(fp, x0, config, meter, step_fn, diag_meter)
