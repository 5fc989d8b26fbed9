"""Executable verifications of the structural results behind the solver:
AA-R/GMRES cycle equivalence, GMRES-vs-CR gap scaling, CG descent
inequalities, q-linear residual decrease, the descent diagnostic, and
the condition-number equivalence of the history matrices.

Each check returns a TheoremReport whose max_violation is a signed margin
(at or below the tolerance means pass).  Reports serialize to JSON for CI.
"""

import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from .anderson import run_aa_r, run_one_cycle
from .fixedpoint import OracleMeter
from .linalg import condition_number_sq
from .krylov import LinearSystem, build_perturbed_A, cg, cr, gmres, gradient_post_steps
from .objectives import Objective
from .records import SolverConfig


@dataclass
class TheoremReport:
    name: str
    instances_checked: int
    max_violation: float
    tolerance: float
    details: Dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.max_violation <= self.tolerance

    def to_json(self) -> str:
        return json.dumps(
            {
                "name": self.name,
                "instances_checked": self.instances_checked,
                "max_violation": self.max_violation,
                "pass": bool(self.passed),
            }
        )


def check_aa_gmres_equivalence(objective: Objective, x0, m: int,
                               alpha_method: str = "qr",
                               tolerance: float = 1e-8) -> TheoremReport:
    """One AA-R cycle against GMRES on the interpolating linear model: a
    single model gradient step on the k-th GMRES iterate must reproduce
    the (k+1)-th AA-R iterate."""
    iterates = run_one_cycle(objective, np.asarray(x0, dtype=float), m,
                             alpha_method=alpha_method)
    if len(iterates) < 3:
        return TheoremReport("aa_gmres_equivalence", 0, 0.0, tolerance,
                             {"note": "cycle degenerate at the first step"})
    x_start = iterates[0]
    model_pts = iterates[: min(len(iterates) - 1, m + 1)]  # anchor plus cycle interior
    A = build_perturbed_A(objective, model_pts)
    sys = LinearSystem(A=A, b=-objective.grad(x_start), x0=x_start)
    gm = gmres(sys, m)
    K = min(len(gm.iterates), len(iterates) - 1)
    violations = []
    for k in range(K):
        xbar = gradient_post_steps(sys, gm.iterates[k], 1, objective.L)
        target = iterates[k + 1]
        violations.append(
            float(np.linalg.norm(xbar - target) / max(1.0, np.linalg.norm(target)))
        )
    return TheoremReport("aa_gmres_equivalence", K, max(violations), tolerance,
                         {"per_step": violations})


def check_gmres_cr_gap(B, E_direction, scales, b_direction,
                       C1: float = 1.0, tolerance: float = 0.0) -> TheoremReport:
    """Gap between GMRES on the perturbed system and CR on the symmetric
    one, normalized by ||b||^2, must stay bounded as ||b|| -> 0.  The pass
    rule compares the two smallest scales against twice the two largest."""
    B = np.asarray(B, dtype=float)
    n = B.shape[0]
    L = float(np.linalg.eigvalsh(B)[-1])
    x0 = np.zeros(n)
    bdir = np.asarray(b_direction, dtype=float)
    bdir = bdir / np.linalg.norm(bdir)
    scales = sorted(scales, reverse=True)
    gaps: List[float] = []
    skipped = 0
    for t in scales:
        b = t * bdir
        A = B + C1 * np.linalg.norm(b) * np.asarray(E_direction, dtype=float)
        if np.linalg.svd(A, compute_uv=False)[-1] <= 1e-12:
            skipped += 1
            continue
        sys_a = LinearSystem(A=A, b=b, x0=x0)
        sys_b = LinearSystem(A=B, b=b, x0=x0)
        gm = gmres(sys_a, n)
        crt = cr(sys_b, n)
        worst = 0.0
        for k in range(min(len(gm.iterates), len(crt.iterates))):
            xg, xr = gm.iterates[k], crt.iterates[k]
            pairs = [
                (xg, xr),
                (gradient_post_steps(sys_a, xg, 1, L), gradient_post_steps(sys_b, xr, 1, L)),
                (gradient_post_steps(sys_a, xg, 2, L), gradient_post_steps(sys_b, xr, 2, L)),
            ]
            worst = max(worst, max(float(np.linalg.norm(u - v)) for u, v in pairs))
        gaps.append(worst / (t * t))
    if len(gaps) < 2:
        return TheoremReport("gmres_cr_gap", len(gaps), 0.0, tolerance,
                             {"gaps": gaps, "skipped": skipped, "note": "vacuous"})
    violation = max(gaps[-2:]) - 2.0 * max(gaps[:2])
    return TheoremReport("gmres_cr_gap", len(gaps), violation, tolerance,
                         {"gaps": gaps, "skipped": skipped})


def check_cg_identities(B, ystar, y0, floor: float = 1e-6,
                        tolerance: float = 1e-8) -> TheoremReport:
    """The nine classical CG identities (residual/direction orthogonality,
    norm recursions, step-size bounds, three-term recurrence), each
    normalized by the magnitudes entering it.

    Iterations whose recursive residual has dropped below floor * ||r^0||
    carry no meaningful direction in double precision and are excluded.
    """
    B = np.asarray(B, dtype=float)
    sys = LinearSystem(A=B, b=B @ (np.asarray(ystar, float) - np.asarray(y0, float)),
                       x0=np.asarray(y0, float))
    tr = cg(sys, B.shape[0])
    r, p, a, bc = tr.cg_r, tr.cg_p, tr.cg_a, tr.cg_b
    rn = [float(np.linalg.norm(v)) for v in r]
    if rn[0] == 0.0:
        return TheoremReport("cg_identities", 0, 0.0, tolerance, {"note": "vacuous"})
    live = [i for i in range(len(r)) if rn[i] >= floor * rn[0]]
    T = len(a)
    viol: Dict[str, float] = {}

    def note(key, value):
        viol[key] = max(viol.get(key, 0.0), float(value))

    for i in live:
        for j in live:
            if i != j:
                note("ii_residual_orthogonality", abs(r[i] @ r[j]) / (rn[i] * rn[j]))
                note("vii_direction_conjugacy",
                     abs(p[i] @ (B @ p[j])) / (np.linalg.norm(p[i]) * np.linalg.norm(B @ p[j])))
                if i != j + 1:
                    note("viii_residual_direction_conjugacy",
                         abs(r[i] @ (B @ p[j])) / (rn[i] * np.linalg.norm(B @ p[j])))
            if i < j:
                note("iii_direction_residual_orthogonality",
                     abs(p[i] @ r[j]) / (np.linalg.norm(p[i]) * rn[j]))
            elif i > j or i == j:
                lhs = float(p[i] @ r[j])
                scale = max(rn[i] ** 2, float(np.linalg.norm(p[i])) * rn[j])
                note("iii_direction_residual_value", abs(lhs - rn[i] ** 2) / scale)
            if i <= j:
                lhs = float(p[i] @ p[j])
                rhs = rn[j] ** 2 * float(np.linalg.norm(p[i])) ** 2 / rn[i] ** 2
                scale = max(abs(rhs), float(np.linalg.norm(p[i]) * np.linalg.norm(p[j])))
                note("vi_direction_inner_products", abs(lhs - rhs) / scale)
        rhs = rn[i] ** 4 * sum(1.0 / rn[j] ** 2 for j in range(i + 1))
        note("iv_direction_norm_recursion",
             abs(float(np.linalg.norm(p[i])) ** 2 - rhs) / rhs)
    for i in range(T):
        if i + 1 not in live or i not in live:
            continue
        lhs = float(r[i + 1] @ (B @ r[i]))
        rhs = -rn[i + 1] ** 2 / a[i]
        note("v_cross_energy",
             abs(lhs - rhs) / max(abs(rhs), rn[i + 1] * float(np.linalg.norm(B @ r[i]))))
        ray = rn[i] ** 2 / float(r[i] @ (B @ r[i]))
        if i == 0:
            note("ix_step_size_bounds", abs(a[0] - ray) / ray)
        else:
            note("ix_step_size_bounds", (ray - a[i]) / ray)
    for i in range(1, T):
        if i + 1 not in live:
            continue
        bp = (a[i] / a[i - 1]) * bc[i - 1]
        rhs = (1.0 + bp) * r[i] - a[i] * (B @ r[i]) - bp * r[i - 1]
        scale = max((1.0 + bp) * rn[i], a[i] * float(np.linalg.norm(B @ r[i])),
                    abs(bp) * rn[i - 1])
        note("x_three_term_recurrence", float(np.linalg.norm(r[i + 1] - rhs)) / scale)

    worst = max(viol.values()) if viol else 0.0
    return TheoremReport("cg_identities", len(viol), worst, tolerance, {"per_identity": viol})


def check_cg_descent(B, ystar, y0, L, tolerance: float = 1e-10) -> TheoremReport:
    """Two CG descent inequalities: a single model gradient step on y^k
    beats two steps on y^{k-1} by the stated residual margins, and the next
    CG iterate beats one step on y^k outright."""
    B = np.asarray(B, dtype=float)
    norm_B = float(np.linalg.eigvalsh(B)[-1])
    if L < norm_B * (1.0 - 1e-12):
        raise ValueError("L must be at least the spectral norm of B")
    ystar = np.asarray(ystar, dtype=float)
    y0 = np.asarray(y0, dtype=float)
    sys = LinearSystem(A=B, b=B @ (ystar - y0), x0=y0)
    tr = cg(sys, B.shape[0])
    T = len(tr.iterates) - 1
    if T < 1:
        return TheoremReport("cg_descent", 0, 0.0, tolerance, {"note": "vacuous, started at y*"})
    nu = L / norm_B
    coef_k = 2.0 * nu + 1.0 / nu ** 2 - 3.0
    coef_km1 = (nu + 1.0 / nu - 2.0) ** 2
    ybar = [gradient_post_steps(sys, y, 1, L) for y in tr.iterates]
    ytilde = [gradient_post_steps(sys, y, 2, L) for y in tr.iterates]
    dist2 = lambda y: float(np.linalg.norm(y - ystar) ** 2)
    violations = []
    for k in range(1, T + 1):
        slack = (
            dist2(ytilde[k - 1])
            - dist2(ybar[k])
            - coef_k * float(tr.cg_r[k] @ tr.cg_r[k]) / L ** 2
            - coef_km1 * float(tr.cg_r[k - 1] @ tr.cg_r[k - 1]) / L ** 2
        )
        violations.append(-slack)
    for k in range(T):
        violations.append(dist2(tr.iterates[k + 1]) - dist2(ybar[k]))
    return TheoremReport("cg_descent", len(violations), max(violations), tolerance)


def check_cr_value_descent(B, b, x0, L, tolerance: float = 1e-12) -> TheoremReport:
    """Quadratic-model values along CR: one model gradient step on x^k_R is
    at least as good as two on x^{k-1}_R, and x^k_R beats one step on
    x^{k-1}_R."""
    B = np.asarray(B, dtype=float)
    if L < float(np.linalg.eigvalsh(B)[-1]) * (1.0 - 1e-12):
        raise ValueError("L must be at least the spectral norm of B")
    b = np.asarray(b, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    sys = LinearSystem(A=B, b=b, x0=x0)
    tr = cr(sys, B.shape[0])
    T = len(tr.iterates) - 1
    if T < 1:
        return TheoremReport("cr_value_descent", 0, 0.0, tolerance, {"note": "vacuous"})

    def phi(x):
        d = x - x0
        return float(0.5 * d @ (B @ d) - b @ d)

    xbar = [gradient_post_steps(sys, x, 1, L) for x in tr.iterates]
    xtilde = [gradient_post_steps(sys, x, 2, L) for x in tr.iterates]
    violations = []
    for k in range(1, T + 1):
        violations.append(phi(xbar[k]) - phi(xtilde[k - 1]))
        violations.append(phi(tr.iterates[k]) - phi(xbar[k - 1]))
    return TheoremReport("cr_value_descent", len(violations), max(violations), tolerance)


def check_q_linear(objective: Objective, x0, m: int, kappa_r: float,
                   grad_tol: float = 1e-9, oracle_budget: int = 100000,
                   tolerance: float = 1e-10) -> TheoremReport:
    """Per-step residual contraction of AA-R at factor 1 - 1/(2 kappa_r)."""
    config = SolverConfig(m=m, grad_tol=grad_tol, oracle_budget=oracle_budget)
    result = run_aa_r(objective, x0, config, OracleMeter())
    bound = 1.0 - 1.0 / (2.0 * kappa_r)
    norms = [row.grad_norm for row in result.records]
    ratios = [
        norms[i + 1] / norms[i]
        for i in range(len(norms) - 1)
        if norms[i] > 1e-300
    ]
    if not ratios:
        return TheoremReport("q_linear", 0, 0.0, tolerance, {"note": "vacuous"})
    worst = max(ratios)
    return TheoremReport("q_linear", len(ratios), worst - bound, tolerance,
                         {"worst_ratio": worst, "bound": bound, "status": result.status})


def check_descent_theorem(objective: Objective, x0, m: int,
                          grad_tol: float = 1e-7, oracle_budget: int = 100000,
                          frac_allowance: float = 0.05,
                          tolerance: float = 1e-12) -> TheoremReport:
    """Descent diagnostic along an AA-R run: rho stays bounded (late half
    no worse than early half) and the fraction of non-descent steps in the
    final quarter stays within the allowance."""
    config = SolverConfig(m=m, grad_tol=grad_tol, oracle_budget=oracle_budget)
    result = run_aa_r(objective, x0, config, OracleMeter(), collect_rho=True)
    rhos = [(row.k, row.rho) for row in result.records if row.rho is not None]
    if not rhos:
        return TheoremReport("descent_theorem", 0, 0.0, tolerance, {"note": "vacuous"})
    ks = [k for k, _ in rhos]
    mid = (ks[0] + ks[-1]) / 2.0
    early = [r for k, r in rhos if k <= mid]
    late = [r for k, r in rhos if k > mid] or [0.0]
    quarter = ks[0] + 3.0 * (ks[-1] - ks[0]) / 4.0
    final_q = [r for k, r in rhos if k >= quarter]
    frac_nonzero = sum(1 for r in final_q if r > 0.0) / max(len(final_q), 1)
    violation = max(max(late) - max(early), frac_nonzero - frac_allowance)
    return TheoremReport(
        "descent_theorem", len(rhos), violation, tolerance,
        {
            "rhos": [r for _, r in rhos],
            "final_quarter_nonzero_frac": frac_nonzero,
            "status": result.status,
        },
    )


def check_cond_number_equivalence(objective: Objective, cycle_iterates,
                                  kappa_r: float,
                                  tolerance: float = 1e-9) -> TheoremReport:
    """kappa(H^T H) and kappa(X^T X) bound each other within 4 kappa_r^2."""
    iterates = [np.asarray(x, dtype=float) for x in cycle_iterates]
    if len(iterates) < 2:
        raise ValueError("need the anchor and at least one further iterate")
    x0 = iterates[0]
    h0 = -objective.grad(x0) / objective.L
    X = np.column_stack([x - x0 for x in iterates[1:]])
    H = np.column_stack([(-objective.grad(x) / objective.L) - h0 for x in iterates[1:]])
    kX = condition_number_sq(X)
    kH = condition_number_sq(H)
    if not (np.isfinite(kX) and np.isfinite(kH)):
        return TheoremReport("cond_number_equivalence", 0, 0.0, tolerance,
                             {"note": "skipped, rank-deficient history"})
    factor = 4.0 * kappa_r ** 2
    violation = max(kH / (factor * kX) - 1.0, kX / (factor * kH) - 1.0)
    return TheoremReport("cond_number_equivalence", 1, violation, tolerance,
                         {"kappa_X": kX, "kappa_H": kH})


def write_reports(reports: List[TheoremReport], path) -> None:
    payload = [json.loads(r.to_json()) for r in reports]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
