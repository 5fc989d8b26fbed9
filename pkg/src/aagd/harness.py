"""Experiment runner: builds a problem from a config, dispatches one of
the five solvers, and writes CSV iterate logs plus a JSON grid summary.

Protocol defaults: stop at ||grad f|| <= 1e-7 or once oracle calls exceed
3000; the AA subproblem is solved with LSQR at normal-equation tolerance
1e-16; x0 is standard normal from the run seed, shared by every solver
with the same (problem, dataset, seed).
"""

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .fixedpoint import OracleMeter, run_gd
from .anderson import run_aa_r, run_pure_aa
from .globalized import run_globalized_aa_r, run_residual_globalized_aa
from .objectives import Objective, load_csv, make_nls, make_quadratic, make_student_t, synth_dataset
from .records import GlobalizationParams, IterateRecord, RunResult, SolverConfig

PROBLEMS = ("quadratic", "st", "nls")
SOLVERS = ("gd", "pure-aa", "aa-r", "aa-res", "aa-fv")

CSV_HEADER = "k,oracle_calls,f,grad_norm,step_kind,accepted,rho_k"

FAILED = "failed"


@dataclass(frozen=True)
class RunConfig:
    problem: str = "nls"
    dataset: str = "synth:n=200,d=50"
    solver: str = "aa-fv"
    m: int = 10
    gamma: Optional[float] = None
    nu: Optional[float] = None
    c1: Optional[float] = None
    c2: Optional[float] = None
    c3: Optional[float] = None
    grad_tol: float = 1e-7
    oracle_budget: int = 3000
    seed: int = 0
    lam: float = 1e-2
    mu_st: float = 20.0
    cond_bound: Optional[float] = None
    res_restart: bool = True

    def __post_init__(self):
        if self.problem not in PROBLEMS:
            raise ValueError(f"unknown problem {self.problem!r}; choose from {PROBLEMS}")
        if self.solver not in SOLVERS:
            raise ValueError(f"unknown solver {self.solver!r}; choose from {SOLVERS}")
        if self.m < 1:
            raise ValueError("m must be at least 1")
        if self.grad_tol <= 0.0:
            raise ValueError("grad_tol must be positive")
        if self.oracle_budget < 1:
            raise ValueError("oracle_budget must be at least 1")


@dataclass
class RunLog:
    config: RunConfig
    rows: List[IterateRecord]
    final_status: str
    f_star_estimate: float
    error: Optional[str] = None


def _parse_dataset(spec: str) -> Tuple[str, Dict]:
    kind, _, rest = spec.partition(":")
    if kind == "csv":
        if not rest:
            raise ValueError("csv dataset needs a path, e.g. csv:data.csv")
        return "csv", {"path": rest}
    if kind != "synth":
        raise ValueError(f"unknown dataset kind {kind!r} (use synth:... or csv:path)")
    params: Dict[str, float] = {}
    if rest:
        for item in rest.split(","):
            key, _, value = item.partition("=")
            if not value:
                raise ValueError(f"malformed dataset parameter {item!r}")
            params[key.strip()] = float(value)
    return "synth", params


def build_objective(config: RunConfig) -> Objective:
    kind, params = _parse_dataset(config.dataset)
    if config.problem == "quadratic":
        if kind != "synth":
            raise ValueError("the quadratic problem is synthetic only")
        d = int(params.get("d", 20))
        kappa = float(params.get("kappa", 1.0))
        rng = np.random.default_rng(np.random.SeedSequence([config.seed, 7]))
        if kappa == 1.0:
            B = np.eye(d)
        else:
            Q, _ = np.linalg.qr(rng.standard_normal((d, d)))
            B = (Q * np.linspace(1.0, kappa, d)) @ Q.T
            B = 0.5 * (B + B.T)
        shift = rng.standard_normal(d)
        return make_quadratic(B, shift=shift)
    if kind == "csv":
        data = load_csv(params["path"])
    else:
        n = int(params.get("n", 200))
        d = int(params.get("d", 50))
        data = synth_dataset(n, d, config.seed)
    if config.problem == "st":
        return make_student_t(data, mu=config.mu_st, lam=config.lam)
    return make_nls(data, lam=config.lam)


def initial_point(config: RunConfig, dim: int) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence([config.seed, 101]))
    return rng.standard_normal(dim)


def globalization_params(config: RunConfig, L: float) -> GlobalizationParams:
    base = GlobalizationParams.defaults(L, config.m)
    return GlobalizationParams(
        gamma=base.gamma if config.gamma is None else config.gamma,
        nu=base.nu if config.nu is None else config.nu,
        c1=base.c1 if config.c1 is None else config.c1,
        c2=base.c2 if config.c2 is None else config.c2,
        c3=base.c3 if config.c3 is None else config.c3,
    )


def run_experiment(config: RunConfig) -> RunLog:
    objective = build_objective(config)
    x0 = initial_point(config, objective.n)
    solver_config = SolverConfig(
        m=config.m,
        grad_tol=config.grad_tol,
        oracle_budget=config.oracle_budget,
        alpha_method="lsqr",
        cond_bound=config.cond_bound,
        res_restart=config.res_restart,
    )
    meter = OracleMeter()
    diag = OracleMeter()
    if config.solver == "gd":
        result = run_gd(objective, x0, solver_config, meter, diag)
    elif config.solver == "pure-aa":
        result = run_pure_aa(objective, x0, solver_config, meter, diag)
    elif config.solver == "aa-r":
        result = run_aa_r(objective, x0, solver_config, meter, diag)
    elif config.solver == "aa-res":
        result = run_residual_globalized_aa(objective, x0, solver_config, meter, diag)
    else:  # aa-fv
        params = globalization_params(config, objective.L)
        result = run_globalized_aa_r(objective, x0, solver_config, params, meter,
                                     diag, collect_rho=True)
    fstar = min(row.f for row in result.records) if result.records else float("nan")
    return RunLog(config=config, rows=result.records,
                  final_status=result.status, f_star_estimate=fstar)


def run_grid(configs: List[RunConfig], parallelism: int = 1) -> List[RunLog]:
    """Run each config (optionally in parallel), preserving order.  A run
    that raises is reported as a failed log; the rest still complete."""
    if not configs:
        raise ValueError("empty grid")
    if parallelism < 1:
        raise ValueError("parallelism must be at least 1")

    def one(cfg: RunConfig) -> RunLog:
        try:
            return run_experiment(cfg)
        except Exception as exc:  # isolate per run
            return RunLog(config=cfg, rows=[], final_status=FAILED,
                          f_star_estimate=float("nan"), error=str(exc))

    if parallelism == 1:
        logs = [one(cfg) for cfg in configs]
    else:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            logs = list(pool.map(one, configs))

    # shared f* across the comparison group (same problem/dataset/seed)
    groups: Dict[Tuple, List[RunLog]] = {}
    for log in logs:
        key = (log.config.problem, log.config.dataset, log.config.seed)
        groups.setdefault(key, []).append(log)
    for members in groups.values():
        best = min((m.f_star_estimate for m in members
                    if not np.isnan(m.f_star_estimate)), default=float("nan"))
        for m in members:
            m.f_star_estimate = best
    return logs


def _fmt(x: float) -> str:
    return repr(float(x))


def write_csv(log: RunLog, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(CSV_HEADER + "\n")
        for row in log.rows:
            rho = "" if row.rho is None else _fmt(row.rho)
            fh.write(
                f"{row.k},{row.oracle_calls},{_fmt(row.f)},{_fmt(row.grad_norm)},"
                f"{row.step_kind},{'true' if row.accepted else 'false'},{rho}\n"
            )


def read_csv(path) -> List[IterateRecord]:
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if header != CSV_HEADER:
            raise ValueError(f"unexpected header {header!r}")
        for line in fh:
            k, calls, f, gnorm, kind, acc, rho = line.rstrip("\n").split(",")
            rows.append(IterateRecord(
                k=int(k), oracle_calls=int(calls), f=float(f), grad_norm=float(gnorm),
                step_kind=kind, accepted=acc == "true",
                rho=None if rho == "" else float(rho),
            ))
    return rows


def summarize(logs: List[RunLog]) -> Dict:
    runs = []
    for log in logs:
        final_gnorm = log.rows[-1].grad_norm if log.rows else float("nan")
        total = log.rows[-1].oracle_calls if log.rows else 0
        runs.append({
            "config": asdict(log.config),
            "final_status": log.final_status,
            "final_grad_norm": final_gnorm,
            "total_oracle_calls": total,
        })
    return {"runs": runs}


def write_summary(logs: List[RunLog], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(summarize(logs), fh, indent=2, sort_keys=True)
        fh.write("\n")
