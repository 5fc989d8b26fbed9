"""Command-line entry points.

  aagd run   — one experiment, CSV log to --out
  aagd grid  — a cross-product of runs from a key=value config file,
               per-run CSVs plus summary.json into --out-dir
  aagd check — the structural-theorem report suite, JSON to --out
  aagd bench — timings of the numba kernels against the numpy fallbacks

Exit codes: 0 converged or budget exhausted, 2 diverged, 1 input error.
"""

import argparse
import itertools
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import harness, theorem_lab
from .records import DIVERGED
from .linalg import random_spd
from .objectives import make_student_t, synth_dataset

_RUN_KEYS = {
    "problem": str, "dataset": str, "solver": str, "m": int,
    "gamma": float, "nu": float, "c1": float, "c2": float, "c3": float,
    "grad_tol": float, "budget": int, "seed": int,
    "lambda": float, "mu_st": float, "cond_bound": float,
}


def _parse_config_file(path):
    """key = value lines; comma-separated values span a grid axis."""
    axes = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip().strip('"')
        if not sep or not key or not value:
            raise ValueError(f"{path}:{lineno}: expected `key = value`, got {raw!r}")
        if key not in _RUN_KEYS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        conv = _RUN_KEYS[key]
        items = [v.strip() for v in value.split(",")] if key != "dataset" else [value]
        axes[key] = [conv(v) for v in items]
    return axes


def _configs_from_axes(axes):
    keys = sorted(axes)
    configs = []
    for combo in itertools.product(*(axes[k] for k in keys)):
        kv = dict(zip(keys, combo))
        configs.append(harness.RunConfig(
            problem=kv.get("problem", "nls"),
            dataset=kv.get("dataset", "synth:n=200,d=50"),
            solver=kv.get("solver", "aa-fv"),
            m=kv.get("m", 10),
            gamma=kv.get("gamma"),
            nu=kv.get("nu"),
            c1=kv.get("c1"),
            c2=kv.get("c2"),
            c3=kv.get("c3"),
            grad_tol=kv.get("grad_tol", 1e-7),
            oracle_budget=kv.get("budget", 3000),
            seed=kv.get("seed", 0),
            lam=kv.get("lambda", 1e-2),
            mu_st=kv.get("mu_st", 20.0),
            cond_bound=kv.get("cond_bound"),
        ))
    return configs


def _add_run_flags(p):
    p.add_argument("--problem", choices=harness.PROBLEMS)
    p.add_argument("--solver", choices=harness.SOLVERS)
    p.add_argument("--dataset")
    p.add_argument("--m", type=int)
    p.add_argument("--gamma", type=float)
    p.add_argument("--nu", type=float)
    p.add_argument("--c1", type=float)
    p.add_argument("--c2", type=float)
    p.add_argument("--c3", type=float)
    p.add_argument("--grad-tol", type=float)
    p.add_argument("--budget", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--mu-st", type=float)
    p.add_argument("--cond-bound", type=float)
    p.add_argument("--no-restart", action="store_true",
                   help="sliding window instead of cycles (aa-res solver)")


def _overrides(args):
    out = {}
    mapping = {
        "problem": "problem", "solver": "solver", "dataset": "dataset", "m": "m",
        "gamma": "gamma", "nu": "nu", "c1": "c1", "c2": "c2", "c3": "c3",
        "grad_tol": "grad_tol", "budget": "oracle_budget", "seed": "seed",
        "lam": "lam", "mu_st": "mu_st", "cond_bound": "cond_bound",
    }
    for attr, field in mapping.items():
        value = getattr(args, attr, None)
        if value is not None:
            out[field] = value
    if getattr(args, "no_restart", False):
        out["res_restart"] = False
    return out


def _cmd_run(args):
    file_axes = _parse_config_file(args.config) if args.config else {}
    for key, values in file_axes.items():
        if len(values) > 1:
            raise ValueError(f"grid axis {key!r} in a single-run config; use `aagd grid`")
    base = _configs_from_axes({k: v for k, v in file_axes.items()}) if file_axes \
        else [harness.RunConfig()]
    from dataclasses import replace

    config = replace(base[0], **_overrides(args))
    log = harness.run_experiment(config)
    out = args.out or "run.csv"
    harness.write_csv(log, out)
    last = log.rows[-1]
    print(f"{config.solver} on {config.problem}: {log.final_status} "
          f"(grad_norm={last.grad_norm:.3e}, oracle_calls={last.oracle_calls}) -> {out}")
    return 2 if log.final_status == DIVERGED else 0


def _cmd_grid(args):
    axes = _parse_config_file(args.config)
    configs = _configs_from_axes(axes)
    from dataclasses import replace

    overrides = _overrides(args)
    configs = [replace(c, **overrides) for c in configs]
    logs = harness.run_grid(configs, parallelism=args.parallelism)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for i, log in enumerate(logs):
        harness.write_csv(log, out_dir / f"run_{i:03d}.csv")
    harness.write_summary(logs, out_dir / "summary.json")
    bad = [log for log in logs if log.final_status in (DIVERGED, harness.FAILED)]
    for log in bad:
        print(f"warning: {log.config.solver} on {log.config.problem} "
              f"seed {log.config.seed}: {log.final_status} {log.error or ''}", file=sys.stderr)
    print(f"{len(logs)} runs -> {out_dir}")
    return 2 if bad else 0


def _cmd_check(args):
    reports = default_report_suite(seed=args.seed)
    for report in reports:
        state = "PASS" if report.passed else "FAIL"
        print(f"{report.name}: {state} (instances={report.instances_checked}, "
              f"max_violation={report.max_violation:.3e})")
    if args.out:
        theorem_lab.write_reports(reports, args.out)
    return 0 if all(r.passed for r in reports) else 1


def default_report_suite(seed: int = 0):
    """A quick structural sanity sweep (the full one lives in the tests)."""
    from .objectives import make_quadratic

    rng = np.random.default_rng(seed)
    B = random_spd(8, seed, 1.0, 10.0)
    quad = make_quadratic(B, shift=rng.standard_normal(8))
    x0 = rng.standard_normal(8)
    data = synth_dataset(60, 10, seed)
    st = make_student_t(data, lam=0.1)
    reports = [
        theorem_lab.check_aa_gmres_equivalence(quad, x0, 8),
        theorem_lab.check_gmres_cr_gap(
            random_spd(6, seed + 1, 1.0, 4.0),
            _unit_spectral(rng.standard_normal((6, 6))),
            [1e-1, 1e-2, 1e-3, 1e-4],
            rng.standard_normal(6),
        ),
        theorem_lab.check_cg_descent(B, rng.standard_normal(8), rng.standard_normal(8),
                                     1.5 * float(np.linalg.eigvalsh(B)[-1])),
        theorem_lab.check_cr_value_descent(B, rng.standard_normal(8), rng.standard_normal(8),
                                           float(np.linalg.eigvalsh(B)[-1])),
        theorem_lab.check_q_linear(
            make_quadratic(np.diag(np.linspace(1.0, 5.0, 6))), rng.standard_normal(6),
            3, kappa_r=5.0),
        theorem_lab.check_descent_theorem(st, 0.05 * rng.standard_normal(10), 5),
    ]
    return reports


def _unit_spectral(M):
    return M / np.linalg.svd(M, compute_uv=False)[0]


def _cmd_bench(args):
    from . import _kernels

    rng = np.random.default_rng(0)
    U = rng.standard_normal((args.samples, args.dim))
    v = (rng.standard_normal(args.samples) > 0).astype(float)
    x = rng.standard_normal(args.dim)
    H = rng.standard_normal((args.dim, 12))
    h = rng.standard_normal(args.dim)

    cases = [
        ("st_grad", lambda fn: fn(U, v, x, 20.0, 1e-2),
         _kernels._st_grad_nb if _kernels.USE_NUMBA else None, _kernels._st_grad_np),
        ("nls_grad", lambda fn: fn(U, v, x, 1e-2),
         _kernels._nls_grad_nb if _kernels.USE_NUMBA else None, _kernels._nls_grad_np),
        ("lsqr", lambda fn: fn(H, h, 1e-16, 120),
         _kernels._lsqr_nb if _kernels.USE_NUMBA else None, _kernels._lsqr_np),
    ]
    print(f"kernel benchmark: samples={args.samples} dim={args.dim} reps={args.reps}")
    print(f"{'kernel':<10} {'numpy (ms)':>12} {'numba (ms)':>12} {'speedup':>9}")
    for name, call, nb_fn, np_fn in cases:
        t_np = _time(call, np_fn, args.reps)
        if nb_fn is None:
            print(f"{name:<10} {t_np * 1e3:>12.3f} {'n/a':>12} {'n/a':>9}")
            continue
        call(nb_fn)  # compile outside the timed region
        t_nb = _time(call, nb_fn, args.reps)
        print(f"{name:<10} {t_np * 1e3:>12.3f} {t_nb * 1e3:>12.3f} {t_np / t_nb:>8.2f}x")
    return 0


def _time(call, fn, reps):
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        call(fn)
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="aagd",
                                     description="Anderson-accelerated gradient descent lab")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment")
    _add_run_flags(p_run)
    p_run.add_argument("--config", help="key = value config file")
    p_run.add_argument("--out", help="CSV output path (default run.csv)")
    p_run.set_defaults(fn=_cmd_run)

    p_grid = sub.add_parser("grid", help="run a config-file grid")
    _add_run_flags(p_grid)
    p_grid.add_argument("--config", required=True)
    p_grid.add_argument("--out-dir", required=True)
    p_grid.add_argument("--parallelism", type=int, default=1)
    p_grid.set_defaults(fn=_cmd_grid)

    p_check = sub.add_parser("check", help="run the theorem report suite")
    p_check.add_argument("--seed", type=int, default=0)
    p_check.add_argument("--out", help="JSON report path")
    p_check.set_defaults(fn=_cmd_check)

    p_bench = sub.add_parser("bench", help="time numba kernels vs numpy fallbacks")
    p_bench.add_argument("--samples", type=int, default=20000)
    p_bench.add_argument("--dim", type=int, default=200)
    p_bench.add_argument("--reps", type=int, default=5)
    p_bench.set_defaults(fn=_cmd_bench)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
