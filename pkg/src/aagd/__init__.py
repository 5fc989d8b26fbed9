"""Restarted Anderson acceleration for gradient fixed-point maps.

Core pieces: objective bundles (quadratic / student's-t / sigmoid least
squares), the metered gradient map, the AA-R solver family with optional
function-value or residual globalization, dense GMRES/CR/CG with full
traces, executable structural-theorem checks, and a CSV benchmark harness.
"""

from .fixedpoint import FixedPointMap, OracleMeter, run_gd
from .anderson import AAState, AAStepResult, rho_statistic, run_aa_r, run_pure_aa, solve_alpha
from .globalized import descent_test, run_globalized_aa_r, run_residual_globalized_aa
from .objectives import (
    Dataset,
    Objective,
    load_csv,
    make_nls,
    make_quadratic,
    make_student_t,
    synth_dataset,
)
from .records import GlobalizationParams, IterateRecord, RunResult, SolverConfig

__all__ = [
    "AAState",
    "AAStepResult",
    "Dataset",
    "FixedPointMap",
    "GlobalizationParams",
    "IterateRecord",
    "Objective",
    "OracleMeter",
    "RunResult",
    "SolverConfig",
    "descent_test",
    "load_csv",
    "make_nls",
    "make_quadratic",
    "make_student_t",
    "rho_statistic",
    "run_aa_r",
    "run_gd",
    "run_globalized_aa_r",
    "run_pure_aa",
    "run_residual_globalized_aa",
    "solve_alpha",
    "synth_dataset",
]

__version__ = "0.1.0"
