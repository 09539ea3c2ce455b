"""Fast evaluation of fractional time derivatives of order in (0, 1).

Kernel compression into sums of decaying exponentials, four streaming
derivative evaluators (direct, two fast mode-based rules, binomial
baseline), a 1D fractional diffusion solver with nonreflecting
fractional boundaries, and a benchmark CLI.
"""

from .analysis import ConvergenceStudy, TheoremConstants, fit_rate, theorem_constants, truncation_bound
from .pde import (
    DiffusionProblem,
    SolveReport,
    SpaceGrid,
    global_error,
    manufactured_problem,
    nonlinear_problem,
    related_error,
    solve,
)
from .quadrature import ConstructionError, QuadRule, gauss_jacobi_power, gauss_legendre
from .schemes import (
    HistoryState,
    L1Weights,
    TimeGrid,
    caputo_reference,
    fidr_expanded_weights,
    fidr_step,
    fir_step,
    gl_coefficients,
    gl_step,
    l1_step,
    l1_weights,
    new_history,
)
from .soe import (
    SoEApproximation,
    SoEParams,
    build_soe,
    soe_error_bound,
    soe_error_bound_terms,
    soe_eval,
    soe_max_error,
    tail_integral,
)

__all__ = [
    "ConstructionError",
    "ConvergenceStudy",
    "DiffusionProblem",
    "HistoryState",
    "L1Weights",
    "QuadRule",
    "SoEApproximation",
    "SoEParams",
    "SolveReport",
    "SpaceGrid",
    "TheoremConstants",
    "TimeGrid",
    "build_soe",
    "caputo_reference",
    "fidr_expanded_weights",
    "fidr_step",
    "fir_step",
    "fit_rate",
    "gauss_jacobi_power",
    "gauss_legendre",
    "gl_coefficients",
    "gl_step",
    "global_error",
    "l1_step",
    "l1_weights",
    "manufactured_problem",
    "new_history",
    "nonlinear_problem",
    "related_error",
    "soe_error_bound",
    "soe_error_bound_terms",
    "soe_eval",
    "soe_max_error",
    "solve",
    "tail_integral",
    "theorem_constants",
    "truncation_bound",
]

__version__ = "0.1.0"
