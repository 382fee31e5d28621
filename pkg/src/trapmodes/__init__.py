"""Trapped modes of a strip waveguide with a thick rectangular obstacle.

A numerical laboratory for eigenvalues below the first transverse threshold:
a mode-matching solver, an independent finite-difference oracle, variational
upper bounds from closed-form trial fields, one-dimensional reductions of the
underlying inequalities, and a harness that sweeps the channel clearance and
extracts the small-clearance convergence rate.
"""

__version__ = "0.1.0"

from .geometry import (
    FIRST_THRESHOLD,
    Geometry,
    SymmetryVariant,
    Thresholds,
    is_integer_half_length,
    make_geometry,
)
from .asymptotics import AsymptoticPrediction, CountSplit, M_of_a, decay_rate, eigen_count, predict
from .oned import (
    RobinProblem,
    RootList,
    SampledFunction,
    integer_expansion_defect,
    lemma_a1_lhs,
    lemma_left_lhs,
    lemma_right_residual,
    robin_eigenvalues,
    solve_mu_tan,
)
from .oned import solve_minus_mu_cot
from .modematch import (
    EigenvalueResult,
    MatchingSystem,
    ModeBases,
    SolveOptions,
    assemble,
    eigenvalues_below_threshold,
    field_evaluate,
    overlap,
    suggested_n_right,
)
from .fdoracle import (
    MIN_ORACLE_DELTA,
    GridSpec,
    SparseOperator,
    TruncationCondition,
    assemble_grid,
    assemble_strip,
    bracketed_eigenvalue,
    lowest_eigenvalues,
    strip_benchmark,
)
from .rayleigh import (
    PencilBounds,
    TrialFunction,
    build_multimode_family,
    energy_product,
    fractional_optimal,
    integer_a1,
    mass_product,
    minimax_upper_bounds,
    naive_constant,
    naive_phi1,
    rayleigh_quotient,
)
from .harness import (
    FitResult,
    HarnessConfig,
    ResultStore,
    SweepRecord,
    fit_rate,
    lemma_checks,
    read_csv,
    render_report,
    render_store,
    sweep,
    verify,
    write_csv,
    write_plot_files,
)

__all__ = [
    "FIRST_THRESHOLD",
    "Geometry",
    "SymmetryVariant",
    "Thresholds",
    "is_integer_half_length",
    "make_geometry",
    "AsymptoticPrediction",
    "CountSplit",
    "M_of_a",
    "decay_rate",
    "eigen_count",
    "predict",
    "RobinProblem",
    "RootList",
    "SampledFunction",
    "integer_expansion_defect",
    "lemma_a1_lhs",
    "lemma_left_lhs",
    "lemma_right_residual",
    "robin_eigenvalues",
    "solve_mu_tan",
    "solve_minus_mu_cot",
    "EigenvalueResult",
    "MatchingSystem",
    "ModeBases",
    "SolveOptions",
    "assemble",
    "eigenvalues_below_threshold",
    "field_evaluate",
    "overlap",
    "suggested_n_right",
    "MIN_ORACLE_DELTA",
    "GridSpec",
    "SparseOperator",
    "TruncationCondition",
    "assemble_grid",
    "assemble_strip",
    "bracketed_eigenvalue",
    "lowest_eigenvalues",
    "strip_benchmark",
    "PencilBounds",
    "TrialFunction",
    "build_multimode_family",
    "energy_product",
    "fractional_optimal",
    "integer_a1",
    "mass_product",
    "minimax_upper_bounds",
    "naive_constant",
    "naive_phi1",
    "rayleigh_quotient",
    "FitResult",
    "HarnessConfig",
    "ResultStore",
    "SweepRecord",
    "fit_rate",
    "lemma_checks",
    "read_csv",
    "render_report",
    "render_store",
    "sweep",
    "verify",
    "write_csv",
    "write_plot_files",
    "__version__",
]
