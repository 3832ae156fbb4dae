"""Exact max-plus algebra and a solver for max-atom systems."""

from .core import (
    BOTTOM,
    ONE,
    TOP,
    ZERO,
    CircuitSign,
    ContractViolation,
    DimensionError,
    GraphAnalysis,
    MaxPlusError,
    Matrix,
    NoStarError,
    PreconditionError,
    all_circuits_negative,
    analyze_graph,
    has_star,
    kleene_star,
    mat_add,
    mat_leq,
    mat_min,
    mat_mul,
    oplus,
    otimes,
    residual,
    saturate,
    scalar,
    scc_decompose,
)
from .estimator import MaxAtomSolver
from .model import (
    Atom,
    AtomSyntaxError,
    Classification,
    MapSystem,
    MatrixSystem,
    classify,
    fill_matrices,
    parse_atoms,
    preprocess,
)
from .nonpositive import SolutionDescription, Status, sample_solution, solve_nonpositive, sup_solution
from .oracle import BudgetExceeded, CompletenessWarning, Grid, check, completeness_report, grid_enumerate
from .pipeline import ReportStatus, Solved, sample, solve
from .positive import PositiveSystem, is_monomial, pseudo_inverse, sharp_matrix

__version__ = "0.1.0"

__all__ = [
    "all_circuits_negative",
    "analyze_graph",
    "Atom",
    "AtomSyntaxError",
    "BOTTOM",
    "BudgetExceeded",
    "check",
    "CircuitSign",
    "Classification",
    "classify",
    "completeness_report",
    "CompletenessWarning",
    "ContractViolation",
    "DimensionError",
    "fill_matrices",
    "GraphAnalysis",
    "Grid",
    "grid_enumerate",
    "has_star",
    "is_monomial",
    "kleene_star",
    "MapSystem",
    "mat_add",
    "mat_leq",
    "mat_min",
    "mat_mul",
    "Matrix",
    "MatrixSystem",
    "MaxAtomSolver",
    "MaxPlusError",
    "NoStarError",
    "ONE",
    "oplus",
    "otimes",
    "parse_atoms",
    "PositiveSystem",
    "PreconditionError",
    "preprocess",
    "pseudo_inverse",
    "ReportStatus",
    "residual",
    "sample",
    "sample_solution",
    "saturate",
    "scalar",
    "scc_decompose",
    "sharp_matrix",
    "SolutionDescription",
    "solve",
    "solve_nonpositive",
    "Solved",
    "Status",
    "sup_solution",
    "TOP",
    "ZERO",
]
