"""Orthogonal polynomials and zero spacing on quadratically generated Cantor sets."""

__version__ = "0.1.0"

from .ddouble import DoubleDouble
from .errors import ConvergenceError, DomainError, RangeOverflowError
from .exact import (
    CriticalSet,
    MapFamily,
    ZeroSet,
    critical_set,
    evaluate_F,
    exact_zeros,
    monic_opoly_exact,
)
from .geometry import (
    BranchWord,
    GammaSequence,
    Interval,
    basic_interval,
    branch_composition,
    branch_value,
    delta,
    leftmost_length,
    level_gaps,
    level_intervals,
    u_map,
)
from .jacobi import (
    AccuracyControl,
    DiscreteMeasure,
    JacobiMatrix,
    eigen_zeros,
    gauss_measure,
    jacobi_for_gamma,
    moments,
    opoly_eval,
    refinement_measure,
    stieltjes_lanczos,
)
from .spacing import (
    ReportEntry,
    SpacingReport,
    full_verification,
    interlacing_at_most_one,
    min_spacing,
    set_distance,
    spacing_report,
    verify_branch_lemma,
    verify_critical_bound,
    verify_interlacing_bound,
    verify_second_neighbor_bound,
)

__all__ = [
    "AccuracyControl",
    "BranchWord",
    "ConvergenceError",
    "CriticalSet",
    "DiscreteMeasure",
    "DomainError",
    "DoubleDouble",
    "GammaSequence",
    "Interval",
    "JacobiMatrix",
    "MapFamily",
    "RangeOverflowError",
    "ReportEntry",
    "SpacingReport",
    "ZeroSet",
    "basic_interval",
    "branch_composition",
    "branch_value",
    "critical_set",
    "delta",
    "eigen_zeros",
    "evaluate_F",
    "exact_zeros",
    "full_verification",
    "gauss_measure",
    "interlacing_at_most_one",
    "jacobi_for_gamma",
    "leftmost_length",
    "level_gaps",
    "level_intervals",
    "min_spacing",
    "moments",
    "monic_opoly_exact",
    "opoly_eval",
    "refinement_measure",
    "set_distance",
    "spacing_report",
    "stieltjes_lanczos",
    "u_map",
    "verify_branch_lemma",
    "verify_critical_bound",
    "verify_interlacing_bound",
    "verify_second_neighbor_bound",
]
