"""Access-point subset selection for RSS fingerprint floor localization.

Selection is posed as a QUBO over binary AP indicators: maximize per-AP
importance (Cramér's V against the floor label) while minimizing pairwise
redundancy (absolute Pearson correlation), balanced by a parameter alpha
that is tuned by binary search against a held-out localization-accuracy
oracle.
"""

from .dataset import (
    CsvSchema,
    DiscretizedDataset,
    FingerprintDataset,
    discretize,
    load_fingerprint,
    reduce,
    save_fingerprint,
    split,
)
from .errors import ApselError, ConfigError, DataError, LocalizerError, SolverError
from .locate import AccuracyReport, ClassifierSpec, accuracy_for_selection, make_localizer
from .qubo import QuboInstance, build_matrix, energy, importance_of, redundancy_of
from .search import SearchConfig, SearchTrace, binary_search_alpha, sweep_alpha
from .solver import (
    AnnealConfig,
    Solution,
    constrained_min,
    exhaustive_minimizers,
    make_solver,
    register_solver,
    solve_exhaustive,
    solve_sa,
)
from .stats import (
    chi_square,
    contingency_table,
    cramers_v,
    importance_vector,
    pearson,
    redundancy_matrix,
)
from .synthetic import generate_synthetic

__version__ = "0.1.0"

__all__ = [
    "AccuracyReport",
    "AnnealConfig",
    "ApselError",
    "ClassifierSpec",
    "ConfigError",
    "CsvSchema",
    "DataError",
    "DiscretizedDataset",
    "FingerprintDataset",
    "LocalizerError",
    "QuboInstance",
    "SearchConfig",
    "SearchTrace",
    "Solution",
    "SolverError",
    "accuracy_for_selection",
    "binary_search_alpha",
    "build_matrix",
    "chi_square",
    "constrained_min",
    "contingency_table",
    "cramers_v",
    "discretize",
    "energy",
    "exhaustive_minimizers",
    "generate_synthetic",
    "importance_of",
    "importance_vector",
    "load_fingerprint",
    "make_localizer",
    "make_solver",
    "pearson",
    "redundancy_matrix",
    "redundancy_of",
    "reduce",
    "register_solver",
    "save_fingerprint",
    "solve_exhaustive",
    "solve_sa",
    "split",
    "sweep_alpha",
]
