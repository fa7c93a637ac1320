"""Dependency distance distributions: extraction, fitting, sampling, and
optimality scores for syntactic dependency treebanks."""

from .arrangement import ArrangementBudgetError, min_arrangement_cost
from .estimation import (
    FitResult,
    SelectionReport,
    SlopeSummary,
    fit,
    information_criteria,
    initial_values,
    select,
    slope_analysis,
    threshold_scan,
)
from .models import (
    Model,
    ModelParams,
    harmonic,
    log_likelihood,
    log_pmf,
    pmf,
    sufficient_stats,
    two_regime_geometric_constants,
    zeta_geometric_constants,
)
from .optimality import (
    OmegaLengthStats,
    OmegaResult,
    average_omega,
    expected_random,
    min_arrangement,
    omega,
    sum_distances,
)
from .sampling import (
    SamplerConfig,
    draw_from_config,
    draw_sample,
    generate_validation_suite,
    goodness_of_fit,
    sample_geometric,
    sample_tabular,
    sample_zeta_truncated,
)
from .treebank import (
    DepTree,
    DistanceSample,
    LengthDistribution,
    SampleSet,
    build_samples,
    distances,
    load_conllu,
    parse_conllu,
)
from .validation import run_validation

__version__ = "0.1.0"

__all__ = [
    "ArrangementBudgetError",
    "DepTree",
    "DistanceSample",
    "FitResult",
    "LengthDistribution",
    "Model",
    "ModelParams",
    "OmegaLengthStats",
    "OmegaResult",
    "SamplerConfig",
    "SampleSet",
    "SelectionReport",
    "SlopeSummary",
    "average_omega",
    "build_samples",
    "distances",
    "draw_from_config",
    "draw_sample",
    "expected_random",
    "fit",
    "generate_validation_suite",
    "goodness_of_fit",
    "harmonic",
    "information_criteria",
    "initial_values",
    "load_conllu",
    "log_likelihood",
    "log_pmf",
    "min_arrangement",
    "min_arrangement_cost",
    "omega",
    "parse_conllu",
    "pmf",
    "run_validation",
    "sample_geometric",
    "sample_tabular",
    "sample_zeta_truncated",
    "select",
    "slope_analysis",
    "sufficient_stats",
    "sum_distances",
    "threshold_scan",
    "two_regime_geometric_constants",
    "zeta_geometric_constants",
]
