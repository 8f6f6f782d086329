"""Fidelity metrics, domain rules, plots and HPO for synthetic tabular data."""

from .errors import (
    BadTuple,
    EmptyColumn,
    EmptyFile,
    EmptyList,
    EmptySeries,
    EmptySynth,
    EmptyTable,
    InvalidRule,
    MissingColumn,
    MixedDatasets,
    ModelSetMismatch,
    NoCompletedTrials,
    NoRealSupport,
    ParseError,
    SchemaMismatch,
    SynthqaError,
    UnknownColumn,
)
from .schema import CATEGORICAL, NUMERICAL, ColumnSpec, Schema, load_schema, save_schema
from .table import (
    MISSING_LEVEL,
    AlignedPair,
    CategoricalColumn,
    ColumnProfile,
    DatasetProfile,
    MergedLevels,
    NumericColumn,
    TableData,
    align_dictionaries,
    load_csv,
    profile,
    write_csv,
)
from .marginals import MarginalTable, VariableTuple, count_marginal, enumerate_tuples
from .metrics import (
    DEFAULT_BINS,
    POINT_MEAN,
    VARIABLE_L1,
    BinSpec,
    EvaluationResult,
    QualityReport,
    bin_numeric,
    coverage,
    evaluate,
    evaluate_full,
    hist_iou,
    invented,
    jsd,
    mae,
    mae_k,
    wasserstein1d,
)
from .plots import (
    QQSeries,
    ScatterPoint,
    qq_series,
    qq_series_for_pair,
    render_qq,
    render_scatter,
    scatter_points,
)
from .domain import (
    ExclusionRule,
    PrefixRule,
    RangeRule,
    RuleResult,
    RuleSet,
    ViolationReport,
    check,
    fit_rules,
    load_rules,
    shipped_rules_path,
)
from .pareto import (
    MAXIMIZE,
    MINIMIZE,
    crowding_distance,
    dominates,
    pareto_front_indices,
    pareto_ranks,
)
from .refsynth import (
    BootstrapSampler,
    IndependentSampler,
    ModeCollapseSampler,
    bootstrap_sample,
    corrupt_cells,
    independent_sample,
    mode_collapse_sample,
    sample_by_method,
)
from .rank import (
    Improvement,
    RankComparison,
    RankRow,
    RankTable,
    compare_rankings,
    improvement,
    rank_models,
)
from .evaluator import DomainValidator, FidelityEvaluator

__version__ = "0.1.0"

__all__ = [
    "AlignedPair",
    "BadTuple",
    "BinSpec",
    "BootstrapSampler",
    "CATEGORICAL",
    "CategoricalColumn",
    "ColumnProfile",
    "ColumnSpec",
    "DEFAULT_BINS",
    "DatasetProfile",
    "DomainValidator",
    "EmptyColumn",
    "EmptyFile",
    "EmptyList",
    "EmptySeries",
    "EmptySynth",
    "EmptyTable",
    "EvaluationResult",
    "ExclusionRule",
    "FidelityEvaluator",
    "Improvement",
    "IndependentSampler",
    "InvalidRule",
    "MAXIMIZE",
    "MINIMIZE",
    "MISSING_LEVEL",
    "MarginalTable",
    "MergedLevels",
    "MissingColumn",
    "MixedDatasets",
    "ModeCollapseSampler",
    "ModelSetMismatch",
    "NUMERICAL",
    "NoCompletedTrials",
    "NoRealSupport",
    "NumericColumn",
    "POINT_MEAN",
    "ParseError",
    "PrefixRule",
    "QQSeries",
    "QualityReport",
    "RangeRule",
    "RankComparison",
    "RankRow",
    "RankTable",
    "RuleResult",
    "RuleSet",
    "ScatterPoint",
    "Schema",
    "SchemaMismatch",
    "SynthqaError",
    "TableData",
    "UnknownColumn",
    "VARIABLE_L1",
    "VariableTuple",
    "ViolationReport",
    "align_dictionaries",
    "bin_numeric",
    "bootstrap_sample",
    "check",
    "compare_rankings",
    "corrupt_cells",
    "count_marginal",
    "coverage",
    "crowding_distance",
    "dominates",
    "enumerate_tuples",
    "evaluate",
    "evaluate_full",
    "fit_rules",
    "hist_iou",
    "improvement",
    "independent_sample",
    "invented",
    "jsd",
    "load_csv",
    "load_rules",
    "load_schema",
    "mae",
    "mae_k",
    "mode_collapse_sample",
    "pareto_front_indices",
    "pareto_ranks",
    "profile",
    "qq_series",
    "qq_series_for_pair",
    "rank_models",
    "render_qq",
    "render_scatter",
    "sample_by_method",
    "save_schema",
    "scatter_points",
    "shipped_rules_path",
    "wasserstein1d",
    "write_csv",
]
