"""Wrapper-based feature selection with nature-inspired binary optimizers.

The package reproduces a gait-classification study design: features are
ranked by correlation measures, the top half seeds a swarm of binary
metaheuristics, and candidate feature masks are scored by the accuracy of a
classifier trained from scratch on the selected columns.
"""

from .classifiers import ClassifierSpec, TrainedModel, evaluate_masked, predict, train
from .data import (
    CleanReport,
    Dataset,
    MinMaxParams,
    SplitIndices,
    SynthSpec,
    clean,
    kfold_indices,
    load_csv,
    normalize_minmax,
    split,
    synthesize,
    write_csv,
)
from .errors import DataError, SwarmSelectError, UndefinedStatisticError
from .evaluation import (
    ConfusionMatrix,
    CVResult,
    FitnessValue,
    MetricsReport,
    cross_validate,
    feature_reduction,
    fitness,
    format_percent,
    metrics,
)
from .optimizers import ALGORITHMS, SelectionResult, SelectorConfig, run_selector
from .pipeline import (
    CombinationResult,
    GridConfig,
    hex_to_mask,
    mask_to_hex,
    run_combination,
    run_grid,
    select_best,
)
from .ranking import (
    METHODS,
    RankedFeatures,
    leading_mask,
    pearson,
    rank_features,
    relief_weights,
    spearman,
)

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS",
    "METHODS",
    "ClassifierSpec",
    "CleanReport",
    "CombinationResult",
    "ConfusionMatrix",
    "CVResult",
    "DataError",
    "Dataset",
    "FitnessValue",
    "GridConfig",
    "MetricsReport",
    "MinMaxParams",
    "RankedFeatures",
    "SelectionResult",
    "SelectorConfig",
    "SplitIndices",
    "SwarmSelectError",
    "SynthSpec",
    "TrainedModel",
    "UndefinedStatisticError",
    "clean",
    "cross_validate",
    "evaluate_masked",
    "feature_reduction",
    "fitness",
    "format_percent",
    "hex_to_mask",
    "kfold_indices",
    "leading_mask",
    "load_csv",
    "mask_to_hex",
    "metrics",
    "normalize_minmax",
    "pearson",
    "predict",
    "rank_features",
    "relief_weights",
    "run_combination",
    "run_grid",
    "run_selector",
    "select_best",
    "spearman",
    "split",
    "synthesize",
    "train",
    "write_csv",
    "__version__",
]
