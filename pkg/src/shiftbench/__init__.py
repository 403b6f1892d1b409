"""shiftbench: label-shift robustness benchmarking for weather-labelled
driving datasets, with similarity-mapped synthetic augmentation selection."""

from .errors import (
    CapacityError,
    CoverageError,
    DegenerateScenarioError,
    EmptyOracleError,
    ManifestParseError,
    ShiftbenchError,
    UndefinedReportError,
    UndefinedSimilarityError,
    UnscorableSampleError,
    ValidationError,
)
from .manifest import (
    Box,
    DatasetManifest,
    LabelDistribution,
    Sample,
    label_distribution,
    load_manifest,
    save_manifest,
)
from .metrics import (
    APResult,
    ClassificationReport,
    ConfusionMatrix,
    DetectionRecord,
    GroundTruth,
    T4_CLASSES,
    average_precision,
    classification_report,
    confusion_matrix,
    iou,
    mean_ap,
)
from .shift import (
    ResamplePlan,
    ShiftScenario,
    make_shift,
    resample,
    shift_divergence,
    standard_scenarios,
)
from .simmap import (
    EmbeddingStore,
    class_vector,
    cosine_similarity,
    keyword_embed,
    label_vector,
    load_embeddings,
    save_embeddings,
)
from .suite import (
    ExperimentConfig,
    ResultsGrid,
    compare_grid,
    improvement_summary,
    load_config,
    run_shift_suite,
)
from .trainmap import AugmentationSet, OracleConfig, ScoredSample, oracle, t_rain

__version__ = "0.1.0"

__all__ = [
    "APResult",
    "AugmentationSet",
    "Box",
    "CapacityError",
    "ClassificationReport",
    "ConfusionMatrix",
    "CoverageError",
    "DatasetManifest",
    "DegenerateScenarioError",
    "DetectionRecord",
    "EmbeddingStore",
    "EmptyOracleError",
    "ExperimentConfig",
    "GroundTruth",
    "LabelDistribution",
    "ManifestParseError",
    "OracleConfig",
    "ResamplePlan",
    "ResultsGrid",
    "Sample",
    "ScoredSample",
    "ShiftScenario",
    "ShiftbenchError",
    "T4_CLASSES",
    "UndefinedReportError",
    "UndefinedSimilarityError",
    "UnscorableSampleError",
    "ValidationError",
    "average_precision",
    "class_vector",
    "classification_report",
    "compare_grid",
    "confusion_matrix",
    "cosine_similarity",
    "improvement_summary",
    "iou",
    "keyword_embed",
    "label_distribution",
    "label_vector",
    "load_config",
    "load_embeddings",
    "load_manifest",
    "make_shift",
    "mean_ap",
    "oracle",
    "resample",
    "run_shift_suite",
    "save_embeddings",
    "save_manifest",
    "shift_divergence",
    "standard_scenarios",
    "t_rain",
]
