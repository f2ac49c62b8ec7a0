"""Temporal event sequence aggregation and composite event learning."""

from .aggregate import EventTree, TreeNode, build_rdt, build_sa, transition_shade
from .composite import (
    DEFAULT_K,
    DEFAULT_WINDOW,
    CompositeDescriptor,
    CompositeModel,
    Segment,
    Slice,
    assign,
    assign_many,
    describe,
    kmeans,
    rewrite,
    segment,
)
from .errors import (
    BadTimestamp,
    DimensionMismatch,
    EmptyDataset,
    EmptyFilter,
    EmptySample,
    EventFlowError,
    InvariantViolation,
    KTooLarge,
    MissingColumn,
    NoSegments,
    ParseError,
    PartitionMismatch,
    SchemaVersionMismatch,
    UnknownOutcomeType,
    ZeroCount,
)
from .estimators import CompositeEventLearner, EventTreeBuilder
from .ingest import (
    SynthSpec,
    generate_synthetic,
    load_result,
    parse_timestamp,
    read_events,
    read_outcomes,
    save_result,
    write_events_csv,
    write_outcomes_csv,
)
from .metrics import (
    QualityReport,
    SubgroupReport,
    entropy,
    extract_subgroups,
    information_gain,
    quality_report,
    tree_ig,
    visual_complexity,
)
from .model import (
    DAY,
    YEAR,
    Dataset,
    DatasetSummary,
    EventRecord,
    EventSequence,
    EventTypeRegistry,
    OutcomeRecord,
    PrepConfig,
    build_dataset,
    summarize,
    verify_dataset,
)
from .pipeline import AnalysisResult, run_analysis

__version__ = "0.1.0"

__all__ = [
    "AnalysisResult",
    "BadTimestamp",
    "CompositeDescriptor",
    "CompositeEventLearner",
    "CompositeModel",
    "DAY",
    "DEFAULT_K",
    "DEFAULT_WINDOW",
    "Dataset",
    "DatasetSummary",
    "DimensionMismatch",
    "EmptyDataset",
    "EmptyFilter",
    "EmptySample",
    "EventFlowError",
    "EventRecord",
    "EventSequence",
    "EventTree",
    "EventTreeBuilder",
    "EventTypeRegistry",
    "InvariantViolation",
    "KTooLarge",
    "MissingColumn",
    "NoSegments",
    "OutcomeRecord",
    "ParseError",
    "PartitionMismatch",
    "PrepConfig",
    "QualityReport",
    "SchemaVersionMismatch",
    "Segment",
    "Slice",
    "SubgroupReport",
    "SynthSpec",
    "TreeNode",
    "UnknownOutcomeType",
    "YEAR",
    "ZeroCount",
    "assign",
    "assign_many",
    "build_dataset",
    "build_rdt",
    "build_sa",
    "describe",
    "entropy",
    "extract_subgroups",
    "generate_synthetic",
    "information_gain",
    "kmeans",
    "load_result",
    "parse_timestamp",
    "quality_report",
    "read_events",
    "read_outcomes",
    "rewrite",
    "run_analysis",
    "save_result",
    "segment",
    "summarize",
    "transition_shade",
    "tree_ig",
    "verify_dataset",
    "visual_complexity",
    "write_events_csv",
    "write_outcomes_csv",
]
