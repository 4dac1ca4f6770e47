"""Event-log complexity measures, including graph entropy over extended
prefix automata, and a correlation/regression engine for comparing them
with process-model quality."""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .automaton import (
    EpaBuilder, ExtendedPrefixAutomaton, PartitionStats, build_epa, build_epa_from_log,
    export_dot, partition_stats,
)
from .entropy import (
    EntropyReport, entropy_report, normalized_sequence_entropy, normalized_variant_entropy,
    partition_entropy, sequence_entropy, variant_entropy,
)
from .generator import LogSpec, generate
from .log import (
    ColumnMapping, EmptyLogError, Event, EventLog, LogParseError, Trace, Variant,
    parse_csv, parse_xes, read_log, to_plain_log, variants,
)
from .measures import (
    ALL_LABELS, DirectlyFollowsGraph, MeasureVector, affinity, avg_edit_distance, dev_random,
    dfg, distinct_traces, lod, lz_complexity, measure_all, size_measures, structure, t_comp,
)
from .stats import (
    CorrelationResult, MeasurementMatrix, RegressionResult, correlate_matrices, kendall, ols,
    pearson, read_matrix, regress,
)

__all__ = [
    "__version__", "BACKEND", "EpaBuilder", "ExtendedPrefixAutomaton", "PartitionStats",
    "build_epa", "build_epa_from_log", "export_dot", "partition_stats", "EntropyReport",
    "entropy_report", "normalized_sequence_entropy", "normalized_variant_entropy",
    "partition_entropy", "sequence_entropy", "variant_entropy", "LogSpec", "generate",
    "ColumnMapping", "EmptyLogError", "Event", "EventLog", "LogParseError", "Trace",
    "Variant", "parse_csv", "parse_xes", "read_log", "to_plain_log", "variants",
    "ALL_LABELS", "DirectlyFollowsGraph", "MeasureVector", "affinity", "avg_edit_distance",
    "dev_random", "dfg", "distinct_traces", "lod", "lz_complexity", "measure_all",
    "size_measures", "structure", "t_comp", "CorrelationResult", "MeasurementMatrix",
    "RegressionResult", "correlate_matrices", "kendall", "ols", "pearson", "read_matrix",
    "regress",
]
