"""Bug-lifecycle process mining toolkit.

Turns issue-tracker histories into event logs, clusters structurally
similar lifecycle traces (k-medoid over LCS or DTW), discovers frequency-
and duration-annotated process models, scores them by cyclomatic
complexity and replay fitness, and produces self-loop / ping-pong /
reopen / bottleneck reports.
"""

from .analytics import (
    BottleneckReport,
    LoopReport,
    ReopenReport,
    back_forth,
    bottlenecks,
    cluster_comparison,
    loop_report,
    reopen_analysis,
    self_loop_counts,
)
from .bugzilla import FetchSpec, fetch_bug_history, fetch_closed_bug_ids
from .clustering import (
    ClusterSet,
    assign_to_medoids,
    configuration_cost,
    k_medoid,
    select_best_cluster_set,
)
from .discovery import (
    ProcessModel,
    annotate_durations,
    discover_model,
    export_dot,
    export_model_xml,
    import_model_xml,
)
from .distance import (
    BACKEND,
    Metric,
    dtw_distance,
    lcs_length,
    similarity_matrix,
)
from .ingest import (
    ActivityCatalog,
    EventLog,
    HistoryRecord,
    Trace,
    build_event_log,
    default_catalog,
    derive_activity_code,
    parse_history_records,
    to_sequential,
)
from .metrics import (
    FitnessAccumulator,
    GoodnessReport,
    complexity,
    dcc,
    fitness,
    weighted_goodness,
)

__version__ = "0.1.0"

__all__ = [
    "ActivityCatalog",
    "BACKEND",
    "BottleneckReport",
    "ClusterSet",
    "EventLog",
    "FetchSpec",
    "FitnessAccumulator",
    "GoodnessReport",
    "HistoryRecord",
    "LoopReport",
    "Metric",
    "ProcessModel",
    "ReopenReport",
    "Trace",
    "annotate_durations",
    "assign_to_medoids",
    "back_forth",
    "bottlenecks",
    "build_event_log",
    "cluster_comparison",
    "complexity",
    "configuration_cost",
    "dcc",
    "default_catalog",
    "derive_activity_code",
    "discover_model",
    "dtw_distance",
    "export_dot",
    "export_model_xml",
    "fetch_bug_history",
    "fetch_closed_bug_ids",
    "fitness",
    "import_model_xml",
    "k_medoid",
    "lcs_length",
    "loop_report",
    "reopen_analysis",
    "select_best_cluster_set",
    "self_loop_counts",
    "similarity_matrix",
    "to_sequential",
    "weighted_goodness",
]
