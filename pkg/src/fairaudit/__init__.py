"""Group and individual fairness auditing with context-based metric selection."""

__version__ = "0.1.0"

from .core import AuditDataset, AuditRecord, ConfusionMatrix, MetricId, MetricResult, Mode, group_partition  # noqa: E402
from .binary_metrics import GroupedConfusions, binary_metric, confusion_by_group  # noqa: E402
from .score_metrics import (  # noqa: E402
    CalibrationConfig,
    auc_by_group,
    auprc_by_group,
    balance_by_group,
    calibration_by_group,
)
from .individual import KnncConfig, knn_consistency  # noqa: E402
from .diagnostics import DataDiagnostics, diagnose, four_fifths_check, incompatibility_report  # noqa: E402
from .ingestion import SchemaConfig, apply_threshold, load_dataset  # noqa: E402
from .selector import ContextAnswers, Recommendation, recommend, resolve_context  # noqa: E402

__all__ = [
    "AuditDataset", "AuditRecord", "ConfusionMatrix", "MetricId", "MetricResult", "Mode", "group_partition",
    "GroupedConfusions", "binary_metric", "confusion_by_group",
    "CalibrationConfig", "auc_by_group", "auprc_by_group", "balance_by_group", "calibration_by_group",
    "KnncConfig", "knn_consistency",
    "DataDiagnostics", "diagnose", "four_fifths_check", "incompatibility_report",
    "SchemaConfig", "apply_threshold", "load_dataset",
    "ContextAnswers", "Recommendation", "recommend", "resolve_context",
]
