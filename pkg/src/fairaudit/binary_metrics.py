"""Per-group confusion matrices and the confusion-matrix fairness metrics."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from .core import (
    BINARY_METRICS,
    DEFAULT_TOLERANCE,
    PAIR_COMPONENTS,
    AuditDataset,
    ConfusionMatrix,
    MetricId,
    MetricResult,
    Mode,
    compare_groups,
    group_partition,
    require_groups,
)
from .errors import EmptyGroup, MissingPrediction, UndefinedRate


@dataclass(frozen=True)
class GroupedConfusions:
    per_group: Mapping[str, ConfusionMatrix]
    threshold_used: Optional[float] = None

    def __post_init__(self):
        require_groups(self.per_group)
        for g, cm in self.per_group.items():
            if cm.total < 1:
                raise EmptyGroup(g)


def confusion_by_group(dataset: AuditDataset, threshold_used: Optional[float] = None) -> GroupedConfusions:
    parts = group_partition(dataset)
    require_groups(parts)
    out = {}
    for g, recs in parts.items():
        tp = fp = tn = fn = 0
        for r in recs:
            if r.predicted_outcome is None:
                raise MissingPrediction(f"a record in group {g!r} has no predicted outcome")
            if r.predicted_outcome == 1:
                if r.true_outcome == 1:
                    tp += 1
                else:
                    fp += 1
            elif r.true_outcome == 1:
                fn += 1
            else:
                tn += 1
        out[g] = ConfusionMatrix(tp=tp, fp=fp, tn=tn, fn=fn)
    return GroupedConfusions(out, threshold_used=threshold_used)


def _ratio(num: int, den: int, group: str, rate: str) -> float:
    if den == 0:
        raise UndefinedRate(group, rate)
    return num / den


def tpr(cm: ConfusionMatrix, group: str = "?") -> float:
    return _ratio(cm.tp, cm.tp + cm.fn, group, "TPR")


def fpr(cm: ConfusionMatrix, group: str = "?") -> float:
    return _ratio(cm.fp, cm.fp + cm.tn, group, "FPR")


def fnr(cm: ConfusionMatrix, group: str = "?") -> float:
    return _ratio(cm.fn, cm.tp + cm.fn, group, "FNR")


def tnr(cm: ConfusionMatrix, group: str = "?") -> float:
    return _ratio(cm.tn, cm.tn + cm.fp, group, "TNR")


def ppv(cm: ConfusionMatrix, group: str = "?") -> float:
    return _ratio(cm.tp, cm.tp + cm.fp, group, "PPV")


def npv(cm: ConfusionMatrix, group: str = "?") -> float:
    return _ratio(cm.tn, cm.tn + cm.fn, group, "NPV")


def selection_rate(cm: ConfusionMatrix, group: str = "?") -> float:
    return _ratio(cm.tp + cm.fp, cm.total, group, "selection rate")


def accuracy(cm: ConfusionMatrix, group: str = "?") -> float:
    return _ratio(cm.tp + cm.tn, cm.total, group, "accuracy")


def f1(cm: ConfusionMatrix, group: str = "?") -> float:
    # precision is PPV; both precision and recall must be defined
    ppv(cm, group)
    tpr(cm, group)
    return 2 * cm.tp / (2 * cm.tp + cm.fp + cm.fn)


def metric_value(metric_id, cm: ConfusionMatrix, group: str = "?"):
    """Value of one binary metric for one group's confusion matrix."""
    m = MetricId(metric_id)
    if m is MetricId.EOP:
        return tpr(cm, group)
    if m is MetricId.SP:
        return selection_rate(cm, group)
    if m is MetricId.EO:
        return (fpr(cm, group), fnr(cm, group))
    if m is MetricId.PP:
        return (ppv(cm, group), npv(cm, group))
    if m is MetricId.BG_BACC:
        return 0.5 * (tpr(cm, group) + tnr(cm, group))
    if m is MetricId.BG_ACC:
        return accuracy(cm, group)
    if m is MetricId.EMO:
        return fpr(cm, group)
    if m is MetricId.AO:
        return 0.5 * (fpr(cm, group) + tpr(cm, group))
    if m is MetricId.BG_F1:
        return f1(cm, group)
    raise ValueError(f"{m} is not a confusion-matrix metric")


def binary_metric(
    metric_id,
    confusions: GroupedConfusions,
    tolerance: float = DEFAULT_TOLERANCE,
    mode=Mode.PARITY,
    component: Optional[str] = None,
) -> MetricResult:
    """Compute one binary metric for every group and compare across groups.

    ``component`` (e.g. ``"PPV"``) restricts a pair-valued metric such as PP
    to a single half; the result then carries scalar per-group values.
    """
    m = MetricId(metric_id)
    if m not in BINARY_METRICS:
        raise ValueError(f"{m} is not a confusion-matrix metric")
    idx = None
    if component is not None:
        names = PAIR_COMPONENTS.get(m, ())
        if component not in names:
            raise ValueError(f"{m} has no component {component!r}")
        idx = names.index(component)

    per_group = {}
    for g, cm in confusions.per_group.items():
        v = metric_value(m, cm, g)
        per_group[g] = v[idx] if idx is not None else v
    gap, ratio, ok = compare_groups(per_group, tolerance, mode)
    return MetricResult(
        metric_id=m,
        per_group=per_group,
        parity_gap=gap,
        disparity_ratio=ratio,
        satisfied=ok,
        tolerance=tolerance,
        mode=Mode(mode),
        component=component,
    )
