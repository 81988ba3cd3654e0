"""Shared immutable data types: records, datasets, confusion matrices, metric results."""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Union

from .errors import EmptyDataset, SingleGroup

DEFAULT_TOLERANCE = 0.05


class MetricId(str, enum.Enum):
    EOP = "EOP"
    SP = "SP"
    EO = "EO"
    PP = "PP"
    BG_BACC = "BG_BACC"
    BG_ACC = "BG_ACC"
    EMO = "EMO"
    AO = "AO"
    BG_F1 = "BG_F1"
    BG_AUC = "BG_AUC"
    BG_AUPRC = "BG_AUPRC"
    CAL = "CAL"
    BAL_POS = "BAL_POS"
    BAL_NEG = "BAL_NEG"
    BAL = "BAL"
    FTA = "FTA"

    def __str__(self):
        return self.value


BINARY_METRICS = (
    MetricId.EOP, MetricId.SP, MetricId.EO, MetricId.PP, MetricId.BG_BACC,
    MetricId.BG_ACC, MetricId.EMO, MetricId.AO, MetricId.BG_F1,
)
SCORE_METRICS = (
    MetricId.BG_AUC, MetricId.BG_AUPRC, MetricId.CAL,
    MetricId.BAL_POS, MetricId.BAL_NEG, MetricId.BAL,
)
# component names of the pair-valued metrics, in storage order
PAIR_COMPONENTS = {
    MetricId.EO: ("FPR", "FNR"),
    MetricId.PP: ("PPV", "NPV"),
    MetricId.BAL: ("positive", "negative"),
}


class Mode(str, enum.Enum):
    PARITY = "parity"
    DISPARITY = "disparity"

    def __str__(self):
        return self.value


def _check_binary(value, name):
    if value not in (0, 1):
        raise ValueError(f"{name} must be 0 or 1, got {value!r}")


@dataclass(frozen=True)
class AuditRecord:
    true_outcome: int
    group: str
    predicted_outcome: Optional[int] = None
    score: Optional[float] = None
    features: Optional[tuple[float, ...]] = None

    def __post_init__(self):
        _check_binary(self.true_outcome, "true_outcome")
        if self.predicted_outcome is None and self.score is None:
            raise ValueError("a record needs a predicted_outcome, a score, or both")
        if self.predicted_outcome is not None:
            _check_binary(self.predicted_outcome, "predicted_outcome")
        if self.score is not None:
            if not (0.0 <= self.score <= 1.0):
                raise ValueError(f"score must lie in [0, 1], got {self.score!r}")
            object.__setattr__(self, "score", float(self.score))
        if self.features is not None and not isinstance(self.features, tuple):
            object.__setattr__(self, "features", tuple(float(x) for x in self.features))
        object.__setattr__(self, "group", str(self.group))
        object.__setattr__(self, "true_outcome", int(self.true_outcome))
        if self.predicted_outcome is not None:
            object.__setattr__(self, "predicted_outcome", int(self.predicted_outcome))


@dataclass(frozen=True)
class AuditDataset:
    """An immutable table of audit records.

    ``group_keys`` and ``feature_dimension`` are derived from the records.
    Group keys are opaque strings; composite (intersectional) groups must be
    pre-joined into one key by the caller.
    """

    records: tuple[AuditRecord, ...]
    group_keys: frozenset = field(init=False)
    feature_dimension: Optional[int] = field(init=False)

    def __post_init__(self):
        recs = tuple(self.records)
        object.__setattr__(self, "records", recs)
        object.__setattr__(self, "group_keys", frozenset(r.group for r in recs))
        dims = {len(r.features) for r in recs if r.features is not None}
        if len(dims) > 1:
            raise ValueError(f"records carry features of differing dimension: {sorted(dims)}")
        object.__setattr__(self, "feature_dimension", dims.pop() if dims else None)

    def __len__(self):
        return len(self.records)

    @property
    def has_predictions(self):
        return bool(self.records) and all(r.predicted_outcome is not None for r in self.records)

    @property
    def has_scores(self):
        return bool(self.records) and all(r.score is not None for r in self.records)

    @property
    def has_features(self):
        return bool(self.records) and all(r.features is not None for r in self.records)


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        for name in ("tp", "fp", "tn", "fn"):
            v = getattr(self, name)
            if v < 0 or int(v) != v:
                raise ValueError(f"{name} must be a non-negative integer, got {v!r}")

    @property
    def total(self):
        return self.tp + self.fp + self.tn + self.fn

    @property
    def positives(self):
        return self.tp + self.fn

    @property
    def negatives(self):
        return self.tn + self.fp

    def scaled(self, factor: int) -> "ConfusionMatrix":
        return ConfusionMatrix(self.tp * factor, self.fp * factor, self.tn * factor, self.fn * factor)


Value = Union[float, tuple[float, float]]


@dataclass(frozen=True)
class MetricResult:
    """Per-group values for one metric and their cross-group comparison.

    ``disparity_ratio`` is None when any compared value is 0 (the ratio is
    then undefined). ``component`` restricts a pair-valued metric to one of
    its halves. ``overall`` carries a whole-dataset value where the metric has
    one (FTA).
    """

    metric_id: MetricId
    per_group: Mapping[str, Value]
    parity_gap: float
    disparity_ratio: Optional[float]
    satisfied: bool
    tolerance: float
    mode: Mode
    component: Optional[str] = None
    overall: Optional[float] = None

    @property
    def components(self) -> Optional[tuple[str, str]]:
        if self.component is not None:
            return None
        return PAIR_COMPONENTS.get(self.metric_id)


def compare_groups(per_group: Mapping[str, Value], tolerance: float, mode: Mode):
    """Return ``(parity_gap, disparity_ratio, satisfied)`` for per-group values.

    Pair values are compared component-wise; the gap is the largest component
    gap and the ratio the smallest component ratio, so "satisfied" needs both
    components within tolerance.
    """
    if tolerance < 0:
        raise ValueError("tolerance must be >= 0")
    mode = Mode(mode)
    values = list(per_group.values())
    if len(values) < 2:
        raise SingleGroup(per_group.keys())
    columns = list(zip(*values)) if isinstance(values[0], tuple) else [values]

    gap = 0.0
    ratio: Optional[float] = 1.0
    for col in columns:
        for a, b in itertools.combinations(col, 2):
            gap = max(gap, abs(a - b))
            if ratio is not None:
                if a <= 0 or b <= 0:
                    ratio = None
                else:
                    ratio = min(ratio, min(a, b) / max(a, b))

    if mode is Mode.PARITY:
        satisfied = gap <= tolerance
    elif ratio is None:
        # undefined ratio: only identical (all-zero) values count as parity
        satisfied = gap == 0
    else:
        satisfied = ratio >= 1 - tolerance
    return gap, ratio, satisfied


def group_partition(dataset: AuditDataset) -> dict[str, list[AuditRecord]]:
    """Split records by group key, preserving input order within each group.

    Groups appear in order of first occurrence.
    """
    if not dataset.records:
        raise EmptyDataset("dataset has no records")
    parts: dict[str, list[AuditRecord]] = {}
    for rec in dataset.records:
        parts.setdefault(rec.group, []).append(rec)
    return parts


def require_groups(parts: Mapping[str, Sequence]) -> None:
    if len(parts) < 2:
        raise SingleGroup(parts.keys())
