"""Individual fairness as k-nearest-neighbour consistency of predictions."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import DEFAULT_TOLERANCE, AuditDataset, MetricId, MetricResult, Mode, compare_groups
from .errors import EmptyDataset, KTooLarge, MissingFeatures, MissingPrediction

NORMALIZATIONS = ("per_feature_min_max", "none")
SOURCES = ("predicted_outcome", "score")


@dataclass(frozen=True)
class KnncConfig:
    """``prediction_source=None`` uses scores when every record has one, else
    predicted outcomes."""

    k: int = 5
    distance: str = "euclidean"
    normalization: str = "per_feature_min_max"
    prediction_source: Optional[str] = None

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k}")
        if self.distance != "euclidean":
            raise ValueError(f"unsupported distance {self.distance!r}")
        if self.normalization not in NORMALIZATIONS:
            raise ValueError(f"normalization must be one of {NORMALIZATIONS}")
        if self.prediction_source is not None and self.prediction_source not in SOURCES:
            raise ValueError(f"prediction_source must be one of {SOURCES}")


def _predictions(dataset: AuditDataset, source: Optional[str]) -> np.ndarray:
    if source is None:
        source = "score" if dataset.has_scores else "predicted_outcome"
    attr = "score" if source == "score" else "predicted_outcome"
    vals = [getattr(r, attr) for r in dataset.records]
    if any(v is None for v in vals):
        raise MissingPrediction(f"every record needs a {attr} for consistency")
    return np.array(vals, dtype=float)


def _features(dataset: AuditDataset, normalization: str) -> np.ndarray:
    if not dataset.has_features:
        raise MissingFeatures("every record needs a feature vector")
    x = np.array([r.features for r in dataset.records], dtype=float)
    if normalization == "per_feature_min_max":
        lo, hi = x.min(axis=0), x.max(axis=0)
        span = hi - lo
        const = span == 0
        x = (x - lo) / np.where(const, 1.0, span)
        x[:, const] = 0.0
    return x


def neighbour_indices(x: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k nearest other points of every row; ties go to the lower index."""
    diff = x[:, None, :] - x[None, :, :]
    d2 = np.einsum("ijk,ijk->ij", diff, diff)
    np.fill_diagonal(d2, np.inf)
    return np.argsort(d2, axis=1, kind="stable")[:, :k]


def consistency_terms(dataset: AuditDataset, config: KnncConfig = KnncConfig()) -> np.ndarray:
    """Per-record |p_i - mean of neighbours' p|."""
    n = len(dataset)
    if n == 0:
        raise EmptyDataset("dataset has no records")
    if config.k >= n:
        raise KTooLarge(config.k, n)
    p = _predictions(dataset, config.prediction_source)
    x = _features(dataset, config.normalization)
    nn = neighbour_indices(x, config.k)
    # mean of differences, so equal predictions give exactly zero
    return np.abs((p[:, None] - p[nn]).mean(axis=1))


def knn_consistency(dataset: AuditDataset, config: KnncConfig = KnncConfig()) -> float:
    """1 minus the mean absolute deviation of each prediction from its
    neighbours' mean prediction. 1 means individually fair."""
    return float(1.0 - consistency_terms(dataset, config).mean())


def fta_result(
    dataset: AuditDataset, config: KnncConfig = KnncConfig(), tolerance=DEFAULT_TOLERANCE, mode=Mode.PARITY
) -> MetricResult:
    """FTA packaged for reports.

    ``overall`` is the dataset consistency and decides ``satisfied``
    (``overall >= 1 - tolerance``). ``per_group`` holds each group's mean
    consistency (neighbours drawn from the whole dataset), with its gap and
    ratio reported for information.
    """
    terms = consistency_terms(dataset, config)
    overall = float(1.0 - terms.mean())
    per_group = {}
    for g in dict.fromkeys(r.group for r in dataset.records):
        mask = np.array([r.group == g for r in dataset.records])
        per_group[g] = float(1.0 - terms[mask].mean())
    if len(per_group) >= 2:
        gap, ratio, _ = compare_groups(per_group, tolerance, mode)
    else:
        gap, ratio = 0.0, 1.0
    return MetricResult(
        metric_id=MetricId.FTA,
        per_group=per_group,
        parity_gap=gap,
        disparity_ratio=ratio,
        satisfied=overall >= 1.0 - tolerance,
        tolerance=tolerance,
        mode=Mode(mode),
        overall=overall,
    )
