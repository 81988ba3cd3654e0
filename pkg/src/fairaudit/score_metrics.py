"""Score-based group metrics: ROC AUC, PR AUC, binned calibration and class balance."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .core import (
    DEFAULT_TOLERANCE,
    AuditDataset,
    MetricId,
    MetricResult,
    Mode,
    compare_groups,
    group_partition,
    require_groups,
)
from .errors import DegenerateGroup, MissingScore, NoBinsPopulated


@dataclass(frozen=True)
class CalibrationConfig:
    bin_count: int = 10
    binning: str = "equal_width"

    def __post_init__(self):
        if int(self.bin_count) != self.bin_count or self.bin_count < 2:
            raise ValueError(f"bin_count must be an integer >= 2, got {self.bin_count}")
        if self.binning != "equal_width":
            raise ValueError(f"unsupported binning {self.binning!r}")


def _scored_groups(dataset: AuditDataset):
    parts = group_partition(dataset)
    require_groups(parts)
    out = {}
    for g, recs in parts.items():
        if any(r.score is None for r in recs):
            raise MissingScore(f"a record in group {g!r} has no score")
        out[g] = (
            np.array([r.score for r in recs], dtype=float),
            np.array([r.true_outcome for r in recs], dtype=int),
        )
    return out


def _result(metric_id, per_group, tolerance, mode):
    gap, ratio, ok = compare_groups(per_group, tolerance, mode)
    return MetricResult(
        metric_id=MetricId(metric_id),
        per_group=per_group,
        parity_gap=gap,
        disparity_ratio=ratio,
        satisfied=ok,
        tolerance=tolerance,
        mode=Mode(mode),
    )


def roc_auc(scores, outcomes) -> float:
    """Mann-Whitney AUC from mid-ranks; tied positive/negative pairs count one half."""
    scores = np.asarray(scores, dtype=float)
    pos = np.asarray(outcomes) == 1
    n_pos = int(pos.sum())
    n_neg = len(scores) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs at least one positive and one negative")
    ranks = rankdata(scores)
    u = ranks[pos].sum() - n_pos * (n_pos + 1) / 2
    return float(u / (n_pos * n_neg))


def average_precision(scores, outcomes) -> float:
    """Step-wise area under the PR curve, sweeping thresholds over descending unique scores."""
    scores = np.asarray(scores, dtype=float)
    y = np.asarray(outcomes, dtype=int)
    n_pos = int(y.sum())
    if n_pos == 0 or n_pos == len(y):
        raise ValueError("AUPRC needs at least one positive and one negative")
    order = np.argsort(-scores, kind="stable")
    s, y = scores[order], y[order]
    # last index of each block of tied scores
    ends = np.flatnonzero(np.r_[s[1:] != s[:-1], True])
    tp = np.cumsum(y)[ends]
    predicted = ends + 1
    precision = tp / predicted
    recall = tp / n_pos
    prev_recall = np.r_[0.0, recall[:-1]]
    return float(np.sum((recall - prev_recall) * precision))


def _both_classes(groups):
    for g, (_, y) in groups.items():
        if y.min() == y.max():
            raise DegenerateGroup(g)


def auc_by_group(dataset: AuditDataset, tolerance=DEFAULT_TOLERANCE, mode=Mode.PARITY) -> MetricResult:
    groups = _scored_groups(dataset)
    _both_classes(groups)
    per_group = {g: roc_auc(s, y) for g, (s, y) in groups.items()}
    return _result(MetricId.BG_AUC, per_group, tolerance, mode)


def auprc_by_group(dataset: AuditDataset, tolerance=DEFAULT_TOLERANCE, mode=Mode.PARITY) -> MetricResult:
    groups = _scored_groups(dataset)
    _both_classes(groups)
    per_group = {g: average_precision(s, y) for g, (s, y) in groups.items()}
    return _result(MetricId.BG_AUPRC, per_group, tolerance, mode)


def bin_indices(scores, bin_count: int) -> np.ndarray:
    """Equal-width bin index on [0, 1]; a score of exactly 1.0 goes to the top bin."""
    idx = np.floor(np.asarray(scores, dtype=float) * bin_count).astype(int)
    return np.clip(idx, 0, bin_count - 1)


def calibration_error(scores, outcomes, bin_count: int) -> float:
    """Mean over populated bins of |mean score - positive rate|."""
    scores = np.asarray(scores, dtype=float)
    y = np.asarray(outcomes, dtype=float)
    idx = bin_indices(scores, bin_count)
    gaps = []
    for b in np.unique(idx):
        mask = idx == b
        gaps.append(abs(scores[mask].mean() - y[mask].mean()))
    if not gaps:
        raise ValueError("no populated bins")
    return float(np.mean(gaps))


def calibration_table(scores, outcomes, bin_count: int) -> list[dict]:
    scores = np.asarray(scores, dtype=float)
    y = np.asarray(outcomes, dtype=float)
    idx = bin_indices(scores, bin_count)
    rows = []
    for b in range(bin_count):
        mask = idx == b
        n = int(mask.sum())
        rows.append({
            "bin": b,
            "lower": b / bin_count,
            "upper": (b + 1) / bin_count,
            "count": n,
            "mean_score": float(scores[mask].mean()) if n else None,
            "positive_rate": float(y[mask].mean()) if n else None,
        })
    return rows


def calibration_by_group(
    dataset: AuditDataset,
    config: CalibrationConfig = CalibrationConfig(),
    tolerance=DEFAULT_TOLERANCE,
    mode=Mode.PARITY,
) -> MetricResult:
    groups = _scored_groups(dataset)
    per_group = {}
    for g, (s, y) in groups.items():
        if len(s) == 0:
            raise NoBinsPopulated(g)
        per_group[g] = calibration_error(s, y, config.bin_count)
    return _result(MetricId.CAL, per_group, tolerance, mode)


_BALANCE_IDS = {
    "positive": MetricId.BAL_POS,
    "negative": MetricId.BAL_NEG,
    "overall": MetricId.BAL,
}


def balance_by_group(
    dataset: AuditDataset, which: str = "overall", tolerance=DEFAULT_TOLERANCE, mode=Mode.PARITY
) -> MetricResult:
    """Mean score within the positive and/or negative true class, per group."""
    if which not in _BALANCE_IDS:
        raise ValueError(f"which must be one of {sorted(_BALANCE_IDS)}, got {which!r}")
    groups = _scored_groups(dataset)
    per_group = {}
    for g, (s, y) in groups.items():
        means = []
        for cls, label in (("positive", 1), ("negative", 0)):
            if which not in (cls, "overall"):
                continue
            sel = s[y == label]
            if len(sel) == 0:
                raise DegenerateGroup(g, cls)
            means.append(float(sel.mean()))
        per_group[g] = tuple(means) if which == "overall" else means[0]
    return _result(_BALANCE_IDS[which], per_group, tolerance, mode)
