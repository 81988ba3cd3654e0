"""Data conditions behind metric choice: base rates, class balance, the
four-fifths rule, and warnings for metric combinations that cannot hold
together on the measured data."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .binary_metrics import GroupedConfusions, confusion_by_group, selection_rate
from .core import AuditDataset, MetricId, group_partition, require_groups
from .errors import EmptyGroup, ZeroSelectionEverywhere

DEFAULT_BASE_RATE_TOLERANCE = 0.05
DEFAULT_BALANCE_TOLERANCE = 0.05
FOUR_FIFTHS = 0.8


@dataclass(frozen=True)
class DataDiagnostics:
    """Measured data conditions.

    ``perfect_prediction`` is None when the data has no predicted outcomes;
    otherwise it records whether every group has zero FP and zero FN.
    """

    base_rate_per_group: Mapping[str, float]
    base_rates_equal: bool
    positive_fraction: float
    dataset_balanced: bool
    four_fifths_ratio: Optional[float] = None
    four_fifths_pass: Optional[bool] = None
    base_rate_tolerance: float = DEFAULT_BASE_RATE_TOLERANCE
    balance_tolerance: float = DEFAULT_BALANCE_TOLERANCE
    perfect_prediction: Optional[bool] = None
    group_sizes: Optional[Mapping[str, int]] = None

    @property
    def base_rate_gap(self) -> float:
        rates = list(self.base_rate_per_group.values())
        return max(abs(a - b) for a, b in itertools.combinations(rates, 2))


def four_fifths_check(confusions: GroupedConfusions) -> tuple[float, bool]:
    """Lowest selection rate over highest; passes at 0.8 or above."""
    rates = [selection_rate(cm, g) for g, cm in confusions.per_group.items()]
    hi, lo = max(rates), min(rates)
    if hi == 0:
        raise ZeroSelectionEverywhere("no group has any positive prediction")
    ratio = lo / hi
    return ratio, ratio >= FOUR_FIFTHS


def diagnose(
    dataset: AuditDataset,
    base_rate_tolerance: float = DEFAULT_BASE_RATE_TOLERANCE,
    balance_tolerance: float = DEFAULT_BALANCE_TOLERANCE,
) -> DataDiagnostics:
    parts = group_partition(dataset)
    require_groups(parts)
    rates = {}
    for g, recs in parts.items():
        if not recs:
            raise EmptyGroup(g)
        rates[g] = sum(r.true_outcome for r in recs) / len(recs)
    gap = max(abs(a - b) for a, b in itertools.combinations(rates.values(), 2))
    positive_fraction = sum(r.true_outcome for r in dataset.records) / len(dataset)

    ratio = passed = perfect = None
    if dataset.has_predictions:
        confusions = confusion_by_group(dataset)
        perfect = all(cm.fp == 0 and cm.fn == 0 for cm in confusions.per_group.values())
        try:
            ratio, passed = four_fifths_check(confusions)
        except ZeroSelectionEverywhere:
            pass

    return DataDiagnostics(
        base_rate_per_group=rates,
        base_rates_equal=gap <= base_rate_tolerance,
        positive_fraction=positive_fraction,
        dataset_balanced=abs(positive_fraction - 0.5) <= balance_tolerance,
        four_fifths_ratio=ratio,
        four_fifths_pass=passed,
        base_rate_tolerance=base_rate_tolerance,
        balance_tolerance=balance_tolerance,
        perfect_prediction=perfect,
        group_sizes={g: len(recs) for g, recs in parts.items()},
    )


UNEQUAL_BASE_RATES = "unequal_base_rates"
IMPERFECT_PREDICTION = "imperfect_prediction"
UNLESS_PERFECT_OR_EQUAL = "always_unless_perfect_or_equal_rates"


@dataclass(frozen=True)
class IncompatibilityRule:
    metric_set: frozenset
    condition: str
    citation: str
    statement: str

    def __post_init__(self):
        if len(self.metric_set) < 2:
            raise ValueError("an incompatibility involves at least two metrics")


RULES = (
    IncompatibilityRule(
        frozenset({MetricId.EO, MetricId.PP}), UNEQUAL_BASE_RATES,
        "Chouldechova (2017)",
        "PPV parity cannot hold together with equalized odds when base rates differ",
    ),
    IncompatibilityRule(
        frozenset({MetricId.EO, MetricId.PP}), IMPERFECT_PREDICTION,
        "Barocas et al. (2019); Wasserman (2004)",
        "NPV parity cannot hold together with equalized odds unless prediction is perfect",
    ),
    IncompatibilityRule(
        frozenset({MetricId.CAL, MetricId.EO}), UNLESS_PERFECT_OR_EQUAL,
        "Kleinberg et al. (2016); Pleiss et al. (2017)",
        "calibration cannot hold together with equalized odds unless prediction is perfect or base rates are equal",
    ),
    IncompatibilityRule(
        frozenset({MetricId.SP, MetricId.BG_ACC}), UNEQUAL_BASE_RATES,
        "Hedden (2021)",
        "statistical parity and equal group accuracy conflict when base rates differ",
    ),
    IncompatibilityRule(
        frozenset({MetricId.SP, MetricId.EO}), IMPERFECT_PREDICTION,
        "Hedden (2021)",
        "statistical parity and equalized odds conflict unless prediction is perfect",
    ),
    IncompatibilityRule(
        frozenset({MetricId.SP, MetricId.EO, MetricId.PP}), UNEQUAL_BASE_RATES,
        "Garg et al. (2020)",
        "statistical parity, equalized odds and predictive parity are jointly unattainable unless base rates are equal",
    ),
)

# metrics whose satisfaction follows from another's
IMPLICATIONS = {MetricId.EO: frozenset({MetricId.EOP})}


def implied(requested: Iterable) -> frozenset:
    req = {MetricId(m) for m in requested}
    out = set(req)
    for m in req:
        out |= IMPLICATIONS.get(m, frozenset())
    return frozenset(out)


@dataclass(frozen=True)
class IncompatibilityWarning:
    metrics: tuple[str, ...]
    condition: str
    citation: str
    message: str


def _holds(condition: str, diag: DataDiagnostics) -> bool:
    unequal = not diag.base_rates_equal
    # imperfect unless the confusions show zero errors
    imperfect = diag.perfect_prediction is not True
    if condition == UNEQUAL_BASE_RATES:
        return unequal
    if condition == IMPERFECT_PREDICTION:
        return imperfect
    if condition == UNLESS_PERFECT_OR_EQUAL:
        return unequal and imperfect
    raise ValueError(f"unknown condition {condition!r}")


def incompatibility_report(requested: Iterable, diag: DataDiagnostics) -> list[IncompatibilityWarning]:
    expanded = implied(requested)
    warnings = []
    for rule in RULES:
        if rule.metric_set <= expanded and _holds(rule.condition, diag):
            names = tuple(sorted(m.value for m in rule.metric_set))
            warnings.append(IncompatibilityWarning(
                metrics=names,
                condition=rule.condition,
                citation=rule.citation,
                message=f"{' + '.join(names)}: {rule.statement} ({rule.citation})",
            ))
    return warnings
