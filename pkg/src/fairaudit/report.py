"""Audit orchestration and report rendering (JSON and markdown)."""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

from . import __version__
from .binary_metrics import binary_metric, confusion_by_group
from .core import BINARY_METRICS, DEFAULT_TOLERANCE, SCORE_METRICS, AuditDataset, MetricId, MetricResult, Mode
from .diagnostics import (
    DEFAULT_BALANCE_TOLERANCE,
    DEFAULT_BASE_RATE_TOLERANCE,
    FOUR_FIFTHS,
    DataDiagnostics,
    IncompatibilityWarning,
    diagnose,
    incompatibility_report,
)
from .errors import FairAuditError
from .individual import KnncConfig, fta_result
from .ingestion import SchemaConfig
from .score_metrics import (
    CalibrationConfig,
    auc_by_group,
    auprc_by_group,
    balance_by_group,
    calibration_by_group,
    calibration_table,
)
from .selector import Recommendation, reconstructed_edges

SCHEMA_VERSION = "1.0"

DISCLAIMER = (
    "Metric recommendations come from a context flowchart assembled mostly from "
    "Western fairness literature. What counts as fair varies across cultures and "
    "settings; review every verdict with people from the context where the model "
    "is deployed before relying on it."
)

DESIGN_FLAGS = {
    "threshold_tie_rule": "score >= threshold is positive",
    "f1_precision": "PPV = TP/(TP+FP)",
    "pp_definition": "PP compares PPV and NPV",
    "multi_group_comparison": "max pairwise gap / min pairwise ratio",
    "pair_metric_verdict": "both components within tolerance",
    "disparity_verdict": "ratio >= 1 - tolerance; undefined ratio satisfied only if all values equal",
    "calibration_average": "mean over populated equal-width bins; score 1.0 in top bin",
    "auc_ties": "tied positive/negative pairs count 1/2",
    "auprc_estimator": "average precision, step-wise",
    "knnc_values": "predictions, not true outcomes; self excluded; ties to lowest index",
    "fta_verdict": "overall consistency >= 1 - tolerance",
    "four_fifths_boundary": "ratio >= 0.8 passes",
    "perfect_prediction": "zero FP and FN in every group",
}


@dataclass
class AuditConfig:
    metrics: Sequence[str] = ("all",)
    tolerance: float = DEFAULT_TOLERANCE
    mode: Mode = Mode.PARITY
    bins: int = 10
    k: int = 5
    knn_normalization: str = "per_feature_min_max"
    knn_prediction_source: Optional[str] = None
    base_rate_tolerance: float = DEFAULT_BASE_RATE_TOLERANCE
    balance_tolerance: float = DEFAULT_BALANCE_TOLERANCE
    threshold: Optional[float] = None

    def echo(self) -> dict:
        return {
            "metrics": list(self.metrics),
            "tolerance": self.tolerance,
            "mode": str(Mode(self.mode)),
            "bins": self.bins,
            "k": self.k,
            "knn_normalization": self.knn_normalization,
            "knn_prediction_source": self.knn_prediction_source or "score if present, else predicted_outcome",
            "base_rate_tolerance": self.base_rate_tolerance,
            "balance_tolerance": self.balance_tolerance,
            "threshold": self.threshold,
            "four_fifths_threshold": FOUR_FIFTHS,
            "design_decisions": dict(DESIGN_FLAGS),
        }


@dataclass
class MetricError:
    metric_id: str
    error: str
    kind: str


@dataclass
class AuditReport:
    dataset_summary: dict
    diagnostics: Optional[DataDiagnostics]
    metric_results: list[MetricResult] = field(default_factory=list)
    metric_errors: list[MetricError] = field(default_factory=list)
    incompatibility_warnings: list[IncompatibilityWarning] = field(default_factory=list)
    recommendation: Optional[Recommendation] = None
    config_echo: dict = field(default_factory=dict)
    calibration_tables: dict = field(default_factory=dict)
    tool_version: str = __version__
    schema_version: str = SCHEMA_VERSION

    @property
    def all_satisfied(self) -> bool:
        return not self.metric_errors and all(r.satisfied for r in self.metric_results)

    def to_dict(self) -> dict:
        out = {
            "schema_version": self.schema_version,
            "tool_version": self.tool_version,
            "config_echo": self.config_echo,
            "dataset_summary": self.dataset_summary,
            "diagnostics": diagnostics_to_dict(self.diagnostics) if self.diagnostics else None,
            "metric_results": [metric_to_dict(r) for r in self.metric_results],
            "metric_errors": [vars(e) for e in self.metric_errors],
            "incompatibility_warnings": [vars(w) for w in self.incompatibility_warnings],
            "recommendation": recommendation_to_dict(self.recommendation) if self.recommendation else None,
            "reconstructed_tree_edges": reconstructed_edges(),
            "disclaimer": DISCLAIMER,
        }
        if self.calibration_tables:
            out["calibration_tables"] = self.calibration_tables
        return out


def available_metrics(dataset: AuditDataset) -> list[MetricId]:
    out = []
    if dataset.has_predictions:
        out += BINARY_METRICS
    if dataset.has_scores:
        out += SCORE_METRICS
    if dataset.has_features:
        out.append(MetricId.FTA)
    return out


def parse_metric_list(items_text: Sequence[str] | str) -> list[str]:
    items = items_text.split(",") if isinstance(items_text, str) else list(items_text)
    items = [i.strip() for i in items if i.strip()]
    if items == ["all"] or items == ["ALL"]:
        return ["all"]
    out = []
    for item in items:
        try:
            out.append(MetricId(item.upper()).value)
        except ValueError:
            raise ValueError(f"unknown metric {item!r}; choose from {[m.value for m in MetricId]} or 'all'") from None
    return out


def compute_metric(metric_id, dataset: AuditDataset, config: AuditConfig, confusions=None, component=None):
    m = MetricId(metric_id)
    tol, mode = config.tolerance, config.mode
    if m in BINARY_METRICS:
        confusions = confusions or confusion_by_group(dataset, threshold_used=config.threshold)
        return binary_metric(m, confusions, tol, mode, component=component)
    if m is MetricId.BG_AUC:
        return auc_by_group(dataset, tol, mode)
    if m is MetricId.BG_AUPRC:
        return auprc_by_group(dataset, tol, mode)
    if m is MetricId.CAL:
        return calibration_by_group(dataset, CalibrationConfig(config.bins), tol, mode)
    if m in (MetricId.BAL_POS, MetricId.BAL_NEG, MetricId.BAL):
        which = {MetricId.BAL_POS: "positive", MetricId.BAL_NEG: "negative", MetricId.BAL: "overall"}[m]
        return balance_by_group(dataset, which, tol, mode)
    knn = KnncConfig(k=config.k, normalization=config.knn_normalization,
                     prediction_source=config.knn_prediction_source)
    return fta_result(dataset, knn, tol, mode)


def dataset_summary(dataset: AuditDataset) -> dict:
    groups: dict[str, dict] = {}
    for r in dataset.records:
        g = groups.setdefault(r.group, {"records": 0, "positives": 0})
        g["records"] += 1
        g["positives"] += r.true_outcome
    return {
        "records": len(dataset),
        "groups": groups,
        "has_predictions": dataset.has_predictions,
        "has_scores": dataset.has_scores,
        "feature_dimension": dataset.feature_dimension,
    }


def build_audit_report(
    dataset: AuditDataset,
    config: AuditConfig,
    recommendation: Optional[Recommendation] = None,
    compute_metrics: bool = True,
) -> AuditReport:
    diag = diagnose(dataset, config.base_rate_tolerance, config.balance_tolerance)
    report = AuditReport(
        dataset_summary=dataset_summary(dataset),
        diagnostics=diag,
        recommendation=recommendation,
        config_echo=config.echo(),
    )
    if not compute_metrics:
        return report

    requested = parse_metric_list(config.metrics)
    targets = available_metrics(dataset) if requested == ["all"] else [MetricId(m) for m in requested]
    confusions = None
    if dataset.has_predictions:
        confusions = confusion_by_group(dataset, threshold_used=config.threshold)
    components = recommendation.components if recommendation else {}
    for m in targets:
        try:
            report.metric_results.append(
                compute_metric(m, dataset, config, confusions, component=components.get(m.value))
            )
        except FairAuditError as exc:
            report.metric_errors.append(MetricError(m.value, str(exc), type(exc).__name__))
        if m is MetricId.CAL and dataset.has_scores:
            by_group: dict[str, tuple[list, list]] = {}
            for r in dataset.records:
                s, y = by_group.setdefault(r.group, ([], []))
                s.append(r.score)
                y.append(r.true_outcome)
            report.calibration_tables = {
                g: calibration_table(s, y, config.bins) for g, (s, y) in by_group.items()
            }
    report.incompatibility_warnings = incompatibility_report(targets, diag)
    return report


# serialisation

def _value(v):
    return list(v) if isinstance(v, tuple) else v


def metric_to_dict(r: MetricResult) -> dict:
    d = {
        "metric_id": r.metric_id.value,
        "per_group": {g: _value(v) for g, v in r.per_group.items()},
        "parity_gap": r.parity_gap,
        "disparity_ratio": r.disparity_ratio,
        "disparity_ratio_defined": r.disparity_ratio is not None,
        "satisfied": r.satisfied,
        "tolerance": r.tolerance,
        "mode": str(r.mode),
    }
    if r.components:
        d["components"] = list(r.components)
    if r.component:
        d["component"] = r.component
    if r.overall is not None:
        d["overall"] = r.overall
    return d


def diagnostics_to_dict(d: DataDiagnostics) -> dict:
    return {
        "base_rate_per_group": dict(d.base_rate_per_group),
        "base_rate_gap": d.base_rate_gap,
        "base_rates_equal": d.base_rates_equal,
        "base_rate_tolerance": d.base_rate_tolerance,
        "positive_fraction": d.positive_fraction,
        "dataset_balanced": d.dataset_balanced,
        "balance_tolerance": d.balance_tolerance,
        "four_fifths_ratio": d.four_fifths_ratio,
        "four_fifths_pass": d.four_fifths_pass,
        "perfect_prediction": d.perfect_prediction,
        "group_sizes": dict(d.group_sizes or {}),
    }


def recommendation_to_dict(rec: Recommendation) -> dict:
    return {
        "metrics": list(rec.metrics),
        "components": dict(rec.components),
        "family": rec.family,
        "referral": rec.referral,
        "trace": [
            {"node_id": s.node_id, "question": s.question, "answer": s.answer, "reconstructed": s.reconstructed}
            for s in rec.trace
        ],
        "warnings": list(rec.warnings),
        "tree_version": rec.tree_version,
    }


def round_floats(obj: Any) -> Any:
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, float):
        return float(f"{obj:.6g}")
    if isinstance(obj, dict):
        return {str(k): round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v) for v in obj]
    return obj


def to_json(payload: dict) -> str:
    """Stable JSON: sorted keys, floats at 6 significant digits."""
    return json.dumps(round_floats(payload), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _fmt(v) -> str:
    if v is None:
        return "n/a"
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, (list, tuple)):
        return "(" + ", ".join(_fmt(x) for x in v) + ")"
    return str(v)


def diagnostics_markdown(d: dict) -> list[str]:
    lines = ["## Data diagnostics", "", "| group | base rate | records |", "|---|---|---|"]
    for g in sorted(d["base_rate_per_group"]):
        lines.append(f"| {g} | {_fmt(d['base_rate_per_group'][g])} | {d['group_sizes'].get(g, '')} |")
    lines += [
        "",
        f"- base rates equal: {_fmt(d['base_rates_equal'])} (gap {_fmt(d['base_rate_gap'])}, tolerance {_fmt(d['base_rate_tolerance'])})",
        f"- positive fraction: {_fmt(d['positive_fraction'])}; balanced: {_fmt(d['dataset_balanced'])} (tolerance {_fmt(d['balance_tolerance'])})",
        f"- four-fifths ratio: {_fmt(d['four_fifths_ratio'])}; pass: {_fmt(d['four_fifths_pass'])}",
        f"- perfect prediction: {_fmt(d['perfect_prediction'])}",
        "",
    ]
    return lines


def recommendation_markdown(r: dict) -> list[str]:
    lines = ["## Recommendation", ""]
    if r["referral"]:
        lines.append(f"Referral: **{r['referral']}** (outside observational group/individual metrics)")
    else:
        extra = "".join(f" [{m}: {c} only]" for m, c in sorted(r["components"].items()))
        lines.append(f"Recommended: **{', '.join(r['metrics'])}**{extra}")
    lines += ["", "| node | question | answer | reconstructed |", "|---|---|---|---|"]
    for s in r["trace"]:
        lines.append(f"| {s['node_id']} | {s['question']} | {s['answer']} | {_fmt(s['reconstructed'])} |")
    if r["warnings"]:
        lines += ["", "Warnings:"] + [f"- {w}" for w in r["warnings"]]
    lines.append("")
    return lines


def to_markdown(payload: dict) -> str:
    p = round_floats(payload)
    lines = ["# Fairness audit report", "", f"schema {p['schema_version']}, tool {p['tool_version']}", ""]
    summary = p.get("dataset_summary")
    if summary:
        lines += [f"Records: {summary['records']}; groups: {', '.join(sorted(summary['groups']))}", ""]
    if p.get("diagnostics"):
        lines += diagnostics_markdown(p["diagnostics"])
    if p.get("metric_results") or p.get("metric_errors"):
        lines += ["## Metrics", "", "| metric | per group | gap | ratio | satisfied |", "|---|---|---|---|---|"]
        for m in p["metric_results"]:
            name = m["metric_id"] + (f" ({m['component']})" if m.get("component") else "")
            groups = "; ".join(f"{g}: {_fmt(v)}" for g, v in sorted(m["per_group"].items()))
            lines.append(f"| {name} | {groups} | {_fmt(m['parity_gap'])} | {_fmt(m['disparity_ratio'])} | {_fmt(m['satisfied'])} |")
        for e in p["metric_errors"]:
            lines.append(f"| {e['metric_id']} | error: {e['error']} | | | no |")
        lines.append("")
    if p.get("incompatibility_warnings"):
        lines += ["## Incompatibility warnings", ""] + [f"- {w['message']}" for w in p["incompatibility_warnings"]] + [""]
    if p.get("recommendation"):
        lines += recommendation_markdown(p["recommendation"])
    if p.get("config_echo"):
        lines += ["## Configuration", ""]
        for k, v in sorted(p["config_echo"].items()):
            if isinstance(v, dict):
                lines += [f"- {k}:"] + [f"  - {kk}: {vv}" for kk, vv in sorted(v.items())]
            else:
                lines.append(f"- {k}: {_fmt(v)}")
        lines.append("")
    if p.get("reconstructed_tree_edges"):
        lines += ["Reconstructed selection-tree edges: " + ", ".join(p["reconstructed_tree_edges"]), ""]
    if p.get("disclaimer"):
        lines += [f"> {p['disclaimer']}", ""]
    return "\n".join(lines)


def write_dataset_csv(dataset: AuditDataset, path) -> SchemaConfig:
    """Write records to CSV and return the schema that reads them back."""
    dim = dataset.feature_dimension or 0
    feats = [f"x{i}" for i in range(dim)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["y", "yhat", "score", "group", *feats])
        for r in dataset.records:
            fvals = [repr(x) for x in r.features] if r.features is not None else [""] * dim
            w.writerow([
                r.true_outcome,
                "" if r.predicted_outcome is None else r.predicted_outcome,
                "" if r.score is None else repr(r.score),
                r.group,
                *fvals,
            ])
    return SchemaConfig(
        label_column="y",
        group_column="group",
        prediction_column="yhat",
        score_column="score",
        feature_columns=tuple(feats) or None,
    )
