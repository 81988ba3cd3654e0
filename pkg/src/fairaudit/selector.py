"""Context-driven metric selection.

The decision tree lives in ``data/selection_tree.json`` so its edges can be
audited without reading code. Each node asks about one :class:`ContextAnswers`
field; each edge either moves to another node, ends in a leaf of recommended
metrics, or ends in a referral to a notion this package does not cover.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace
from functools import lru_cache
from importlib import resources
from typing import Callable, Mapping, Optional

from .errors import AutoWithoutData, ContextError

AUTO = "auto"

ENUMERANTS = {
    "assessment_target": ("data_generation", "predicted_outcome", "induced_impact"),
    "model_type": ("classification", "continuous_prediction", "generative"),
    "suspected_data_bias": ("yes", "no"),
    "distance_metric_available": ("yes", "no"),
    "equity_required": ("yes", "no"),
    "output_kind": ("binary", "regressive"),
    "threshold_kind": ("fixed", "floating"),
    "base_rates_equal": ("yes", "no"),
    "emphasis_precision_recall": ("precision", "recall", "equal"),
    "emphasis_fp_fn": ("fp", "fn", "equal"),
    "class_emphasis": ("positive", "negative", "equal"),
    "dataset_balanced": ("yes", "no"),
}
AUTO_FIELDS = ("base_rates_equal", "dataset_balanced")
REFERRALS = ("causal_fairness", "generative_fairness", "induced_impact")


@dataclass(frozen=True)
class ContextAnswers:
    assessment_target: str
    model_type: str
    suspected_data_bias: str
    distance_metric_available: str
    equity_required: str
    output_kind: str
    threshold_kind: str
    base_rates_equal: str
    emphasis_precision_recall: str
    emphasis_fp_fn: str
    class_emphasis: str
    dataset_balanced: str

    def __post_init__(self):
        problems = []
        for f in fields(self):
            value = getattr(self, f.name)
            allowed = ENUMERANTS[f.name] + ((AUTO,) if f.name in AUTO_FIELDS else ())
            if value not in allowed:
                problems.append(f"{f.name}: {value!r} is not one of {list(allowed)}")
        if problems:
            raise ContextError(problems)

    @classmethod
    def from_mapping(cls, data: Mapping) -> "ContextAnswers":
        if not isinstance(data, Mapping):
            raise ContextError(["context must be a JSON object"])
        names = [f.name for f in fields(cls)]
        problems = [f"{k}: unknown field" for k in sorted(set(data) - set(names))]
        problems += [f"{k}: missing" for k in names if k not in data]
        for k in names:
            allowed = ENUMERANTS[k] + ((AUTO,) if k in AUTO_FIELDS else ())
            if k in data and data[k] not in allowed:
                problems.append(f"{k}: {data[k]!r} is not one of {list(allowed)}")
        if problems:
            raise ContextError(problems)
        return cls(**{k: data[k] for k in names})

    @classmethod
    def from_json(cls, path) -> "ContextAnswers":
        with open(path, encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ContextError([f"invalid JSON: {exc}"]) from exc
        return cls.from_mapping(data)

    def to_dict(self) -> dict:
        return asdict(self)

    @property
    def unresolved(self) -> list[str]:
        return [n for n in AUTO_FIELDS if getattr(self, n) == AUTO]


@dataclass(frozen=True)
class TraceStep:
    node_id: str
    question: str
    answer: str
    reconstructed: bool


@dataclass(frozen=True)
class Recommendation:
    metrics: tuple[str, ...]
    trace: tuple[TraceStep, ...]
    warnings: tuple[str, ...] = ()
    referral: Optional[str] = None
    components: Mapping[str, str] = field(default_factory=dict)
    family: Optional[str] = None
    tree_version: str = ""

    @property
    def path(self) -> list[str]:
        return [s.node_id for s in self.trace]


@lru_cache(maxsize=None)
def _tree_text() -> str:
    return resources.files("fairaudit").joinpath("data/selection_tree.json").read_text(encoding="utf-8")


def load_tree() -> dict:
    return json.loads(_tree_text())


def reconstructed_edges(tree: Optional[dict] = None) -> list[str]:
    """Edges not exercised by any shipped reference context, as 'node:answer'."""
    tree = tree or load_tree()
    return [
        f"{nid}:{ans}"
        for nid, node in tree["nodes"].items()
        for ans, edge in node["edges"].items()
        if edge.get("reconstructed")
    ]


def resolve_context(answers: ContextAnswers, diag=None) -> tuple[ContextAnswers, list[str]]:
    """Replace ``auto`` answers with measured verdicts from ``diag``.

    Returns the resolved answers and a list of warnings for explicit answers
    the data contradicts.
    """
    pending = answers.unresolved
    if pending and diag is None:
        raise AutoWithoutData(pending)
    if diag is None:
        return answers, []
    measured = {
        "base_rates_equal": "yes" if diag.base_rates_equal else "no",
        "dataset_balanced": "yes" if diag.dataset_balanced else "no",
    }
    updates, warnings = {}, []
    for name, verdict in measured.items():
        given = getattr(answers, name)
        if given == AUTO:
            updates[name] = verdict
        elif given != verdict:
            warnings.append(
                f"{name}: context says {given!r} but the data measures {verdict!r}"
                + (f" (base-rate gap {diag.base_rate_gap:.3f}, tolerance {diag.base_rate_tolerance})"
                   if name == "base_rates_equal" else
                   f" (positive fraction {diag.positive_fraction:.3f}, tolerance {diag.balance_tolerance})")
            )
    return replace(answers, **updates), warnings


def traverse(ask: Callable[[str, dict], str], tree: Optional[dict] = None) -> Recommendation:
    """Walk the tree from the root, calling ``ask(node_id, node)`` for each answer.

    Only nodes on the live path are asked about, in path order.
    """
    tree = tree or load_tree()
    nodes = tree["nodes"]
    trace, warnings = [], []
    node_id = tree["root"]
    while True:
        node = nodes[node_id]
        answer = ask(node_id, node)
        edges = node["edges"]
        if answer not in edges:
            raise ContextError([f"{node['field']}: {answer!r} is not one of {list(edges)}"])
        edge = edges[answer]
        trace.append(TraceStep(node_id, node["question"], answer, bool(edge.get("reconstructed"))))
        for key in ("warning", "advisory"):
            if key in edge:
                warnings.append(edge[key])
        if "next" in edge:
            node_id = edge["next"]
            if len(trace) > len(nodes):
                raise RuntimeError("selection tree contains a cycle")
            continue
        common = dict(trace=tuple(trace), warnings=tuple(warnings), tree_version=tree["version"])
        if "referral" in edge:
            return Recommendation(metrics=(), referral=edge["referral"], **common)
        leaf = edge["leaf"]
        return Recommendation(
            metrics=tuple(leaf["metrics"]),
            components=dict(leaf.get("components", {})),
            family=leaf["family"],
            **common,
        )


def recommend(answers: ContextAnswers, warnings=()) -> Recommendation:
    """Run the tree on fully resolved answers; ``warnings`` are prepended to the result's."""
    if answers.unresolved:
        raise AutoWithoutData(answers.unresolved)
    rec = traverse(lambda _nid, node: getattr(answers, node["field"]))
    if warnings:
        rec = replace(rec, warnings=tuple(warnings) + rec.warnings)
    return rec
