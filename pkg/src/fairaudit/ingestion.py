"""Load prediction tables from CSV or JSON into an :class:`AuditDataset`.

Nothing is dropped silently: a row with a missing or unreadable mandatory
field raises an error naming the (1-based) data row.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Iterable, Mapping, Optional, Sequence

from .core import AuditDataset, AuditRecord
from .errors import BadLabel, BadScore, MissingColumn, MissingScore, ParseError, SchemaError

FORMATS = ("csv", "json")


@dataclass(frozen=True)
class SchemaConfig:
    """Column mapping for an input table.

    ``positive_label`` maps to 1 and ``negative_label`` to 0. With
    ``negative_label=None`` every other non-empty label counts as 0.
    Predicted outcomes accept the same two tokens, or literal 1/0.
    """

    label_column: str
    group_column: str
    prediction_column: Optional[str] = None
    score_column: Optional[str] = None
    feature_columns: Optional[tuple[str, ...]] = None
    positive_label: str = "1"
    negative_label: Optional[str] = "0"
    threshold: Optional[float] = None

    def __post_init__(self):
        if self.prediction_column is None and self.score_column is None:
            raise SchemaError("declare a prediction column, a score column, or both")
        if self.threshold is not None:
            if self.score_column is None:
                raise SchemaError("a threshold needs a score column")
            if self.prediction_column is not None:
                raise SchemaError("give either a prediction column or a threshold, not both")
            if not 0.0 <= self.threshold <= 1.0:
                raise SchemaError(f"threshold must lie in [0, 1], got {self.threshold}")
        if self.feature_columns is not None:
            object.__setattr__(self, "feature_columns", tuple(self.feature_columns))
        object.__setattr__(self, "positive_label", _token(self.positive_label))
        if self.negative_label is not None:
            object.__setattr__(self, "negative_label", _token(self.negative_label))
            if self.negative_label == self.positive_label:
                raise SchemaError("positive and negative labels must differ")

    @property
    def columns(self) -> list[str]:
        cols = [self.label_column, self.group_column]
        cols += [c for c in (self.prediction_column, self.score_column) if c is not None]
        cols += list(self.feature_columns or ())
        return cols

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "SchemaConfig":
        known = set(cls.__dataclass_fields__)
        unknown = sorted(set(data) - known)
        if unknown:
            raise SchemaError(f"unknown schema fields: {', '.join(unknown)}")
        for req in ("label_column", "group_column"):
            if req not in data:
                raise SchemaError(f"schema is missing {req!r}")
        return cls(**data)

    @classmethod
    def from_json(cls, path) -> "SchemaConfig":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise SchemaError(f"schema file {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise SchemaError("schema file must hold a JSON object")
        return cls.from_mapping(data)


def _token(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    return str(value).strip()


def _label(value: Any, schema: SchemaConfig, row: int) -> int:
    tok = _token(value)
    if tok == "":
        raise BadLabel(row, value)
    if tok == schema.positive_label:
        return 1
    if schema.negative_label is None or tok == schema.negative_label:
        return 0
    raise BadLabel(row, value)


def _prediction(value: Any, schema: SchemaConfig, row: int) -> Optional[int]:
    tok = _token(value)
    if tok == "":
        return None
    if tok in (schema.positive_label, "1"):
        return 1
    if tok in (schema.negative_label, "0"):
        return 0
    raise BadLabel(row, value)


def _real(value: Any, row: int, column: str) -> Optional[float]:
    if value is None or (isinstance(value, str) and value.strip() == ""):
        return None
    if isinstance(value, bool):
        raise ParseError(row, f"{column}: expected a number, got {value!r}")
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ParseError(row, f"{column}: expected a number, got {value!r}") from None


def _record(raw: Mapping[str, Any], schema: SchemaConfig, row: int) -> AuditRecord:
    y = _label(raw.get(schema.label_column), schema, row)

    group = _token(raw.get(schema.group_column))
    if group == "":
        raise ParseError(row, f"missing group value in {schema.group_column!r}")

    pred = None
    if schema.prediction_column is not None:
        pred = _prediction(raw.get(schema.prediction_column), schema, row)

    score = None
    if schema.score_column is not None:
        score = _real(raw.get(schema.score_column), row, schema.score_column)
        if score is not None and not (0.0 <= score <= 1.0):  # also rejects NaN
            raise BadScore(row, score)

    if pred is None and score is None:
        raise ParseError(row, "neither a predicted outcome nor a score is present")

    features = None
    if schema.feature_columns:
        vals = [_real(raw.get(c), row, c) for c in schema.feature_columns]
        if all(v is None for v in vals):
            features = None
        elif any(v is None for v in vals):
            raise ParseError(row, "feature vector is partially missing")
        elif not all(math.isfinite(v) for v in vals):
            raise ParseError(row, "feature values must be finite")
        else:
            features = tuple(vals)

    return AuditRecord(true_outcome=y, group=group, predicted_outcome=pred, score=score, features=features)


def _check_columns(available: Iterable[str], schema: SchemaConfig) -> None:
    present = set(available)
    for col in schema.columns:
        if col not in present:
            raise MissingColumn(col)


def _csv_rows(path: Path) -> tuple[Sequence[str], list[dict]]:
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.DictReader(fh, strict=True)
        try:
            header = reader.fieldnames
            if not header:
                raise ParseError(None, "CSV header row is missing")
            rows = []
            for row in reader:
                if None in row:
                    raise ParseError(len(rows) + 1, "more fields than header columns")
                rows.append(row)
        except csv.Error as exc:
            raise ParseError(reader.line_num, str(exc)) from exc
    return header, rows


def _json_rows(path: Path) -> list[dict]:
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(None, f"invalid JSON: {exc}") from exc
    if not isinstance(data, list):
        raise ParseError(None, "JSON input must be an array of objects")
    for i, obj in enumerate(data, start=1):
        if not isinstance(obj, dict):
            raise ParseError(i, "expected a flat JSON object")
        if any(isinstance(v, (dict, list)) for v in obj.values()):
            raise ParseError(i, "nested values are not allowed")
    return data


def records_from_rows(rows: Sequence[Mapping[str, Any]], schema: SchemaConfig) -> AuditDataset:
    dataset = AuditDataset(tuple(_record(raw, schema, i) for i, raw in enumerate(rows, start=1)))
    if schema.threshold is not None:
        dataset = apply_threshold(dataset, schema.threshold)
    return dataset


def load_dataset(path, format: Optional[str] = None, schema: SchemaConfig = None) -> AuditDataset:
    """Read ``path`` under ``schema``; ``format`` defaults to the file suffix."""
    if schema is None:
        raise SchemaError("a schema is required")
    path = Path(path)
    fmt = (format or path.suffix.lstrip(".")).lower()
    if fmt not in FORMATS:
        raise SchemaError(f"unsupported input format {fmt!r}; expected one of {FORMATS}")

    if fmt == "csv":
        header, rows = _csv_rows(path)
        _check_columns(header, schema)
    else:
        rows = _json_rows(path)
        # every object must carry every declared column
        for obj in rows:
            for col in schema.columns:
                if col not in obj:
                    raise MissingColumn(col)
    return records_from_rows(rows, schema)


def apply_threshold(dataset: AuditDataset, t: float) -> AuditDataset:
    """Return a copy whose predicted outcomes are ``score >= t``."""
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"threshold must lie in [0, 1], got {t}")
    missing = [i for i, r in enumerate(dataset.records) if r.score is None]
    if missing:
        raise MissingScore(f"{len(missing)} record(s) lack a score (first at index {missing[0]})")
    return AuditDataset(tuple(replace(r, predicted_outcome=int(r.score >= t)) for r in dataset.records))
