"""Command-line front end.

Exit codes: 0 when every requested metric is satisfied, 1 when some metric
is unsatisfied or could not be computed, 2 on usage or data errors.
"""
from __future__ import annotations

import functools
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Optional

import click

from . import __version__
from .core import DEFAULT_TOLERANCE, Mode
from .diagnostics import DEFAULT_BALANCE_TOLERANCE, DEFAULT_BASE_RATE_TOLERANCE, diagnose
from .errors import ContextError, FairAuditError
from .ingestion import FORMATS, SchemaConfig, load_dataset
from .report import (
    DISCLAIMER,
    AuditConfig,
    build_audit_report,
    diagnostics_markdown,
    diagnostics_to_dict,
    parse_metric_list,
    recommendation_markdown,
    recommendation_to_dict,
    round_floats,
    to_json,
    to_markdown,
)
from .selector import AUTO, AUTO_FIELDS, ContextAnswers, recommend, reconstructed_edges, resolve_context, traverse

EXIT_OK, EXIT_UNFAIR, EXIT_ERROR = 0, 1, 2


class DataError(click.ClickException):
    exit_code = EXIT_ERROR


def data_options(required: bool):
    def deco(fn):
        opts = [
            click.option("--data", "data_path", type=click.Path(dir_okay=False, path_type=Path),
                         required=required, help="Input table (CSV or JSON)."),
            click.option("--input-format", type=click.Choice(FORMATS),
                         help="Input format; defaults to the file suffix."),
            click.option("--schema", "schema_path", type=click.Path(exists=True, dir_okay=False, path_type=Path),
                         help="JSON schema config; column flags override its entries."),
            click.option("--label-col", help="True-outcome column."),
            click.option("--group-col", help="Sensitive-attribute column."),
            click.option("--pred-col", help="Predicted-outcome column."),
            click.option("--score-col", help="Score column (values in [0, 1])."),
            click.option("--feature-cols", help="Comma-separated feature columns."),
            click.option("--positive-label", help="Label value mapped to 1 (default 1)."),
            click.option("--negative-label", help="Label value mapped to 0 (default 0; 'ANY' = any other value)."),
            click.option("--threshold", type=click.FloatRange(0, 1), help="Classify scores >= T as positive."),
            click.option("--base-rate-tol", type=click.FloatRange(min=0), default=DEFAULT_BASE_RATE_TOLERANCE,
                         show_default=True, help="Max base-rate gap counted as equal."),
            click.option("--balance-tol", type=click.FloatRange(min=0), default=DEFAULT_BALANCE_TOLERANCE,
                         show_default=True, help="Max |positive fraction - 0.5| counted as balanced."),
        ]
        for opt in reversed(opts):
            fn = opt(fn)
        return fn
    return deco


def output_options(fn):
    fn = click.option("--out", type=click.Path(dir_okay=False, path_type=Path), help="Write here instead of stdout.")(fn)
    fn = click.option("--format", "out_format", type=click.Choice(["json", "md"]), default="json",
                      show_default=True, help="Output format.")(fn)
    return fn


def metric_options(fn):
    opts = [
        click.option("--metrics", default="all", show_default=True, help="Comma-separated metric ids or 'all'."),
        click.option("--tolerance", type=click.FloatRange(min=0), default=DEFAULT_TOLERANCE, show_default=True),
        click.option("--mode", type=click.Choice([m.value for m in Mode]), default="parity", show_default=True),
        click.option("--bins", type=click.IntRange(min=2), default=10, show_default=True, help="Calibration bins."),
        click.option("--k", type=click.IntRange(min=1), default=5, show_default=True, help="Neighbours for FTA."),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def context_options(fn):
    fn = click.option("--interactive", is_flag=True, help="Answer the selection questions at the prompt.")(fn)
    fn = click.option("--context", "context_path", type=click.Path(dir_okay=False, path_type=Path),
                      help="Context answers as JSON.")(fn)
    return fn


def handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (FairAuditError, ValueError, OSError) as exc:
            raise DataError(str(exc)) from exc
    return wrapper


def build_schema(params: dict) -> SchemaConfig:
    base = asdict(SchemaConfig.from_json(params["schema_path"])) if params.get("schema_path") else {}
    flags = {
        "label_column": params.get("label_col"),
        "group_column": params.get("group_col"),
        "prediction_column": params.get("pred_col"),
        "score_column": params.get("score_col"),
        "positive_label": params.get("positive_label"),
        "threshold": params.get("threshold"),
    }
    if params.get("feature_cols"):
        flags["feature_columns"] = tuple(c.strip() for c in params["feature_cols"].split(",") if c.strip())
    base.update({k: v for k, v in flags.items() if v is not None})
    neg = params.get("negative_label")
    if neg is not None:
        base["negative_label"] = None if neg == "ANY" else neg
    for key, flag in (("label_column", "--label-col"), ("group_column", "--group-col")):
        if not base.get(key):
            raise click.UsageError(f"missing option {flag} (or a --schema file naming it)")
    if not base.get("prediction_column") and not base.get("score_column"):
        raise click.UsageError("give --pred-col, --score-col, or both")
    return SchemaConfig(**base)


def load_from_params(params: dict):
    path = params["data_path"]
    if not path.exists():
        raise click.UsageError(f"data file {path} does not exist")
    schema = build_schema(params)
    return load_dataset(path, params.get("input_format"), schema), schema


def emit(text: str, out: Optional[Path]):
    if out is None:
        click.echo(text, nl=False)
    else:
        out.write_text(text, encoding="utf-8")


def prompt_answers(diag=None):
    """Walk the tree at the terminal, asking only the questions on the live path."""

    def ask(node_id, node):
        field = node["field"]
        choices = list(node["edges"])
        if diag is not None and field in AUTO_FIELDS:
            choices.append(AUTO)
        answer = click.prompt(
            f"[node {node_id}] {node['question']}",
            type=click.Choice(choices),
            err=True,
        )
        if answer == AUTO:
            measured = diag.base_rates_equal if field == "base_rates_equal" else diag.dataset_balanced
            answer = "yes" if measured else "no"
            click.echo(f"  measured from data: {answer}", err=True)
        return answer

    return ask


def run_selection(params: dict, diag):
    context_path, interactive = params.get("context_path"), params.get("interactive")
    if bool(context_path) == bool(interactive):
        raise click.UsageError("give exactly one of --context or --interactive")
    if interactive:
        return traverse(prompt_answers(diag))
    if not context_path.exists():
        raise click.UsageError(f"context file {context_path} does not exist")
    answers = ContextAnswers.from_json(context_path)
    resolved, warnings = resolve_context(answers, diag)
    return recommend(resolved, warnings)


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__, "--version", prog_name="fairaudit")
def main():
    """Audit group and individual fairness of binary-outcome predictions."""


@main.command()
@data_options(required=True)
@metric_options
@output_options
@click.pass_context
@handle_errors
def audit(ctx, **params):
    """Compute fairness metrics, diagnostics and incompatibility warnings."""
    dataset, schema = load_from_params(params)
    config = AuditConfig(
        metrics=parse_metric_list(params["metrics"]),
        tolerance=params["tolerance"],
        mode=Mode(params["mode"]),
        bins=params["bins"],
        k=params["k"],
        base_rate_tolerance=params["base_rate_tol"],
        balance_tolerance=params["balance_tol"],
        threshold=schema.threshold,
    )
    report = build_audit_report(dataset, config)
    payload = report.to_dict()
    emit(to_json(payload) if params["out_format"] == "json" else to_markdown(payload), params["out"])
    ctx.exit(EXIT_OK if report.all_satisfied else EXIT_UNFAIR)


@main.command("diagnose")
@data_options(required=True)
@output_options
@click.pass_context
@handle_errors
def diagnose_cmd(ctx, **params):
    """Report base rates, dataset balance and the four-fifths ratio."""
    dataset, _ = load_from_params(params)
    diag = diagnose(dataset, params["base_rate_tol"], params["balance_tol"])
    body = diagnostics_to_dict(diag)
    if params["out_format"] == "json":
        emit(to_json({"diagnostics": body, "tool_version": __version__}), params["out"])
    else:
        emit("\n".join(diagnostics_markdown(round_floats(body))), params["out"])
    ctx.exit(EXIT_UNFAIR if diag.four_fifths_pass is False else EXIT_OK)


@main.command()
@context_options
@data_options(required=False)
@output_options
@handle_errors
def select(**params):
    """Recommend metrics for an audit context (from a JSON file or interactively)."""
    diag = None
    if params.get("data_path") is not None:
        dataset, _ = load_from_params(params)
        diag = diagnose(dataset, params["base_rate_tol"], params["balance_tol"])
    try:
        rec = run_selection(params, diag)
    except ContextError as exc:
        raise DataError("malformed context: " + "; ".join(exc.problems)) from exc
    body = recommendation_to_dict(rec)
    if params["out_format"] == "json":
        emit(to_json({
            "recommendation": body,
            "reconstructed_tree_edges": reconstructed_edges(),
            "disclaimer": DISCLAIMER,
            "tool_version": __version__,
        }), params["out"])
    else:
        emit("\n".join(recommendation_markdown(body) + [f"> {DISCLAIMER}", ""]), params["out"])


@main.command("report")
@data_options(required=True)
@metric_options
@context_options
@output_options
@click.pass_context
@handle_errors
def report_cmd(ctx, **params):
    """Audit, diagnose and select in one report."""
    dataset, schema = load_from_params(params)
    config = AuditConfig(
        metrics=parse_metric_list(params["metrics"]),
        tolerance=params["tolerance"],
        mode=Mode(params["mode"]),
        bins=params["bins"],
        k=params["k"],
        base_rate_tolerance=params["base_rate_tol"],
        balance_tolerance=params["balance_tol"],
        threshold=schema.threshold,
    )
    diag = diagnose(dataset, config.base_rate_tolerance, config.balance_tolerance)
    try:
        rec = run_selection(params, diag)
    except ContextError as exc:
        raise DataError("malformed context: " + "; ".join(exc.problems)) from exc
    report = build_audit_report(dataset, config, recommendation=rec)
    payload = report.to_dict()
    emit(to_json(payload) if params["out_format"] == "json" else to_markdown(payload), params["out"])
    ctx.exit(EXIT_OK if report.all_satisfied else EXIT_UNFAIR)


if __name__ == "__main__":
    sys.exit(main())
