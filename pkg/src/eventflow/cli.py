"""Command line interface.

Exit codes: 0 success, 2 bad usage or unreadable input, 3 a valid run
that produced nothing (empty dataset, nothing to segment), 4 a broken
structural invariant.
"""

from __future__ import annotations

import functools
import json
import re
import sys
from dataclasses import asdict
from pathlib import Path

import click

from .composite import DEFAULT_K, DEFAULT_WINDOW
from .errors import (
    EmptyDataset,
    EmptyFilter,
    InvariantViolation,
    KTooLarge,
    NoSegments,
    ParseError,
    SchemaVersionMismatch,
    UnknownOutcomeType,
)
from .ingest import (
    SynthSpec,
    generate_synthetic,
    load_result,
    parse_timestamp,
    read_events,
    read_outcomes,
    save_result,
    write_events_csv,
    write_outcomes_csv,
)
from .metrics import extract_subgroups, quality_report, tree_ig
from .model import PrepConfig, build_dataset, verify_dataset
from .pipeline import run_analysis
from .server import DEFAULT_PORT, serve as run_server

_DURATION_RE = re.compile(r"^(\d+)([dhs])$")
_UNIT_SECONDS = {"d": 86_400, "h": 3_600, "s": 1}


def parse_duration(text: str) -> int:
    """Seconds from '7d', '24h', '3600s', or a bare integer."""
    text = text.strip()
    if text.isdigit():
        return int(text)
    m = _DURATION_RE.match(text)
    if not m:
        raise click.BadParameter(f"cannot parse duration {text!r} (want e.g. 7d, 24h)")
    return int(m.group(1)) * _UNIT_SECONDS[m.group(2)]


def _exit_codes(fn):
    """Map domain errors onto the documented exit codes."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (FileNotFoundError, IsADirectoryError, PermissionError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        except (
            ParseError,
            SchemaVersionMismatch,
            KTooLarge,
            UnknownOutcomeType,
            ValueError,
        ) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        except (EmptyDataset, NoSegments, EmptyFilter) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(3)
        except InvariantViolation as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(4)

    return wrapper


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    doc = json.loads(Path(path).read_text())
    if not isinstance(doc, dict):
        raise click.BadParameter("config file must hold a JSON object")
    return doc


def _resolve(flag, config: dict, key: str, default):
    """Flag beats config file beats default."""
    if flag is not None:
        return flag
    if key in config:
        return config[key]
    return default


@click.group()
@click.version_option()
def main() -> None:
    """Aggregate temporal event sequences into explorable trees."""


@main.command()
@click.option("--events", "events_path", required=True, type=click.Path(exists=True))
@click.option("--outcomes", "outcomes_path", required=True, type=click.Path(exists=True))
@click.option("--outcome-type", default=None)
@click.option("--cutoff", default=None, help="Epoch seconds or ISO-8601.")
@click.option("--eval-end", default=None, help="Epoch seconds or ISO-8601.")
@click.option("--history-years", type=float, default=None)
@click.option("--pre-outcome-days", type=float, default=None)
@click.option("--strict-outcomes", is_flag=True, default=False)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--out", "out_path", required=True, type=click.Path())
@_exit_codes
def ingest(
    events_path,
    outcomes_path,
    outcome_type,
    cutoff,
    eval_end,
    history_years,
    pre_outcome_days,
    strict_outcomes,
    config_path,
    out_path,
):
    """Prepare a labeled dataset from raw event and outcome files."""
    config = _load_config(config_path)
    outcome_type = _resolve(outcome_type, config, "outcome_type", None)
    cutoff = _resolve(cutoff, config, "cutoff", None)
    eval_end = _resolve(eval_end, config, "eval_end", None)
    if outcome_type is None or cutoff is None or eval_end is None:
        raise click.UsageError("outcome-type, cutoff and eval-end are required")
    prep = PrepConfig(
        outcome_type=outcome_type,
        cutoff=parse_timestamp(str(cutoff)),
        eval_end=parse_timestamp(str(eval_end)),
        history_years=float(_resolve(history_years, config, "history_years", 10.0)),
        pre_outcome_days=float(
            _resolve(pre_outcome_days, config, "pre_outcome_days", 365.0)
        ),
    )
    dataset = build_dataset(
        read_events(events_path),
        read_outcomes(outcomes_path),
        prep,
        strict_outcomes=strict_outcomes,
    )
    violations = verify_dataset(dataset)
    if violations:
        raise InvariantViolation("; ".join(violations))

    resolved = {
        "events": str(events_path),
        "outcomes": str(outcomes_path),
        "outcome_type": prep.outcome_type,
        "cutoff": prep.cutoff,
        "eval_end": prep.eval_end,
        "history_years": prep.history_years,
        "pre_outcome_days": prep.pre_outcome_days,
    }
    save_result(dataset, out_path, config=resolved)

    s = dataset.summary
    n_future = dataset.n_future_positive
    n_unlabeled = s.n_sequences - dataset.n_positive
    future_rate = 100.0 * n_future / n_unlabeled if n_unlabeled else 0.0
    click.echo(f"sequences: {s.n_sequences}")
    click.echo(f"events: {s.n_events}")
    click.echo(f"event types: {s.n_event_types}")
    click.echo(f"outcome rate: {100.0 * s.positive_fraction:.2f}%")
    click.echo(f"future outcome rate (unlabeled): {future_rate:.2f}%")
    click.echo(f"wrote {out_path}")


@main.command()
@click.option("--dataset", "dataset_path", required=True, type=click.Path(exists=True))
@click.option("--method", type=click.Choice(["sa", "mcp", "msp"]), required=True)
@click.option("--window", default=None, help="Segment width, e.g. 7d (sa only).")
@click.option("--k", type=int, default=None, help="Composite count (sa only).")
@click.option("--min-support", type=float, default=None)
@click.option("--seed", type=int, default=None)
@click.option(
    "--filter",
    "filter_names",
    multiple=True,
    help="Event type name to keep; repeatable. Default: all types.",
)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--out", "out_path", required=True, type=click.Path())
@_exit_codes
def analyze(
    dataset_path, method, window, k, min_support, seed, filter_names, config_path, out_path
):
    """Aggregate a prepared dataset with one method and save the tree."""
    config = _load_config(config_path)
    window_s = _resolve(window, config, "window", None)
    if isinstance(window_s, str):
        window_s = parse_duration(window_s)
    k = _resolve(k, config, "k", None)
    min_support = float(_resolve(min_support, config, "min_support", 0.01))
    seed = int(_resolve(seed, config, "seed", 0))
    names = list(filter_names) or _resolve(None, config, "event_filter", None)

    dataset = load_result(dataset_path)
    result = run_analysis(
        dataset,
        method,
        window=window_s,
        k=k,
        event_filter=names,
        min_support=min_support,
        seed=seed,
    )
    resolved = dict(result.tree.params)
    resolved["dataset"] = str(dataset_path)
    save_result(result.tree, out_path, config=resolved)
    if result.model is not None:
        model_path = Path(out_path).with_suffix(".model.json")
        save_result(result.model, model_path, config=resolved)
        click.echo(f"wrote {model_path}")

    gain = tree_ig(result.tree, min_support)
    click.echo(
        f"{method}: {len(result.tree.nodes)} nodes over "
        f"{result.tree.total_sequences} sequences, information gain {gain:.6f}"
    )
    click.echo(f"wrote {out_path}")


def _quality_rows(trees: dict, min_support: float) -> list[dict]:
    rows = []
    for method, tree in trees.items():
        rep = quality_report(tree, min_support)
        rows.append(
            {
                "method": method,
                "information_gain": round(rep.information_gain, 6),
                "avg_height_pct": round(rep.avg_height_pct, 6),
                "n_elements": rep.n_elements,
            }
        )
    return rows


def _subgroup_rows(trees: dict, threshold: float, min_support: float) -> list[dict]:
    rows = []
    for method, tree in trees.items():
        rep = extract_subgroups(tree, threshold, min_support)
        rows.append(
            {
                "method": method,
                "n_sequences": rep.n_sequences,
                "outcome_pct": round(rep.outcome_pct, 6),
                "future_precision_pct": round(rep.future_precision_pct, 6),
            }
        )
    return rows


def _markdown_table(rows: list[dict]) -> str:
    headers = list(rows[0].keys())
    lines = [
        "| " + " | ".join(headers) + " |",
        "| " + " | ".join("---" for _ in headers) + " |",
    ]
    for row in rows:
        lines.append("| " + " | ".join(str(row[h]) for h in headers) + " |")
    return "\n".join(lines)


def _csv_table(rows: list[dict]) -> str:
    headers = list(rows[0].keys())
    lines = [",".join(headers)]
    for row in rows:
        lines.append(",".join(str(row[h]) for h in headers))
    return "\n".join(lines)


@main.command()
@click.option("--dataset", "dataset_path", required=True, type=click.Path(exists=True))
@click.option("--methods", default="sa,mcp,msp", show_default=True)
@click.option("--min-support", type=float, default=0.01, show_default=True)
@click.option("--threshold", type=float, default=0.30, show_default=True)
@click.option("--window", default=None, help="Segment width for sa, e.g. 7d.")
@click.option("--k", type=int, default=None, help="Composite count for sa.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["md", "csv"]), default="md")
@click.option("--trees-dir", type=click.Path(), default=None)
@click.option("--out", "out_path", required=True, type=click.Path())
@_exit_codes
def evaluate(
    dataset_path,
    methods,
    min_support,
    threshold,
    window,
    k,
    seed,
    fmt,
    trees_dir,
    out_path,
):
    """Compare methods on one dataset: display quality and subgroups."""
    wanted = [m.strip() for m in methods.split(",") if m.strip()]
    window_s = parse_duration(window) if window is not None else None

    dataset = load_result(dataset_path)
    trees = {}
    for method in wanted:
        result = run_analysis(
            dataset,
            method,
            window=window_s,
            k=k,
            min_support=min_support,
            seed=seed,
        )
        trees[method] = result.tree
        if trees_dir is not None:
            out_dir = Path(trees_dir)
            save_result(result.tree, out_dir / f"{method}.tree.json")
            if result.model is not None:
                save_result(result.model, out_dir / f"{method}.model.json")

    quality = _quality_rows(trees, min_support)
    subgroups = _subgroup_rows(trees, threshold, min_support)

    if fmt == "md":
        s = dataset.summary
        text = "\n".join(
            [
                "# Aggregation evaluation",
                "",
                f"- dataset: {dataset_path}",
                f"- sequences: {s.n_sequences}",
                f"- outcome rate: {100.0 * s.positive_fraction:.2f}%",
                f"- min support: {min_support}",
                f"- subgroup threshold: {threshold}",
                "",
                "## Display quality",
                "",
                _markdown_table(quality),
                "",
                "## Subgroups",
                "",
                _markdown_table(subgroups),
                "",
            ]
        )
    else:
        text = _csv_table(quality) + "\n\n" + _csv_table(subgroups) + "\n"

    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text)
    click.echo(f"wrote {out_path}")


@main.command()
@click.option("--spec", "spec_path", required=True, type=click.Path(exists=True))
@click.option("--out-events", required=True, type=click.Path())
@click.option("--out-outcomes", required=True, type=click.Path())
@_exit_codes
def synth(spec_path, out_events, out_outcomes):
    """Generate a synthetic corpus with a planted pattern."""
    spec = SynthSpec.from_dict(json.loads(Path(spec_path).read_text()))
    events, outcomes = generate_synthetic(spec)
    write_events_csv(events, out_events)
    write_outcomes_csv(outcomes, out_outcomes)
    click.echo(f"wrote {len(events)} events to {out_events}")
    click.echo(f"wrote {len(outcomes)} outcomes to {out_outcomes}")


@main.command()
@click.option(
    "--data-dir",
    envvar="EVENTFLOW_DATA_DIR",
    default="eventflow_data",
    show_default=True,
)
@click.option("--port", type=int, envvar="EVENTFLOW_PORT", default=DEFAULT_PORT, show_default=True)
@_exit_codes
def serve(data_dir, port):
    """Run the HTTP API (blocking)."""
    run_server(data_dir, port)


@main.command()
@click.option("--result", "result_path", required=True, type=click.Path(exists=True))
@_exit_codes
def show(result_path):
    """Print a short description of any saved result file."""
    obj = load_result(result_path)
    kind = type(obj).__name__
    if hasattr(obj, "summary"):
        click.echo(f"{kind}: {asdict(obj.summary)}")
    elif hasattr(obj, "nodes"):
        click.echo(
            f"{kind}[{obj.method}]: {len(obj.nodes)} nodes, "
            f"{obj.total_sequences} sequences"
        )
    elif hasattr(obj, "centroids"):
        click.echo(
            f"{kind}: k={obj.k}, {obj.n_features} features, inertia {obj.inertia:.3f}"
        )
    else:
        click.echo(f"{kind}: {asdict(obj)}")


if __name__ == "__main__":
    main()
