"""End-to-end analysis: dataset in, aggregated tree (and model) out."""

from __future__ import annotations

from dataclasses import dataclass

from .aggregate import EventTree, build_rdt, build_sa
from .composite import (
    DEFAULT_K,
    DEFAULT_WINDOW,
    CompositeModel,
    assign_many,
    describe,
    kmeans,
    rewrite,
    segment,
)
from .model import Dataset, EventSequence
from .validation import ensure_method, ensure_positive, ensure_support, resolve_event_filter


@dataclass
class AnalysisResult:
    """Tree plus, for the composite pipeline, the model that produced it."""

    tree: EventTree
    model: CompositeModel | None = None


def _filtered_view(dataset: Dataset, filter_ids: list[int]) -> Dataset:
    """Dataset with non-filtered events dropped but every sequence kept,
    so totals and label rates stay comparable. Transient: registry
    tallies are not rebuilt."""
    allowed = set(filter_ids)
    sequences = [
        EventSequence(
            sequence_id=s.sequence_id,
            events=[(t, ts) for t, ts in s.events if t in allowed],
            label=s.label,
            future_label=s.future_label,
            outcome_timestamp=s.outcome_timestamp,
        )
        for s in dataset.sequences
    ]
    return Dataset(sequences=sequences, registry=dataset.registry, prep=dataset.prep)


def run_analysis(
    dataset: Dataset,
    method: str,
    *,
    window: int | None = None,
    k: int | None = None,
    event_filter: list[str] | None = None,
    min_support: float = 0.01,
    seed: int = 0,
    max_iter: int = 100,
    tol: float = 1e-6,
    low_mean_fraction: float = 0.02,
) -> AnalysisResult:
    """Run one aggregation method over a prepared dataset.

    `sa` learns composite events (segment, cluster, rewrite) and builds
    the full prefix trie over the rewritten sequences; `mcp` and `msp`
    build rank-divide-trim paths over the raw sequences using frequency
    or information-gain ranking. `event_filter` is a list of event type
    names; None means all types.
    """
    ensure_method(method)
    ensure_support(min_support)
    filter_ids = resolve_event_filter(dataset.registry, event_filter)
    filter_names = (
        None
        if filter_ids is None
        else [dataset.registry.name_of(i) for i in filter_ids]
    )

    if method == "sa":
        window = DEFAULT_WINDOW if window is None else window
        k = DEFAULT_K if k is None else k
        ensure_positive(window, "window")
        params = {
            "method": "sa",
            "window": window,
            "k": k,
            "seed": seed,
            "event_filter": filter_names,
            "min_support": min_support,
        }
        segments = segment(dataset, window, filter_ids)
        model = kmeans(
            segments,
            k,
            seed,
            max_iter=max_iter,
            tol=tol,
            window=window,
            event_filter=filter_ids
            if filter_ids is not None
            else list(range(len(dataset.registry))),
        )
        assignments = assign_many(model, segments)
        model.descriptors = describe(
            model, segments, assignments, dataset, low_mean_fraction
        )
        rewritten = rewrite(dataset, model)
        tree = build_sa(rewritten, params=params)
        return AnalysisResult(tree=tree, model=model)

    params = {
        "method": method,
        "event_filter": filter_names,
        "min_support": min_support,
    }
    working = dataset if filter_ids is None else _filtered_view(dataset, filter_ids)
    ranker = "frequency" if method == "mcp" else "ig"
    tree = build_rdt(
        working, ranker=ranker, min_support_fraction=min_support, params=params
    )
    return AnalysisResult(tree=tree)
