"""Composite event learning.

Sequences are sliced into fixed-width time windows anchored at each
sequence's first event, event-type counts per window become feature
vectors, and k-means over those vectors defines the composite event
types. Rewriting replaces each non-empty window with one composite
event so high-variety sequences collapse onto shared prefixes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, EmptyFilter, KTooLarge, NoSegments
from .model import DAY, Dataset, EventSequence, EventTypeRegistry, summarize

DEFAULT_WINDOW = 7 * DAY
DEFAULT_K = 25


@dataclass
class Segment:
    """Counts of filtered event types within one time window of one sequence."""

    sequence_id: str
    window_index: int
    start_ts: int
    counts: np.ndarray
    first_event_ts: int


@dataclass
class CompositeModel:
    """Trained windowing + clustering parameters.

    `centroids` is (k x n_features); feature j corresponds to
    `event_filter[j]`. `inertia_trace` holds the within-cluster sum of
    squares after each Lloyd assignment step.
    """

    k: int
    centroids: np.ndarray
    inertia: float
    seed: int
    iterations_run: int
    inertia_trace: list[float] = field(default_factory=list)
    window: int | None = None
    event_filter: list[int] | None = None
    descriptors: "list[CompositeDescriptor] | None" = None

    @property
    def n_features(self) -> int:
        return self.centroids.shape[1]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CompositeModel):
            return NotImplemented
        return (
            self.k == other.k
            and np.array_equal(self.centroids, other.centroids)
            and self.inertia == other.inertia
            and self.seed == other.seed
            and self.iterations_run == other.iterations_run
            and self.inertia_trace == other.inertia_trace
            and self.window == other.window
            and self.event_filter == other.event_filter
            and self.descriptors == other.descriptors
        )


@dataclass
class Slice:
    event_type: int
    width_fraction: float
    height_fraction: float


@dataclass
class CompositeDescriptor:
    """Display summary of one composite: slice geometry for an aster chart."""

    composite_id: int
    slices: list[Slice]
    other_bucket: list[int]
    segment_count: int
    label_stats: tuple[int, int]  # (positive-origin, negative-origin) segments


def _segment_sequence(
    seq: EventSequence, window: int, columns: dict[int, int], n_features: int
) -> list[Segment]:
    if not seq.events:
        return []
    t0 = seq.events[0][1]
    buckets: dict[int, Segment] = {}
    for type_id, ts in seq.events:
        col = columns.get(type_id)
        if col is None:
            continue
        idx = (ts - t0) // window
        seg = buckets.get(idx)
        if seg is None:
            seg = Segment(
                sequence_id=seq.sequence_id,
                window_index=idx,
                start_ts=t0 + idx * window,
                counts=np.zeros(n_features, dtype=np.int64),
                first_event_ts=ts,
            )
            buckets[idx] = seg
        seg.counts[col] += 1
        if ts < seg.first_event_ts:
            seg.first_event_ts = ts
    return [buckets[i] for i in sorted(buckets)]


def segment(
    dataset: Dataset, window: int, event_filter: list[int] | None = None
) -> list[Segment]:
    """Slice every sequence into windows and count filtered event types.

    Windows are [t0 + i*w, t0 + (i+1)*w) anchored at the sequence's first
    event; windows without any filtered event are omitted. Output is in
    (sequence_id, window_index) order.
    """
    if window <= 0:
        raise ValueError("window must be positive")
    if event_filter is None:
        event_filter = list(range(len(dataset.registry)))
    if not event_filter:
        raise EmptyFilter("event filter selects no types")
    columns = {type_id: col for col, type_id in enumerate(event_filter)}

    segments: list[Segment] = []
    for seq in sorted(dataset.sequences, key=lambda s: s.sequence_id):
        segments.extend(_segment_sequence(seq, window, columns, len(event_filter)))
    if not segments:
        raise NoSegments("no segment contains a filtered event")
    return segments


def _sq_dists(x: np.ndarray, centers: np.ndarray) -> np.ndarray:
    # |x - c|^2 via the expanded form; exact for integer-valued data.
    d2 = (
        (x * x).sum(axis=1)[:, None]
        - 2.0 * (x @ centers.T)
        + (centers * centers).sum(axis=1)[None, :]
    )
    return np.maximum(d2, 0.0)


def _plusplus_init(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = x.shape[0]
    centers = np.empty((k, x.shape[1]), dtype=np.float64)
    centers[0] = x[rng.integers(n)]
    d2 = _sq_dists(x, centers[:1])[:, 0]
    for j in range(1, k):
        total = d2.sum()
        if total <= 0.0:
            idx = int(rng.integers(n))
        else:
            target = rng.random() * total
            idx = int(np.searchsorted(np.cumsum(d2), target))
            idx = min(idx, n - 1)
        centers[j] = x[idx]
        d2 = np.minimum(d2, _sq_dists(x, centers[j : j + 1])[:, 0])
    return centers


def kmeans(
    segments: list[Segment],
    k: int,
    seed: int,
    max_iter: int = 100,
    tol: float = 1e-6,
    *,
    window: int | None = None,
    event_filter: list[int] | None = None,
) -> CompositeModel:
    """Lloyd k-means with k-means++ seeding over segment count vectors.

    Deterministic under `seed`. Empty clusters are re-seeded to the point
    currently farthest from its assigned centroid, which keeps k as
    requested and preserves the non-increasing inertia trace. Raises
    KTooLarge when k exceeds the number of distinct count vectors.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    x = np.stack([s.counts for s in segments]).astype(np.float64)
    n_distinct = len(np.unique(x, axis=0))
    if k > n_distinct:
        raise KTooLarge(f"k too large: k={k} > {n_distinct} distinct segment vectors")

    rng = np.random.default_rng(seed)
    centers = _plusplus_init(x, k, rng)
    trace: list[float] = []
    prev = np.inf
    n = x.shape[0]
    iterations = 0
    for it in range(1, max_iter + 1):
        iterations = it
        d2 = _sq_dists(x, centers)
        labels = d2.argmin(axis=1)
        inertia = float(d2[np.arange(n), labels].sum())
        trace.append(inertia)
        if prev - inertia < tol or it == max_iter:
            break
        prev = inertia
        centers = _update_centers(x, labels, centers, k, d2)

    return CompositeModel(
        k=k,
        centroids=centers,
        inertia=trace[-1],
        seed=seed,
        iterations_run=iterations,
        inertia_trace=trace,
        window=window,
        event_filter=list(event_filter) if event_filter is not None else None,
    )


def _update_centers(
    x: np.ndarray, labels: np.ndarray, centers: np.ndarray, k: int, d2: np.ndarray
) -> np.ndarray:
    counts = np.bincount(labels, minlength=k)
    sums = np.zeros_like(centers)
    np.add.at(sums, labels, x)
    new_centers = centers.copy()
    nonempty = counts > 0
    new_centers[nonempty] = sums[nonempty] / counts[nonempty, None]

    empties = np.flatnonzero(~nonempty)
    if len(empties):
        assigned = d2[np.arange(x.shape[0]), labels]
        farthest = np.argsort(assigned, kind="stable")[::-1]
        for rank, cluster in enumerate(empties):
            new_centers[cluster] = x[farthest[rank]]
    return new_centers


def assign(model: CompositeModel, seg: Segment) -> int:
    """Nearest centroid by squared distance; ties go to the lowest id."""
    counts = np.asarray(seg.counts, dtype=np.float64)
    if counts.shape[0] != model.n_features:
        raise DimensionMismatch(
            f"segment has {counts.shape[0]} features, model expects {model.n_features}"
        )
    return int(_sq_dists(counts[None, :], model.centroids)[0].argmin())


def assign_many(model: CompositeModel, segments: list[Segment]) -> np.ndarray:
    if not segments:
        return np.empty(0, dtype=np.int64)
    x = np.stack([s.counts for s in segments]).astype(np.float64)
    if x.shape[1] != model.n_features:
        raise DimensionMismatch(
            f"segments have {x.shape[1]} features, model expects {model.n_features}"
        )
    return _sq_dists(x, model.centroids).argmin(axis=1)


def rewrite(dataset: Dataset, model: CompositeModel) -> Dataset:
    """Replace each non-empty window with one composite event.

    The composite event keeps the timestamp of the window's first
    filtered event, so gap structure survives. Sequence count, order,
    labels and outcome timestamps carry over unchanged.
    """
    if model.window is None or model.event_filter is None:
        raise ValueError("model was trained without window/event_filter metadata")
    columns = {type_id: col for col, type_id in enumerate(model.event_filter)}

    registry = EventTypeRegistry()
    for cid in range(model.k):
        registry.intern(f"composite_{cid}")

    sequences: list[EventSequence] = []
    for seq in dataset.sequences:
        segs = _segment_sequence(seq, model.window, columns, model.n_features)
        assigned = assign_many(model, segs)
        events = [
            (int(cid), seg.first_event_ts) for cid, seg in zip(assigned, segs)
        ]
        sequences.append(
            EventSequence(
                sequence_id=seq.sequence_id,
                events=events,
                label=seq.label,
                future_label=seq.future_label,
                outcome_timestamp=seq.outcome_timestamp,
            )
        )

    for seq in sequences:
        seen: set[int] = set()
        for type_id, _ in seq.events:
            registry.occurrence_counts[type_id] += 1
            seen.add(type_id)
        for type_id in seen:
            registry.sequence_counts[type_id] += 1

    return Dataset(
        sequences=sequences,
        registry=registry,
        prep=dataset.prep,
        summary=summarize(sequences, registry),
    )


def describe(
    model: CompositeModel,
    segments: list[Segment],
    assignments: np.ndarray | list[int],
    dataset: Dataset,
    low_mean_fraction: float = 0.02,
) -> list[CompositeDescriptor]:
    """Aster-chart geometry for each composite.

    Slice width is the centroid mean normalized by the centroid's mean
    sum; height is the mean normalized by the maximum mean of the same
    feature across all composites. Features below `low_mean_fraction` of
    the width budget fold into a residual bucket; zero-mean features are
    omitted entirely.
    """
    mu = model.centroids
    col_max = mu.max(axis=0)
    feature_ids = model.event_filter or list(range(model.n_features))

    by_sid = {seq.sequence_id: seq.label for seq in dataset.sequences}
    seg_counts = [0] * model.k
    pos_counts = [0] * model.k
    for seg, cid in zip(segments, assignments):
        cid = int(cid)
        seg_counts[cid] += 1
        if by_sid.get(seg.sequence_id, False):
            pos_counts[cid] += 1

    descriptors: list[CompositeDescriptor] = []
    for cid in range(model.k):
        total = mu[cid].sum()
        slices: list[Slice] = []
        other: list[int] = []
        for j in range(model.n_features):
            mean = mu[cid, j]
            if mean <= 0.0:
                continue
            width = mean / total
            if width < low_mean_fraction:
                other.append(feature_ids[j])
            else:
                slices.append(
                    Slice(
                        event_type=feature_ids[j],
                        width_fraction=float(width),
                        height_fraction=float(mean / col_max[j]),
                    )
                )
        descriptors.append(
            CompositeDescriptor(
                composite_id=cid,
                slices=slices,
                other_bucket=other,
                segment_count=seg_counts[cid],
                label_stats=(pos_counts[cid], seg_counts[cid] - pos_counts[cid]),
            )
        )
    return descriptors
