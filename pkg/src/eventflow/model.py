"""Core domain types: event records, sequences, datasets, and preparation.

A dataset is immutable once built: every downstream stage (segmentation,
aggregation, metrics) only reads it, so datasets can be shared freely
across threads.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

from .errors import EmptyDataset, UnknownOutcomeType

DAY = 86_400
YEAR = 365 * DAY


@dataclass(frozen=True)
class EventRecord:
    """One raw event row: who, what, when, plus an optional attribute."""

    sequence_id: str
    event_type: str
    timestamp: int
    attribute: str | None = None


@dataclass(frozen=True)
class OutcomeRecord:
    """A special event marking that an outcome occurred for a sequence."""

    sequence_id: str
    outcome_type: str
    timestamp: int


class EventTypeRegistry:
    """Bidirectional name <-> dense id map with per-type usage counts.

    Ids are dense 0..n-1 in order of first interning, so they can index
    count vectors directly.
    """

    def __init__(self) -> None:
        self._names: list[str] = []
        self._ids: dict[str, int] = {}
        self.occurrence_counts: list[int] = []
        self.sequence_counts: list[int] = []

    def intern(self, name: str) -> int:
        type_id = self._ids.get(name)
        if type_id is None:
            type_id = len(self._names)
            self._ids[name] = type_id
            self._names.append(name)
            self.occurrence_counts.append(0)
            self.sequence_counts.append(0)
        return type_id

    def id_of(self, name: str) -> int:
        return self._ids[name]

    def name_of(self, type_id: int) -> str:
        return self._names[type_id]

    def __contains__(self, name: str) -> bool:
        return name in self._ids

    def __len__(self) -> int:
        return len(self._names)

    @property
    def names(self) -> list[str]:
        return list(self._names)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EventTypeRegistry):
            return NotImplemented
        return (
            self._names == other._names
            and self.occurrence_counts == other.occurrence_counts
            and self.sequence_counts == other.sequence_counts
        )

    def __repr__(self) -> str:
        return f"EventTypeRegistry({len(self)} types)"


@dataclass
class EventSequence:
    """Ordered (event_type id, timestamp) pairs for one entity plus labels.

    `label` marks an outcome inside the training window; `future_label`
    marks an outcome in the held-out evaluation window. The two are
    mutually exclusive.
    """

    sequence_id: str
    events: list[tuple[int, int]]
    label: bool = False
    future_label: bool = False
    outcome_timestamp: int | None = None

    @property
    def start_ts(self) -> int:
        return self.events[0][1]

    def type_string(self) -> tuple[int, ...]:
        return tuple(e for e, _ in self.events)


@dataclass(frozen=True)
class PrepConfig:
    """Time-window parameters for dataset preparation."""

    outcome_type: str
    cutoff: int
    eval_end: int
    history_years: float = 10.0
    pre_outcome_days: float = 365.0

    def __post_init__(self) -> None:
        if self.cutoff >= self.eval_end:
            raise ValueError("cutoff must be before eval_end")
        if self.history_years <= 0:
            raise ValueError("history_years must be positive")
        if self.pre_outcome_days <= 0:
            raise ValueError("pre_outcome_days must be positive")

    @property
    def history_seconds(self) -> int:
        return round(self.history_years * YEAR)

    @property
    def pre_outcome_seconds(self) -> int:
        return round(self.pre_outcome_days * DAY)


@dataclass(frozen=True)
class DatasetSummary:
    n_sequences: int
    n_events: int
    n_event_types: int
    positive_fraction: float


@dataclass
class Dataset:
    """Prepared sequences plus their registry and provenance."""

    sequences: list[EventSequence]
    registry: EventTypeRegistry
    prep: PrepConfig | None
    summary: DatasetSummary = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.summary is None:
            self.summary = summarize(self.sequences, self.registry)

    @property
    def n_positive(self) -> int:
        return sum(1 for s in self.sequences if s.label)

    @property
    def n_future_positive(self) -> int:
        return sum(1 for s in self.sequences if s.future_label)

    def label_counts(self) -> tuple[int, int]:
        """(positive, negative) counts over sequences."""
        pos = self.n_positive
        return pos, len(self.sequences) - pos


def summarize(sequences: list[EventSequence], registry: EventTypeRegistry) -> DatasetSummary:
    n = len(sequences)
    pos = sum(1 for s in sequences if s.label)
    return DatasetSummary(
        n_sequences=n,
        n_events=sum(len(s.events) for s in sequences),
        n_event_types=len(registry),
        positive_fraction=pos / n if n else 0.0,
    )


def build_dataset(
    events: list[EventRecord],
    outcomes: list[OutcomeRecord],
    prep: PrepConfig,
    *,
    strict_outcomes: bool = False,
) -> Dataset:
    """Assemble a prepared Dataset from raw records.

    Per sequence: events at or after the cutoff are discarded; sequences
    with an in-window outcome are labeled and trimmed to the pre-outcome
    window [outcome - pre_outcome_days, outcome); the rest keep their
    trailing history window [cutoff - history_years, cutoff) and are
    future-labeled when the outcome falls in [cutoff, eval_end).
    Sequences left without events are dropped. Output order is ascending
    sequence_id, and the whole build is deterministic in its inputs.

    Duplicate outcomes for the same (sequence, type) keep the earliest
    timestamp. Events sharing a timestamp keep input order.
    """
    if not events:
        raise EmptyDataset("no event records")

    first_outcome: dict[str, int] = {}
    outcome_type_seen = False
    for rec in outcomes:
        if rec.outcome_type != prep.outcome_type:
            continue
        outcome_type_seen = True
        prev = first_outcome.get(rec.sequence_id)
        if prev is None or rec.timestamp < prev:
            first_outcome[rec.sequence_id] = rec.timestamp
    if not outcome_type_seen:
        msg = f"outcome type {prep.outcome_type!r} appears in no outcome record"
        if strict_outcomes:
            raise UnknownOutcomeType(msg)
        warnings.warn(msg, stacklevel=2)

    by_sequence: dict[str, list[EventRecord]] = {}
    for rec in events:
        by_sequence.setdefault(rec.sequence_id, []).append(rec)

    registry = EventTypeRegistry()
    sequences: list[EventSequence] = []
    for sid in sorted(by_sequence):
        out_ts = first_outcome.get(sid)
        if out_ts is not None and out_ts < prep.cutoff:
            lo = out_ts - prep.pre_outcome_seconds
            hi = out_ts
            label, future = True, False
            outcome_ts: int | None = out_ts
        else:
            lo = prep.cutoff - prep.history_seconds
            hi = prep.cutoff
            label = False
            future = out_ts is not None and prep.cutoff <= out_ts < prep.eval_end
            outcome_ts = out_ts if future else None

        kept = [r for r in by_sequence[sid] if lo <= r.timestamp < hi]
        if not kept:
            continue
        kept.sort(key=lambda r: r.timestamp)  # stable: input order breaks ties
        pairs = [(registry.intern(r.event_type), r.timestamp) for r in kept]
        sequences.append(
            EventSequence(
                sequence_id=sid,
                events=pairs,
                label=label,
                future_label=future,
                outcome_timestamp=outcome_ts,
            )
        )

    if not sequences:
        raise EmptyDataset("no sequence survived preparation")

    _tally_registry(registry, sequences)
    return Dataset(sequences=sequences, registry=registry, prep=prep)


def _tally_registry(registry: EventTypeRegistry, sequences: list[EventSequence]) -> None:
    for seq in sequences:
        seen: set[int] = set()
        for type_id, _ in seq.events:
            registry.occurrence_counts[type_id] += 1
            seen.add(type_id)
        for type_id in seen:
            registry.sequence_counts[type_id] += 1


def verify_dataset(dataset: Dataset) -> list[str]:
    """Check all structural invariants; return human-readable violations."""
    violations: list[str] = []
    n_types = len(dataset.registry)
    for seq in dataset.sequences:
        if not seq.events:
            violations.append(f"sequence {seq.sequence_id}: empty events")
            continue
        prev_ts = None
        for i, (type_id, ts) in enumerate(seq.events):
            if not 0 <= type_id < n_types:
                violations.append(
                    f"sequence {seq.sequence_id}: unknown event type id {type_id}"
                )
            if prev_ts is not None and ts < prev_ts:
                violations.append(
                    f"sequence {seq.sequence_id}: non-monotone timestamps at index {i}"
                )
                break
            prev_ts = ts
        if seq.label and seq.future_label:
            violations.append(
                f"sequence {seq.sequence_id}: label and future_label both set"
            )

    actual = summarize(dataset.sequences, dataset.registry)
    if actual != dataset.summary:
        violations.append(f"summary mismatch: stored {dataset.summary}, actual {actual}")

    occ = [0] * n_types
    seqc = [0] * n_types
    for seq in dataset.sequences:
        seen: set[int] = set()
        for type_id, _ in seq.events:
            if 0 <= type_id < n_types:
                occ[type_id] += 1
                seen.add(type_id)
        for type_id in seen:
            seqc[type_id] += 1
    if occ != dataset.registry.occurrence_counts or seqc != dataset.registry.sequence_counts:
        violations.append("registry count mismatch")

    return violations
