"""File I/O: raw record readers, synthetic corpora, and result persistence.

Raw inputs are CSV (or JSON lines) with one event or outcome per row.
Results of any stage serialize to a versioned JSON envelope
{"schema_version": 1, "kind": ..., "payload": ...} written with sorted
keys, so identical objects produce byte-identical files.
"""

from __future__ import annotations

import json
import re
import warnings
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterable

import csv

import numpy as np

from .aggregate import EventTree, TreeNode
from .composite import CompositeDescriptor, CompositeModel, Slice
from .errors import BadTimestamp, MissingColumn, ParseError, SchemaVersionMismatch
from .metrics import QualityReport, SubgroupReport
from .model import (
    DAY,
    Dataset,
    DatasetSummary,
    EventRecord,
    EventSequence,
    EventTypeRegistry,
    OutcomeRecord,
    PrepConfig,
)

SCHEMA_VERSION = 1

EVENT_COLUMNS = ("sequence_id", "event_type", "timestamp")
OUTCOME_COLUMNS = ("sequence_id", "outcome_type", "timestamp")

_INT_RE = re.compile(r"^[+-]?\d+$")

# Per-node, per-class cap on serialized raw timestamps; nodes above it
# store a deterministic sample plus the original totals.
TIMESTAMP_CAP = 10_000


def parse_timestamp(raw: str | int) -> int:
    """Epoch seconds from an integer string or ISO-8601 timestamp.

    A trailing 'Z' is treated as UTC, as is any timestamp without an
    explicit offset. Date-only forms resolve to midnight UTC.
    """
    if isinstance(raw, int):
        return raw
    text = str(raw).strip()
    if _INT_RE.match(text):
        return int(text)
    iso = text
    if iso.endswith(("Z", "z")):
        iso = iso[:-1] + "+00:00"
    try:
        dt = datetime.fromisoformat(iso)
    except ValueError as exc:
        raise BadTimestamp(f"bad timestamp {text!r}") from exc
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return int(dt.timestamp())


def _detect_format(path: Path, fmt: str | None) -> str:
    if fmt is not None:
        if fmt not in ("csv", "jsonl"):
            raise ValueError(f"unknown format {fmt!r}")
        return fmt
    return "jsonl" if path.suffix.lower() in (".jsonl", ".ndjson") else "csv"


def _read_rows(path: Path, fmt: str, required: tuple[str, ...]):
    """Yield (line_number, row_dict); validates headers and presence."""
    if fmt == "jsonl":
        with path.open() as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    row = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ParseError(f"invalid JSON: {exc.msg}", lineno) from exc
                if not isinstance(row, dict):
                    raise ParseError("row is not an object", lineno)
                for col in required:
                    if row.get(col) in (None, ""):
                        raise ParseError(f"missing value for {col!r}", lineno)
                yield lineno, row
        return

    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            return
        fields = [f.strip() for f in reader.fieldnames]
        missing = [c for c in required if c not in fields]
        if missing:
            raise MissingColumn(f"missing required column(s): {', '.join(missing)}")
        known = set(required) | {"attribute"}
        extra = [f for f in fields if f not in known]
        if extra:
            warnings.warn(
                f"{path.name}: ignoring unrecognized column(s) {', '.join(extra)}",
                stacklevel=3,
            )
        for lineno, raw in enumerate(reader, start=2):
            row = {k.strip(): v for k, v in raw.items() if isinstance(k, str)}
            for col in required:
                if row.get(col) in (None, ""):
                    raise ParseError(f"missing value for {col!r}", lineno)
            yield lineno, row


def read_events(path: str | Path, fmt: str | None = None) -> list[EventRecord]:
    """Load event records from CSV or JSON lines.

    CSV needs a `sequence_id,event_type,timestamp[,attribute]` header.
    Timestamps may be epoch seconds or ISO-8601. Raises ParseError /
    BadTimestamp with the offending line number.
    """
    path = Path(path)
    fmt = _detect_format(path, fmt)
    records: list[EventRecord] = []
    for lineno, row in _read_rows(path, fmt, EVENT_COLUMNS):
        try:
            ts = parse_timestamp(row["timestamp"])
        except BadTimestamp as exc:
            raise BadTimestamp(str(exc), lineno) from exc
        attribute = row.get("attribute")
        if attribute in ("", None):
            attribute = None
        records.append(
            EventRecord(
                sequence_id=str(row["sequence_id"]),
                event_type=str(row["event_type"]),
                timestamp=ts,
                attribute=attribute,
            )
        )
    return records


def read_outcomes(path: str | Path, fmt: str | None = None) -> list[OutcomeRecord]:
    """Load outcome records (`sequence_id,outcome_type,timestamp`)."""
    path = Path(path)
    fmt = _detect_format(path, fmt)
    records: list[OutcomeRecord] = []
    for lineno, row in _read_rows(path, fmt, OUTCOME_COLUMNS):
        try:
            ts = parse_timestamp(row["timestamp"])
        except BadTimestamp as exc:
            raise BadTimestamp(str(exc), lineno) from exc
        records.append(
            OutcomeRecord(
                sequence_id=str(row["sequence_id"]),
                outcome_type=str(row["outcome_type"]),
                timestamp=ts,
            )
        )
    return records


def write_events_csv(records: Iterable[EventRecord], path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("sequence_id", "event_type", "timestamp", "attribute"))
        for rec in records:
            writer.writerow(
                (rec.sequence_id, rec.event_type, rec.timestamp, rec.attribute or "")
            )


def write_outcomes_csv(records: Iterable[OutcomeRecord], path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("sequence_id", "outcome_type", "timestamp"))
        for rec in records:
            writer.writerow((rec.sequence_id, rec.outcome_type, rec.timestamp))


# ---------------------------------------------------------------------------
# Synthetic corpora


@dataclass(frozen=True)
class SynthSpec:
    """Parameters for a generated corpus with a planted event pattern.

    A `planted_fraction` share of sequences receives the pattern with
    1-7 day gaps between consecutive pattern events; each planted
    sequence then gets an outcome 1-30 days after the pattern's end with
    probability `p_pos`. Every sequence also gets Poisson(`noise_rate`)
    background events drawn only from the non-pattern alphabet, so the
    pattern stays exclusive to planted sequences. Non-planted sequences
    that would end up empty get a single background event instead.
    """

    n_sequences: int
    n_event_types: int
    planted_pattern: tuple[str, ...]
    planted_fraction: float = 0.5
    p_pos: float = 1.0
    noise_rate: float = 2.0
    time_span: tuple[int, int] = (1262304000, 1293840000)  # one year, 2010
    seed: int = 0
    outcome_type: str = "outcome"

    def __post_init__(self) -> None:
        object.__setattr__(self, "planted_pattern", tuple(self.planted_pattern))
        object.__setattr__(self, "time_span", tuple(self.time_span))
        if self.n_sequences < 1:
            raise ValueError("n_sequences must be >= 1")
        names = set(self.alphabet())
        unknown = [p for p in self.planted_pattern if p not in names]
        if unknown:
            raise ValueError(f"pattern names outside the alphabet: {unknown}")
        if self.n_event_types <= len(set(self.planted_pattern)):
            raise ValueError("need at least one non-pattern event type")
        if not 0.0 <= self.planted_fraction <= 1.0:
            raise ValueError("planted_fraction must be in [0, 1]")
        if not 0.0 <= self.p_pos <= 1.0:
            raise ValueError("p_pos must be in [0, 1]")
        if self.noise_rate < 0.0:
            raise ValueError("noise_rate must be >= 0")
        start, end = self.time_span
        room = 7 * DAY * max(len(self.planted_pattern) - 1, 0) + 1
        if end - start <= room:
            raise ValueError("time_span too narrow for the planted pattern")

    def alphabet(self) -> list[str]:
        return [f"et{i:02d}" for i in range(self.n_event_types)]

    @classmethod
    def from_dict(cls, data: dict) -> "SynthSpec":
        data = dict(data)
        if "time_span" in data:
            data["time_span"] = tuple(parse_timestamp(t) for t in data["time_span"])
        if "planted_pattern" in data:
            data["planted_pattern"] = tuple(data["planted_pattern"])
        return cls(**data)


def generate_synthetic(spec: SynthSpec) -> tuple[list[EventRecord], list[OutcomeRecord]]:
    """Deterministic corpus for `spec` (same seed, same bytes)."""
    rng = np.random.default_rng(spec.seed)
    alphabet = spec.alphabet()
    pattern_ids = [alphabet.index(name) for name in spec.planted_pattern]
    noise_pool = [i for i in range(spec.n_event_types) if i not in set(pattern_ids)]
    start, end = spec.time_span
    room = 7 * DAY * max(len(pattern_ids) - 1, 0) + 1

    n_planted = int(spec.planted_fraction * spec.n_sequences)
    planted: set[int] = set()
    if n_planted:
        planted = set(
            rng.choice(spec.n_sequences, size=n_planted, replace=False).tolist()
        )

    width = max(4, len(str(spec.n_sequences - 1)))
    events: list[EventRecord] = []
    outcomes: list[OutcomeRecord] = []
    for i in range(spec.n_sequences):
        sid = f"s{i:0{width}d}"
        rows: list[tuple[int, int]] = []
        for _ in range(int(rng.poisson(spec.noise_rate))):
            ts = int(rng.integers(start, end))
            rows.append((ts, noise_pool[int(rng.integers(len(noise_pool)))]))
        if i in planted:
            ts = int(rng.integers(start, end - room))
            for j, pid in enumerate(pattern_ids):
                if j:
                    ts += int(rng.integers(DAY, 7 * DAY + 1))
                rows.append((ts, pid))
            if rng.random() < spec.p_pos:
                out_ts = ts + int(rng.integers(DAY, 30 * DAY + 1))
                outcomes.append(OutcomeRecord(sid, spec.outcome_type, out_ts))
        elif not rows:
            ts = int(rng.integers(start, end))
            rows.append((ts, noise_pool[int(rng.integers(len(noise_pool)))]))
        rows.sort(key=lambda r: r[0])
        events.extend(EventRecord(sid, alphabet[e], ts) for ts, e in rows)
    return events, outcomes


# ---------------------------------------------------------------------------
# Result persistence


def _encode_dataset(ds: Dataset) -> dict:
    prep = None
    if ds.prep is not None:
        prep = {
            "outcome_type": ds.prep.outcome_type,
            "cutoff": ds.prep.cutoff,
            "eval_end": ds.prep.eval_end,
            "history_years": ds.prep.history_years,
            "pre_outcome_days": ds.prep.pre_outcome_days,
        }
    return {
        "prep": prep,
        "event_types": ds.registry.names,
        "occurrence_counts": list(ds.registry.occurrence_counts),
        "sequence_counts": list(ds.registry.sequence_counts),
        "sequences": [
            {
                "sequence_id": s.sequence_id,
                "label": s.label,
                "future_label": s.future_label,
                "outcome_timestamp": s.outcome_timestamp,
                "events": [[t, ts] for t, ts in s.events],
            }
            for s in ds.sequences
        ],
        "summary": asdict(ds.summary),
    }


def _decode_dataset(payload: dict) -> Dataset:
    registry = EventTypeRegistry()
    for name in payload["event_types"]:
        registry.intern(name)
    registry.occurrence_counts = list(payload["occurrence_counts"])
    registry.sequence_counts = list(payload["sequence_counts"])
    prep = None
    if payload.get("prep") is not None:
        prep = PrepConfig(**payload["prep"])
    sequences = [
        EventSequence(
            sequence_id=s["sequence_id"],
            events=[(int(t), int(ts)) for t, ts in s["events"]],
            label=bool(s["label"]),
            future_label=bool(s["future_label"]),
            outcome_timestamp=s["outcome_timestamp"],
        )
        for s in payload["sequences"]
    ]
    return Dataset(
        sequences=sequences,
        registry=registry,
        prep=prep,
        summary=DatasetSummary(**payload["summary"]),
    )


def _encode_descriptor(d: CompositeDescriptor) -> dict:
    return {
        "composite_id": d.composite_id,
        "slices": [
            {
                "event_type": s.event_type,
                "width_fraction": s.width_fraction,
                "height_fraction": s.height_fraction,
            }
            for s in d.slices
        ],
        "other_bucket": list(d.other_bucket),
        "segment_count": d.segment_count,
        "label_stats": list(d.label_stats),
    }


def _decode_descriptor(data: dict) -> CompositeDescriptor:
    return CompositeDescriptor(
        composite_id=data["composite_id"],
        slices=[Slice(**s) for s in data["slices"]],
        other_bucket=list(data["other_bucket"]),
        segment_count=data["segment_count"],
        label_stats=tuple(data["label_stats"]),
    )


def _encode_model(model: CompositeModel) -> dict:
    return {
        "k": model.k,
        "seed": model.seed,
        "iterations_run": model.iterations_run,
        "inertia": model.inertia,
        "inertia_trace": list(model.inertia_trace),
        "window": model.window,
        "event_filter": model.event_filter,
        "centroids": model.centroids.tolist(),
        "descriptors": None
        if model.descriptors is None
        else [_encode_descriptor(d) for d in model.descriptors],
    }


def _decode_model(payload: dict) -> CompositeModel:
    descriptors = payload.get("descriptors")
    return CompositeModel(
        k=payload["k"],
        centroids=np.asarray(payload["centroids"], dtype=np.float64),
        inertia=payload["inertia"],
        seed=payload["seed"],
        iterations_run=payload["iterations_run"],
        inertia_trace=list(payload["inertia_trace"]),
        window=payload["window"],
        event_filter=payload["event_filter"],
        descriptors=None
        if descriptors is None
        else [_decode_descriptor(d) for d in descriptors],
    )


def _sample_timestamps(values: list[int], node_id: int) -> tuple[list[int], int | None]:
    if len(values) <= TIMESTAMP_CAP:
        return list(values), None
    rng = np.random.default_rng(node_id)
    picked = rng.choice(len(values), size=TIMESTAMP_CAP, replace=False)
    return sorted(values[i] for i in picked), len(values)


def _encode_tree(tree: EventTree) -> dict:
    nodes = []
    for node in tree.nodes:
        stamps: dict[str, list[int]] = {}
        totals: dict[str, int] = {}
        for key, values in node.event_timestamps.items():
            sample, total = _sample_timestamps(values, node.node_id)
            stamps[key] = sample
            if total is not None:
                totals[key] = total
        entry = {
            "node_id": node.node_id,
            "event_type": node.event_type,
            "count": node.count,
            "positive": node.positive,
            "future_positive": node.future_positive,
            "terminated": node.terminated,
            "avg_ts_offset": node.avg_ts_offset,
            "avg_gap": node.avg_gap,
            "children": list(node.children),
            "members": list(node.members),
            "event_timestamps": stamps,
        }
        if totals:
            entry["timestamps_total"] = totals
            entry["sampling_seed"] = node.node_id
        nodes.append(entry)
    return {
        "method": tree.method,
        "total_sequences": tree.total_sequences,
        "root": tree.root,
        "params": tree.params,
        "sequence_ids": list(tree.sequence_ids),
        "labels": list(tree.labels),
        "future_labels": list(tree.future_labels),
        "nodes": nodes,
    }


def _decode_tree(payload: dict) -> EventTree:
    nodes = [
        TreeNode(
            node_id=n["node_id"],
            event_type=n["event_type"],
            count=n["count"],
            positive=n["positive"],
            future_positive=n["future_positive"],
            terminated=n["terminated"],
            avg_ts_offset=n["avg_ts_offset"],
            avg_gap=n["avg_gap"],
            event_timestamps={k: list(v) for k, v in n["event_timestamps"].items()},
            children=list(n["children"]),
            members=list(n["members"]),
        )
        for n in payload["nodes"]
    ]
    return EventTree(
        method=payload["method"],
        nodes=nodes,
        total_sequences=payload["total_sequences"],
        sequence_ids=list(payload["sequence_ids"]),
        labels=[bool(b) for b in payload["labels"]],
        future_labels=[bool(b) for b in payload["future_labels"]],
        root=payload["root"],
        params=dict(payload["params"]),
    )


_ENCODERS: list[tuple[type, str, Any]] = [
    (Dataset, "dataset", _encode_dataset),
    (CompositeModel, "composite_model", _encode_model),
    (EventTree, "event_tree", _encode_tree),
    (QualityReport, "quality_report", lambda r: asdict(r)),
    (SubgroupReport, "subgroup_report", lambda r: asdict(r)),
]

_DECODERS: dict[str, Any] = {
    "dataset": _decode_dataset,
    "composite_model": _decode_model,
    "event_tree": _decode_tree,
    "quality_report": lambda p: QualityReport(**p),
    "subgroup_report": lambda p: SubgroupReport(**p),
}


def encode_result(obj: Any, config: dict | None = None) -> dict:
    """Wrap a supported object in the versioned result envelope."""
    for cls, kind, encode in _ENCODERS:
        if isinstance(obj, cls):
            doc = {"schema_version": SCHEMA_VERSION, "kind": kind, "payload": encode(obj)}
            if config is not None:
                doc["config"] = config
            return doc
    raise TypeError(f"cannot serialize {type(obj).__name__} as a result")


def result_bytes(obj: Any, config: dict | None = None) -> bytes:
    """Canonical serialized form; identical objects yield identical bytes."""
    doc = encode_result(obj, config)
    return (json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n").encode()


def save_result(obj: Any, path: str | Path, config: dict | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(result_bytes(obj, config))
    return path


def decode_result(doc: Any) -> Any:
    if not isinstance(doc, dict):
        raise SchemaVersionMismatch("result document is not an object")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaVersionMismatch(f"unsupported schema_version {version!r}")
    kind = doc.get("kind")
    decoder = _DECODERS.get(kind)
    if decoder is None:
        raise SchemaVersionMismatch(f"unknown result kind {kind!r}")
    return decoder(doc["payload"])


def load_result(path: str | Path) -> Any:
    """Inverse of save_result; dispatches on the envelope's kind."""
    return decode_result(json.loads(Path(path).read_text()))
