"""Sequence aggregation into trees.

Two shapes come out of here: a full prefix trie where every distinct
event-type string gets its own branch, and rank-divide-trim paths where
each level picks one milestone event, splits the population on it, and
trims containing sequences past the milestone. Sequences that miss the
milestone stop at the current node, so rank-divide-trim trees are
single paths from root to final milestone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from .errors import EmptyDataset, ZeroCount
from .model import Dataset


@dataclass
class TreeNode:
    node_id: int
    event_type: int | None  # None marks the root
    count: int = 0
    positive: int = 0
    future_positive: int = 0
    terminated: int = 0
    avg_ts_offset: float = 0.0
    avg_gap: float = 0.0
    event_timestamps: dict[str, list[int]] = field(
        default_factory=lambda: {"negative": [], "positive": []}
    )
    children: list[int] = field(default_factory=list)
    members: list[int] = field(default_factory=list)


@dataclass
class EventTree:
    """Aggregation result plus the per-sequence tables needed downstream.

    `sequence_ids`, `labels` and `future_labels` are parallel arrays
    indexed by the member ids stored on nodes.
    """

    method: str
    nodes: list[TreeNode]
    total_sequences: int
    sequence_ids: list[str]
    labels: list[bool]
    future_labels: list[bool]
    root: int = 0
    params: dict = field(default_factory=dict)

    def node(self, node_id: int) -> TreeNode:
        return self.nodes[node_id]

    def walk(self) -> list[int]:
        """Node ids in depth-first preorder from the root."""
        order: list[int] = []
        stack = [self.root]
        while stack:
            nid = stack.pop()
            order.append(nid)
            stack.extend(reversed(self.nodes[nid].children))
        return order


def _seq_tables(dataset: Dataset) -> tuple[list[str], list[bool], list[bool]]:
    ids = [s.sequence_id for s in dataset.sequences]
    labels = [s.label for s in dataset.sequences]
    future = [s.future_label for s in dataset.sequences]
    return ids, labels, future


class _Stats:
    """Running mean accumulators for one node's event occurrences."""

    __slots__ = ("n", "offset_sum", "gap_sum")

    def __init__(self) -> None:
        self.n = 0
        self.offset_sum = 0
        self.gap_sum = 0

    def add(self, offset: int, gap: int) -> None:
        self.n += 1
        self.offset_sum += offset
        self.gap_sum += gap

    def means(self) -> tuple[float, float]:
        if self.n == 0:
            return 0.0, 0.0
        return self.offset_sum / self.n, self.gap_sum / self.n


def build_sa(dataset: Dataset, params: dict | None = None) -> EventTree:
    """Aggregate all sequences into a prefix trie.

    The root covers every sequence; a child exists for each event type
    that follows the parent's prefix in at least one sequence. Children
    are ordered by descending count, then event id. A sequence whose
    events run out at a node bumps that node's `terminated`.
    """
    if not dataset.sequences:
        raise EmptyDataset("no sequences to aggregate")
    ids, labels, future = _seq_tables(dataset)

    nodes: list[TreeNode] = [TreeNode(node_id=0, event_type=None)]
    stats: dict[int, _Stats] = {}
    child_index: list[dict[int, int]] = [{}]

    for si, seq in enumerate(dataset.sequences):
        root = nodes[0]
        root.count += 1
        root.positive += seq.label
        root.future_positive += seq.future_label
        root.members.append(si)
        if not seq.events:
            root.terminated += 1
            continue
        t0 = seq.events[0][1]
        prev_ts = t0
        cursor = 0
        for type_id, ts in seq.events:
            nid = child_index[cursor].get(type_id)
            if nid is None:
                nid = len(nodes)
                nodes.append(TreeNode(node_id=nid, event_type=type_id))
                child_index.append({})
                child_index[cursor][type_id] = nid
                nodes[cursor].children.append(nid)
                stats[nid] = _Stats()
            node = nodes[nid]
            node.count += 1
            node.positive += seq.label
            node.future_positive += seq.future_label
            node.members.append(si)
            key = "positive" if seq.label else "negative"
            node.event_timestamps[key].append(ts)
            stats[nid].add(ts - t0, ts - prev_ts)
            prev_ts = ts
            cursor = nid
        nodes[cursor].terminated += 1

    for nid, st in stats.items():
        nodes[nid].avg_ts_offset, nodes[nid].avg_gap = st.means()
    for node in nodes:
        node.children.sort(key=lambda c: (-nodes[c].count, nodes[c].event_type))

    return EventTree(
        method="sa",
        nodes=nodes,
        total_sequences=len(dataset.sequences),
        sequence_ids=ids,
        labels=labels,
        future_labels=future,
        params=dict(params or {}),
    )


def _containment(
    sequences: list[list[int]], scope: list[int], cursors: dict[int, int]
) -> dict[int, tuple[int, list[int]]]:
    """Per event type: how many scoped sequences contain it past their
    cursor, and at which first index."""
    found: dict[int, tuple[int, list[int]]] = {}
    for si in scope:
        seen: set[int] = set()
        seq = sequences[si]
        for pos in range(cursors[si], len(seq)):
            t = seq[pos]
            if t in seen:
                continue
            seen.add(t)
            n, idxs = found.get(t, (0, []))
            idxs.append(pos - cursors[si])
            found[t] = (n + 1, idxs)
    return found


def rank_frequency(
    sequences: list[list[int]], scope: list[int], cursors: dict[int, int], labels=None
) -> list[tuple[int, int]]:
    """Event types ordered by how many scoped sequences contain them.

    Ties break on lower average first-occurrence index (relative to the
    cursor), then lower event id. Returns (event_type, n_containing).
    """
    found = _containment(sequences, scope, cursors)
    ranked = sorted(
        found.items(),
        key=lambda kv: (-kv[1][0], sum(kv[1][1]) / len(kv[1][1]), kv[0]),
    )
    return [(t, n) for t, (n, _) in ranked]


def rank_ig(
    sequences: list[list[int]],
    scope: list[int],
    cursors: dict[int, int],
    labels: list[bool],
) -> list[tuple[int, int]]:
    """Event types ordered by information gain of the contains/omits split.

    Gain is computed against the scope's own label distribution. Ties
    break on lower average first-occurrence index, then lower event id.
    """
    from .metrics import entropy

    found = _containment(sequences, scope, cursors)
    total = len(scope)
    pos_total = sum(labels[si] for si in scope)
    base = entropy((pos_total, total - pos_total))

    rows = []
    for t, (n, idxs) in found.items():
        pos_in = sum(labels[si] for si in scope if _contains(sequences[si], cursors[si], t))
        pos_out = pos_total - pos_in
        n_out = total - n
        split = (n / total) * entropy((pos_in, n - pos_in))
        if n_out:
            split += (n_out / total) * entropy((pos_out, n_out - pos_out))
        gain = max(base - split, 0.0)
        rows.append((t, n, gain, sum(idxs) / len(idxs)))

    rows.sort(key=lambda r: (-r[2], r[3], r[0]))
    return [(t, n) for t, n, _, _ in rows]


def _contains(seq: list[int], cursor: int, t: int) -> bool:
    for pos in range(cursor, len(seq)):
        if seq[pos] == t:
            return True
    return False


_RANKERS: dict[str, Callable] = {"frequency": rank_frequency, "ig": rank_ig}
_METHOD_BY_RANKER = {"frequency": "mcp", "ig": "msp"}


def build_rdt(
    dataset: Dataset,
    ranker: str = "frequency",
    min_support_fraction: float = 0.01,
    params: dict | None = None,
) -> EventTree:
    """Rank-divide-trim aggregation.

    Level by level: rank remaining event types over the in-scope
    sequences, take the top one as the milestone, extend the path with a
    milestone node holding the containing sequences, and terminate the
    rest at the current node. Containing sequences are trimmed past
    their first milestone occurrence. Recursion stops when the scope
    shrinks below ceil(min_support_fraction * total) sequences or no
    events remain, the scope then terminating at the node it reached.
    """
    if not dataset.sequences:
        raise EmptyDataset("no sequences to aggregate")
    if ranker not in _RANKERS:
        raise ValueError(f"unknown ranker {ranker!r}")
    if not 0.0 <= min_support_fraction < 1.0:
        raise ValueError("min_support_fraction must be in [0, 1)")
    rank = _RANKERS[ranker]
    ids, labels, future = _seq_tables(dataset)

    sequences = [[t for t, _ in seq.events] for seq in dataset.sequences]
    timestamps = [[ts for _, ts in seq.events] for seq in dataset.sequences]
    starts = [seq.events[0][1] if seq.events else 0 for seq in dataset.sequences]

    total = len(sequences)
    threshold = max(1, math.ceil(min_support_fraction * total))

    root = TreeNode(node_id=0, event_type=None)
    nodes = [root]
    scope = list(range(total))
    cursors = {si: 0 for si in scope}
    prev_ts = {si: starts[si] for si in scope}
    current = root

    for si in scope:
        root.count += 1
        root.positive += labels[si]
        root.future_positive += future[si]
        root.members.append(si)

    while scope:
        if len(scope) < threshold:
            current.terminated += len(scope)
            break
        ranked = rank(sequences, scope, cursors, labels)
        if not ranked:
            current.terminated += len(scope)
            break
        milestone, _ = ranked[0]

        child = TreeNode(node_id=len(nodes), event_type=milestone)
        nodes.append(child)
        current.children.append(child.node_id)
        st = _Stats()

        next_scope: list[int] = []
        for si in scope:
            seq = sequences[si]
            hit = -1
            for pos in range(cursors[si], len(seq)):
                if seq[pos] == milestone:
                    hit = pos
                    break
            if hit < 0:
                current.terminated += 1
                continue
            ts = timestamps[si][hit]
            child.count += 1
            child.positive += labels[si]
            child.future_positive += future[si]
            child.members.append(si)
            child.event_timestamps["positive" if labels[si] else "negative"].append(ts)
            st.add(ts - starts[si], ts - prev_ts[si])
            cursors[si] = hit + 1
            prev_ts[si] = ts
            next_scope.append(si)

        child.avg_ts_offset, child.avg_gap = st.means()
        scope = next_scope
        current = child

    return EventTree(
        method=_METHOD_BY_RANKER[ranker],
        nodes=nodes,
        total_sequences=total,
        sequence_ids=ids,
        labels=labels,
        future_labels=future,
        params=dict(params or {}),
    )


def transition_shade(node: TreeNode) -> float:
    """Positive fraction at a node, the grayscale intensity for display."""
    if node.count == 0:
        raise ZeroCount(f"node {node.node_id} has zero count")
    return node.positive / node.count
