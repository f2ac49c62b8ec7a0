"""Quality measures over label distributions and aggregated trees."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable, Sequence

from .errors import EmptySample, PartitionMismatch

if TYPE_CHECKING:
    from .aggregate import EventTree


def entropy(counts: Sequence[int]) -> float:
    """Shannon entropy (base 2) of a class-count vector."""
    total = sum(counts)
    if total <= 0:
        raise EmptySample("entropy of an empty sample")
    h = 0.0
    for c in counts:
        if c > 0:
            p = c / total
            h -= p * math.log2(p)
    return h


def information_gain(
    parent_counts: Sequence[int], partition: Iterable[Sequence[int]]
) -> float:
    """Entropy drop from splitting `parent_counts` into `partition`.

    The partition's per-class sums must reproduce the parent exactly.
    Clamped at zero to absorb float noise.
    """
    parts = [list(p) for p in partition]
    sums = [sum(col) for col in zip(*parts)] if parts else []
    if sums != list(parent_counts):
        raise PartitionMismatch(
            f"partition sums {sums} != parent counts {list(parent_counts)}"
        )
    total = sum(parent_counts)
    base = entropy(parent_counts)
    split = 0.0
    for p in parts:
        n = sum(p)
        if n:
            split += (n / total) * entropy(p)
    return max(base - split, 0.0)


def _frontier_partition(tree: "EventTree", threshold: int) -> list[tuple[int, int]]:
    """(positive, negative) blocks induced by the support-qualified frontier.

    Children with count >= threshold are expanded; everything that stops
    short of a qualified child (early terminators plus members of
    unqualified children) pools at the current node.
    """
    parts: list[tuple[int, int]] = []
    stack = [tree.root]
    while stack:
        nid = stack.pop()
        node = tree.node(nid)
        qualified = [c for c in node.children if tree.node(c).count >= threshold]
        stack.extend(qualified)
        pooled_n = node.count - sum(tree.node(c).count for c in qualified)
        pooled_p = node.positive - sum(tree.node(c).positive for c in qualified)
        if pooled_n > 0:
            parts.append((pooled_p, pooled_n - pooled_p))
    return parts


def tree_ig(tree: "EventTree", min_support_fraction: float = 0.01) -> float:
    """Information gain of the partition a tree induces at a support level.

    Nodes below ceil(min_support_fraction * total) support are pooled
    into their nearest qualified ancestor's block.
    """
    threshold = max(1, math.ceil(min_support_fraction * tree.total_sequences))
    root = tree.node(tree.root)
    parent = (root.positive, root.count - root.positive)
    parts = _frontier_partition(tree, threshold)
    return information_gain(parent, parts)


def visual_complexity(
    tree: "EventTree", min_support_fraction: float = 0.01
) -> tuple[float, int]:
    """(average element height as % of total, element count) at a support level.

    Elements are non-root nodes meeting the support threshold; height is
    the node's share of all sequences. An empty display scores (0.0, 0).
    """
    threshold = max(1, math.ceil(min_support_fraction * tree.total_sequences))
    heights = [
        100.0 * node.count / tree.total_sequences
        for node in tree.nodes
        if node.node_id != tree.root and node.count >= threshold
    ]
    if not heights:
        return 0.0, 0
    return sum(heights) / len(heights), len(heights)


@dataclass
class QualityReport:
    method: str
    min_support_fraction: float
    information_gain: float
    avg_height_pct: float
    n_elements: int
    base_entropy: float


@dataclass
class SubgroupReport:
    """Union of high-risk tree nodes and how that cohort fares."""

    method: str
    threshold_fraction: float
    min_support_fraction: float
    n_sequences: int
    outcome_pct: float
    future_precision_pct: float
    members: list[int] = field(default_factory=list)


def quality_report(tree: "EventTree", min_support_fraction: float = 0.01) -> QualityReport:
    gain = tree_ig(tree, min_support_fraction)
    avg_height, n_elements = visual_complexity(tree, min_support_fraction)
    root = tree.node(tree.root)
    return QualityReport(
        method=tree.method,
        min_support_fraction=min_support_fraction,
        information_gain=gain,
        avg_height_pct=avg_height,
        n_elements=n_elements,
        base_entropy=entropy((root.positive, root.count - root.positive)),
    )


def extract_subgroups(
    tree: "EventTree",
    threshold_fraction: float = 0.30,
    min_support_fraction: float = 0.01,
) -> SubgroupReport:
    """Pool every node whose positive rate clears the threshold.

    A node qualifies when its support meets the minimum and its positive
    fraction is at least `threshold_fraction`; the root may qualify too.
    The report covers the union of qualifying nodes' members. Future
    precision is the future-positive share of the cohort's unlabeled
    sequences.
    """
    support = max(1, math.ceil(min_support_fraction * tree.total_sequences))
    picked: set[int] = set()
    for node in tree.nodes:
        if node.count >= support and node.positive / node.count >= threshold_fraction:
            picked.update(node.members)

    members = sorted(picked)
    n = len(members)
    if n == 0:
        return SubgroupReport(
            method=tree.method,
            threshold_fraction=threshold_fraction,
            min_support_fraction=min_support_fraction,
            n_sequences=0,
            outcome_pct=0.0,
            future_precision_pct=0.0,
        )

    positives = sum(tree.labels[si] for si in members)
    unlabeled = [si for si in members if not tree.labels[si]]
    future_hits = sum(tree.future_labels[si] for si in unlabeled)
    future_pct = 100.0 * future_hits / len(unlabeled) if unlabeled else 0.0
    return SubgroupReport(
        method=tree.method,
        threshold_fraction=threshold_fraction,
        min_support_fraction=min_support_fraction,
        n_sequences=n,
        outcome_pct=100.0 * positives / n,
        future_precision_pct=future_pct,
        members=members,
    )
