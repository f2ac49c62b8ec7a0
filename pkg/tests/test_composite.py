"""Segmentation, k-means, sequence rewriting, and composite descriptors."""

import itertools

import numpy as np
import pytest

from eventflow import (
    CompositeModel,
    Dataset,
    DimensionMismatch,
    EmptyFilter,
    EventSequence,
    EventTypeRegistry,
    KTooLarge,
    NoSegments,
    assign,
    assign_many,
    describe,
    kmeans,
    rewrite,
    segment,
)
from eventflow.composite import Segment

W = 100  # a small window keeps the arithmetic readable


def dataset_from(seq_events, labels=None):
    """seq_events: list of lists of (type_name, ts)."""
    registry = EventTypeRegistry()
    sequences = []
    for i, events in enumerate(seq_events):
        pairs = [(registry.intern(name), ts) for name, ts in events]
        label = bool(labels[i]) if labels else False
        sequences.append(EventSequence(f"s{i:02d}", pairs, label=label))
    for seq in sequences:
        seen = set()
        for t, _ in seq.events:
            registry.occurrence_counts[t] += 1
            seen.add(t)
        for t in seen:
            registry.sequence_counts[t] += 1
    return Dataset(sequences=sequences, registry=registry, prep=None)


class TestSegment:
    def test_windows_anchor_at_first_event(self):
        ds = dataset_from([[("a", 50), ("b", 149), ("a", 150), ("c", 430)]])
        segs = segment(ds, W)
        assert [(s.window_index, s.start_ts) for s in segs] == [
            (0, 50),
            (1, 150),
            (3, 350),
        ]
        a = ds.registry.id_of("a")
        b = ds.registry.id_of("b")
        c = ds.registry.id_of("c")
        assert segs[0].counts[a] == 1 and segs[0].counts[b] == 1
        assert segs[1].counts[a] == 1
        assert segs[2].counts[c] == 1

    def test_empty_windows_are_omitted(self):
        ds = dataset_from([[("a", 0), ("a", 930)]])
        segs = segment(ds, W)
        assert [s.window_index for s in segs] == [0, 9]

    def test_first_event_ts_is_earliest_filtered_in_window(self):
        ds = dataset_from([[("a", 0), ("b", 10), ("b", 90)]])
        (seg,) = segment(ds, W, [ds.registry.id_of("b")])
        assert seg.first_event_ts == 10
        assert seg.window_index == 0  # anchored at the unfiltered first event

    def test_anchor_ignores_filter(self):
        # first event "a" at t=0 anchors windows even though only "b" counts
        ds = dataset_from([[("a", 0), ("b", 150)]])
        (seg,) = segment(ds, W, [ds.registry.id_of("b")])
        assert seg.window_index == 1
        assert seg.counts.sum() == 1

    def test_output_ordered_by_sequence_then_window(self):
        ds = dataset_from(
            [[("a", 0), ("a", 250)], [("a", 5)], [("a", 1), ("a", 110)]]
        )
        segs = segment(ds, W)
        assert [(s.sequence_id, s.window_index) for s in segs] == [
            ("s00", 0),
            ("s00", 2),
            ("s01", 0),
            ("s02", 0),
            ("s02", 1),
        ]

    def test_counts_dimension_matches_filter(self):
        ds = dataset_from([[("a", 0), ("b", 10), ("c", 20)]])
        ids = [ds.registry.id_of("a"), ds.registry.id_of("c")]
        (seg,) = segment(ds, W, ids)
        assert seg.counts.tolist() == [1, 1]

    def test_empty_filter_rejected(self):
        ds = dataset_from([[("a", 0)]])
        with pytest.raises(EmptyFilter):
            segment(ds, W, [])

    def test_filter_excluding_everything_raises(self):
        ds = dataset_from([[("a", 0)], [("a", 5)], [("b", 9)]])
        with pytest.raises(NoSegments):
            segment(ds, W, [ds.registry.id_of("c")] if "c" in ds.registry else [2])

    def test_nonpositive_window_rejected(self):
        ds = dataset_from([[("a", 0)]])
        with pytest.raises(ValueError):
            segment(ds, 0)


def seg(counts, sid="s", idx=0):
    arr = np.asarray(counts, dtype=np.int64)
    return Segment(sid, idx, 0, arr, 0)


FOUR_POINTS = [seg([0, 0]), seg([0, 1]), seg([10, 10]), seg([10, 11])]


def brute_force_best_inertia(points, k):
    """Minimum within-cluster sum of squares over all assignments."""
    x = np.stack([p.counts for p in points]).astype(float)
    best = np.inf
    for labels in itertools.product(range(k), repeat=len(points)):
        total = 0.0
        for c in range(k):
            members = x[[i for i, l in enumerate(labels) if l == c]]
            if len(members):
                total += ((members - members.mean(axis=0)) ** 2).sum()
        best = min(best, total)
    return best


class TestKmeans:
    def test_four_point_fixture_matches_brute_force(self):
        model = kmeans(FOUR_POINTS, 2, seed=0)
        assert model.inertia == pytest.approx(brute_force_best_inertia(FOUR_POINTS, 2))
        assert model.inertia == pytest.approx(1.0)

    def test_k_above_distinct_vectors_rejected(self):
        points = [seg([1, 1]), seg([1, 1]), seg([2, 2])]
        with pytest.raises(KTooLarge):
            kmeans(points, 3, seed=0)

    def test_k_must_be_positive(self):
        with pytest.raises(ValueError):
            kmeans(FOUR_POINTS, 0, seed=0)

    def test_deterministic_under_seed(self):
        runs = [kmeans(FOUR_POINTS, 2, seed=123) for _ in range(3)]
        for other in runs[1:]:
            assert np.array_equal(runs[0].centroids, other.centroids)
            assert runs[0].inertia_trace == other.inertia_trace

    def test_trace_non_increasing(self):
        rng = np.random.default_rng(0)
        points = [seg(rng.integers(0, 6, size=3)) for _ in range(40)]
        for s in range(25):
            model = kmeans(points, 4, seed=s)
            trace = model.inertia_trace
            assert all(a >= b - 1e-9 for a, b in zip(trace, trace[1:]))
            assert model.inertia == trace[-1]

    def test_final_inertia_consistent_with_centroids(self):
        rng = np.random.default_rng(1)
        points = [seg(rng.integers(0, 5, size=4)) for _ in range(30)]
        model = kmeans(points, 3, seed=7)
        x = np.stack([p.counts for p in points]).astype(float)
        d2 = ((x[:, None, :] - model.centroids[None, :, :]) ** 2).sum(axis=2)
        assert model.inertia == pytest.approx(d2.min(axis=1).sum())

    def test_k_one_is_mean_and_scatter(self):
        rng = np.random.default_rng(2)
        points = [seg(rng.integers(0, 9, size=2)) for _ in range(20)]
        model = kmeans(points, 1, seed=0)
        x = np.stack([p.counts for p in points]).astype(float)
        assert np.allclose(model.centroids[0], x.mean(axis=0))
        assert model.inertia == pytest.approx(((x - x.mean(axis=0)) ** 2).sum())

    def test_k_equals_n_distinct_reaches_zero(self):
        rng = np.random.default_rng(3)
        x = rng.choice(50, size=(8, 2), replace=False)
        points = [seg(row) for row in x]
        model = kmeans(points, 8, seed=5)
        assert model.inertia == pytest.approx(0.0)

    def test_metadata_carried(self):
        model = kmeans(FOUR_POINTS, 2, seed=0, window=W, event_filter=[0, 1])
        assert model.window == W
        assert model.event_filter == [0, 1]
        assert model.k == 2
        assert len(model.inertia_trace) == model.iterations_run


class TestAssign:
    def test_nearest_centroid(self):
        model = CompositeModel(
            k=2,
            centroids=np.array([[0.0, 0.0], [10.0, 10.0]]),
            inertia=0.0,
            seed=0,
            iterations_run=1,
        )
        assert assign(model, seg([1, 1])) == 0
        assert assign(model, seg([9, 9])) == 1

    def test_tie_goes_to_lowest_id(self):
        model = CompositeModel(
            k=4,
            centroids=np.array([[50.0, 50.0], [0.0, 0.0], [90.0, 90.0], [2.0, 0.0]]),
            inertia=0.0,
            seed=0,
            iterations_run=1,
        )
        # (1, 0) is equidistant from centroids 1 and 3
        assert assign(model, seg([1, 0])) == 1

    def test_dimension_mismatch(self):
        model = CompositeModel(
            k=1, centroids=np.zeros((1, 3)), inertia=0.0, seed=0, iterations_run=1
        )
        with pytest.raises(DimensionMismatch):
            assign(model, seg([1, 2]))
        with pytest.raises(DimensionMismatch):
            assign_many(model, [seg([1, 2])])

    def test_assign_many_matches_scalar_assign(self):
        rng = np.random.default_rng(4)
        points = [seg(rng.integers(0, 5, size=3)) for _ in range(25)]
        model = kmeans(points, 3, seed=1)
        batch = assign_many(model, points)
        assert batch.tolist() == [assign(model, p) for p in points]


class TestRewrite:
    def make(self):
        ds = dataset_from(
            [
                [("a", 0), ("a", 10), ("b", 150), ("a", 420)],
                [("b", 1000), ("b", 1050)],
            ],
            labels=[True, False],
        )
        segs = segment(ds, W)
        model = kmeans(
            segs, 2, seed=0, window=W, event_filter=list(range(len(ds.registry)))
        )
        return ds, model

    def test_one_composite_event_per_window(self):
        ds, model = self.make()
        out = rewrite(ds, model)
        assert [len(s.events) for s in out.sequences] == [3, 1]

    def test_composite_timestamps_are_window_first_events(self):
        ds, model = self.make()
        out = rewrite(ds, model)
        assert [ts for _, ts in out.sequences[0].events] == [0, 150, 420]
        assert [ts for _, ts in out.sequences[1].events] == [1000]

    def test_labels_and_ids_survive(self):
        ds, model = self.make()
        out = rewrite(ds, model)
        assert [s.sequence_id for s in out.sequences] == ["s00", "s01"]
        assert [s.label for s in out.sequences] == [True, False]

    def test_registry_uses_composite_names(self):
        ds, model = self.make()
        out = rewrite(ds, model)
        assert out.registry.names == ["composite_0", "composite_1"]
        assert sum(out.registry.occurrence_counts) == 4

    def test_rewritten_timestamps_monotone(self, synth_dataset):
        ds = synth_dataset(seed=9)
        segs = segment(ds, 7 * 86_400)
        model = kmeans(
            segs, 3, seed=0, window=7 * 86_400, event_filter=list(range(8))
        )
        out = rewrite(ds, model)
        assert len(out.sequences) == len(ds.sequences)
        for s in out.sequences:
            stamps = [ts for _, ts in s.events]
            assert stamps == sorted(stamps)

    def test_model_without_metadata_rejected(self):
        ds, model = self.make()
        bare = CompositeModel(
            k=model.k,
            centroids=model.centroids,
            inertia=model.inertia,
            seed=0,
            iterations_run=1,
        )
        with pytest.raises(ValueError):
            rewrite(ds, bare)


class TestDescribe:
    def model_with(self, centroids, event_filter=None):
        c = np.asarray(centroids, dtype=float)
        return CompositeModel(
            k=c.shape[0],
            centroids=c,
            inertia=0.0,
            seed=0,
            iterations_run=1,
            window=W,
            event_filter=event_filter or list(range(c.shape[1])),
        )

    def test_widths_and_heights_from_centroid_means(self):
        ds = dataset_from([[("a", 0)]])
        model = self.model_with([[2.0, 0.0], [1.0, 1.0]])
        d0, d1 = describe(model, [], [], ds)
        # composite 0: feature 0 takes the whole width and tops its column
        assert [(s.event_type, s.width_fraction, s.height_fraction) for s in d0.slices] == [
            (0, 1.0, 1.0)
        ]
        # composite 1: even split; feature 0 at half the column max
        assert [(s.event_type, s.width_fraction, s.height_fraction) for s in d1.slices] == [
            (0, 0.5, 0.5),
            (1, 0.5, 1.0),
        ]

    def test_zero_mean_features_are_omitted(self):
        ds = dataset_from([[("a", 0)]])
        (desc,) = describe(self.model_with([[0.0, 3.0]]), [], [], ds)
        assert [s.event_type for s in desc.slices] == [1]
        assert desc.other_bucket == []

    def test_small_widths_fold_into_other_bucket(self):
        ds = dataset_from([[("a", 0)]])
        (desc,) = describe(
            self.model_with([[99.0, 1.0]]), [], [], ds, low_mean_fraction=0.05
        )
        assert [s.event_type for s in desc.slices] == [0]
        assert desc.other_bucket == [1]

    def test_widths_sum_to_one_without_folding(self):
        rng = np.random.default_rng(5)
        ds = dataset_from([[("a", 0)]])
        centroids = rng.uniform(0.5, 4.0, size=(4, 5))
        for desc in describe(self.model_with(centroids), [], [], ds, low_mean_fraction=0.0):
            assert sum(s.width_fraction for s in desc.slices) == pytest.approx(1.0)

    def test_every_feature_column_has_a_full_height_slice(self):
        rng = np.random.default_rng(6)
        ds = dataset_from([[("a", 0)]])
        centroids = rng.uniform(0.5, 4.0, size=(3, 4))
        descs = describe(self.model_with(centroids), [], [], ds, low_mean_fraction=0.0)
        for j in range(4):
            heights = [
                s.height_fraction
                for d in descs
                for s in d.slices
                if s.event_type == j
            ]
            assert max(heights) == pytest.approx(1.0)

    def test_segment_counts_and_label_stats(self):
        ds = dataset_from([[("a", 0)], [("a", 5)]], labels=[True, False])
        model = self.model_with([[1.0], [2.0]])
        segs = [
            seg([1], sid="s00", idx=0),
            seg([1], sid="s00", idx=1),
            seg([2], sid="s01", idx=0),
        ]
        d0, d1 = describe(model, segs, [0, 0, 1], ds)
        assert d0.segment_count == 2 and d0.label_stats == (2, 0)
        assert d1.segment_count == 1 and d1.label_stats == (0, 1)

    def test_event_filter_names_feature_ids(self):
        ds = dataset_from([[("a", 0), ("b", 1), ("c", 2)]])
        ids = [ds.registry.id_of("b"), ds.registry.id_of("c")]
        model = self.model_with([[1.0, 1.0]], event_filter=ids)
        (desc,) = describe(model, [], [], ds)
        assert [s.event_type for s in desc.slices] == ids
