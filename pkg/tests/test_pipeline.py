"""run_analysis orchestration and the estimator facades."""

import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import Pipeline

from eventflow import (
    DEFAULT_K,
    DEFAULT_WINDOW,
    CompositeEventLearner,
    EventTreeBuilder,
    KTooLarge,
    build_rdt,
    build_sa,
    run_analysis,
    tree_ig,
)
from eventflow.ingest import result_bytes


def shape(tree):
    return [
        (tree.node(n).event_type, tree.node(n).count, tree.node(n).terminated)
        for n in tree.walk()
    ]


class TestRunAnalysisComposite:
    def test_returns_tree_and_model(self, synth_dataset):
        ds = synth_dataset(seed=0)
        result = run_analysis(ds, "sa", k=4)
        assert result.tree.method == "sa"
        assert result.model is not None
        assert result.model.k == 4
        assert len(result.model.descriptors) == 4

    def test_tree_speaks_the_composite_alphabet(self, synth_dataset):
        ds = synth_dataset(seed=0)
        tree = run_analysis(ds, "sa", k=4).tree
        types = {n.event_type for n in tree.nodes if n.event_type is not None}
        assert types <= set(range(4))
        assert tree.total_sequences == len(ds.sequences)

    def test_params_record_the_effective_settings(self, synth_dataset):
        ds = synth_dataset(seed=1)
        tree = run_analysis(ds, "sa", k=3, seed=9, min_support=0.05).tree
        assert tree.params == {
            "method": "sa",
            "window": DEFAULT_WINDOW,
            "k": 3,
            "seed": 9,
            "event_filter": None,
            "min_support": 0.05,
        }

    def test_default_k(self, synth_dataset):
        ds = synth_dataset(seed=0, n_sequences=200, noise_rate=3.0)
        result = run_analysis(ds, "sa")
        assert result.model.k == DEFAULT_K
        assert result.tree.params["k"] == DEFAULT_K

    def test_event_filter_restricts_features(self, synth_dataset):
        ds = synth_dataset(seed=2)
        result = run_analysis(ds, "sa", k=3, event_filter=["et01", "et00"])
        ids = [ds.registry.id_of("et00"), ds.registry.id_of("et01")]
        assert result.model.event_filter == ids
        assert result.tree.params["event_filter"] == ["et00", "et01"]
        for desc in result.model.descriptors:
            assert {s.event_type for s in desc.slices} <= set(ids)

    def test_deterministic_for_a_seed(self, synth_dataset):
        ds = synth_dataset(seed=3)
        runs = [run_analysis(ds, "sa", k=4, seed=5) for _ in range(2)]
        assert result_bytes(runs[0].tree) == result_bytes(runs[1].tree)
        assert result_bytes(runs[0].model) == result_bytes(runs[1].model)

    def test_oversized_k_propagates(self, synth_dataset):
        ds = synth_dataset(seed=0, n_sequences=5)
        with pytest.raises(KTooLarge):
            run_analysis(ds, "sa", k=10_000)

    def test_bad_window(self, synth_dataset):
        ds = synth_dataset(seed=0)
        with pytest.raises(ValueError):
            run_analysis(ds, "sa", window=0, k=3)


class TestRunAnalysisPaths:
    @pytest.mark.parametrize("method,ranker", [("mcp", "frequency"), ("msp", "ig")])
    def test_matches_direct_build(self, synth_dataset, method, ranker):
        ds = synth_dataset(seed=4)
        result = run_analysis(ds, method, min_support=0.1)
        assert result.model is None
        assert result.tree.method == method
        direct = build_rdt(ds, ranker=ranker, min_support_fraction=0.1)
        assert shape(result.tree) == shape(direct)

    def test_params_snapshot(self, synth_dataset):
        ds = synth_dataset(seed=4)
        tree = run_analysis(ds, "msp", min_support=0.2).tree
        assert tree.params == {
            "method": "msp",
            "event_filter": None,
            "min_support": 0.2,
        }

    def test_filter_drops_events_but_keeps_sequences(self, synth_dataset):
        ds = synth_dataset(seed=5)
        tree = run_analysis(ds, "mcp", event_filter=["et00"]).tree
        et00 = ds.registry.id_of("et00")
        assert {n.event_type for n in tree.nodes} == {None, et00}
        root = tree.node(tree.root)
        assert root.count == len(ds.sequences)
        assert root.positive == sum(s.label for s in ds.sequences)

    def test_bad_arguments(self, synth_dataset):
        ds = synth_dataset(seed=0)
        with pytest.raises(ValueError):
            run_analysis(ds, "pca")
        with pytest.raises(ValueError):
            run_analysis(ds, "mcp", min_support=1.0)
        with pytest.raises(ValueError):
            run_analysis(ds, "mcp", event_filter=["no_such_type"])


class TestCompositeEventLearner:
    def test_fit_transform_rewrites(self, synth_dataset):
        ds = synth_dataset(seed=6)
        learner = CompositeEventLearner(n_composites=3)
        out = learner.fit(ds).transform(ds)
        assert out.registry.names == ["composite_0", "composite_1", "composite_2"]
        assert len(out.sequences) == len(ds.sequences)
        assert learner.descriptors_ is learner.model_.descriptors

    def test_transform_before_fit_rejected(self, synth_dataset):
        with pytest.raises(NotFittedError):
            CompositeEventLearner().transform(synth_dataset(seed=0))

    def test_get_set_params_round_trip(self):
        learner = CompositeEventLearner(window=1234, n_composites=7)
        params = learner.get_params()
        assert params["window"] == 1234 and params["n_composites"] == 7
        learner.set_params(seed=42)
        assert learner.get_params()["seed"] == 42

    def test_clone_drops_fitted_state(self, synth_dataset):
        learner = CompositeEventLearner(n_composites=3).fit(synth_dataset(seed=6))
        fresh = clone(learner)
        assert fresh.get_params() == learner.get_params()
        assert not hasattr(fresh, "model_")

    def test_matches_functional_chain(self, synth_dataset):
        ds = synth_dataset(seed=7)
        learner = CompositeEventLearner(n_composites=4, seed=2)
        rewritten = learner.fit(ds).transform(ds)
        expected = run_analysis(ds, "sa", k=4, seed=2)
        assert result_bytes(learner.model_) == result_bytes(expected.model)
        assert shape(build_sa(rewritten)) == shape(expected.tree)


class TestEventTreeBuilder:
    def test_fit_builds_the_requested_tree(self, synth_dataset):
        ds = synth_dataset(seed=8)
        builder = EventTreeBuilder(method="msp", min_support=0.1)
        assert builder.fit(ds) is builder
        direct = build_rdt(ds, ranker="ig", min_support_fraction=0.1)
        assert shape(builder.tree_) == shape(direct)
        assert builder.tree_.params == {"method": "msp", "min_support": 0.1}

    def test_score_is_tree_information_gain(self, synth_dataset):
        ds = synth_dataset(seed=8)
        builder = EventTreeBuilder(method="mcp", min_support=0.05).fit(ds)
        assert builder.score() == tree_ig(builder.tree_, 0.05)

    def test_unfitted_score_rejected(self):
        with pytest.raises(NotFittedError):
            EventTreeBuilder().score()

    def test_bad_params_surface_at_fit(self, synth_dataset):
        ds = synth_dataset(seed=0)
        with pytest.raises(ValueError):
            EventTreeBuilder(method="umap").fit(ds)
        with pytest.raises(ValueError):
            EventTreeBuilder(min_support=-0.5).fit(ds)

    def test_composes_in_a_pipeline(self, synth_dataset):
        ds = synth_dataset(seed=9)
        pipe = Pipeline(
            [
                ("composites", CompositeEventLearner(n_composites=4, seed=1)),
                ("tree", EventTreeBuilder(method="sa")),
            ]
        )
        pipe.fit(ds)
        expected = run_analysis(ds, "sa", k=4, seed=1)
        assert shape(pipe.named_steps["tree"].tree_) == shape(expected.tree)
        assert pipe.score(ds) == tree_ig(expected.tree, 0.01)
