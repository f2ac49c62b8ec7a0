"""Estimator facades over the functional core.

Follows the fit/transform convention so the stages compose with
standard pipelines: CompositeEventLearner transforms a Dataset into its
rewritten form, EventTreeBuilder fits a tree on whatever dataset it is
given (raw or rewritten).
"""

from __future__ import annotations

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .aggregate import build_rdt, build_sa
from .composite import (
    DEFAULT_K,
    DEFAULT_WINDOW,
    assign_many,
    describe,
    kmeans,
    rewrite,
    segment,
)
from .metrics import tree_ig
from .model import Dataset
from .validation import ensure_method, ensure_positive, ensure_support, resolve_event_filter


class CompositeEventLearner(BaseEstimator, TransformerMixin):
    """Learn composite event types and rewrite sequences over them.

    fit() segments the dataset into fixed windows, clusters the count
    vectors, and stores the model; transform() rewrites a dataset so
    each non-empty window becomes one composite event.
    """

    def __init__(
        self,
        window: int = DEFAULT_WINDOW,
        n_composites: int = DEFAULT_K,
        event_filter: list[str] | None = None,
        seed: int = 0,
        max_iter: int = 100,
        tol: float = 1e-6,
        low_mean_fraction: float = 0.02,
    ):
        self.window = window
        self.n_composites = n_composites
        self.event_filter = event_filter
        self.seed = seed
        self.max_iter = max_iter
        self.tol = tol
        self.low_mean_fraction = low_mean_fraction

    def fit(self, X: Dataset, y=None) -> "CompositeEventLearner":
        ensure_positive(self.window, "window")
        filter_ids = resolve_event_filter(X.registry, self.event_filter)
        segments = segment(X, self.window, filter_ids)
        model = kmeans(
            segments,
            self.n_composites,
            self.seed,
            max_iter=self.max_iter,
            tol=self.tol,
            window=self.window,
            event_filter=filter_ids
            if filter_ids is not None
            else list(range(len(X.registry))),
        )
        assignments = assign_many(model, segments)
        model.descriptors = describe(
            model, segments, assignments, X, self.low_mean_fraction
        )
        self.model_ = model
        self.descriptors_ = model.descriptors
        return self

    def transform(self, X: Dataset) -> Dataset:
        if not hasattr(self, "model_"):
            raise NotFittedError("CompositeEventLearner is not fitted yet")
        return rewrite(X, self.model_)


class EventTreeBuilder(BaseEstimator):
    """Aggregate a dataset into a tree; score() is its information gain."""

    def __init__(self, method: str = "sa", min_support: float = 0.01):
        self.method = method
        self.min_support = min_support

    def fit(self, X: Dataset, y=None) -> "EventTreeBuilder":
        ensure_method(self.method)
        ensure_support(self.min_support)
        params = {"method": self.method, "min_support": self.min_support}
        if self.method == "sa":
            self.tree_ = build_sa(X, params=params)
        else:
            ranker = "frequency" if self.method == "mcp" else "ig"
            self.tree_ = build_rdt(
                X, ranker=ranker, min_support_fraction=self.min_support, params=params
            )
        return self

    def score(self, X: Dataset | None = None, y=None) -> float:
        if not hasattr(self, "tree_"):
            raise NotFittedError("EventTreeBuilder is not fitted yet")
        return tree_ig(self.tree_, self.min_support)
