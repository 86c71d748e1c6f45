"""Hyperparameter grid search selected by validation precision.

One model per grid point with a fixed seed; the point with the highest
validation precision at threshold 0.5 wins. Ties break by higher F1, then
by grid declaration order. The search runs once, before active learning
begins, and the chosen hyperparameters are reused for every round and run.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from foodkb.annotations.labels import LabeledSRPair
from foodkb.classifier.baseline import HyperParams
from foodkb.classifier.contract import BaselineBackend, ClassifierBackend
from foodkb.metrics.confusion import MetricSet, confusion, metric_set

GRID_SEARCH_SEED = 1729


@dataclass(frozen=True)
class GridPointResult:
    hyperparams: HyperParams
    metrics: MetricSet


@dataclass(frozen=True)
class GridSearchReport:
    results: tuple[GridPointResult, ...]
    best_index: int

    @property
    def best(self) -> HyperParams:
        return self.results[self.best_index].hyperparams


def grid_search(grid: Sequence[HyperParams], train: Sequence[LabeledSRPair],
                val: Sequence[LabeledSRPair],
                backend: ClassifierBackend | None = None,
                seed: int = GRID_SEARCH_SEED) -> tuple[HyperParams, GridSearchReport]:
    if not grid:
        raise ValueError("empty hyperparameter grid")
    val_labels = [1 if item.is_positive else 0 for item in val]
    if not any(val_labels) or all(val_labels):
        raise ValueError("validation set needs at least one positive and one negative")
    backend = backend or BaselineBackend()
    val_items = [item.pair for item in val]

    results: list[GridPointResult] = []
    best_index = 0
    best_key: tuple[float, float] | None = None
    for i, hp in enumerate(grid):
        model = backend.fit(train, hp, seed)
        probs = backend.predict_proba(model, val_items)
        metrics = metric_set(confusion(val_labels, probs, threshold=0.5))
        results.append(GridPointResult(hyperparams=hp, metrics=metrics))
        key = (metrics.precision, metrics.f1)
        if best_key is None or key > best_key:
            best_key = key
            best_index = i

    report = GridSearchReport(results=tuple(results), best_index=best_index)
    return report.best, report
