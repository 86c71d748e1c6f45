"""The classifier contract shared by the built-in baseline and external backends.

A backend fits on labeled SR pairs and emits positive-class probabilities.
Anything satisfying :class:`ClassifierBackend` can drive the active-learning
loop; the conformance checks in the test suite are the contract's source of
truth and run identically against every backend.
"""

from __future__ import annotations

from typing import Any, Protocol, Sequence, runtime_checkable

from foodkb.annotations.labels import LabeledSRPair
from foodkb.classifier import baseline
from foodkb.classifier.baseline import HyperParams
from foodkb.extract.pairs import SRPair


class BackendTransportError(RuntimeError):
    """The external backend was unreachable or the transport failed."""


class BackendModelError(RuntimeError):
    """The backend rejected the request (bad model id, invalid payload, ...)."""


# Hyperparameter grids: 2 learning rates x 2 batch sizes x 2 epoch counts.
# The transformer grid uses fine-tuning learning rates; the baseline grid
# rescales them to values appropriate for logistic regression.
BASELINE_GRID: tuple[HyperParams, ...] = tuple(
    HyperParams(learning_rate=lr, batch_size=bs, epochs=ep)
    for lr in (0.05, 0.1) for bs in (16, 32) for ep in (3, 4)
)
TRANSFORMER_GRID: tuple[HyperParams, ...] = tuple(
    HyperParams(learning_rate=lr, batch_size=bs, epochs=ep)
    for lr in (2e-5, 5e-5) for bs in (16, 32) for ep in (3, 4)
)


@runtime_checkable
class ClassifierBackend(Protocol):
    kind: str

    def fit(self, train: Sequence[LabeledSRPair], hp: HyperParams, seed: int) -> Any:
        """Train a model and return an opaque handle for prediction."""

    def predict_proba(self, model: Any, items: Sequence[SRPair]) -> list[float]:
        """Positive-class probability per item, order-preserving, each in [0, 1]."""


class BaselineBackend:
    """In-process logistic-regression backend; deterministic given seeds."""

    kind = "baseline"

    def fit(self, train: Sequence[LabeledSRPair], hp: HyperParams,
            seed: int) -> baseline.BaselineModel:
        return baseline.fit(train, hp, seed)

    def predict_proba(self, model: baseline.BaselineModel,
                      items: Sequence[SRPair]) -> list[float]:
        return baseline.predict_proba(model, items)
