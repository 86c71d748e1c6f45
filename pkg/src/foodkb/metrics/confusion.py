"""Binary classification metrics from exact confusion counts.

Conventions, fixed for determinism across the whole workbench:

* a prediction is positive iff ``p >= threshold`` (the boundary counts
  positive);
* any 0/0 metric is defined as 0.0 and the corresponding degenerate flag is
  set, so multi-run aggregation never drops runs silently.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

NO_PREDICTED_POSITIVES = "no_predicted_positives"
NO_ACTUAL_POSITIVES = "no_actual_positives"
NO_ACTUAL_NEGATIVES = "no_actual_negatives"


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self) -> None:
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class MetricSet:
    precision: float
    recall: float
    f1: float
    accuracy: float
    specificity: float
    degenerate_flags: frozenset[str] = frozenset()

    def to_record(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "accuracy": self.accuracy,
            "specificity": self.specificity,
            "degenerate_flags": sorted(self.degenerate_flags),
        }

    @classmethod
    def from_record(cls, rec: dict) -> "MetricSet":
        return cls(
            precision=rec["precision"], recall=rec["recall"], f1=rec["f1"],
            accuracy=rec["accuracy"], specificity=rec["specificity"],
            degenerate_flags=frozenset(rec.get("degenerate_flags", ())),
        )


def confusion(labels: Sequence[int], probs: Sequence[float],
              threshold: float = 0.5) -> ConfusionMatrix:
    """Exact counts; prediction positive iff ``p >= threshold``."""
    if len(labels) != len(probs):
        raise ValueError(f"length mismatch: {len(labels)} labels, {len(probs)} probs")
    if not labels:
        raise ValueError("empty label vector")
    tp = fp = fn = tn = 0
    for y, p in zip(labels, probs):
        predicted = p >= threshold
        if y:
            tp += predicted
            fn += not predicted
        else:
            fp += predicted
            tn += not predicted
    return ConfusionMatrix(tp=tp, fp=fp, fn=fn, tn=tn)


def metric_set(cm: ConfusionMatrix) -> MetricSet:
    if cm.total == 0:
        raise ValueError("empty confusion matrix")
    flags: set[str] = set()

    if cm.tp + cm.fp == 0:
        precision = 0.0
        flags.add(NO_PREDICTED_POSITIVES)
    else:
        precision = cm.tp / (cm.tp + cm.fp)

    if cm.tp + cm.fn == 0:
        recall = 0.0
        flags.add(NO_ACTUAL_POSITIVES)
    else:
        recall = cm.tp / (cm.tp + cm.fn)

    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    accuracy = (cm.tp + cm.tn) / cm.total

    if cm.tn + cm.fp == 0:
        specificity = 0.0
        flags.add(NO_ACTUAL_NEGATIVES)
    else:
        specificity = cm.tn / (cm.tn + cm.fp)

    return MetricSet(precision=precision, recall=recall, f1=f1, accuracy=accuracy,
                     specificity=specificity, degenerate_flags=frozenset(flags))


def minority_baseline(labels: Sequence[int]) -> MetricSet:
    """Metrics of the constant classifier that always predicts the minority class.

    Ties break toward positive. This is the reference line for PR/ROC plots.
    """
    if not labels:
        raise ValueError("empty label vector")
    n_pos = sum(1 for y in labels if y)
    n_neg = len(labels) - n_pos
    predict_positive = n_pos <= n_neg
    if predict_positive:
        cm = ConfusionMatrix(tp=n_pos, fp=n_neg, fn=0, tn=0)
    else:
        cm = ConfusionMatrix(tp=0, fp=0, fn=n_pos, tn=n_neg)
    return metric_set(cm)
