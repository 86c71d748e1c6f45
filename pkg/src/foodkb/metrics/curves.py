"""Precision-recall and ROC curves with threshold sweeps and areas.

Thresholds sweep the unique predicted probabilities in descending order;
tied probabilities are grouped into a single threshold step, which makes the
curves deterministic under ties. AUROC uses the trapezoidal rule; AUCPR uses
step interpolation (average-precision style), since linear PR interpolation
is known to be optimistic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence


class DegenerateLabelsError(ValueError):
    """The label vector is missing a class required for the curve."""

    def __init__(self, missing_class: str) -> None:
        super().__init__(f"label vector has no {missing_class} examples")
        self.missing_class = missing_class


@dataclass(frozen=True)
class CurveSummary:
    """One curve: aligned (threshold, x, y) triples plus the area under it.

    For ROC, x is the false-positive rate and y the true-positive rate (the
    anchor point at threshold +inf is included). For PR, x is recall and y is
    precision.
    """

    kind: str
    thresholds: tuple[float, ...]
    xs: tuple[float, ...]
    ys: tuple[float, ...]
    area: float

    @property
    def auroc(self) -> float:
        if self.kind != "roc":
            raise AttributeError("auroc is defined on ROC curves")
        return self.area

    @property
    def aucpr(self) -> float:
        if self.kind != "pr":
            raise AttributeError("aucpr is defined on PR curves")
        return self.area


def _grouped_counts(labels: Sequence[int], probs: Sequence[float]
                    ) -> tuple[list[float], list[int], list[int], int, int]:
    """Per unique descending threshold: cumulative tp and fp at ``p >= t``."""
    if len(labels) != len(probs):
        raise ValueError(f"length mismatch: {len(labels)} labels, {len(probs)} probs")
    n_pos = sum(1 for y in labels if y)
    n_neg = len(labels) - n_pos
    per_threshold: dict[float, list[int]] = {}
    for y, p in zip(labels, probs):
        cell = per_threshold.setdefault(float(p), [0, 0])
        cell[0 if y else 1] += 1
    thresholds = sorted(per_threshold, reverse=True)
    cum_tp: list[int] = []
    cum_fp: list[int] = []
    tp = fp = 0
    for t in thresholds:
        tp += per_threshold[t][0]
        fp += per_threshold[t][1]
        cum_tp.append(tp)
        cum_fp.append(fp)
    return thresholds, cum_tp, cum_fp, n_pos, n_neg


def roc_curve(labels: Sequence[int], probs: Sequence[float]) -> CurveSummary:
    """ROC points and trapezoidal AUROC; needs both classes present."""
    thresholds, cum_tp, cum_fp, n_pos, n_neg = _grouped_counts(labels, probs)
    if n_pos == 0:
        raise DegenerateLabelsError("positive")
    if n_neg == 0:
        raise DegenerateLabelsError("negative")
    ts = [float("inf")]
    xs = [0.0]
    ys = [0.0]
    for t, tp, fp in zip(thresholds, cum_tp, cum_fp):
        ts.append(t)
        xs.append(fp / n_neg)
        ys.append(tp / n_pos)
    area = 0.0
    for i in range(1, len(xs)):
        area += (xs[i] - xs[i - 1]) * (ys[i] + ys[i - 1]) / 2.0
    return CurveSummary(kind="roc", thresholds=tuple(ts), xs=tuple(xs),
                        ys=tuple(ys), area=area)


def pr_curve(labels: Sequence[int], probs: Sequence[float]) -> CurveSummary:
    """PR points and step-interpolated AUCPR; needs at least one positive."""
    thresholds, cum_tp, cum_fp, n_pos, _ = _grouped_counts(labels, probs)
    if n_pos == 0:
        raise DegenerateLabelsError("positive")
    ts: list[float] = []
    recalls: list[float] = []
    precisions: list[float] = []
    area = 0.0
    prev_recall = 0.0
    for t, tp, fp in zip(thresholds, cum_tp, cum_fp):
        recall = tp / n_pos
        precision = tp / (tp + fp)
        ts.append(t)
        recalls.append(recall)
        precisions.append(precision)
        area += (recall - prev_recall) * precision
        prev_recall = recall
    return CurveSummary(kind="pr", thresholds=tuple(ts), xs=tuple(recalls),
                        ys=tuple(precisions), area=area)


@dataclass(frozen=True)
class PooledCurves:
    pr: CurveSummary
    roc: CurveSummary


def pooled_curves(runs: Sequence[tuple[Sequence[int], Sequence[float]]]) -> PooledCurves:
    """Concatenate (label, probability) pairs across runs, then compute curves."""
    if not runs:
        raise ValueError("no runs given")
    labels: list[int] = []
    probs: list[float] = []
    for run_labels, run_probs in runs:
        labels.extend(run_labels)
        probs.extend(run_probs)
    return PooledCurves(pr=pr_curve(labels, probs), roc=roc_curve(labels, probs))
