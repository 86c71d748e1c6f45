from foodkb.metrics.confusion import (
    ConfusionMatrix,
    MetricSet,
    confusion,
    metric_set,
    minority_baseline,
)
from foodkb.metrics.curves import CurveSummary, pooled_curves, pr_curve, roc_curve
from foodkb.metrics.stats import TTestResult, two_sided_ttest

__all__ = [
    "ConfusionMatrix",
    "CurveSummary",
    "MetricSet",
    "TTestResult",
    "confusion",
    "metric_set",
    "minority_baseline",
    "pooled_curves",
    "pr_curve",
    "roc_curve",
    "two_sided_ttest",
]
