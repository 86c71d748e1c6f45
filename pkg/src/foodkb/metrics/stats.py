"""Welch's unequal-variance two-sided t-test.

Welch rather than pooled-variance Student: the per-round metric spreads are
visibly unequal between strategies, and Welch is safe either way. The
two-sided p value comes from the t-distribution survival function expressed
through the regularized incomplete beta function:

    p = I_{df / (df + t^2)}(df / 2, 1/2)

evaluated with ``scipy.special.betainc`` (relative error well below 1e-10).
"""

from __future__ import annotations

import math
from typing import NamedTuple, Sequence

from scipy.special import betainc


class TTestResult(NamedTuple):
    t: float
    p: float
    df: float
    degenerate: bool = False


def _mean_var(sample: Sequence[float]) -> tuple[float, float]:
    n = len(sample)
    mean = sum(sample) / n
    var = sum((x - mean) ** 2 for x in sample) / (n - 1)
    return mean, var


def two_sided_ttest(sample_a: Sequence[float], sample_b: Sequence[float]) -> TTestResult:
    """Welch t statistic and two-sided p value for two independent samples.

    Degenerate inputs (both variances zero) yield t=0, p=1 when the means are
    equal and p=0 with the degenerate flag set when they differ.
    """
    if len(sample_a) < 2 or len(sample_b) < 2:
        raise ValueError("each sample needs at least 2 observations")
    mean_a, var_a = _mean_var(sample_a)
    mean_b, var_b = _mean_var(sample_b)
    n_a, n_b = len(sample_a), len(sample_b)

    if var_a == 0.0 and var_b == 0.0:
        if mean_a == mean_b:
            return TTestResult(t=0.0, p=1.0, df=float(n_a + n_b - 2), degenerate=True)
        return TTestResult(t=math.copysign(math.inf, mean_a - mean_b), p=0.0,
                           df=float(n_a + n_b - 2), degenerate=True)

    se_a = var_a / n_a
    se_b = var_b / n_b
    t = (mean_a - mean_b) / math.sqrt(se_a + se_b)
    df = (se_a + se_b) ** 2 / (se_a ** 2 / (n_a - 1) + se_b ** 2 / (n_b - 1))
    if t == 0.0:
        p = 1.0
    else:
        p = float(betainc(df / 2.0, 0.5, df / (df + t * t)))
    return TTestResult(t=t, p=p, df=df)
