"""Experiment reports: per-round metric tables, t-test matrices, curve exports.

The summary table has one row per (strategy, metric) and one column per
round, each cell ``mean+-std`` over the runs, mirroring the layout used to
compare uncertainty and random sampling. The t-test matrix compares the two
strategies' per-run metric samples round by round.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

from foodkb.active.analysis import discovery_acceleration, mean_discovery_curve
from foodkb.active.runner import RunResult
from foodkb.metrics.curves import CurveSummary
from foodkb.metrics.stats import two_sided_ttest

METRIC_NAMES = ("precision", "recall", "f1", "accuracy", "specificity")


def metric_samples(runs: Sequence[RunResult], metric: str,
                   round_index: int) -> list[float]:
    return [getattr(run.rounds[round_index - 1].metrics, metric) for run in runs]


def _mean_std(values: Sequence[float]) -> tuple[float, float]:
    mean = sum(values) / len(values)
    var = sum((v - mean) ** 2 for v in values) / len(values)
    return mean, var ** 0.5


def summary_table(runs_by_strategy: dict[str, Sequence[RunResult]],
                  delimiter: str = "\t") -> str:
    """``strategy x metric`` rows, per-round ``mean+-std`` columns."""
    strategies = sorted(runs_by_strategy)
    rounds = len(next(iter(runs_by_strategy.values()))[0].rounds)
    lines = [delimiter.join(["strategy", "metric"]
                            + [f"round_{r}" for r in range(1, rounds + 1)])]
    for strategy in strategies:
        runs = runs_by_strategy[strategy]
        for metric in METRIC_NAMES:
            cells = []
            for r in range(1, rounds + 1):
                mean, std = _mean_std(metric_samples(runs, metric, r))
                cells.append(f"{mean:.4f}+-{std:.4f}")
            lines.append(delimiter.join([strategy, metric] + cells))
    return "\n".join(lines) + "\n"


def ttest_matrix(runs_a: Sequence[RunResult], runs_b: Sequence[RunResult],
                 delimiter: str = "\t") -> str:
    """Two-sided Welch t-tests between the two strategies, per metric and round."""
    rounds = len(runs_a[0].rounds)
    lines = [delimiter.join(["metric"] + [f"round_{r}" for r in range(1, rounds + 1)])]
    for metric in METRIC_NAMES:
        cells = []
        for r in range(1, rounds + 1):
            result = two_sided_ttest(metric_samples(runs_a, metric, r),
                                     metric_samples(runs_b, metric, r))
            cells.append(f"t={result.t:.4f},p={result.p:.3e}")
        lines.append(delimiter.join([metric] + cells))
    return "\n".join(lines) + "\n"


def curve_export(curve: CurveSummary, delimiter: str = "\t") -> str:
    x_name, y_name = (("fpr", "tpr") if curve.kind == "roc"
                      else ("recall", "precision"))
    lines = [delimiter.join(["threshold", x_name, y_name])]
    for t, x, y in zip(curve.thresholds, curve.xs, curve.ys):
        lines.append(delimiter.join([repr(t), repr(x), repr(y)]))
    area_name = "auroc" if curve.kind == "roc" else "aucpr"
    lines.append(f"# {area_name}={curve.area!r}")
    return "\n".join(lines) + "\n"


def discovery_export(runs_by_strategy: dict[str, Sequence[RunResult]],
                     delimiter: str = "\t") -> str:
    strategies = sorted(runs_by_strategy)
    curves = {s: dict(mean_discovery_curve(runs_by_strategy[s])) for s in strategies}
    rounds = sorted(next(iter(curves.values())))
    lines = [delimiter.join(["round"] + [f"mean_positives_{s}" for s in strategies])]
    for r in rounds:
        lines.append(delimiter.join([str(r)] + [repr(curves[s][r]) for s in strategies]))
    return "\n".join(lines) + "\n"


def write_reports(runs_by_strategy: dict[str, Sequence[RunResult]],
                  out_dir: str | Path) -> list[str]:
    """Write every report the run set supports; returns the file names written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    (out / "summary.tsv").write_text(summary_table(runs_by_strategy), encoding="utf-8")
    written.append("summary.tsv")

    (out / "discovery.tsv").write_text(discovery_export(runs_by_strategy),
                                       encoding="utf-8")
    written.append("discovery.tsv")

    if {"uncertainty", "random"} <= set(runs_by_strategy):
        unc = runs_by_strategy["uncertainty"]
        rnd = runs_by_strategy["random"]
        (out / "ttest.tsv").write_text(ttest_matrix(unc, rnd), encoding="utf-8")
        written.append("ttest.tsv")
        accel = discovery_acceleration(unc, rnd)
        text = (f"mean_percent\t{accel.mean_percent!r}\n"
                f"std_percent\t{accel.std_percent!r}\n"
                + "".join(f"round_{r}\t{v!r}\n" for r, v in accel.per_round_percent))
        (out / "acceleration.tsv").write_text(text, encoding="utf-8")
        written.append("acceleration.tsv")
    return written
