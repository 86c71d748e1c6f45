"""Discovery curves and strategy comparison.

The discovery curve of a run is the cumulative count of true positives among
all pairs sampled up to each round. Discovery acceleration compares the
strategy-wise mean curves over the intermediate rounds (2 through rounds-1):
the mean and spread of the relative excess of uncertainty sampling over
random sampling, as percentages.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from foodkb.active.runner import RunResult


def discovery_curve(run: RunResult) -> list[tuple[int, int]]:
    if not run.complete:
        raise ValueError("discovery curve needs a complete run")
    return [(r.round_index, r.positives_discovered_cumulative) for r in run.rounds]


def mean_discovery_curve(runs: Sequence[RunResult]) -> list[tuple[int, float]]:
    if not runs:
        raise ValueError("no runs")
    rounds = len(runs[0].rounds)
    if any(len(r.rounds) != rounds for r in runs):
        raise ValueError("runs have differing round counts")
    out = []
    for i in range(rounds):
        values = [run.rounds[i].positives_discovered_cumulative for run in runs]
        out.append((i + 1, sum(values) / len(values)))
    return out


@dataclass(frozen=True)
class AccelerationResult:
    mean_percent: float
    std_percent: float
    per_round_percent: tuple[tuple[int, float], ...]
    excluded_rounds: tuple[int, ...] = ()


def discovery_acceleration(uncertainty_runs: Sequence[RunResult],
                           random_runs: Sequence[RunResult]) -> AccelerationResult:
    """Relative discovery excess of uncertainty over random, rounds 2..N-1.

    Rounds where the random strategy has discovered nothing (zero
    denominator) are excluded and flagged.
    """
    unc_curve = dict(mean_discovery_curve(uncertainty_runs))
    rnd_curve = dict(mean_discovery_curve(random_runs))
    if set(unc_curve) != set(rnd_curve):
        raise ValueError("run sets have differing round counts")
    rounds = len(unc_curve)
    per_round: list[tuple[int, float]] = []
    excluded: list[int] = []
    for r in range(2, rounds):
        if rnd_curve[r] == 0:
            excluded.append(r)
            continue
        per_round.append((r, 100.0 * (unc_curve[r] - rnd_curve[r]) / rnd_curve[r]))
    if not per_round:
        raise ValueError("no intermediate rounds with nonzero random discovery")
    values = [v for _, v in per_round]
    mean = sum(values) / len(values)
    std = math.sqrt(sum((v - mean) ** 2 for v in values) / len(values))
    return AccelerationResult(
        mean_percent=mean,
        std_percent=std,
        per_round_percent=tuple(per_round),
        excluded_rounds=tuple(excluded),
    )
