"""Batch sampling strategies for pool-based active learning.

The uncertainty score of a predicted probability p is ``min(1 - p, p)``:
maximal (0.5) at the decision boundary, zero at full confidence. The
uncertainty strategy takes the k highest-scoring remaining pairs; the random
strategy samples uniformly without replacement. Both are deterministic:
ties break by ascending pair id, and random sampling orders its input before
drawing.
"""

from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

UNCERTAINTY = "uncertainty"
RANDOM = "random"
STRATEGIES = (UNCERTAINTY, RANDOM)


def uncertainty_score(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability out of range: {p}")
    return min(1.0 - p, p)


def sample_batch(strategy: str, remaining: Sequence[str],
                 probabilities: Mapping[str, float] | None, k: int,
                 rng: np.random.Generator) -> list[str]:
    """Select ``k`` pair ids from ``remaining`` under the given strategy."""
    if k > len(remaining):
        raise ValueError(f"batch size {k} exceeds remaining pool {len(remaining)}")
    ids = sorted(remaining)
    if strategy == RANDOM:
        chosen = rng.permutation(len(ids))[:k]
        return [ids[i] for i in chosen]
    if strategy == UNCERTAINTY:
        if probabilities is None:
            raise ValueError("uncertainty sampling needs probabilities")
        missing = [i for i in ids if i not in probabilities]
        if missing:
            raise ValueError(f"missing probabilities for {len(missing)} pairs")
        ranked = sorted(ids, key=lambda i: (-uncertainty_score(probabilities[i]), i))
        return ranked[:k]
    raise ValueError(f"unknown strategy {strategy!r}")
