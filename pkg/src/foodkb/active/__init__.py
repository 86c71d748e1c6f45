from foodkb.active.analysis import (
    AccelerationResult,
    discovery_acceleration,
    discovery_curve,
    mean_discovery_curve,
)
from foodkb.active.runner import (
    RoundRecord,
    RunConfig,
    RunResult,
    multi_run,
    run_active_learning,
)
from foodkb.active.sampling import RANDOM, UNCERTAINTY, sample_batch, uncertainty_score

__all__ = [
    "AccelerationResult",
    "RANDOM",
    "RoundRecord",
    "RunConfig",
    "RunResult",
    "UNCERTAINTY",
    "discovery_acceleration",
    "discovery_curve",
    "mean_discovery_curve",
    "multi_run",
    "run_active_learning",
    "sample_batch",
    "uncertainty_score",
]
