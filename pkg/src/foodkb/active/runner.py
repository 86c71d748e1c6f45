"""Pool-based active-learning runs.

One run: round 1 samples randomly; every later round retrains the backend on
the cumulative labeled set, predicts probabilities over the remaining pool,
and samples the next batch by strategy (uncertainty or random). Per-round
RNG streams derive from (run seed, round index) so runs and rounds are fully
independent and reproducible; with the baseline backend an entire run is
byte-reproducible.

The same round engine drives both simulate mode (labels pre-known, as in the
statistical experiments) and live mode (labels arriving from annotators via
the HTTP service).
"""

from __future__ import annotations

import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from foodkb import ids
from foodkb.active.sampling import RANDOM, STRATEGIES, sample_batch
from foodkb.annotations.labels import LabeledSRPair
from foodkb.classifier.baseline import HyperParams
from foodkb.classifier.contract import (
    BackendModelError,
    BackendTransportError,
    ClassifierBackend,
)
from foodkb.metrics.confusion import MetricSet, confusion, metric_set

logger = logging.getLogger(__name__)

CLASSIFICATION_THRESHOLD = 0.5


@dataclass(frozen=True)
class RunConfig:
    rounds: int
    batch_size: int
    strategy: str
    seed: int
    pool: tuple[LabeledSRPair, ...]
    val: tuple[LabeledSRPair, ...]
    test: tuple[LabeledSRPair, ...]
    hyperparams: HyperParams
    backend_kind: str = "baseline"

    def __post_init__(self) -> None:
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")
        if self.rounds * self.batch_size > len(self.pool):
            raise ValueError(
                f"rounds x batch_size = {self.rounds * self.batch_size} exceeds "
                f"pool size {len(self.pool)}")
        _check_disjoint(self.pool, self.val, "val")
        _check_disjoint(self.pool, self.test, "test")

    def digest(self) -> str:
        """Digest of everything that determines the run's outcome."""
        return ids.config_digest({
            "rounds": self.rounds,
            "batch_size": self.batch_size,
            "strategy": self.strategy,
            "seed": self.seed,
            "hyperparams": self.hyperparams.to_record(),
            "backend_kind": self.backend_kind,
            "pool_ids": sorted(p.pair.pair_id for p in self.pool),
            "test_ids": sorted(p.pair.pair_id for p in self.test),
        })


def _check_disjoint(pool: Sequence[LabeledSRPair], other: Sequence[LabeledSRPair],
                    name: str) -> None:
    pool_sentences = {p.pair.sentence_id for p in pool}
    pool_relations = {p.pair.relation.relation_text for p in pool}
    for item in other:
        if item.pair.sentence_id in pool_sentences:
            raise ValueError(f"{name} shares a sentence with the pool")
        if item.pair.relation.relation_text in pool_relations:
            raise ValueError(f"{name} shares a relation with the pool")


@dataclass(frozen=True)
class RoundRecord:
    round_index: int
    sampled_ids: tuple[str, ...]
    cumulative_train_size: int
    metrics: MetricSet
    positives_discovered_cumulative: int

    def to_record(self) -> dict:
        return {
            "round_index": self.round_index,
            "sampled_ids": list(self.sampled_ids),
            "cumulative_train_size": self.cumulative_train_size,
            "metrics": self.metrics.to_record(),
            "positives_discovered_cumulative": self.positives_discovered_cumulative,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "RoundRecord":
        return cls(
            round_index=rec["round_index"],
            sampled_ids=tuple(rec["sampled_ids"]),
            cumulative_train_size=rec["cumulative_train_size"],
            metrics=MetricSet.from_record(rec["metrics"]),
            positives_discovered_cumulative=rec["positives_discovered_cumulative"],
        )


@dataclass(frozen=True)
class RunResult:
    config_digest: str
    strategy: str
    seed: int
    batch_size: int
    rounds_planned: int
    backend_kind: str
    hyperparams: HyperParams
    rounds: tuple[RoundRecord, ...]
    complete: bool
    error: str | None = None

    def to_record(self) -> dict:
        return {
            "config_digest": self.config_digest,
            "strategy": self.strategy,
            "seed": self.seed,
            "batch_size": self.batch_size,
            "rounds_planned": self.rounds_planned,
            "backend_kind": self.backend_kind,
            "hyperparams": self.hyperparams.to_record(),
            "rounds": [r.to_record() for r in self.rounds],
            "complete": self.complete,
            "error": self.error,
        }

    def to_json_bytes(self) -> bytes:
        """Canonical byte form; identical runs serialize identically."""
        return (json.dumps(self.to_record(), sort_keys=True, ensure_ascii=False,
                           separators=(",", ":")) + "\n").encode("utf-8")

    @classmethod
    def from_record(cls, rec: dict) -> "RunResult":
        return cls(
            config_digest=rec["config_digest"],
            strategy=rec["strategy"],
            seed=rec["seed"],
            batch_size=rec["batch_size"],
            rounds_planned=rec["rounds_planned"],
            backend_kind=rec["backend_kind"],
            hyperparams=HyperParams.from_record(rec["hyperparams"]),
            rounds=tuple(RoundRecord.from_record(r) for r in rec["rounds"]),
            complete=rec["complete"],
            error=rec.get("error"),
        )

    @classmethod
    def load(cls, path: str | Path) -> "RunResult":
        return cls.from_record(json.loads(Path(path).read_text(encoding="utf-8")))

    def save(self, path: str | Path) -> None:
        Path(path).write_bytes(self.to_json_bytes())


def round_rng(run_seed: int, round_index: int) -> np.random.Generator:
    return np.random.default_rng(ids.derive_seed(run_seed, round_index, "sample"))


def fit_seed(run_seed: int, round_index: int) -> int:
    return ids.derive_seed(run_seed, round_index, "fit")


def select_batch(strategy: str, remaining: Sequence[str],
                 probabilities: dict[str, float] | None, batch_size: int,
                 run_seed: int, round_index: int) -> list[str]:
    """Round 1 is random for every strategy; later rounds follow the strategy."""
    effective = RANDOM if round_index == 1 else strategy
    return sample_batch(effective, remaining, probabilities, batch_size,
                        round_rng(run_seed, round_index))


def evaluate_on(backend: ClassifierBackend, model: object,
                test: Sequence[LabeledSRPair]) -> MetricSet:
    labels = [1 if item.is_positive else 0 for item in test]
    probs = backend.predict_proba(model, [item.pair for item in test])
    return metric_set(confusion(labels, probs, threshold=CLASSIFICATION_THRESHOLD))


def run_active_learning(cfg: RunConfig, backend: ClassifierBackend) -> RunResult:
    """Execute one full run; backend failures yield a partial, incomplete result."""
    by_id = {item.pair.pair_id: item for item in cfg.pool}
    remaining = sorted(by_id)
    records: list[RoundRecord] = []
    cumulative: list[LabeledSRPair] = []
    positives = 0
    probabilities: dict[str, float] | None = None
    error: str | None = None

    for round_index in range(1, cfg.rounds + 1):
        try:
            batch = select_batch(cfg.strategy, remaining, probabilities,
                                 cfg.batch_size, cfg.seed, round_index)
            batch_set = set(batch)
            remaining = [i for i in remaining if i not in batch_set]
            for pid in batch:
                item = by_id[pid]
                cumulative.append(item)
                positives += item.is_positive
            model = backend.fit(cumulative, cfg.hyperparams,
                                fit_seed(cfg.seed, round_index))
            metrics = evaluate_on(backend, model, cfg.test)
            if remaining:
                probs = backend.predict_proba(model, [by_id[i].pair for i in remaining])
                probabilities = dict(zip(remaining, probs))
            else:
                probabilities = {}
        except (BackendTransportError, BackendModelError) as exc:
            logger.error("backend failure in round %d: %s", round_index, exc)
            error = f"round {round_index}: {exc}"
            break
        records.append(RoundRecord(
            round_index=round_index,
            sampled_ids=tuple(batch),
            cumulative_train_size=len(cumulative),
            metrics=metrics,
            positives_discovered_cumulative=positives,
        ))

    return RunResult(
        config_digest=cfg.digest(),
        strategy=cfg.strategy,
        seed=cfg.seed,
        batch_size=cfg.batch_size,
        rounds_planned=cfg.rounds,
        backend_kind=cfg.backend_kind,
        hyperparams=cfg.hyperparams,
        rounds=tuple(records),
        complete=len(records) == cfg.rounds,
        error=error,
    )


def run_seeds(master_seed: int, n_runs: int) -> list[int]:
    return [ids.derive_seed(master_seed, i, "run") for i in range(n_runs)]


def multi_run(cfg: RunConfig, n_runs: int, seeds: Sequence[int] | None = None,
              out_dir: str | Path | None = None, workers: int = 1,
              backend_factory=None) -> list[RunResult]:
    """Independent runs of ``cfg`` with per-run seeds; resumable via ``out_dir``.

    ``seeds`` defaults to a stream derived from ``cfg.seed`` and the run
    index, so extending ``n_runs`` never changes earlier runs. Completed runs
    found in ``out_dir`` are loaded instead of recomputed.
    """
    from foodkb.classifier.contract import BaselineBackend

    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    if seeds is None:
        seeds = run_seeds(cfg.seed, n_runs)
    if len(seeds) != n_runs:
        raise ValueError(f"need {n_runs} seeds, got {len(seeds)}")
    if len(set(seeds)) != len(seeds):
        raise ValueError("seeds must be distinct")
    if backend_factory is None:
        backend_factory = BaselineBackend

    out_path = Path(out_dir) if out_dir is not None else None
    if out_path is not None:
        out_path.mkdir(parents=True, exist_ok=True)

    def result_path(run_cfg: RunConfig) -> Path | None:
        if out_path is None:
            return None
        return out_path / f"run_{run_cfg.strategy}_{run_cfg.seed}.json"

    def one_run(seed: int) -> RunResult:
        run_cfg = RunConfig(
            rounds=cfg.rounds, batch_size=cfg.batch_size, strategy=cfg.strategy,
            seed=seed, pool=cfg.pool, val=cfg.val, test=cfg.test,
            hyperparams=cfg.hyperparams, backend_kind=cfg.backend_kind)
        path = result_path(run_cfg)
        if path is not None and path.exists():
            cached = RunResult.load(path)
            if cached.complete and cached.config_digest == run_cfg.digest():
                return cached
        result = run_active_learning(run_cfg, backend_factory())
        if path is not None:
            tmp = path.with_name(path.name + ".tmp")
            tmp.write_bytes(result.to_json_bytes())
            os.replace(tmp, path)  # a crashed run never leaves a partial file
        return result

    if workers <= 1:
        results = [one_run(seed) for seed in seeds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one_run, seeds))

    if out_path is not None:
        _update_manifest(out_path, results)
    return results


def _update_manifest(out_path: Path, results: Sequence[RunResult]) -> None:
    """Index of stored runs keyed by config digest."""
    manifest_path = out_path / "manifest.json"
    manifest: dict[str, dict] = {}
    if manifest_path.exists():
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    for result in results:
        manifest[result.config_digest] = {
            "file": f"run_{result.strategy}_{result.seed}.json",
            "strategy": result.strategy,
            "seed": result.seed,
            "complete": result.complete,
        }
    manifest_path.write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
