"""Project lifecycle and the live human-in-the-loop round engine.

A project owns a fixed SR-pair pool plus held-out val/test splits, a sampling
strategy, and two registered annotators. Rounds proceed exactly like a
simulate-mode run, except that labels come from annotator submissions and
consensus resolution instead of the pre-labeled pool: the sampling RNG
streams, training seeds, and evaluation are the same code, so scripted
annotators replaying a labeled pool reproduce a simulate run byte for byte.

All state is persisted under the project directory; the process can restart
mid-round without loss. Mutations are serialized through a per-project lock,
and training runs on a single background worker with status polling.
"""

from __future__ import annotations

import json
import logging
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

from foodkb import ids
from foodkb.active.runner import (
    RoundRecord,
    RunConfig,
    RunResult,
    evaluate_on,
    fit_seed,
    select_batch,
)
from foodkb.annotations.labels import LABELS, NEGATIVE, SKIP, AnnotationRecord, LabeledSRPair
from foodkb.annotations.splits import read_labeled
from foodkb.annotations.store import AnnotationStore, UnknownPairError
from foodkb.classifier.baseline import HyperParams
from foodkb.classifier.contract import BaselineBackend, ClassifierBackend
from foodkb.classifier.remote import RemoteBackend
from foodkb.extract.pairs import SRPair, read_pairs
from foodkb.kb.store import KBStore

logger = logging.getLogger(__name__)

STATES = ("ingesting", "annotating", "running", "complete")


def atomic_write(path: Path, data: str | bytes) -> None:
    """Write-and-rename so concurrent readers never see a partial file."""
    tmp = path.with_name(path.name + ".tmp")
    if isinstance(data, str):
        tmp.write_text(data, encoding="utf-8")
    else:
        tmp.write_bytes(data)
    os.replace(tmp, path)


class ProjectError(ValueError):
    """Validation problem: maps to a 4xx response."""


class ProjectNotFound(KeyError):
    pass


class StateConflict(RuntimeError):
    """The request is valid but the project state forbids it (409)."""


@dataclass(frozen=True)
class ProjectConfig:
    project_id: str
    strategy: str
    rounds: int
    batch_size: int
    seed: int
    hyperparams: HyperParams
    pool_path: str
    val_path: str
    test_path: str
    annotators: tuple[dict, ...]
    backend_kind: str = "baseline"
    backend_url: str | None = None

    def to_record(self) -> dict:
        return {
            "project_id": self.project_id,
            "strategy": self.strategy,
            "rounds": self.rounds,
            "batch_size": self.batch_size,
            "seed": self.seed,
            "hyperparams": self.hyperparams.to_record(),
            "pool_path": self.pool_path,
            "val_path": self.val_path,
            "test_path": self.test_path,
            "annotators": list(self.annotators),
            "backend_kind": self.backend_kind,
            "backend_url": self.backend_url,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "ProjectConfig":
        return cls(
            project_id=rec["project_id"],
            strategy=rec["strategy"],
            rounds=rec["rounds"],
            batch_size=rec["batch_size"],
            seed=rec["seed"],
            hyperparams=HyperParams.from_record(rec["hyperparams"]),
            pool_path=rec["pool_path"],
            val_path=rec["val_path"],
            test_path=rec["test_path"],
            annotators=tuple(rec["annotators"]),
            backend_kind=rec.get("backend_kind", "baseline"),
            backend_url=rec.get("backend_url"),
        )


def _read_pool_pairs(path: Path) -> list[SRPair]:
    """Pool files may carry labeled or unlabeled records; labels are ignored here."""
    first = ""
    with path.open("r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                first = line
                break
    if not first:
        raise ProjectError(f"empty pool file: {path}")
    record = json.loads(first)
    if "pair" in record and "label" in record:
        return [item.pair for item in read_labeled(path)]
    return list(read_pairs(path))


class Project:
    """Accessor for one project directory; cheap to construct per request."""

    def __init__(self, root: Path) -> None:
        self.root = root
        config_path = root / "project.json"
        if not config_path.exists():
            raise ProjectNotFound(root.name)
        data = json.loads(config_path.read_text(encoding="utf-8"))
        self.config = ProjectConfig.from_record(data["config"])
        self.created_at = data["created_at"]

    # -- persisted state ----------------------------------------------------

    @property
    def store(self) -> AnnotationStore:
        return AnnotationStore(self.root / "annotations.db")

    def batch_path(self, round_index: int) -> Path:
        return self.root / "batches" / f"round_{round_index}.json"

    def round_path(self, round_index: int) -> Path:
        return self.root / "rounds" / f"round_{round_index}.json"

    def probs_path(self, round_index: int) -> Path:
        return self.root / "probs" / f"round_{round_index}.json"

    def curves_path(self, round_index: int) -> Path:
        return self.root / "curves" / f"round_{round_index}.json"

    def job_path(self, round_index: int) -> Path:
        return self.root / "jobs" / f"round_{round_index}.json"

    def result_path(self) -> Path:
        return self.root / "result.json"

    def completed_rounds(self) -> int:
        rounds_dir = self.root / "rounds"
        if not rounds_dir.exists():
            return 0
        return len(list(rounds_dir.glob("round_*.json")))

    @property
    def state(self) -> str:
        done = self.completed_rounds()
        if done >= self.config.rounds:
            return "complete"
        if done > 0 or self.batch_path(1).exists():
            return "running"
        return "annotating"

    def current_round(self) -> int:
        return min(self.completed_rounds() + 1, self.config.rounds)

    def pool_pairs(self) -> list[SRPair]:
        return _read_pool_pairs(self.root / "pool.jsonl")

    def test_pairs(self) -> list[LabeledSRPair]:
        return list(read_labeled(self.root / "test.jsonl"))

    def round_records(self) -> list[RoundRecord]:
        out = []
        for i in range(1, self.completed_rounds() + 1):
            rec = json.loads(self.round_path(i).read_text(encoding="utf-8"))
            out.append(RoundRecord.from_record(rec))
        return out

    def batch(self, round_index: int) -> dict | None:
        path = self.batch_path(round_index)
        if not path.exists():
            return None
        return json.loads(path.read_text(encoding="utf-8"))

    def find_batch(self, batch_id: str) -> dict | None:
        batches_dir = self.root / "batches"
        if not batches_dir.exists():
            return None
        for path in sorted(batches_dir.glob("round_*.json")):
            data = json.loads(path.read_text(encoding="utf-8"))
            if data["batch_id"] == batch_id:
                return data
        return None

    def job_status(self, round_index: int) -> dict:
        path = self.job_path(round_index)
        if not path.exists():
            return {"status": "pending", "error": None}
        return json.loads(path.read_text(encoding="utf-8"))

    def annotator_ids(self) -> list[str]:
        return sorted(a["id"] for a in self.config.annotators)

    def check_token(self, annotator_id: str, token: str) -> bool:
        for a in self.config.annotators:
            if a["id"] == annotator_id:
                return a.get("token", "") == token
        return False


class ProjectManager:
    def __init__(self, root: str | Path, backend: ClassifierBackend | None = None) -> None:
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()
        self._worker = ThreadPoolExecutor(max_workers=1)
        self._backend_override = backend

    def _lock(self, project_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(project_id, threading.Lock())

    def _backend_for(self, project: Project) -> ClassifierBackend:
        if self._backend_override is not None:
            return self._backend_override
        if project.config.backend_kind == "external":
            if not project.config.backend_url:
                raise ProjectError("external backend requires backend_url")
            return RemoteBackend(project.config.backend_url)
        return BaselineBackend()

    # -- lifecycle ----------------------------------------------------------

    def create_project(self, config: ProjectConfig) -> Project:
        for path_name in ("pool_path", "val_path", "test_path"):
            path = Path(getattr(config, path_name))
            if not path.exists():
                raise ProjectError(f"{path_name} does not exist: {path}")
        if len(config.annotators) != 2:
            raise ProjectError("exactly two annotators are required")
        if config.strategy not in ("uncertainty", "random"):
            raise ProjectError(f"unknown strategy {config.strategy!r}")
        project_dir = self.root / config.project_id
        if project_dir.exists():
            raise StateConflict(f"project {config.project_id} already exists")
        project_dir.mkdir(parents=True)
        for sub in ("batches", "rounds", "probs", "jobs", "curves"):
            (project_dir / sub).mkdir()

        # Copy the inputs so the project is self-contained and restartable.
        pool = _read_pool_pairs(Path(config.pool_path))
        if config.rounds * config.batch_size > len(pool):
            raise ProjectError(
                f"rounds x batch_size exceeds pool size {len(pool)}")
        with (project_dir / "pool.jsonl").open("w", encoding="utf-8") as fh:
            for pair in pool:
                fh.write(json.dumps(pair.to_record(), sort_keys=True,
                                    ensure_ascii=False) + "\n")
        for name, src in (("val.jsonl", config.val_path), ("test.jsonl", config.test_path)):
            (project_dir / name).write_bytes(Path(src).read_bytes())

        atomic_write(project_dir / "project.json",
                     json.dumps({"config": config.to_record(),
                                 "created_at": _now()},
                                indent=2, sort_keys=True) + "\n")

        project = Project(project_dir)
        store = project.store
        store.register_pairs(pool)
        for annotator in config.annotators:
            store.register_annotator(annotator["id"])
        logger.info("created project %s with %d pool pairs", config.project_id, len(pool))
        return project

    def get_project(self, project_id: str) -> Project:
        return Project(self.root / project_id)

    def list_projects(self) -> list[str]:
        return sorted(p.name for p in self.root.iterdir()
                      if (p / "project.json").exists())

    # -- round engine -------------------------------------------------------

    def next_batch(self, project_id: str, round_index: int) -> dict:
        """The sampler's batch for the round; idempotent until the round advances."""
        with self._lock(project_id):
            project = self.get_project(project_id)
            done = project.completed_rounds()
            if round_index < 1 or round_index > project.config.rounds:
                raise ProjectError(f"round {round_index} out of range")
            if round_index <= done:
                raise StateConflict(f"round {round_index} already completed")
            if round_index > done + 1:
                raise StateConflict(f"model pending: round {done + 1} not trained yet")
            existing = project.batch(round_index)
            if existing is not None:
                return existing

            pool = project.pool_pairs()
            sampled_before: set[str] = set()
            for r in range(1, round_index):
                batch = project.batch(r)
                sampled_before.update(batch["pair_ids"])
            remaining = sorted(p.pair_id for p in pool if p.pair_id not in sampled_before)
            probabilities = None
            if round_index >= 2:
                probs_data = json.loads(
                    project.probs_path(round_index - 1).read_text(encoding="utf-8"))
                probabilities = probs_data["probabilities"]
            pair_ids = select_batch(project.config.strategy, remaining, probabilities,
                                    project.config.batch_size, project.config.seed,
                                    round_index)
            batch_data = {
                "batch_id": ids.config_digest(
                    {"project": project_id, "round": round_index, "ids": pair_ids})[:16],
                "round_index": round_index,
                "pair_ids": pair_ids,
                "created_at": _now(),
            }
            atomic_write(project.batch_path(round_index),
                         json.dumps(batch_data, indent=2, sort_keys=True) + "\n")
            return batch_data

    def batch_view(self, project_id: str, round_index: int) -> dict:
        """Batch plus full item payloads and per-annotator label status."""
        project = self.get_project(project_id)
        batch = project.batch(round_index)
        if batch is None:
            batch = self.next_batch(project_id, round_index)
        store = project.store
        current = {(rec.pair_id, rec.annotator_id): rec.label
                   for rec in store.current_annotations()}
        items = []
        for pid in batch["pair_ids"]:
            pair = store.get_pair(pid)
            labeled_by = {ann: current[(pid, ann)] for ann in project.annotator_ids()
                          if (pid, ann) in current}
            items.append({"pair": pair.to_record(), "labels": labeled_by})
        return {**batch, "items": items}

    def submit_labels(self, project_id: str, batch_id: str, annotator_id: str,
                      token: str, labels: dict[str, str]) -> dict:
        """Record one annotator's labels for a batch; item-level rejections."""
        with self._lock(project_id):
            project = self.get_project(project_id)
            if not project.check_token(annotator_id, token):
                raise ProjectError(f"bad token for annotator {annotator_id!r}")
            batch = project.find_batch(batch_id)
            if batch is None:
                raise ProjectError(f"unknown batch {batch_id!r}")
            if batch["round_index"] <= project.completed_rounds():
                raise StateConflict("round closed")

            batch_ids = set(batch["pair_ids"])
            store = project.store
            accepted = 0
            rejected: list[dict] = []
            now = _now()
            for pid, label in labels.items():
                if pid not in batch_ids:
                    rejected.append({"pair_id": pid, "reason": "not in batch"})
                    continue
                if label not in LABELS:
                    rejected.append({"pair_id": pid, "reason": f"unknown label {label!r}"})
                    continue
                try:
                    store.record_annotation(AnnotationRecord(
                        pair_id=pid, annotator_id=annotator_id, label=label,
                        annotated_at=now))
                except UnknownPairError:
                    rejected.append({"pair_id": pid, "reason": "unknown pair"})
                    continue
                accepted += 1
            return {
                "accepted": accepted,
                "rejected": rejected,
                **self._batch_progress(project, batch),
            }

    def _batch_progress(self, project: Project, batch: dict) -> dict:
        store = project.store
        current = {(rec.pair_id, rec.annotator_id): rec.label
                   for rec in store.current_annotations()}
        annotators = project.annotator_ids()
        per_annotator = {
            ann: sum(1 for pid in batch["pair_ids"] if (pid, ann) in current)
            for ann in annotators
        }
        total = len(batch["pair_ids"])
        both_done = all(count == total for count in per_annotator.values())
        consensus = conflicts = skips = 0
        if len(annotators) == 2:
            a, b = annotators
            for pid in batch["pair_ids"]:
                la, lb = current.get((pid, a)), current.get((pid, b))
                if la is None or lb is None:
                    continue
                if SKIP in (la, lb):
                    skips += 1
                elif la != lb:
                    conflicts += 1
                else:
                    consensus += 1
        return {
            "progress": per_annotator,
            "batch_size": total,
            "complete": both_done,
            "consensus": consensus,
            "conflicts": conflicts,
            "skips": skips,
            "trainable": both_done and consensus > 0,
        }

    def batch_progress(self, project_id: str, round_index: int) -> dict:
        project = self.get_project(project_id)
        batch = project.batch(round_index)
        if batch is None:
            raise ProjectError(f"no batch for round {round_index}")
        return {**batch, **self._batch_progress(project, batch)}

    def advance_round(self, project_id: str, round_index: int) -> dict:
        """Queue training for the round on the background worker; returns job status."""
        with self._lock(project_id):
            project = self.get_project(project_id)
            done = project.completed_rounds()
            if round_index != done + 1:
                raise StateConflict(
                    f"cannot advance round {round_index}; next is {done + 1}")
            if round_index > project.config.rounds:
                raise StateConflict("project already complete")
            batch = project.batch(round_index)
            if batch is None:
                raise StateConflict(f"no batch issued for round {round_index}")
            progress = self._batch_progress(project, batch)
            if not progress["complete"]:
                raise StateConflict("batch incomplete: both annotators must finish")
            training = self._cumulative_training_set(project, round_index)
            if not training:
                raise ProjectError("no training data: zero consensus pairs")
            status = project.job_status(round_index)
            if status["status"] in ("running", "done"):
                return status
            self._write_job(project, round_index, "running", None)
            self._worker.submit(self._train_round, project_id, round_index)
            return project.job_status(round_index)

    @staticmethod
    def _write_job(project: Project, round_index: int, status: str,
                   error: str | None) -> None:
        atomic_write(project.job_path(round_index),
                     json.dumps({"status": status, "error": error},
                                sort_keys=True) + "\n")

    def _cumulative_training_set(self, project: Project,
                                 through_round: int) -> list[LabeledSRPair]:
        """Consensus-labeled sampled pairs, in sampling order (matches simulate)."""
        store = project.store
        consensus, _ = store.consensus(tuple(project.annotator_ids()))
        by_id = {item.pair.pair_id: item for item in consensus}
        ordered: list[LabeledSRPair] = []
        for r in range(1, through_round + 1):
            batch = project.batch(r)
            if batch is None:
                break
            for pid in batch["pair_ids"]:
                if pid in by_id:
                    ordered.append(by_id[pid])
        return ordered

    def _train_round(self, project_id: str, round_index: int) -> None:
        project = self.get_project(project_id)
        try:
            cfg = project.config
            training = self._cumulative_training_set(project, round_index)
            test = project.test_pairs()
            backend = self._backend_for(project)
            model = backend.fit(training, cfg.hyperparams,
                                fit_seed(cfg.seed, round_index))
            metrics = evaluate_on(backend, model, test)
            self._write_curves(project, round_index, backend, model, test)

            pool = project.pool_pairs()
            sampled: set[str] = set()
            for r in range(1, round_index + 1):
                sampled.update(project.batch(r)["pair_ids"])
            remaining_pairs = sorted(
                (p for p in pool if p.pair_id not in sampled),
                key=lambda p: p.pair_id)
            probs = backend.predict_proba(model, remaining_pairs) if remaining_pairs else []
            atomic_write(project.probs_path(round_index),
                         json.dumps({"probabilities": dict(zip(
                             (p.pair_id for p in remaining_pairs), probs))},
                             sort_keys=True) + "\n")

            positives = sum(1 for item in training if item.is_positive)
            record = RoundRecord(
                round_index=round_index,
                sampled_ids=tuple(project.batch(round_index)["pair_ids"]),
                cumulative_train_size=len(training),
                metrics=metrics,
                positives_discovered_cumulative=positives,
            )
            atomic_write(project.round_path(round_index),
                         json.dumps(record.to_record(),
                                    indent=2, sort_keys=True) + "\n")
            if round_index == project.config.rounds:
                self._write_result(project)
            self._write_job(project, round_index, "done", None)
        except Exception as exc:  # persisted as failed, retryable
            logger.exception("training round %d failed", round_index)
            self._write_job(project, round_index, "failed", str(exc))

    @staticmethod
    def _write_curves(project: Project, round_index: int, backend, model,
                      test: Sequence[LabeledSRPair]) -> None:
        """Test-set PR/ROC points for the dashboard; not part of the RunResult."""
        from foodkb.metrics.curves import pr_curve, roc_curve

        labels = [1 if item.is_positive else 0 for item in test]
        probs = backend.predict_proba(model, [item.pair for item in test])
        payload = {"round_index": round_index}
        try:
            for name, fn in (("pr", pr_curve), ("roc", roc_curve)):
                curve = fn(labels, probs)
                payload[name] = {
                    "thresholds": [t if t != float("inf") else None
                                   for t in curve.thresholds],
                    "xs": list(curve.xs), "ys": list(curve.ys),
                    "area": curve.area,
                }
        except ValueError:
            return  # single-class test set: no curves to plot
        atomic_write(project.curves_path(round_index),
                     json.dumps(payload, sort_keys=True) + "\n")

    def curves_view(self, project_id: str, round_index: int | None = None) -> dict:
        project = self.get_project(project_id)
        done = project.completed_rounds()
        if done == 0:
            raise StateConflict("no trained rounds yet")
        index = round_index if round_index is not None else done
        path = project.curves_path(index)
        if not path.exists():
            raise ProjectError(f"no curves for round {index}")
        return json.loads(path.read_text(encoding="utf-8"))

    def _write_result(self, project: Project) -> None:
        cfg = project.config
        pool_labeled = self._pool_as_labeled(project)
        run_cfg = RunConfig(
            rounds=cfg.rounds, batch_size=cfg.batch_size, strategy=cfg.strategy,
            seed=cfg.seed, pool=tuple(pool_labeled),
            val=(), test=tuple(project.test_pairs()),
            hyperparams=cfg.hyperparams, backend_kind=cfg.backend_kind)
        result = RunResult(
            config_digest=run_cfg.digest(),
            strategy=cfg.strategy,
            seed=cfg.seed,
            batch_size=cfg.batch_size,
            rounds_planned=cfg.rounds,
            backend_kind=cfg.backend_kind,
            hyperparams=cfg.hyperparams,
            rounds=tuple(project.round_records()),
            complete=True,
        )
        atomic_write(project.result_path(), result.to_json_bytes())

    def _pool_as_labeled(self, project: Project) -> list[LabeledSRPair]:
        """Pool pairs with their consensus labels, for the result config digest."""
        store = project.store
        consensus, _ = store.consensus(tuple(project.annotator_ids()))
        by_id = {item.pair.pair_id: item for item in consensus}
        out = []
        for pair in project.pool_pairs():
            item = by_id.get(pair.pair_id)
            if item is not None:
                out.append(item)
            else:
                out.append(LabeledSRPair(pair=pair, label=NEGATIVE))
        return out

    # -- read models ---------------------------------------------------------

    def project_view(self, project_id: str) -> dict:
        project = self.get_project(project_id)
        view = {
            "project_id": project.config.project_id,
            "state": project.state,
            "created_at": project.created_at,
            "strategy": project.config.strategy,
            "rounds": project.config.rounds,
            "batch_size": project.config.batch_size,
            "seed": project.config.seed,
            "backend_kind": project.config.backend_kind,
            "completed_rounds": project.completed_rounds(),
            "current_round": project.current_round(),
            "annotators": project.annotator_ids(),
        }
        current = project.current_round()
        if project.batch(current) is not None:
            view["current_batch"] = self.batch_progress(project_id, current)
        view["training"] = project.job_status(current)
        return view

    def metrics_view(self, project_id: str) -> dict:
        project = self.get_project(project_id)
        return {"rounds": [r.to_record() for r in project.round_records()]}

    def discovery_view(self, project_id: str) -> dict:
        project = self.get_project(project_id)
        curve = [[r.round_index, r.positives_discovered_cumulative]
                 for r in project.round_records()]
        return {"curve": curve}

    def result_view(self, project_id: str) -> dict:
        project = self.get_project(project_id)
        path = project.result_path()
        if not path.exists():
            raise StateConflict("project not complete")
        return json.loads(path.read_text(encoding="utf-8"))

    def kb_view(self, project_id: str, min_confidence: float = 0.0) -> dict:
        """Rebuild the KB from current consensus positives and return it."""
        project = self.get_project(project_id)
        consensus, _ = project.store.consensus(tuple(project.annotator_ids()))
        kb_path = project.root / "kb.sqlite"
        if kb_path.exists():
            kb_path.unlink()
        kb = KBStore(kb_path)
        kb.add_labeled_positives(consensus, now=_now())
        triples = [
            {"food": t.food, "part": t.part, "chemical": t.chemical,
             "confidence": round(t.confidence, 6),
             "evidence_count": len(t.evidence),
             "source_docs": sorted({e.source_doc for e in t.evidence})}
            for t in kb.query(min_confidence=min_confidence)
        ]
        return {"triples": triples}


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()
