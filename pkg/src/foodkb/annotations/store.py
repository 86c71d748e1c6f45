"""Persistent annotation store with consensus resolution.

Backed by a single-file sqlite database: current labels are upserted per
(pair, annotator) with last-write-wins, while an append-only audit table
retains the full history. Consensus keeps a pair only when both designated
annotators assigned the same non-skip label.
"""

from __future__ import annotations

import json
import sqlite3
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from foodkb.annotations.labels import SKIP, AnnotationRecord, LabeledSRPair
from foodkb.extract.pairs import SRPair

_SCHEMA = """
CREATE TABLE IF NOT EXISTS pairs (
    pair_id TEXT PRIMARY KEY,
    sentence_id TEXT NOT NULL,
    relation_text TEXT NOT NULL,
    record TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS annotators (
    annotator_id TEXT PRIMARY KEY
);
CREATE TABLE IF NOT EXISTS annotations (
    pair_id TEXT NOT NULL,
    annotator_id TEXT NOT NULL,
    label TEXT NOT NULL,
    annotated_at TEXT NOT NULL,
    PRIMARY KEY (pair_id, annotator_id)
);
CREATE TABLE IF NOT EXISTS audit (
    seq INTEGER PRIMARY KEY AUTOINCREMENT,
    pair_id TEXT NOT NULL,
    annotator_id TEXT NOT NULL,
    label TEXT NOT NULL,
    annotated_at TEXT NOT NULL
);
"""


class UnknownPairError(KeyError):
    pass


class UnknownAnnotatorError(KeyError):
    pass


@dataclass(frozen=True)
class ConsensusReport:
    consensus: int
    conflicts: int
    skipped: int
    incomplete: int


class AnnotationStore:
    """Thread-safe store; writes are serialized through one lock."""

    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)
        self._lock = threading.Lock()
        with self._connect() as conn:
            conn.executescript(_SCHEMA)

    def _connect(self) -> sqlite3.Connection:
        conn = sqlite3.connect(self.path)
        conn.execute("PRAGMA foreign_keys = ON")
        return conn

    # -- registration ------------------------------------------------------

    def register_pairs(self, pairs: Iterable[SRPair]) -> int:
        rows = [
            (p.pair_id, p.sentence_id, p.relation.relation_text,
             json.dumps(p.to_record(), sort_keys=True, ensure_ascii=False))
            for p in pairs
        ]
        with self._lock, self._connect() as conn:
            conn.executemany(
                "INSERT OR IGNORE INTO pairs (pair_id, sentence_id, relation_text, record) "
                "VALUES (?, ?, ?, ?)", rows)
        return len(rows)

    def register_annotator(self, annotator_id: str) -> None:
        with self._lock, self._connect() as conn:
            conn.execute("INSERT OR IGNORE INTO annotators (annotator_id) VALUES (?)",
                         (annotator_id,))

    def annotator_ids(self) -> list[str]:
        with self._connect() as conn:
            rows = conn.execute(
                "SELECT annotator_id FROM annotators ORDER BY annotator_id").fetchall()
        return [r[0] for r in rows]

    def get_pair(self, pair_id: str) -> SRPair:
        with self._connect() as conn:
            row = conn.execute("SELECT record FROM pairs WHERE pair_id = ?",
                               (pair_id,)).fetchone()
        if row is None:
            raise UnknownPairError(pair_id)
        return SRPair.from_record(json.loads(row[0]))

    def all_pairs(self) -> list[SRPair]:
        with self._connect() as conn:
            rows = conn.execute("SELECT record FROM pairs ORDER BY pair_id").fetchall()
        return [SRPair.from_record(json.loads(r[0])) for r in rows]

    # -- annotation --------------------------------------------------------

    def record_annotation(self, rec: AnnotationRecord) -> AnnotationRecord:
        """Upsert the current label; every submission is appended to the audit log."""
        with self._lock, self._connect() as conn:
            known_pair = conn.execute("SELECT 1 FROM pairs WHERE pair_id = ?",
                                      (rec.pair_id,)).fetchone()
            if known_pair is None:
                raise UnknownPairError(rec.pair_id)
            known_ann = conn.execute(
                "SELECT 1 FROM annotators WHERE annotator_id = ?",
                (rec.annotator_id,)).fetchone()
            if known_ann is None:
                raise UnknownAnnotatorError(rec.annotator_id)
            conn.execute(
                "INSERT INTO annotations (pair_id, annotator_id, label, annotated_at) "
                "VALUES (?, ?, ?, ?) "
                "ON CONFLICT(pair_id, annotator_id) DO UPDATE SET "
                "label = excluded.label, annotated_at = excluded.annotated_at",
                (rec.pair_id, rec.annotator_id, rec.label, rec.annotated_at))
            conn.execute(
                "INSERT INTO audit (pair_id, annotator_id, label, annotated_at) "
                "VALUES (?, ?, ?, ?)",
                (rec.pair_id, rec.annotator_id, rec.label, rec.annotated_at))
        return rec

    def current_annotations(self) -> list[AnnotationRecord]:
        with self._connect() as conn:
            rows = conn.execute(
                "SELECT pair_id, annotator_id, label, annotated_at FROM annotations "
                "ORDER BY pair_id, annotator_id").fetchall()
        return [AnnotationRecord(*row) for row in rows]

    def history(self, pair_id: str, annotator_id: str) -> list[AnnotationRecord]:
        with self._connect() as conn:
            rows = conn.execute(
                "SELECT pair_id, annotator_id, label, annotated_at FROM audit "
                "WHERE pair_id = ? AND annotator_id = ? ORDER BY seq",
                (pair_id, annotator_id)).fetchall()
        return [AnnotationRecord(*row) for row in rows]

    def consensus(self, annotators: tuple[str, str] | None = None
                  ) -> tuple[list[LabeledSRPair], ConsensusReport]:
        """Consensus-resolve the current snapshot against the registered corpus."""
        if annotators is None:
            registered = self.annotator_ids()
            if len(registered) != 2:
                raise ValueError(
                    f"consensus needs exactly two annotators, have {len(registered)}")
            annotators = (registered[0], registered[1])
        return consensus_filter(self.current_annotations(), self.all_pairs(), annotators)

    # -- import/export -----------------------------------------------------

    def export_annotations(self, path: str | Path) -> int:
        """Tab-delimited export of the current labels."""
        records = self.current_annotations()
        with Path(path).open("w", encoding="utf-8") as fh:
            fh.write("pair_id\tannotator_id\tlabel\tannotated_at\n")
            for rec in records:
                fh.write(f"{rec.pair_id}\t{rec.annotator_id}\t{rec.label}\t"
                         f"{rec.annotated_at}\n")
        return len(records)

    def import_annotations(self, path: str | Path) -> int:
        count = 0
        with Path(path).open("r", encoding="utf-8") as fh:
            header = fh.readline()
            if not header.startswith("pair_id"):
                raise ValueError("missing header line")
            for line in fh:
                if not line.strip():
                    continue
                pair_id, annotator_id, label, annotated_at = line.rstrip("\n").split("\t")
                self.record_annotation(AnnotationRecord(
                    pair_id=pair_id, annotator_id=annotator_id, label=label,
                    annotated_at=annotated_at))
                count += 1
        return count


def consensus_filter(records: Sequence[AnnotationRecord], corpus: Sequence[SRPair],
                     annotators: tuple[str, str]
                     ) -> tuple[list[LabeledSRPair], ConsensusReport]:
    """Keep pairs where both designated annotators agree on a non-skip label.

    Incomplete pairs (fewer than two labels) are excluded and counted, not
    errors. Output follows corpus order.
    """
    ann_a, ann_b = annotators
    by_pair: dict[str, dict[str, str]] = {}
    for rec in records:
        if rec.annotator_id in (ann_a, ann_b):
            by_pair.setdefault(rec.pair_id, {})[rec.annotator_id] = rec.label

    kept: list[LabeledSRPair] = []
    conflicts = skipped = incomplete = 0
    for pair in corpus:
        labels = by_pair.get(pair.pair_id, {})
        if len(labels) < 2:
            if labels:
                incomplete += 1
            continue
        label_a, label_b = labels[ann_a], labels[ann_b]
        if SKIP in (label_a, label_b):
            skipped += 1
            continue
        if label_a != label_b:
            conflicts += 1
            continue
        kept.append(LabeledSRPair(pair=pair, label=label_a))
    report = ConsensusReport(consensus=len(kept), conflicts=conflicts,
                             skipped=skipped, incomplete=incomplete)
    return kept, report


def labels_by_pair(labeled: Sequence[LabeledSRPair]) -> Mapping[str, str]:
    return {item.pair.pair_id: item.label for item in labeled}
