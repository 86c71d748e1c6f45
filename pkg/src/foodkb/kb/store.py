"""The knowledge base: deduplicated food-chemical *contains* triples.

Positively-annotated or positively-classified SR pairs aggregate into
(food, optional part, chemical) triples carrying their evidence sentences.
Confidence is 1.0 as soon as any evidence comes from a human annotation,
otherwise the maximum probability over prediction evidence; appending
evidence never lowers it.
"""

from __future__ import annotations

import json
import sqlite3
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable

from foodkb.extract.relations import RelationCandidate

ANNOTATION = "annotation"
PREDICTION = "prediction"

_SCHEMA = """
CREATE TABLE IF NOT EXISTS triples (
    food TEXT NOT NULL,
    part TEXT NOT NULL,
    chemical TEXT NOT NULL,
    confidence REAL NOT NULL,
    first_seen TEXT NOT NULL,
    last_updated TEXT NOT NULL,
    PRIMARY KEY (food, part, chemical)
);
CREATE TABLE IF NOT EXISTS evidence (
    food TEXT NOT NULL,
    part TEXT NOT NULL,
    chemical TEXT NOT NULL,
    sentence_id TEXT NOT NULL,
    source_doc TEXT NOT NULL,
    origin TEXT NOT NULL,
    probability REAL,
    PRIMARY KEY (food, part, chemical, sentence_id, origin)
);
"""

# part is stored as "" for part-less triples: sqlite PRIMARY KEY columns
# reject NULL semantics we want here.
_NO_PART = ""


@dataclass(frozen=True)
class Evidence:
    sentence_id: str
    source_doc: str
    origin: str
    probability: float | None = None

    def __post_init__(self) -> None:
        if self.origin not in (ANNOTATION, PREDICTION):
            raise ValueError(f"unknown evidence origin {self.origin!r}")
        if self.origin == PREDICTION and self.probability is None:
            raise ValueError("prediction evidence requires a probability")
        if self.origin == ANNOTATION and self.probability is not None:
            raise ValueError("annotation evidence carries no probability")


@dataclass(frozen=True)
class KBTriple:
    food: str
    part: str | None
    chemical: str
    confidence: float
    evidence: tuple[Evidence, ...]
    first_seen: str
    last_updated: str

    def key(self) -> tuple[str, str, str]:
        return (self.food, self.part or _NO_PART, self.chemical)


class KBStore:
    """Single-file sqlite store; one writer, consistent readers."""

    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)
        self._lock = threading.Lock()
        with self._connect() as conn:
            conn.executescript(_SCHEMA)

    def _connect(self) -> sqlite3.Connection:
        return sqlite3.connect(self.path)

    def upsert_triple(self, rel: RelationCandidate, ev: Evidence,
                      now: str | None = None) -> KBTriple:
        """Create or merge on the triple key; recompute confidence."""
        now = now or datetime.now(timezone.utc).isoformat()
        part = rel.part if rel.part is not None else _NO_PART
        key = (rel.food, part, rel.chemical)
        with self._lock, self._connect() as conn:
            row = conn.execute(
                "SELECT first_seen FROM triples WHERE food=? AND part=? AND chemical=?",
                key).fetchone()
            if row is None:
                conn.execute(
                    "INSERT INTO triples (food, part, chemical, confidence, "
                    "first_seen, last_updated) VALUES (?, ?, ?, 0.0, ?, ?)",
                    key + (now, now))
            conn.execute(
                "INSERT OR IGNORE INTO evidence (food, part, chemical, sentence_id, "
                "source_doc, origin, probability) VALUES (?, ?, ?, ?, ?, ?, ?)",
                key + (ev.sentence_id, ev.source_doc, ev.origin, ev.probability))
            confidence = self._confidence(conn, key)
            conn.execute(
                "UPDATE triples SET confidence=?, last_updated=? "
                "WHERE food=? AND part=? AND chemical=?",
                (confidence, now) + key)
        return self._get(key)

    @staticmethod
    def _confidence(conn: sqlite3.Connection, key: tuple[str, str, str]) -> float:
        has_annotation = conn.execute(
            "SELECT 1 FROM evidence WHERE food=? AND part=? AND chemical=? "
            "AND origin=? LIMIT 1", key + (ANNOTATION,)).fetchone()
        if has_annotation:
            return 1.0
        row = conn.execute(
            "SELECT MAX(probability) FROM evidence WHERE food=? AND part=? AND "
            "chemical=? AND origin=?", key + (PREDICTION,)).fetchone()
        return float(row[0]) if row and row[0] is not None else 0.0

    def _get(self, key: tuple[str, str, str]) -> KBTriple:
        with self._connect() as conn:
            trow = conn.execute(
                "SELECT confidence, first_seen, last_updated FROM triples "
                "WHERE food=? AND part=? AND chemical=?", key).fetchone()
            if trow is None:
                raise KeyError(key)
            erows = conn.execute(
                "SELECT sentence_id, source_doc, origin, probability FROM evidence "
                "WHERE food=? AND part=? AND chemical=? "
                "ORDER BY sentence_id, origin", key).fetchall()
        return KBTriple(
            food=key[0], part=key[1] or None, chemical=key[2],
            confidence=trow[0], first_seen=trow[1], last_updated=trow[2],
            evidence=tuple(Evidence(sentence_id=e[0], source_doc=e[1], origin=e[2],
                                    probability=e[3]) for e in erows),
        )

    def query(self, food: str | None = None, chemical: str | None = None,
              min_confidence: float = 0.0) -> list[KBTriple]:
        """Matching triples in stable (food, part, chemical) order."""
        sql = ("SELECT food, part, chemical FROM triples WHERE confidence >= ?")
        params: list[object] = [min_confidence]
        if food is not None:
            sql += " AND food = ?"
            params.append(food)
        if chemical is not None:
            sql += " AND chemical = ?"
            params.append(chemical)
        sql += " ORDER BY food, part, chemical"
        with self._connect() as conn:
            keys = conn.execute(sql, params).fetchall()
        return [self._get(tuple(k)) for k in keys]

    # -- export / import ----------------------------------------------------

    def export_delimited(self, path: str | Path) -> int:
        """Byte-deterministic tab-delimited export, 6-decimal confidence."""
        triples = self.query()
        with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
            fh.write("food\tpart\tchemical\tconfidence\tevidence_count\tsource_docs\n")
            for t in triples:
                docs = ";".join(sorted({e.source_doc for e in t.evidence}))
                fh.write(f"{t.food}\t{t.part or ''}\t{t.chemical}\t"
                         f"{t.confidence:.6f}\t{len(t.evidence)}\t{docs}\n")
        return len(triples)

    def export_records(self, path: str | Path) -> int:
        """Newline-delimited JSON export with full evidence; byte-deterministic."""
        triples = self.query()
        with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
            for t in triples:
                rec = {
                    "food": t.food, "part": t.part, "chemical": t.chemical,
                    "confidence": round(t.confidence, 6),
                    "evidence": [
                        {"sentence_id": e.sentence_id, "source_doc": e.source_doc,
                         "origin": e.origin, "probability": e.probability}
                        for e in t.evidence
                    ],
                    "first_seen": t.first_seen, "last_updated": t.last_updated,
                }
                fh.write(json.dumps(rec, sort_keys=True, ensure_ascii=False))
                fh.write("\n")
        return len(triples)

    def import_records(self, path: str | Path) -> int:
        """Inverse of :meth:`export_records`; merges into the current store."""
        count = 0
        with Path(path).open("r", encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                rec = json.loads(line)
                rel = RelationCandidate(food=rec["food"], part=rec["part"],
                                        chemical=rec["chemical"])
                for e in rec["evidence"]:
                    self.upsert_triple(rel, Evidence(
                        sentence_id=e["sentence_id"], source_doc=e["source_doc"],
                        origin=e["origin"], probability=e["probability"]),
                        now=rec["last_updated"])
                count += 1
        return count

    def add_labeled_positives(self, labeled: Iterable, now: str | None = None) -> int:
        """Admit consensus-positive SR pairs as annotation evidence."""
        count = 0
        for item in labeled:
            if not item.is_positive:
                continue
            self.upsert_triple(item.pair.relation, Evidence(
                sentence_id=item.pair.sentence_id,
                source_doc=item.pair.source_doc,
                origin=ANNOTATION), now=now)
            count += 1
        return count

    def add_predictions(self, pairs_with_probs: Iterable, min_prob: float,
                        now: str | None = None) -> int:
        """Admit predicted pairs with probability >= ``min_prob``."""
        count = 0
        for pair, prob in pairs_with_probs:
            if prob < min_prob:
                continue
            self.upsert_triple(pair.relation, Evidence(
                sentence_id=pair.sentence_id, source_doc=pair.source_doc,
                origin=PREDICTION, probability=float(prob)), now=now)
            count += 1
        return count
