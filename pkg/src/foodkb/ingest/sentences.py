"""Tagged sentences: the raw unit coming back from the literature search API.

A :class:`TaggedSentence` carries the sentence text, its source document id,
and the entity tags (species/chemical) with character offsets. Records are
persisted as newline-delimited JSON with sorted keys so identical inputs
produce identical bytes.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Iterator

from foodkb import ids
from foodkb.ingest.vocab import FoodVocabulary
from foodkb.textnorm import normalize

logger = logging.getLogger(__name__)

SPECIES = "species"
CHEMICAL = "chemical"
SENTENCE_TAG_CLASSES = (SPECIES, CHEMICAL)


@dataclass(frozen=True)
class EntityTag:
    """A tagged span: ``surface == text[start:end]`` in the owning sentence."""

    start: int
    end: int
    surface: str
    tag_class: str

    def to_record(self) -> dict:
        return {
            "start": self.start,
            "end": self.end,
            "surface": self.surface,
            "tag_class": self.tag_class,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "EntityTag":
        return cls(
            start=int(rec["start"]),
            end=int(rec["end"]),
            surface=str(rec["surface"]),
            tag_class=str(rec["tag_class"]),
        )


class InvalidSpanError(ValueError):
    """An entity tag does not satisfy the span invariants."""


@dataclass(frozen=True)
class TaggedSentence:
    sentence_id: str
    text: str
    source_doc: str
    entity_tags: tuple[EntityTag, ...]
    retrieved_at: str

    @classmethod
    def build(cls, text: str, source_doc: str, entity_tags: Iterable[EntityTag],
              retrieved_at: str) -> "TaggedSentence":
        """Construct with a deterministic content-hash id and validated spans."""
        sent = cls(
            sentence_id=ids.sentence_id(text, source_doc),
            text=text,
            source_doc=source_doc,
            entity_tags=tuple(entity_tags),
            retrieved_at=retrieved_at,
        )
        sent.validate()
        return sent

    def validate(self) -> None:
        for tag in self.entity_tags:
            if not (0 <= tag.start < tag.end <= len(self.text)):
                raise InvalidSpanError(
                    f"span [{tag.start},{tag.end}) out of bounds for sentence "
                    f"{self.sentence_id[:12]} (len {len(self.text)})"
                )
            if self.text[tag.start:tag.end] != tag.surface:
                raise InvalidSpanError(
                    f"surface mismatch at [{tag.start},{tag.end}) in sentence "
                    f"{self.sentence_id[:12]}: {tag.surface!r}"
                )
            if tag.tag_class not in SENTENCE_TAG_CLASSES:
                raise InvalidSpanError(f"unknown tag class {tag.tag_class!r}")

    def tags_of(self, tag_class: str) -> tuple[EntityTag, ...]:
        return tuple(t for t in self.entity_tags if t.tag_class == tag_class)

    def to_record(self) -> dict:
        return {
            "sentence_id": self.sentence_id,
            "text": self.text,
            "source_doc": self.source_doc,
            "entity_tags": [t.to_record() for t in self.entity_tags],
            "retrieved_at": self.retrieved_at,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "TaggedSentence":
        return cls(
            sentence_id=str(rec["sentence_id"]),
            text=str(rec["text"]),
            source_doc=str(rec["source_doc"]),
            entity_tags=tuple(EntityTag.from_record(t) for t in rec["entity_tags"]),
            retrieved_at=str(rec["retrieved_at"]),
        )


def filter_species(sent: TaggedSentence, vocab: FoodVocabulary) -> TaggedSentence:
    """Drop species tags whose normalized surface is not a known food name.

    Chemical tags are untouched. Idempotent; the result may have zero species
    tags (downstream candidate generation then yields nothing).
    """
    kept = tuple(
        tag for tag in sent.entity_tags
        if tag.tag_class != SPECIES or normalize(tag.surface) in vocab.names
    )
    if kept == sent.entity_tags:
        return sent
    return replace(sent, entity_tags=kept)


def write_sentences(sentences: Iterable[TaggedSentence], path: str | Path) -> int:
    """Write newline-delimited UTF-8 records; returns the record count."""
    count = 0
    with Path(path).open("w", encoding="utf-8") as fh:
        for sent in sentences:
            fh.write(json.dumps(sent.to_record(), sort_keys=True, ensure_ascii=False))
            fh.write("\n")
            count += 1
    return count


def read_sentences(path: str | Path) -> Iterator[TaggedSentence]:
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                yield TaggedSentence.from_record(json.loads(line))
