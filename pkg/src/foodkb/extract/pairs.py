"""Sentence-relation (SR) pairs: the atomic unit of annotation and training."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from foodkb import ids
from foodkb.extract.parts import FOOD, PartLexicon, recognize_food_parts
from foodkb.extract.relations import EntitySets, RelationCandidate, generate_candidates
from foodkb.ingest.sentences import CHEMICAL, SPECIES, EntityTag, TaggedSentence, filter_species
from foodkb.ingest.vocab import FoodVocabulary
from foodkb.textnorm import normalize


@dataclass(frozen=True)
class SRPair:
    """One sentence paired with one candidate relation.

    ``pair_id`` is a content hash of ``(sentence_id, relation_text)``, unique
    corpus-wide. ``spans`` carries the food/part/chemical entity offsets for
    highlighting.
    """

    pair_id: str
    sentence_id: str
    sentence_text: str
    source_doc: str
    relation: RelationCandidate
    spans: tuple[EntityTag, ...] = ()

    @classmethod
    def build(cls, sentence_id: str, sentence_text: str, source_doc: str,
              relation: RelationCandidate, spans: Iterable[EntityTag] = ()) -> "SRPair":
        return cls(
            pair_id=ids.pair_id(sentence_id, relation.relation_text),
            sentence_id=sentence_id,
            sentence_text=sentence_text,
            source_doc=source_doc,
            relation=relation,
            spans=tuple(spans),
        )

    def to_record(self) -> dict:
        return {
            "pair_id": self.pair_id,
            "sentence_id": self.sentence_id,
            "sentence_text": self.sentence_text,
            "source_doc": self.source_doc,
            "relation": self.relation.to_record(),
            "spans": [s.to_record() for s in self.spans],
        }

    @classmethod
    def from_record(cls, rec: dict) -> "SRPair":
        return cls(
            pair_id=rec["pair_id"],
            sentence_id=rec["sentence_id"],
            sentence_text=rec["sentence_text"],
            source_doc=rec.get("source_doc", ""),
            relation=RelationCandidate.from_record(rec["relation"]),
            spans=tuple(EntityTag.from_record(s) for s in rec.get("spans", ())),
        )


def entity_sets_for(sent: TaggedSentence, lexicon: PartLexicon | None
                    ) -> tuple[EntitySets, tuple[EntityTag, ...]]:
    """Collect foods (retained species), parts, and chemicals for one sentence.

    Returns the normalized entity sets plus the relabeled spans (species tags
    become ``food`` spans; part spans come from the gazetteer).
    """
    foods: set[str] = set()
    chems: set[str] = set()
    spans: list[EntityTag] = []
    for tag in sent.entity_tags:
        if tag.tag_class == SPECIES:
            foods.add(normalize(tag.surface))
            spans.append(EntityTag(tag.start, tag.end, tag.surface, FOOD))
        elif tag.tag_class == CHEMICAL:
            chems.add(normalize(tag.surface))
            spans.append(tag)
    parts: set[str] = set()
    if lexicon is not None:
        for tag in recognize_food_parts(sent.text, lexicon):
            parts.add(normalize(tag.surface))
            spans.append(tag)
    spans.sort(key=lambda t: (t.start, t.end, t.tag_class))
    return (
        EntitySets(foods=frozenset(foods), parts=frozenset(parts),
                   chemicals=frozenset(chems)),
        tuple(spans),
    )


def build_sr_pairs(sentences: Iterable[TaggedSentence], lexicon: PartLexicon | None,
                   vocab: FoodVocabulary | None = None) -> list[SRPair]:
    """Generate SR pairs for a species-filtered sentence stream.

    If ``vocab`` is given the species filter is (re-)applied first. Sentences
    with no retained food or no chemical contribute nothing. Output is
    deduplicated on (sentence_id, relation_text) and sorted by pair_id, so
    repeated invocations on the same input are byte-identical.
    """
    by_id: dict[str, SRPair] = {}
    for sent in sentences:
        if vocab is not None:
            sent = filter_species(sent, vocab)
        entity_sets, spans = entity_sets_for(sent, lexicon)
        if not entity_sets.foods or not entity_sets.chemicals:
            continue
        for rel in generate_candidates(entity_sets):
            pair = SRPair.build(sent.sentence_id, sent.text, sent.source_doc,
                                rel, spans)
            by_id.setdefault(pair.pair_id, pair)
    return [by_id[k] for k in sorted(by_id)]


def write_pairs(pairs: Iterable[SRPair], path: str | Path) -> int:
    count = 0
    with Path(path).open("w", encoding="utf-8") as fh:
        for pair in pairs:
            fh.write(json.dumps(pair.to_record(), sort_keys=True, ensure_ascii=False))
            fh.write("\n")
            count += 1
    return count


def read_pairs(path: str | Path) -> Iterator[SRPair]:
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                yield SRPair.from_record(json.loads(line))
