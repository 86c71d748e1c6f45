"""Candidate *contains* relations from per-sentence entity sets.

Given the foods F, parts P, and chemicals C recognized in one sentence, the
candidate set is every part-qualified combination plus every bare pair:

    {template(f, p, c) for (f, p, c) in F x P x C}
    union {template(f, c) for (f, c) in F x C}

so a sentence yields |F| * |C| * (|P| + 1) candidates when all rendered
strings are distinct.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from foodkb.textnorm import normalize

CONTAINS = "contains"


@dataclass(frozen=True)
class RelationCandidate:
    """One (food, optional part, chemical) candidate with its rendered text.

    Fields are stored in normalized lowercase form and the relation text is
    rendered from them, so relation-level deduplication (and knowledge-base
    merging) is case-insensitive by construction.
    """

    food: str
    chemical: str
    part: str | None = None
    relation_text: str = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "food", normalize(self.food))
        object.__setattr__(self, "chemical", normalize(self.chemical))
        if self.part is not None:
            object.__setattr__(self, "part", normalize(self.part))
        object.__setattr__(
            self, "relation_text", template(self.food, self.part, self.chemical))

    def to_record(self) -> dict:
        return {"food": self.food, "part": self.part, "chemical": self.chemical,
                "relation_text": self.relation_text}

    @classmethod
    def from_record(cls, rec: dict) -> "RelationCandidate":
        return cls(food=rec["food"], part=rec.get("part"), chemical=rec["chemical"])


_WS = re.compile(r"\s+")


def template(food: str, part: str | None, chemical: str) -> str:
    """Render ``"<food> contains <chemical>"``, part-qualified when a part is given.

    Case-preserving; fields are joined with single spaces (internal runs of
    whitespace collapse). Lowercasing happens upstream when entity surfaces
    are normalized into :class:`EntitySets`.
    """
    food_c = _WS.sub(" ", food).strip()
    chem_c = _WS.sub(" ", chemical).strip()
    if not food_c:
        raise ValueError("empty food name")
    if not chem_c:
        raise ValueError("empty chemical name")
    if part is None:
        return f"{food_c} {CONTAINS} {chem_c}"
    part_c = _WS.sub(" ", part).strip()
    if not part_c:
        raise ValueError("empty part name")
    return f"{food_c} {part_c} {CONTAINS} {chem_c}"


def parse_relation(relation_text: str, parts: frozenset[str] | set[str] = frozenset()
                   ) -> RelationCandidate:
    """Invert :func:`template` for names with no internal ``" contains "``.

    ``parts`` disambiguates the food/part boundary: the left side is split on
    its longest known-part suffix, if any.
    """
    sep = f" {CONTAINS} "
    if relation_text.count(sep) != 1:
        raise ValueError(f"not a templated relation: {relation_text!r}")
    left, chemical = relation_text.split(sep)
    for part in sorted(parts, key=len, reverse=True):
        if left.endswith(" " + part):
            return RelationCandidate(food=left[: -len(part) - 1], part=part,
                                     chemical=chemical)
    return RelationCandidate(food=left, part=None, chemical=chemical)


@dataclass(frozen=True)
class EntitySets:
    """Deduplicated normalized entity surfaces for one sentence."""

    foods: frozenset[str]
    parts: frozenset[str]
    chemicals: frozenset[str]


def generate_candidates(e: EntitySets) -> set[RelationCandidate]:
    """The full cross product of entity sets, part-qualified and bare."""
    out: set[RelationCandidate] = set()
    for food in e.foods:
        for chem in e.chemicals:
            out.add(RelationCandidate(food=food, chemical=chem))
            for part in e.parts:
                out.add(RelationCandidate(food=food, part=part, chemical=chem))
    return out
