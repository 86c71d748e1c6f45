from foodkb.extract.pairs import SRPair, build_sr_pairs, entity_sets_for, read_pairs, write_pairs
from foodkb.extract.parts import PartLexicon, load_part_lexicon, recognize_food_parts
from foodkb.extract.relations import (
    EntitySets,
    RelationCandidate,
    generate_candidates,
    parse_relation,
    template,
)

__all__ = [
    "EntitySets",
    "PartLexicon",
    "RelationCandidate",
    "SRPair",
    "build_sr_pairs",
    "entity_sets_for",
    "generate_candidates",
    "load_part_lexicon",
    "parse_relation",
    "read_pairs",
    "recognize_food_parts",
    "template",
    "write_pairs",
]
