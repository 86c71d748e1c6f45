from foodkb.ingest.client import LiteratureSearchClient, RateLimiter, SearchClientError
from foodkb.ingest.sentences import (
    EntityTag,
    TaggedSentence,
    filter_species,
    read_sentences,
    write_sentences,
)
from foodkb.ingest.vocab import FoodVocabulary, load_food_vocabulary

__all__ = [
    "EntityTag",
    "FoodVocabulary",
    "LiteratureSearchClient",
    "RateLimiter",
    "SearchClientError",
    "TaggedSentence",
    "filter_species",
    "load_food_vocabulary",
    "read_sentences",
    "write_sentences",
]
