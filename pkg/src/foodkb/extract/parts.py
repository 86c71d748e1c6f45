"""Gazetteer recognition of food-part entities.

Strict dictionary matching: case-insensitive exact hits only, delimited by
word boundaries, leftmost-longest wins. A boundary is the start/end of the
string or any character that is not a letter, digit, or hyphen.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

from foodkb.ingest.sentences import EntityTag
from foodkb.ingest.vocab import load_food_vocabulary

PART = "part"
FOOD = "food"

# Letter or digit (unicode), or hyphen: the characters that continue a word.
_BOUND_BEFORE = r"(?<![^\W_])(?<!-)"
_BOUND_AFTER = r"(?![^\W_])(?!-)"


@dataclass(frozen=True)
class PartLexicon:
    """Normalized food-part names, compiled into a single matcher."""

    parts: frozenset[str]

    def __post_init__(self) -> None:
        if not self.parts:
            raise ValueError("empty part lexicon")

    def __len__(self) -> int:
        return len(self.parts)

    def pattern(self) -> re.Pattern[str]:
        return _compiled(self.parts)


@lru_cache(maxsize=16)
def _compiled(parts: frozenset[str]) -> re.Pattern[str]:
    # Longest alternative first, so the match at a position is the longest one.
    alternatives = sorted(parts, key=lambda p: (-len(p), p))
    body = "|".join(re.escape(p) for p in alternatives)
    return re.compile(f"{_BOUND_BEFORE}(?:{body}){_BOUND_AFTER}",
                      re.IGNORECASE | re.UNICODE)


def load_part_lexicon(path: str | Path) -> PartLexicon:
    vocab = load_food_vocabulary(path)
    return PartLexicon(parts=vocab.names)


def default_part_lexicon() -> PartLexicon:
    """The shipped 70-entry lexicon; contents are editable configuration."""
    return load_part_lexicon(Path(__file__).parent.parent / "data" / "food_parts.txt")


def recognize_food_parts(text: str, lexicon: PartLexicon) -> list[EntityTag]:
    """All non-overlapping leftmost-longest lexicon matches in ``text``."""
    return [
        EntityTag(start=m.start(), end=m.end(), surface=m.group(0), tag_class=PART)
        for m in lexicon.pattern().finditer(text)
    ]
