"""Food-name vocabulary: the list used both for querying and species filtering."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

from foodkb.textnorm import normalize

logger = logging.getLogger(__name__)


class VocabularyError(ValueError):
    """Fatal configuration problem with a vocabulary file."""


@dataclass(frozen=True)
class FoodVocabulary:
    """Set of normalized food names (common and scientific)."""

    names: frozenset[str]
    source_label: str = ""

    def __post_init__(self) -> None:
        if not self.names:
            raise VocabularyError("empty vocabulary")

    def __contains__(self, surface: str) -> bool:
        return normalize(surface) in self.names

    def __len__(self) -> int:
        return len(self.names)

    def sorted_names(self) -> list[str]:
        return sorted(self.names)


def load_food_vocabulary(path: str | Path, column: int | None = None,
                         delimiter: str = "\t") -> FoodVocabulary:
    """Load a vocabulary from a one-name-per-line file.

    ``column`` selects a delimited column instead of the whole line, for
    table-style exports. Names are normalized and deduplicated; blank lines
    and ``#`` comments are ignored.
    """
    path = Path(path)
    if not path.exists():
        raise VocabularyError(f"vocabulary file not found: {path}")
    names: set[str] = set()
    for line in path.read_text(encoding="utf-8").splitlines():
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        raw = line.split(delimiter)[column] if column is not None else line
        name = normalize(raw)
        if name:
            names.add(name)
    if not names:
        raise VocabularyError(f"empty vocabulary: {path}")
    vocab = FoodVocabulary(names=frozenset(names), source_label=str(path))
    logger.info("loaded %d food names from %s", len(vocab), path)
    return vocab
