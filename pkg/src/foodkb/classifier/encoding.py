"""Classifier input encoding: sentence and relation joined by a separator token."""

from __future__ import annotations

SEPARATOR = "[SEP]"


def encode_input(sentence: str, relation_text: str) -> str:
    """``"<sentence> [SEP] <relation_text>"`` with single spaces around the token."""
    if not sentence:
        raise ValueError("empty sentence")
    if not relation_text:
        raise ValueError("empty relation text")
    return f"{sentence} {SEPARATOR} {relation_text}"
