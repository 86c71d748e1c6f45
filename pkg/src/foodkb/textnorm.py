"""Surface-string normalization shared by vocabulary matching and relation rendering."""

from __future__ import annotations

import re
import unicodedata

_WS = re.compile(r"\s+")


def normalize(surface: str) -> str:
    """Case-fold, Unicode NFC, collapse internal whitespace, strip ends.

    Matching against vocabularies is exact on this normal form; no fuzzy
    matching, so every match is auditable.
    """
    return _WS.sub(" ", unicodedata.normalize("NFC", surface).casefold()).strip()
