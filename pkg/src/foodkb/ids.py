"""Stable identifiers and seed derivation.

All identifiers are hex digests of SHA-256 over canonical byte strings so
that every artifact (sentences, pairs, run configs) has the same identity
across runs, processes, and machines.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any


def sentence_id(text: str, source_doc: str) -> str:
    """Content hash of a sentence: digest over ``text + "\\n" + source_doc``."""
    return hashlib.sha256(f"{text}\n{source_doc}".encode("utf-8")).hexdigest()


def pair_id(sentence_id_: str, relation_text: str) -> str:
    """Content hash of a sentence-relation pair."""
    return hashlib.sha256(f"{sentence_id_}\n{relation_text}".encode("utf-8")).hexdigest()


def canonical_json(obj: Any) -> str:
    """JSON with sorted keys and fixed separators; the one true byte form."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def config_digest(obj: Any) -> str:
    return hashlib.sha256(canonical_json(obj).encode("utf-8")).hexdigest()


def derive_seed(*parts: object) -> int:
    """Derive a 32-bit seed from arbitrary parts.

    Used for per-run and per-round RNG streams: adding runs or rounds never
    perturbs the streams of earlier ones.
    """
    key = "\x1f".join(str(p) for p in parts).encode("utf-8")
    return int.from_bytes(hashlib.blake2b(key, digest_size=4).digest(), "big")
