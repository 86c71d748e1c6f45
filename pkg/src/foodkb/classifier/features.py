"""Hashed bag-of-ngrams features for the baseline classifier.

Word unigrams and bigrams of the encoded input are hashed into a fixed
2**18-dimensional space with signed hashing. Hashing uses blake2b, not the
process-salted builtin, so feature indices are stable across processes.
"""

from __future__ import annotations

import hashlib
import re
from functools import lru_cache

FEATURE_DIM = 2 ** 18

_TOKEN = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    return _TOKEN.findall(text.lower())


def _hash_token(token: str) -> tuple[int, float]:
    h = int.from_bytes(hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest(),
                       "big")
    index = h & (FEATURE_DIM - 1)
    sign = 1.0 if (h >> 63) & 1 else -1.0
    return index, sign


@lru_cache(maxsize=65536)
def featurize(text: str) -> tuple[tuple[int, ...], tuple[float, ...]]:
    """Sparse feature vector of ``text`` as aligned (indices, values) tuples.

    Cached: the same sentences are refeaturized hundreds of times across
    active-learning rounds and runs.
    """
    tokens = tokenize(text)
    grams = tokens + [f"{a}_{b}" for a, b in zip(tokens, tokens[1:])]
    acc: dict[int, float] = {}
    for gram in grams:
        index, sign = _hash_token(gram)
        acc[index] = acc.get(index, 0.0) + sign
    indices = tuple(sorted(acc))
    return indices, tuple(acc[i] for i in indices)
