"""Client for a sentence-level literature search API.

The endpoint takes a templated query (``"<food name> contains"``) and returns
sentence hits with pre-tagged species and chemical entities. The client
enforces a global request rate limit, retries transient failures with
exponential backoff, and skips malformed hit records instead of failing the
whole response.

Response schema (one JSON object per request)::

    {"hits": [{"text": str, "doc_id": str,
               "annotations": [{"start": int, "end": int,
                                "type": "species"|"chemical", "text": str}]}]}
"""

from __future__ import annotations

import logging
import threading
import time
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from typing import Callable, Iterable

import requests

from foodkb.ingest.sentences import (
    CHEMICAL,
    SPECIES,
    EntityTag,
    InvalidSpanError,
    TaggedSentence,
)

logger = logging.getLogger(__name__)

DEFAULT_RATE_PER_SEC = 3.0
DEFAULT_MAX_ATTEMPTS = 5
DEFAULT_BACKOFF_BASE_SEC = 1.0
DEFAULT_BACKOFF_FACTOR = 2.0
DEFAULT_TIMEOUT_SEC = 30.0
DEFAULT_MAX_IN_FLIGHT = 4

_TAG_TYPE_MAP = {"species": SPECIES, "chemical": CHEMICAL}


class SearchClientError(RuntimeError):
    """Network failure that persisted through all retry attempts."""


def build_query(food_name: str) -> str:
    """Render the search query template: the food name followed by ``contains``."""
    if not food_name or not food_name.strip():
        raise ValueError("empty food name")
    return f"{food_name.strip()} contains"


class RateLimiter:
    """Sliding-window limiter: at most ``rate`` acquisitions per rolling second.

    Thread-safe. ``clock`` and ``sleeper`` are injectable for tests.
    """

    def __init__(self, rate: float, clock: Callable[[], float] = time.monotonic,
                 sleeper: Callable[[float], None] = time.sleep) -> None:
        if rate <= 0:
            raise ValueError("rate must be positive")
        self.rate = rate
        self._clock = clock
        self._sleeper = sleeper
        self._stamps: deque[float] = deque()
        self._lock = threading.Lock()

    def acquire(self) -> None:
        while True:
            with self._lock:
                now = self._clock()
                while self._stamps and now - self._stamps[0] >= 1.0:
                    self._stamps.popleft()
                if len(self._stamps) < self.rate:
                    self._stamps.append(now)
                    return
                wait = 1.0 - (now - self._stamps[0])
            self._sleeper(max(wait, 1e-4))


def parse_hits(payload: dict, retrieved_at: str) -> list[TaggedSentence]:
    """Parse a response payload; malformed hits are skipped with a warning.

    Duplicate ``(text, doc_id)`` hits collapse to one record.
    """
    out: list[TaggedSentence] = []
    seen: set[tuple[str, str]] = set()
    for hit in payload.get("hits", []):
        try:
            text = str(hit["text"])
            doc_id = str(hit["doc_id"])
            tags = []
            for ann in hit.get("annotations", []):
                tag_class = _TAG_TYPE_MAP.get(str(ann.get("type", "")).lower())
                if tag_class is None:
                    continue  # unknown types are upstream noise, not ours to keep
                tags.append(EntityTag(
                    start=int(ann["start"]), end=int(ann["end"]),
                    surface=str(ann["text"]), tag_class=tag_class,
                ))
            key = (text, doc_id)
            if key in seen:
                continue
            sent = TaggedSentence.build(text, doc_id, tags, retrieved_at)
        except (KeyError, TypeError, ValueError, InvalidSpanError) as exc:
            logger.warning("skipping malformed hit: %s", exc)
            continue
        seen.add(key)
        out.append(sent)
    return out


class LiteratureSearchClient:
    """HTTP client with rate limiting, retries, and bounded parallel fetching."""

    def __init__(
        self,
        base_url: str,
        rate_per_sec: float = DEFAULT_RATE_PER_SEC,
        max_attempts: int = DEFAULT_MAX_ATTEMPTS,
        backoff_base_sec: float = DEFAULT_BACKOFF_BASE_SEC,
        backoff_factor: float = DEFAULT_BACKOFF_FACTOR,
        timeout_sec: float = DEFAULT_TIMEOUT_SEC,
        max_in_flight: int = DEFAULT_MAX_IN_FLIGHT,
        session: requests.Session | None = None,
        clock: Callable[[], float] = time.monotonic,
        sleeper: Callable[[float], None] = time.sleep,
        now: Callable[[], str] | None = None,
    ) -> None:
        self.base_url = base_url.rstrip("/")
        self.max_attempts = max_attempts
        self.backoff_base_sec = backoff_base_sec
        self.backoff_factor = backoff_factor
        self.timeout_sec = timeout_sec
        self.max_in_flight = max_in_flight
        self.session = session or requests.Session()
        self._limiter = RateLimiter(rate_per_sec, clock=clock, sleeper=sleeper)
        self._sleeper = sleeper
        self._now = now or (lambda: datetime.now(timezone.utc).isoformat())

    def fetch_sentences(self, query: str, limit: int | None = None) -> list[TaggedSentence]:
        """GET the search endpoint for one query and parse the hits."""
        params: dict[str, object] = {"query": query}
        if limit is not None:
            params["limit"] = limit
        payload = self._get_with_retries(params)
        return parse_hits(payload, self._now())

    def fetch_for_foods(self, food_names: Iterable[str],
                        limit_per_food: int | None = None) -> list[TaggedSentence]:
        """Fetch for many foods with bounded parallelism; dedup on (text, doc)."""
        foods = list(food_names)
        results: list[TaggedSentence] = []
        seen: set[tuple[str, str]] = set()
        with ThreadPoolExecutor(max_workers=self.max_in_flight) as pool:
            futures = [pool.submit(self.fetch_sentences, build_query(f), limit_per_food)
                       for f in foods]
            for food, fut in zip(foods, futures):
                try:
                    hits = fut.result()
                except SearchClientError as exc:
                    logger.warning("query for %r failed: %s", food, exc)
                    continue
                for sent in hits:
                    key = (sent.text, sent.source_doc)
                    if key not in seen:
                        seen.add(key)
                        results.append(sent)
        return results

    def _get_with_retries(self, params: dict) -> dict:
        delay = self.backoff_base_sec
        last_err: Exception | None = None
        for attempt in range(1, self.max_attempts + 1):
            self._limiter.acquire()
            try:
                resp = self.session.get(self.base_url, params=params,
                                        timeout=self.timeout_sec)
                if resp.status_code == 200:
                    return resp.json()
                if resp.status_code in (429,) or resp.status_code >= 500:
                    last_err = SearchClientError(f"HTTP {resp.status_code}")
                else:
                    raise SearchClientError(
                        f"HTTP {resp.status_code} for params {params!r}")
            except SearchClientError:
                raise
            except Exception as exc:  # connection errors, timeouts, bad JSON
                last_err = exc
            if attempt < self.max_attempts:
                logger.warning("attempt %d/%d failed (%s); retrying in %.1fs",
                               attempt, self.max_attempts, last_err, delay)
                self._sleeper(delay)
                delay *= self.backoff_factor
        raise SearchClientError(
            f"request failed after {self.max_attempts} attempts: {last_err}")
