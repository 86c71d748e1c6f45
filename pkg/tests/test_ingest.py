"""Vocabulary loading, query templating, fixture parsing, and client behavior."""

from __future__ import annotations

import json
import threading

import pytest

from foodkb.ingest.client import (
    LiteratureSearchClient,
    RateLimiter,
    SearchClientError,
    build_query,
    parse_hits,
)
from foodkb.ingest.sentences import (
    EntityTag,
    TaggedSentence,
    filter_species,
    read_sentences,
    write_sentences,
)
from foodkb.ingest.vocab import FoodVocabulary, VocabularyError, load_food_vocabulary
from tests.conftest import FIXTURES

FIXED_TS = "2025-11-05T00:00:00+00:00"


class TestVocabulary:
    def test_case_fold_dedup(self, tmp_path):
        path = tmp_path / "vocab.txt"
        path.write_text("Apple\napple\nMalus domestica\n")
        vocab = load_food_vocabulary(path)
        assert vocab.names == {"apple", "malus domestica"}

    def test_empty_file_is_fatal(self, tmp_path):
        path = tmp_path / "vocab.txt"
        path.write_text("\n\n")
        with pytest.raises(VocabularyError, match="empty"):
            load_food_vocabulary(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(VocabularyError, match="not found"):
            load_food_vocabulary(tmp_path / "nope.txt")

    def test_column_selection(self, tmp_path):
        path = tmp_path / "vocab.tsv"
        path.write_text("1\tApple\tfruit\n2\tGrape\tfruit\n")
        vocab = load_food_vocabulary(path, column=1)
        assert vocab.names == {"apple", "grape"}

    def test_contains_uses_normalization(self):
        vocab = FoodVocabulary(names=frozenset({"malus domestica"}))
        assert "Malus  Domestica" in vocab


class TestBuildQuery:
    def test_simple(self):
        assert build_query("apple") == "apple contains"

    def test_multiword(self):
        assert build_query("malus domestica") == "malus domestica contains"

    def test_empty(self):
        with pytest.raises(ValueError):
            build_query("")


class TestParseHits:
    def test_apple_fixture_parses_to_golden(self):
        sentences = []
        for name in ("search_response_apple.json", "search_response_grape.json"):
            payload = json.loads((FIXTURES / name).read_text())
            sentences.extend(parse_hits(payload, FIXED_TS))
        lines = [json.dumps(s.to_record(), sort_keys=True, ensure_ascii=False)
                 for s in sentences]
        golden = (FIXTURES / "golden_sentences.jsonl").read_text().splitlines()
        assert lines == golden

    def test_duplicate_hits_collapse(self):
        payload = json.loads((FIXTURES / "search_response_apple.json").read_text())
        sentences = parse_hits(payload, FIXED_TS)
        assert len(payload["hits"]) == 4
        assert len(sentences) == 3  # one duplicate (text, doc_id)
        assert len({(s.text, s.source_doc) for s in sentences}) == 3

    def test_malformed_records_skipped(self, caplog):
        payload = json.loads((FIXTURES / "search_response_malformed.json").read_text())
        with caplog.at_level("WARNING"):
            sentences = parse_hits(payload, FIXED_TS)
        # out-of-bounds span, surface mismatch, and missing doc_id all skipped
        assert len(sentences) == 1
        assert sentences[0].source_doc == "PMID:3"
        # unknown annotation types are dropped, not fatal
        assert [t.tag_class for t in sentences[0].entity_tags] == ["chemical"]
        assert sum("skipping malformed hit" in r.message for r in caplog.records) == 3

    def test_empty_hits(self):
        assert parse_hits({"hits": []}, FIXED_TS) == []

    def test_span_invariants_on_all_fixture_records(self):
        for sent in read_sentences(FIXTURES / "golden_sentences.jsonl"):
            sent.validate()  # raises on any violated span invariant


class TestFilterSpecies:
    def _vocab(self):
        return load_food_vocabulary(FIXTURES / "test_vocab.txt")

    def test_drops_exactly_non_vocabulary_species(self):
        vocab = self._vocab()
        sentences = list(read_sentences(FIXTURES / "golden_sentences.jsonl"))
        filtered = [filter_species(s, vocab) for s in sentences]
        golden = [json.dumps(s.to_record(), sort_keys=True, ensure_ascii=False)
                  for s in filtered]
        want = (FIXTURES / "golden_filtered.jsonl").read_text().splitlines()
        assert golden == want
        dropped = {
            t.surface
            for before, after in zip(sentences, filtered)
            for t in set(before.entity_tags) - set(after.entity_tags)
        }
        assert dropped == {"Homo sapiens", "rats"}

    def test_keeps_food_species(self):
        vocab = self._vocab()
        text = "Homo sapiens and Malus domestica study."
        sent = TaggedSentence.build(text, "PMID:9", [
            EntityTag(0, 12, "Homo sapiens", "species"),
            EntityTag(17, 32, "Malus domestica", "species"),
        ], FIXED_TS)
        result = filter_species(sent, vocab)
        assert [t.surface for t in result.entity_tags] == ["Malus domestica"]

    def test_no_species_tags_is_identity(self):
        vocab = self._vocab()
        sent = TaggedSentence.build("Only chemicals here: lycopene.", "PMID:9", [
            EntityTag(21, 29, "lycopene", "chemical"),
        ], FIXED_TS)
        assert filter_species(sent, vocab) is sent

    def test_all_non_food_leaves_empty_species(self):
        vocab = self._vocab()
        sent = TaggedSentence.build("Mus musculus only.", "PMID:9", [
            EntityTag(0, 12, "Mus musculus", "species"),
        ], FIXED_TS)
        result = filter_species(sent, vocab)
        assert result.tags_of("species") == ()

    def test_idempotence(self):
        vocab = self._vocab()
        for sent in read_sentences(FIXTURES / "golden_sentences.jsonl"):
            once = filter_species(sent, vocab)
            assert filter_species(once, vocab) == once


class TestSentenceIds:
    def test_deterministic_from_text_and_doc(self):
        a = TaggedSentence.build("text", "doc", [], FIXED_TS)
        b = TaggedSentence.build("text", "doc", [], "2030-01-01T00:00:00+00:00")
        assert a.sentence_id == b.sentence_id
        c = TaggedSentence.build("text", "doc2", [], FIXED_TS)
        assert a.sentence_id != c.sentence_id

    def test_jsonl_round_trip(self, tmp_path):
        sentences = list(read_sentences(FIXTURES / "golden_sentences.jsonl"))
        path = tmp_path / "out.jsonl"
        write_sentences(sentences, path)
        assert list(read_sentences(path)) == sentences


class FakeClock:
    def __init__(self):
        self.t = 0.0

    def __call__(self):
        return self.t

    def sleep(self, seconds):
        self.t += seconds


class TestRateLimiter:
    def test_rolling_window_limit(self):
        clock = FakeClock()
        limiter = RateLimiter(3, clock=clock, sleeper=clock.sleep)
        stamps = []
        for _ in range(10):
            limiter.acquire()
            stamps.append(clock.t)
        for i in range(len(stamps)):
            window = [s for s in stamps if stamps[i] - 1.0 < s <= stamps[i]]
            assert len(window) <= 3

    def test_burst_then_wait(self):
        clock = FakeClock()
        limiter = RateLimiter(2, clock=clock, sleeper=clock.sleep)
        limiter.acquire()
        limiter.acquire()
        assert clock.t == 0.0
        limiter.acquire()  # must wait for the window to roll
        assert clock.t >= 1.0

    def test_thread_safety(self):
        clock = FakeClock()
        lock = threading.Lock()

        def locked_sleep(seconds):
            with lock:
                clock.t += seconds

        limiter = RateLimiter(5, clock=clock, sleeper=locked_sleep)
        threads = [threading.Thread(target=limiter.acquire) for _ in range(20)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert clock.t >= 3.0 - 1.0  # 20 acquisitions at 5/s need >= 3s of window


class FakeResponse:
    def __init__(self, status_code, payload):
        self.status_code = status_code
        self._payload = payload
        self.text = json.dumps(payload)

    def json(self):
        return self._payload


class FakeSession:
    """Scripted responses; records request parameters."""

    def __init__(self, script):
        self.script = list(script)
        self.calls = []

    def get(self, url, params=None, timeout=None):
        self.calls.append((url, dict(params or {})))
        item = self.script.pop(0)
        if isinstance(item, Exception):
            raise item
        return item


def make_client(session, **kwargs):
    clock = FakeClock()
    defaults = dict(rate_per_sec=1000.0, session=session, clock=clock,
                    sleeper=clock.sleep, now=lambda: FIXED_TS)
    defaults.update(kwargs)
    return LiteratureSearchClient("http://search.test/api", **defaults)


class TestSearchClient:
    def test_fetch_parses_fixture(self):
        payload = json.loads((FIXTURES / "search_response_apple.json").read_text())
        session = FakeSession([FakeResponse(200, payload)])
        client = make_client(session)
        sentences = client.fetch_sentences(build_query("apple"))
        assert len(sentences) == 3
        assert session.calls[0][1]["query"] == "apple contains"

    def test_limit_parameter_passed(self):
        session = FakeSession([FakeResponse(200, {"hits": []})])
        client = make_client(session)
        client.fetch_sentences("apple contains", limit=50)
        assert session.calls[0][1]["limit"] == 50

    def test_retries_on_5xx_then_succeeds(self):
        session = FakeSession([
            FakeResponse(500, {}),
            FakeResponse(503, {}),
            FakeResponse(200, {"hits": []}),
        ])
        client = make_client(session)
        assert client.fetch_sentences("q") == []
        assert len(session.calls) == 3

    def test_gives_up_after_max_attempts(self):
        session = FakeSession([FakeResponse(500, {})] * 5)
        client = make_client(session, max_attempts=5)
        with pytest.raises(SearchClientError, match="after 5 attempts"):
            client.fetch_sentences("q")

    def test_non_retryable_4xx_fails_fast(self):
        session = FakeSession([FakeResponse(400, {})])
        client = make_client(session)
        with pytest.raises(SearchClientError, match="HTTP 400"):
            client.fetch_sentences("q")
        assert len(session.calls) == 1

    def test_connection_errors_retry(self):
        session = FakeSession([
            ConnectionError("boom"),
            FakeResponse(200, {"hits": []}),
        ])
        client = make_client(session)
        assert client.fetch_sentences("q") == []

    def test_fetch_for_foods_dedups_across_queries(self):
        payload = json.loads((FIXTURES / "search_response_apple.json").read_text())
        session = FakeSession([FakeResponse(200, payload),
                               FakeResponse(200, payload)])
        client = make_client(session, max_in_flight=1)
        sentences = client.fetch_for_foods(["apple", "malus domestica"])
        assert len(sentences) == 3  # second query's hits are all duplicates
