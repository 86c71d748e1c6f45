"""Shared test builders.

The synthetic corpus plants a purely lexical class signal inside one shared
sentence template: each sentence reports two assay markers, drawn from a
small set for negatives and a much larger set for positives. A model learns
the small negative set quickly (confident negatives) while positive markers
keep arriving round after round, so positives stay near the decision
boundary: uncertainty sampling then finds them faster, and test recall grows
with the training rounds. Splits are disjoint in sentences (unique sample
index) and relations (chemical ranges are partitioned per split).
"""

from __future__ import annotations

import random
from pathlib import Path

import pytest

from foodkb.annotations.labels import NEGATIVE, POSITIVE, LabeledSRPair
from foodkb.extract.pairs import SRPair
from foodkb.extract.relations import RelationCandidate

FIXTURES = Path(__file__).parent / "fixtures"

_FOODS = [f"food{j}" for j in range(24)]
_PARTS = ["skin", "seed", "leaf", "root"]
_POS_MARKERS = [f"assayp{m:03d}" for m in range(160)]
_NEG_MARKERS = [f"assayn{m:02d}" for m in range(40)]
_FILLERS = [f"note{k:03d}" for k in range(300)]


def make_pair(sentence_text: str, food: str, chemical: str, part: str | None = None,
              doc: str = "PMID:1", sentence_id: str | None = None) -> SRPair:
    from foodkb import ids
    from foodkb.ingest.sentences import EntityTag

    sid = sentence_id or ids.sentence_id(sentence_text, doc)
    spans = []
    for surface, cls in ((food, "food"), (part, "part"), (chemical, "chemical")):
        if surface is None:
            continue
        start = sentence_text.find(surface)
        if start >= 0:
            spans.append(EntityTag(start, start + len(surface), surface, cls))
    spans.sort(key=lambda t: t.start)
    return SRPair.build(sid, sentence_text, doc,
                        RelationCandidate(food=food, part=part, chemical=chemical),
                        spans=spans)


def make_labeled(label: str, sentence_text: str, food: str, chemical: str,
                 part: str | None = None, doc: str = "PMID:1") -> LabeledSRPair:
    return LabeledSRPair(pair=make_pair(sentence_text, food, chemical, part, doc),
                         label=label)


def _synthetic_item(rng: random.Random, index: int, positive: bool,
                    chem_range: tuple[int, int]) -> LabeledSRPair:
    food = rng.choice(_FOODS)
    chem = f"chem{rng.randrange(*chem_range)}"
    part = rng.choice(_PARTS) if rng.random() < 0.3 else None
    where = f"{food} {part}" if part else food
    fillers = " ".join(rng.choice(_FILLERS) for _ in range(6))
    markers = rng.sample(_POS_MARKERS if positive else _NEG_MARKERS, 2)
    text = (f"Sample {index}: {chem} assay of {where} returned "
            f"{markers[0]} {markers[1]} with remarks {fillers}.")
    return make_labeled(POSITIVE if positive else NEGATIVE, text, food, chem,
                        part=part, doc=f"PMID:{9000000 + index}")


def build_synthetic_split(n_pairs: int, n_positives: int, seed: int,
                          chem_range: tuple[int, int],
                          index_base: int = 0) -> list[LabeledSRPair]:
    rng = random.Random(seed)
    flags = [True] * n_positives + [False] * (n_pairs - n_positives)
    rng.shuffle(flags)
    return [_synthetic_item(rng, index_base + i, flag, chem_range)
            for i, flag in enumerate(flags)]


def build_synthetic_corpus(seed: int = 7,
                           pool_size: int = 1000, pool_positives: int = 453,
                           val_size: int = 300, val_positives: int = 116,
                           test_size: int = 300, test_positives: int = 129,
                           ) -> tuple[list[LabeledSRPair], list[LabeledSRPair],
                                      list[LabeledSRPair]]:
    """Pool/val/test with the reference composition and disjoint relations."""
    pool = build_synthetic_split(pool_size, pool_positives, seed,
                                 chem_range=(0, 40), index_base=0)
    val = build_synthetic_split(val_size, val_positives, seed + 1,
                                chem_range=(40, 50), index_base=100000)
    test = build_synthetic_split(test_size, test_positives, seed + 2,
                                 chem_range=(50, 60), index_base=200000)
    return pool, val, test


@pytest.fixture(scope="session")
def synthetic_corpus():
    return build_synthetic_corpus()
