"""Train/validation/test splits with sentence and relation disjointness.

All SR pairs of one sentence go to the same split (sentence-group
atomicity), and a relation string never appears in two splits: pairs whose
relation already landed elsewhere are dropped and counted. Shuffling is
seeded and inputs are order-normalized, so splits are bit-identical for
identical (input, sizes, seed).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence

from foodkb.annotations.labels import LabeledSRPair

SPLIT_NAMES = ("train", "val", "test")


@dataclass(frozen=True)
class DatasetSplits:
    train: tuple[LabeledSRPair, ...]
    val: tuple[LabeledSRPair, ...]
    test: tuple[LabeledSRPair, ...]
    seed: int
    requested_sizes: tuple[int, int, int]
    dropped_relation_conflicts: int = 0
    shortfall: bool = field(init=False)

    def __post_init__(self) -> None:
        actual = (len(self.train), len(self.val), len(self.test))
        object.__setattr__(self, "shortfall", actual != tuple(self.requested_sizes))

    def split(self, name: str) -> tuple[LabeledSRPair, ...]:
        return {"train": self.train, "val": self.val, "test": self.test}[name]

    def counts(self) -> dict:
        out = {}
        for name in SPLIT_NAMES:
            items = self.split(name)
            positives = sum(1 for i in items if i.is_positive)
            out[name] = {
                "pairs": len(items),
                "positive": positives,
                "negative": len(items) - positives,
                "unique_sentences": len({i.pair.sentence_id for i in items}),
                "unique_relations": len({i.pair.relation.relation_text for i in items}),
                "unique_entities": _count_entities(items),
            }
        return out

    def validate(self) -> None:
        """Raise if any cross-split sentence/relation duplicate or repeated pair exists."""
        seen_sentences: dict[str, str] = {}
        seen_relations: dict[str, str] = {}
        seen_pairs: set[str] = set()
        for name in SPLIT_NAMES:
            for item in self.split(name):
                sid = item.pair.sentence_id
                rel = item.pair.relation.relation_text
                if seen_sentences.setdefault(sid, name) != name:
                    raise AssertionError(f"sentence {sid[:12]} in two splits")
                if seen_relations.setdefault(rel, name) != name:
                    raise AssertionError(f"relation {rel!r} in two splits")
                if item.pair.pair_id in seen_pairs:
                    raise AssertionError(f"pair {item.pair.pair_id[:12]} repeated")
                seen_pairs.add(item.pair.pair_id)


def _count_entities(items: Sequence[LabeledSRPair]) -> dict:
    foods = {i.pair.relation.food for i in items}
    chems = {i.pair.relation.chemical for i in items}
    return {"food": len(foods), "chemical": len(chems),
            "total": len(foods) + len(chems)}


def split_dataset(labeled: Sequence[LabeledSRPair], sizes: tuple[int, int, int],
                  seed: int) -> DatasetSplits:
    """Greedy seeded assignment of whole sentence groups to train/val/test.

    Groups are shuffled, then assigned to the current split until its size
    target is met (a group may overshoot it); relation conflicts against
    earlier splits are dropped. Shortfalls are flagged, not fatal.
    """
    groups: dict[str, list[LabeledSRPair]] = {}
    for item in labeled:
        groups.setdefault(item.pair.sentence_id, []).append(item)
    # Order-normalize within and across groups before the seeded shuffle.
    group_list = [sorted(members, key=lambda i: i.pair.pair_id)
                  for _, members in sorted(groups.items())]
    random.Random(seed).shuffle(group_list)

    assigned: dict[str, list[LabeledSRPair]] = {name: [] for name in SPLIT_NAMES}
    relation_home: dict[str, str] = {}
    dropped = 0
    split_index = 0
    for members in group_list:
        while (split_index < len(SPLIT_NAMES)
               and len(assigned[SPLIT_NAMES[split_index]]) >= sizes[split_index]):
            split_index += 1
        if split_index >= len(SPLIT_NAMES):
            break
        name = SPLIT_NAMES[split_index]
        for item in members:
            rel = item.pair.relation.relation_text
            home = relation_home.setdefault(rel, name)
            if home != name:
                dropped += 1
                continue
            assigned[name].append(item)

    return DatasetSplits(
        train=tuple(assigned["train"]),
        val=tuple(assigned["val"]),
        test=tuple(assigned["test"]),
        seed=seed,
        requested_sizes=tuple(sizes),
        dropped_relation_conflicts=dropped,
    )


def write_labeled(items: Sequence[LabeledSRPair], path: str | Path) -> int:
    with Path(path).open("w", encoding="utf-8") as fh:
        for item in items:
            fh.write(json.dumps(item.to_record(), sort_keys=True, ensure_ascii=False))
            fh.write("\n")
    return len(items)


def read_labeled(path: str | Path) -> Iterator[LabeledSRPair]:
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                yield LabeledSRPair.from_record(json.loads(line))


def write_splits(splits: DatasetSplits, out_dir: str | Path) -> dict:
    """Write the three split files plus a manifest with seed, sizes, and drops."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name in SPLIT_NAMES:
        write_labeled(splits.split(name), out / f"{name}.jsonl")
    manifest = {
        "seed": splits.seed,
        "requested_sizes": list(splits.requested_sizes),
        "counts": splits.counts(),
        "dropped_relation_conflicts": splits.dropped_relation_conflicts,
        "shortfall": splits.shortfall,
    }
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return manifest
