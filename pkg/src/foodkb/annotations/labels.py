"""Annotation labels and labeled pairs.

Annotators assign one of three classes to an SR pair: *positive* (the
sentence supports the relation), *negative* (it does not), or *skip* (the
upstream entity tagging was wrong, discard the pair). Consensus resolution
turns these into binary-labeled pairs.
"""

from __future__ import annotations

from dataclasses import dataclass

from foodkb.extract.pairs import SRPair

POSITIVE = "positive"
NEGATIVE = "negative"
SKIP = "skip"
LABELS = (POSITIVE, NEGATIVE, SKIP)


@dataclass(frozen=True)
class AnnotationRecord:
    pair_id: str
    annotator_id: str
    label: str
    annotated_at: str

    def __post_init__(self) -> None:
        if self.label not in LABELS:
            raise ValueError(f"unknown label {self.label!r}")


@dataclass(frozen=True)
class LabeledSRPair:
    """An SR pair with its consensus-resolved binary label."""

    pair: SRPair
    label: str

    def __post_init__(self) -> None:
        if self.label not in (POSITIVE, NEGATIVE):
            raise ValueError(f"label must be binary, got {self.label!r}")

    @property
    def is_positive(self) -> bool:
        return self.label == POSITIVE

    def to_record(self) -> dict:
        return {"pair": self.pair.to_record(), "label": self.label}

    @classmethod
    def from_record(cls, rec: dict) -> "LabeledSRPair":
        return cls(pair=SRPair.from_record(rec["pair"]), label=rec["label"])
