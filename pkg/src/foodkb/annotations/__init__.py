from foodkb.annotations.labels import (
    LABELS,
    NEGATIVE,
    POSITIVE,
    SKIP,
    AnnotationRecord,
    LabeledSRPair,
)
from foodkb.annotations.splits import (
    DatasetSplits,
    read_labeled,
    split_dataset,
    write_labeled,
    write_splits,
)
from foodkb.annotations.store import AnnotationStore, ConsensusReport, consensus_filter

__all__ = [
    "LABELS",
    "NEGATIVE",
    "POSITIVE",
    "SKIP",
    "AnnotationRecord",
    "AnnotationStore",
    "ConsensusReport",
    "DatasetSplits",
    "LabeledSRPair",
    "consensus_filter",
    "read_labeled",
    "split_dataset",
    "write_labeled",
    "write_splits",
]
