"""Trainable baseline classifier: logistic regression on hashed ngram features.

Mini-batch gradient descent on binary cross-entropy. Dependency-light, fast,
and fully deterministic given a seed, which makes whole active-learning
experiments byte-reproducible. The external transformer backend implements
the same contract for operators with the hardware to run it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import sparse

from foodkb.annotations.labels import LabeledSRPair
from foodkb.classifier.encoding import encode_input
from foodkb.classifier.features import FEATURE_DIM, featurize
from foodkb.extract.pairs import SRPair

MODEL_FORMAT_VERSION = 1


@dataclass(frozen=True)
class HyperParams:
    learning_rate: float
    batch_size: int
    epochs: int

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.batch_size <= 0:
            raise ValueError("batch_size must be positive")
        if self.epochs <= 0:
            raise ValueError("epochs must be positive")

    def to_record(self) -> dict:
        return {"learning_rate": self.learning_rate, "batch_size": self.batch_size,
                "epochs": self.epochs}

    @classmethod
    def from_record(cls, rec: dict) -> "HyperParams":
        return cls(learning_rate=rec["learning_rate"],
                   batch_size=int(rec["batch_size"]), epochs=int(rec["epochs"]))


@dataclass(frozen=True)
class BaselineModel:
    feature_dim: int
    weights: np.ndarray
    bias: float
    hyperparams: HyperParams
    seed: int
    epoch_losses: tuple[float, ...]
    single_class_warning: bool = False

    def __post_init__(self) -> None:
        if not np.all(np.isfinite(self.weights)):
            raise ValueError("model weights must be finite")


def sigmoid(z: np.ndarray | float) -> np.ndarray | float:
    # Clipping keeps exp() in range; sigmoid saturates far before +-30 anyway.
    return 1.0 / (1.0 + np.exp(-np.clip(z, -30.0, 30.0)))


def encoded_text(pair: SRPair) -> str:
    return encode_input(pair.sentence_text, pair.relation.relation_text)


def build_matrix(texts: Sequence[str]) -> sparse.csr_matrix:
    """Stack the hashed feature vectors of ``texts`` into one CSR matrix."""
    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    for text in texts:
        idx, vals = featurize(text)
        indices.extend(idx)
        data.extend(vals)
        indptr.append(len(indices))
    return sparse.csr_matrix(
        (np.asarray(data, dtype=np.float64),
         np.asarray(indices, dtype=np.int64),
         np.asarray(indptr, dtype=np.int64)),
        shape=(len(texts), FEATURE_DIM),
    )


def mean_bce(weights: np.ndarray, bias: float, x: sparse.csr_matrix,
             y: np.ndarray) -> float:
    """Mean binary cross-entropy of the linear model on (x, y)."""
    p = np.clip(sigmoid(x @ weights + bias), 1e-12, 1.0 - 1e-12)
    return float(-np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)))


def bce_gradient(weights: np.ndarray, bias: float, x: sparse.csr_matrix,
                 y: np.ndarray) -> tuple[np.ndarray, float]:
    """Analytic gradient of :func:`mean_bce` wrt (weights, bias)."""
    residual = np.asarray(sigmoid(x @ weights + bias) - y)
    grad_w = np.asarray(x.T @ residual).ravel() / x.shape[0]
    grad_b = float(np.mean(residual))
    return grad_w, grad_b


def fit(train: Sequence[LabeledSRPair], hp: HyperParams, seed: int) -> BaselineModel:
    """Train from zero weights on the given labeled pairs.

    Deterministic given ``seed`` (shuffle order is the only randomness).
    Single-class training data is allowed but flags the model, since its
    probabilities may saturate.
    """
    if not train:
        raise ValueError("empty training set")
    texts = [encoded_text(item.pair) for item in train]
    x = build_matrix(texts)
    y = np.asarray([1.0 if item.is_positive else 0.0 for item in train])
    single_class = len(set(y.tolist())) < 2

    rng = np.random.default_rng(seed)
    weights = np.zeros(FEATURE_DIM)
    bias = 0.0
    n = len(train)
    losses: list[float] = []
    for _ in range(hp.epochs):
        order = rng.permutation(n)
        for start in range(0, n, hp.batch_size):
            batch = order[start:start + hp.batch_size]
            xb = x[batch]
            residual = np.asarray(sigmoid(xb @ weights + bias) - y[batch])
            weights -= hp.learning_rate * (xb.T @ residual) / len(batch)
            bias -= hp.learning_rate * float(np.mean(residual))
        losses.append(mean_bce(weights, bias, x, y))

    return BaselineModel(
        feature_dim=FEATURE_DIM,
        weights=weights,
        bias=bias,
        hyperparams=hp,
        seed=seed,
        epoch_losses=tuple(losses),
        single_class_warning=single_class,
    )


def predict_proba(model: BaselineModel, items: Sequence[SRPair]) -> list[float]:
    """Positive-class probability per item, order-preserving."""
    if not items:
        return []
    x = build_matrix([encoded_text(item) for item in items])
    p = sigmoid(x @ model.weights + model.bias)
    return [float(v) for v in p]


def save_model(model: BaselineModel, path: str | Path) -> None:
    """Versioned binary serialization (npz with a JSON header)."""
    header = {
        "format_version": MODEL_FORMAT_VERSION,
        "feature_dim": model.feature_dim,
        "hyperparams": model.hyperparams.to_record(),
        "seed": model.seed,
        "epoch_losses": list(model.epoch_losses),
        "single_class_warning": model.single_class_warning,
    }
    np.savez_compressed(
        Path(path),
        header=np.frombuffer(json.dumps(header, sort_keys=True).encode("utf-8"),
                             dtype=np.uint8),
        weights=model.weights,
        bias=np.asarray([model.bias]),
    )


def load_model(path: str | Path) -> BaselineModel:
    with np.load(Path(path)) as archive:
        header = json.loads(bytes(archive["header"]).decode("utf-8"))
        if header["format_version"] != MODEL_FORMAT_VERSION:
            raise ValueError(f"unsupported model format {header['format_version']}")
        return BaselineModel(
            feature_dim=int(header["feature_dim"]),
            weights=archive["weights"],
            bias=float(archive["bias"][0]),
            hyperparams=HyperParams.from_record(header["hyperparams"]),
            seed=int(header["seed"]),
            epoch_losses=tuple(header["epoch_losses"]),
            single_class_warning=bool(header["single_class_warning"]),
        )
