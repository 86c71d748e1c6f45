"""Fine-tuning and inference for the sequence-classification sidecar.

Each fit request fine-tunes a fresh binary classification head (and the
encoder) from the configured base checkpoint. Checkpoints are keyed by a
content digest of (training set, hyperparameters, seed), so identical
requests reuse the stored model instead of retraining.

Determinism: seeds are applied to torch and Python hashing before every fit.
On CPU this makes runs reproducible; on CUDA, kernel-level nondeterminism
(cuDNN autotuning, atomics) can still cause bit-level differences, which is
the documented limit of the "deterministic given seed" guarantee.
"""

from __future__ import annotations

import hashlib
import json
import logging
import threading
from pathlib import Path

import torch
from torch.utils.data import DataLoader, TensorDataset
from transformers import AutoModelForSequenceClassification, AutoTokenizer

from foodkb_sidecar.config import SidecarConfig

logger = logging.getLogger(__name__)


class UnknownModelError(KeyError):
    pass


def request_digest(examples: list[dict], hyperparams: dict, seed: int) -> str:
    body = json.dumps({"examples": examples, "hyperparams": hyperparams,
                       "seed": seed}, sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(body.encode("utf-8")).hexdigest()[:24]


class SidecarRuntime:
    """Owns the tokenizer, base encoder weights, and fine-tuned checkpoints."""

    def __init__(self, config: SidecarConfig) -> None:
        self.config = config
        self.device = torch.device(config.device)
        self.checkpoint_dir = Path(config.checkpoint_dir)
        self.checkpoint_dir.mkdir(parents=True, exist_ok=True)
        self._fit_lock = threading.Lock()  # one fit job at a time
        self._loaded: dict[str, torch.nn.Module] = {}
        self.tokenizer = AutoTokenizer.from_pretrained(config.base_model)
        logger.info("loaded tokenizer for %s", config.base_model)

    # -- encoding ------------------------------------------------------------

    def _encode(self, texts: list[str]) -> dict[str, torch.Tensor]:
        batch = self.tokenizer(
            texts, padding=True, truncation=True,
            max_length=self.config.max_seq_len, return_tensors="pt")
        overflow = sum(
            1 for text in texts
            if len(self.tokenizer(text)["input_ids"]) > self.config.max_seq_len)
        if overflow:
            logger.info("right-truncated %d/%d inputs at %d tokens",
                        overflow, len(texts), self.config.max_seq_len)
        return batch

    # -- fit -----------------------------------------------------------------

    def fit(self, examples: list[dict], hyperparams: dict, seed: int) -> str:
        """Fine-tune and persist a checkpoint; returns its model id."""
        model_id = request_digest(examples, hyperparams, seed)
        if (self.checkpoint_dir / model_id).exists():
            logger.info("reusing checkpoint %s", model_id)
            return model_id

        with self._fit_lock:
            if (self.checkpoint_dir / model_id).exists():
                return model_id
            torch.manual_seed(seed)
            model = AutoModelForSequenceClassification.from_pretrained(
                self.config.base_model, num_labels=2)
            model.to(self.device)
            model.train()

            texts = [ex["encoded_text"] for ex in examples]
            labels = torch.tensor(
                [1 if ex["label"] == "positive" else 0 for ex in examples])
            batch = self._encode(texts)
            dataset = TensorDataset(batch["input_ids"], batch["attention_mask"],
                                    labels)
            generator = torch.Generator().manual_seed(seed)
            loader = DataLoader(dataset, batch_size=int(hyperparams["batch_size"]),
                                shuffle=True, generator=generator)
            optimizer = torch.optim.AdamW(model.parameters(),
                                          lr=float(hyperparams["learning_rate"]))
            for epoch in range(int(hyperparams["epochs"])):
                total = 0.0
                for input_ids, attention_mask, batch_labels in loader:
                    optimizer.zero_grad()
                    out = model(input_ids=input_ids.to(self.device),
                                attention_mask=attention_mask.to(self.device),
                                labels=batch_labels.to(self.device))
                    out.loss.backward()
                    optimizer.step()
                    total += out.loss.detach().item()
                logger.info("epoch %d mean loss %.4f", epoch + 1,
                            total / max(1, len(loader)))

            model.save_pretrained(self.checkpoint_dir / model_id)
            self._loaded[model_id] = model.eval()
            return model_id

    # -- predict ---------------------------------------------------------------

    def _model(self, model_id: str) -> torch.nn.Module:
        cached = self._loaded.get(model_id)
        if cached is not None:
            return cached
        path = self.checkpoint_dir / model_id
        if not path.exists():
            raise UnknownModelError(model_id)
        model = AutoModelForSequenceClassification.from_pretrained(path)
        model.to(self.device)
        model.eval()
        self._loaded[model_id] = model
        return model

    def predict(self, model_id: str, items: list[dict]) -> list[float]:
        """Positive-class softmax probability per item, order-preserving."""
        if not items:
            return []
        model = self._model(model_id)
        texts = [item["encoded_text"] for item in items]
        probs: list[float] = []
        with torch.no_grad():
            for start in range(0, len(texts), 64):
                batch = self._encode(texts[start:start + 64])
                logits = model(
                    input_ids=batch["input_ids"].to(self.device),
                    attention_mask=batch["attention_mask"].to(self.device)).logits
                probs.extend(torch.softmax(logits, dim=-1)[:, 1].tolist())
        return probs
