"""Offline test assets: a tiny randomly initialized encoder.

Real deployments point ``SIDECAR_BASE_MODEL`` at a biomedical-pretrained
checkpoint; the tests build a miniature BERT whose vocabulary covers exactly
the fixture corpora, so everything runs offline and in seconds.
"""

from __future__ import annotations

import re

import pytest
import torch
from transformers import BertConfig, BertModel, BertTokenizer

from foodkb.classifier.baseline import encoded_text
from foodkb.classifier.conformance import contract_fixture


def separable_fixture(n: int = 200):
    """POSWORD/NEGWORD style 200-example set; trivially separable."""
    import numpy as np

    rng = np.random.default_rng(3)
    examples = []
    for i in range(n):
        positive = i % 2 == 0
        marker = "posword" if positive else "negword"
        noise = " ".join(f"w{rng.integers(0, 50)}" for _ in range(5))
        text = (f"sample {i} {marker} {noise} [SEP] "
                f"food{i % 4} contains chem{i % 6}")
        examples.append({"pair_id": f"s{i:04d}", "encoded_text": text,
                         "label": "positive" if positive else "negative"})
    return examples


def fixture_texts() -> list[str]:
    train, held_out = contract_fixture()
    texts = [encoded_text(item.pair) for item in train]
    texts += [encoded_text(pair) for pair in held_out]
    texts += [ex["encoded_text"] for ex in separable_fixture()]
    return texts


@pytest.fixture(scope="session")
def tiny_base_model(tmp_path_factory) -> str:
    words: set[str] = set()
    for text in fixture_texts():
        words.update(re.findall(r"\w+|[^\w\s]", text.lower()))
    words -= {"[", "]"}  # bracket pieces only occur inside the [SEP] special
    vocab = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"] + sorted(words)

    base_dir = tmp_path_factory.mktemp("base_model")
    (base_dir / "vocab.txt").write_text("\n".join(vocab) + "\n", encoding="utf-8")
    tokenizer = BertTokenizer(str(base_dir / "vocab.txt"), do_lower_case=True)
    tokenizer.save_pretrained(base_dir)

    config = BertConfig(
        vocab_size=len(vocab), hidden_size=48, num_hidden_layers=2,
        num_attention_heads=4, intermediate_size=96,
        max_position_embeddings=160, type_vocab_size=2, pad_token_id=0)
    torch.manual_seed(0)
    BertModel(config).save_pretrained(base_dir)
    return str(base_dir)
