"""Sidecar configuration from a JSON file and environment variables.

Environment variables override the file:

* ``SIDECAR_BASE_MODEL``     encoder checkpoint (hub id or local directory)
* ``SIDECAR_DEVICE``         cpu / cuda / cuda:N
* ``SIDECAR_MAX_SEQ_LEN``    token truncation limit
* ``SIDECAR_PORT``           served port
* ``SIDECAR_CHECKPOINT_DIR`` where fine-tuned models are stored
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

# Biomedical-domain pretrained encoder; swap for any BERT-family checkpoint.
DEFAULT_BASE_MODEL = "dmis-lab/biobert-v1.1"


@dataclass(frozen=True)
class SidecarConfig:
    base_model: str = DEFAULT_BASE_MODEL
    device: str = "cpu"
    max_seq_len: int = 256
    port: int = 8900
    checkpoint_dir: str = "checkpoints"

    @classmethod
    def load(cls, path: str | Path | None = None) -> "SidecarConfig":
        data: dict = {}
        if path is not None:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        env = os.environ
        return cls(
            base_model=env.get("SIDECAR_BASE_MODEL",
                               data.get("base_model", DEFAULT_BASE_MODEL)),
            device=env.get("SIDECAR_DEVICE", data.get("device", "cpu")),
            max_seq_len=int(env.get("SIDECAR_MAX_SEQ_LEN",
                                    data.get("max_seq_len", 256))),
            port=int(env.get("SIDECAR_PORT", data.get("port", 8900))),
            checkpoint_dir=env.get("SIDECAR_CHECKPOINT_DIR",
                                   data.get("checkpoint_dir", "checkpoints")),
        )
