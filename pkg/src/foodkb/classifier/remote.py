"""HTTP client for an external classifier backend.

Wire contract (JSON bodies):

* ``GET  /health``  -> ``{"status": "ready"}`` once the backend can serve.
* ``POST /fit``     -> body ``{"examples": [{"pair_id", "encoded_text",
  "label"}], "hyperparams": {...}, "seed": int}``; returns ``{"model_id"}``.
* ``POST /predict`` -> body ``{"model_id", "items": [{"pair_id",
  "encoded_text"}]}``; returns ``{"probabilities": [...]}``.

Transport failures raise :class:`BackendTransportError`; backend-side
rejections (unknown model, invalid payload) raise :class:`BackendModelError`
so callers can tell an unreachable sidecar from a bad request.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from typing import Any, Sequence

import requests

from foodkb.annotations.labels import LabeledSRPair
from foodkb.classifier.baseline import HyperParams, encoded_text
from foodkb.classifier.contract import BackendModelError, BackendTransportError
from foodkb.extract.pairs import SRPair

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RemoteModel:
    model_id: str


class RemoteBackend:
    kind = "external"

    def __init__(self, base_url: str, session: Any = None,
                 timeout_sec: float = 600.0, retries: int = 2,
                 retry_wait_sec: float = 1.0) -> None:
        self.base_url = base_url.rstrip("/")
        self.session = session or requests.Session()
        self.timeout_sec = timeout_sec
        self.retries = retries
        self.retry_wait_sec = retry_wait_sec

    def health(self) -> bool:
        try:
            resp = self._request("get", "/health")
        except BackendTransportError:
            return False
        return resp.get("status") == "ready"

    def fit(self, train: Sequence[LabeledSRPair], hp: HyperParams,
            seed: int) -> RemoteModel:
        body = {
            "examples": [
                {"pair_id": item.pair.pair_id,
                 "encoded_text": encoded_text(item.pair),
                 "label": item.label}
                for item in train
            ],
            "hyperparams": hp.to_record(),
            "seed": seed,
        }
        payload = self._request("post", "/fit", body)
        return RemoteModel(model_id=str(payload["model_id"]))

    def predict_proba(self, model: RemoteModel, items: Sequence[SRPair]) -> list[float]:
        body = {
            "model_id": model.model_id,
            "items": [{"pair_id": item.pair_id, "encoded_text": encoded_text(item)}
                      for item in items],
        }
        payload = self._request("post", "/predict", body)
        probs = [float(p) for p in payload["probabilities"]]
        if len(probs) != len(items):
            raise BackendModelError(
                f"backend returned {len(probs)} probabilities for {len(items)} items")
        return probs

    def _request(self, method: str, path: str, body: dict | None = None) -> dict:
        url = self.base_url + path
        last_err: Exception | None = None
        for attempt in range(self.retries + 1):
            try:
                if method == "get":
                    resp = self.session.get(url, timeout=self.timeout_sec)
                else:
                    resp = self.session.post(url, json=body, timeout=self.timeout_sec)
            except Exception as exc:
                last_err = exc
                if attempt < self.retries:
                    logger.warning("backend %s %s failed (%s); retrying", method, url, exc)
                    time.sleep(self.retry_wait_sec)
                continue
            if 200 <= resp.status_code < 300:
                return resp.json()
            if 400 <= resp.status_code < 500:
                raise BackendModelError(f"backend rejected {path}: "
                                        f"HTTP {resp.status_code} {resp.text[:200]}")
            last_err = BackendTransportError(f"HTTP {resp.status_code} from {url}")
            if attempt < self.retries:
                time.sleep(self.retry_wait_sec)
        raise BackendTransportError(f"backend unreachable at {url}: {last_err}")
