"""The wire contract: health, fit, predict. Nothing else."""

from __future__ import annotations

import logging
from contextlib import asynccontextmanager

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from foodkb_sidecar import __version__
from foodkb_sidecar.config import SidecarConfig
from foodkb_sidecar.modeling import SidecarRuntime, UnknownModelError

logger = logging.getLogger(__name__)


class ExampleBody(BaseModel):
    pair_id: str
    encoded_text: str
    label: str = Field(pattern="^(positive|negative)$")


class FitBody(BaseModel):
    examples: list[ExampleBody]
    hyperparams: dict
    seed: int


class ItemBody(BaseModel):
    pair_id: str
    encoded_text: str


class PredictBody(BaseModel):
    model_id: str
    items: list[ItemBody]


def create_app(config: SidecarConfig | None = None) -> FastAPI:
    config = config or SidecarConfig.load()
    state: dict = {"runtime": None}

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        # health reports ready only once the base model assets are loaded
        state["runtime"] = SidecarRuntime(config)
        yield

    app = FastAPI(title="foodkb transformer sidecar", version=__version__,
                  lifespan=lifespan)

    def runtime() -> SidecarRuntime:
        rt = state["runtime"]
        if rt is None:
            raise HTTPException(status_code=503, detail="base model loading")
        return rt

    @app.get("/health")
    def health() -> dict:
        status = "ready" if state["runtime"] is not None else "loading"
        return {"status": status, "version": __version__,
                "base_model": config.base_model}

    @app.post("/fit")
    def fit(body: FitBody) -> dict:
        if not body.examples:
            raise HTTPException(status_code=400, detail="empty training set")
        for key in ("learning_rate", "batch_size", "epochs"):
            if key not in body.hyperparams:
                raise HTTPException(status_code=400,
                                    detail=f"hyperparams missing {key!r}")
        try:
            model_id = runtime().fit([e.model_dump() for e in body.examples],
                                     body.hyperparams, body.seed)
        except torch_oom_errors() as exc:
            raise HTTPException(
                status_code=507,
                detail=f"out of memory; retry with a smaller batch_size: {exc}")
        return {"model_id": model_id}

    @app.post("/predict")
    def predict(body: PredictBody) -> dict:
        try:
            probs = runtime().predict(body.model_id,
                                      [i.model_dump() for i in body.items])
        except UnknownModelError:
            raise HTTPException(status_code=404,
                                detail=f"unknown model {body.model_id!r}")
        return {"probabilities": probs}

    return app


def torch_oom_errors() -> tuple[type[BaseException], ...]:
    import torch

    return (torch.cuda.OutOfMemoryError, MemoryError)


def main() -> None:
    import uvicorn

    logging.basicConfig(level=logging.INFO)
    config = SidecarConfig.load()
    uvicorn.run(create_app(config), host="127.0.0.1", port=config.port)


if __name__ == "__main__":
    main()
