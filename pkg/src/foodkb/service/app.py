"""HTTP API for the annotation workbench.

Endpoints mirror the project engine: project lifecycle, per-round batches,
label submission, round advancement (background training with status
polling), and read models for metrics, discovery, and the knowledge base.
Status codes: 2xx success, 4xx validation, 409 state conflicts, 5xx backend.
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi import FastAPI, Header, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from foodkb import __version__
from foodkb.classifier.baseline import HyperParams
from foodkb.classifier.contract import BASELINE_GRID
from foodkb.service.projects import (
    ProjectConfig,
    ProjectError,
    ProjectManager,
    ProjectNotFound,
    StateConflict,
)


class HyperParamsBody(BaseModel):
    learning_rate: float = Field(gt=0)
    batch_size: int = Field(gt=0)
    epochs: int = Field(gt=0)


class AnnotatorBody(BaseModel):
    id: str
    token: str


class CreateProjectBody(BaseModel):
    project_id: str
    strategy: str
    rounds: int = Field(ge=1)
    batch_size: int = Field(ge=1)
    seed: int
    pool_path: str
    val_path: str
    test_path: str
    annotators: list[AnnotatorBody]
    hyperparams: HyperParamsBody | None = None
    backend_kind: str = "baseline"
    backend_url: str | None = None


class SubmitLabelsBody(BaseModel):
    annotator_id: str
    labels: dict[str, str]


def create_app(projects_root: str | Path, static_dir: str | Path | None = None,
               manager: ProjectManager | None = None) -> FastAPI:
    app = FastAPI(title="foodkb workbench", version=__version__)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"])
    mgr = manager or ProjectManager(projects_root)
    app.state.manager = mgr

    def _wrap(fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ProjectNotFound as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except StateConflict as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except ProjectError as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    @app.get("/health")
    def health() -> dict:
        return {"status": "ready", "version": __version__}

    @app.post("/projects", status_code=201)
    def create_project(body: CreateProjectBody) -> dict:
        hp = (HyperParams(**body.hyperparams.model_dump())
              if body.hyperparams else BASELINE_GRID[0])
        config = ProjectConfig(
            project_id=body.project_id,
            strategy=body.strategy,
            rounds=body.rounds,
            batch_size=body.batch_size,
            seed=body.seed,
            hyperparams=hp,
            pool_path=body.pool_path,
            val_path=body.val_path,
            test_path=body.test_path,
            annotators=tuple(a.model_dump() for a in body.annotators),
            backend_kind=body.backend_kind,
            backend_url=body.backend_url,
        )
        _wrap(mgr.create_project, config)
        return _wrap(mgr.project_view, body.project_id)

    @app.get("/projects")
    def list_projects() -> dict:
        return {"projects": mgr.list_projects()}

    @app.get("/projects/{project_id}")
    def get_project(project_id: str) -> dict:
        return _wrap(mgr.project_view, project_id)

    @app.get("/projects/{project_id}/rounds/{round_index}/batch")
    def get_batch(project_id: str, round_index: int) -> dict:
        return _wrap(mgr.batch_view, project_id, round_index)

    @app.get("/projects/{project_id}/rounds/{round_index}")
    def get_round(project_id: str, round_index: int) -> dict:
        def view() -> dict:
            project = mgr.get_project(project_id)
            job = project.job_status(round_index)
            done = project.completed_rounds() >= round_index
            out = {"round_index": round_index, "trained": done, "job": job}
            if done:
                out["record"] = json.loads(
                    project.round_path(round_index).read_text(encoding="utf-8"))
            return out
        return _wrap(view)

    @app.post("/projects/{project_id}/batches/{batch_id}/labels")
    def submit_labels(project_id: str, batch_id: str, body: SubmitLabelsBody,
                      x_annotator_token: str = Header(default="")) -> dict:
        return _wrap(mgr.submit_labels, project_id, batch_id, body.annotator_id,
                     x_annotator_token, body.labels)

    @app.post("/projects/{project_id}/rounds/{round_index}/advance", status_code=202)
    def advance_round(project_id: str, round_index: int) -> dict:
        return _wrap(mgr.advance_round, project_id, round_index)

    @app.get("/projects/{project_id}/metrics")
    def get_metrics(project_id: str) -> dict:
        return _wrap(mgr.metrics_view, project_id)

    @app.get("/projects/{project_id}/discovery")
    def get_discovery(project_id: str) -> dict:
        return _wrap(mgr.discovery_view, project_id)

    @app.get("/projects/{project_id}/curves")
    def get_curves(project_id: str, round_index: int | None = Query(default=None)) -> dict:
        return _wrap(mgr.curves_view, project_id, round_index)

    @app.get("/projects/{project_id}/result")
    def get_result(project_id: str) -> dict:
        return _wrap(mgr.result_view, project_id)

    @app.get("/projects/{project_id}/kb")
    def get_kb(project_id: str, min_confidence: float = Query(default=0.0)) -> dict:
        return _wrap(mgr.kb_view, project_id, min_confidence)

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
