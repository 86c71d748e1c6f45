"""Workbench configuration: JSON file with environment-variable overrides.

Environment variables take precedence over the file:

* ``FOODKB_SEARCH_URL``     literature search endpoint
* ``FOODKB_SEARCH_RATE``    requests per second
* ``FOODKB_SEARCH_TIMEOUT`` per-request timeout in seconds
* ``FOODKB_PROJECTS_ROOT``  directory holding project state
* ``FOODKB_BACKEND_URL``    external classifier backend
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path


@dataclass(frozen=True)
class Config:
    search_url: str = ""
    search_rate_per_sec: float = 3.0
    search_timeout_sec: float = 30.0
    projects_root: str = "projects"
    backend_url: str = ""
    service_port: int = 8800
    extra: dict = field(default_factory=dict)

    @classmethod
    def load(cls, path: str | Path | None = None) -> "Config":
        data: dict = {}
        if path is not None:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        env = os.environ
        return cls(
            search_url=env.get("FOODKB_SEARCH_URL", data.get("search_url", "")),
            search_rate_per_sec=float(env.get(
                "FOODKB_SEARCH_RATE", data.get("search_rate_per_sec", 3.0))),
            search_timeout_sec=float(env.get(
                "FOODKB_SEARCH_TIMEOUT", data.get("search_timeout_sec", 30.0))),
            projects_root=env.get(
                "FOODKB_PROJECTS_ROOT", data.get("projects_root", "projects")),
            backend_url=env.get("FOODKB_BACKEND_URL", data.get("backend_url", "")),
            service_port=int(data.get("service_port", 8800)),
            extra={k: v for k, v in data.items()
                   if k not in {"search_url", "search_rate_per_sec",
                                "search_timeout_sec", "projects_root",
                                "backend_url", "service_port"}},
        )
