"""HTTP API over project directories.

JSON request/response bodies; one writer per project (mutations take the
project lock), lock-free reads. Mutating endpoints accept a client-supplied
``request_token`` and replay their recorded outcome on retry. Built UI
assets, when present, are served under /.
"""

from __future__ import annotations

import os
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles

from . import metrics, review
from .project import Project, ProjectConfig, ProjectError, default_config

ENV_PROJECT_ROOT = "GLSB_PROJECT_ROOT"
ENV_UI_DIR = "GLSB_UI_DIR"


def _load_project(root: Path, project_id: str) -> Project:
    project_dir = root / project_id
    if not (project_dir / "project.json").is_file():
        raise HTTPException(status_code=404, detail=f"no project {project_id!r}")
    return Project(project_dir)


def create_app(project_root: Path | None = None, ui_dir: Path | None = None) -> FastAPI:
    if project_root is None:
        project_root = Path(os.environ.get(ENV_PROJECT_ROOT, "."))
    project_root = Path(project_root)
    if ui_dir is None and os.environ.get(ENV_UI_DIR):
        ui_dir = Path(os.environ[ENV_UI_DIR])

    app = FastAPI(title="glsb review service")

    @app.exception_handler(ProjectError)
    async def _project_error(_request: Request, exc: ProjectError):
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.post("/projects", status_code=201)
    def create_project(body: dict):
        project_id = body.get("id")
        corpus_path = body.get("corpus_path")
        if not project_id or not corpus_path:
            raise HTTPException(status_code=422, detail="id and corpus_path required")
        corpus_dir = Path(corpus_path)
        if not corpus_dir.is_absolute():
            corpus_dir = project_root / corpus_dir
        if not (corpus_dir / "manifest.json").is_file():
            raise HTTPException(status_code=404, detail=f"missing corpus: {corpus_dir}")
        project_dir = project_root / project_id
        if (project_dir / "project.json").is_file():
            if body.get("request_token"):
                return {"id": project_id, "created": False}
            raise HTTPException(status_code=409, detail="project exists")
        config = None
        if "config" in body:
            config = ProjectConfig.from_json(body["config"])
        else:
            config = default_config()
        project = Project.create(project_dir, corpus_dir, config, project_id)
        return {"id": project.id, "created": True}

    @app.post("/projects/{project_id}/startset")
    def run_startset(project_id: str, body: dict | None = None):
        project = _load_project(project_root, project_id)
        token = (body or {}).get("request_token")
        with project.lock:
            return project.run_startset(token)

    @app.post("/projects/{project_id}/iterations")
    def run_iteration(project_id: str, body: dict | None = None):
        project = _load_project(project_root, project_id)
        token = (body or {}).get("request_token")
        with project.lock:
            return project.run_snowball_iteration(token)

    @app.get("/projects/{project_id}/queue")
    def get_queue(project_id: str, reviewer: str = Query(...)):
        project = _load_project(project_root, project_id)
        return {"reviewer": reviewer, "queue": project.queue(reviewer)}

    @app.get("/projects/{project_id}/discussions/{discussion_id}")
    def get_thread(project_id: str, discussion_id: int):
        project = _load_project(project_root, project_id)
        try:
            return project.thread(discussion_id)
        except KeyError:
            raise HTTPException(status_code=404, detail="unknown discussion")

    @app.post("/projects/{project_id}/labels")
    def post_label(project_id: str, body: dict):
        project = _load_project(project_root, project_id)
        try:
            label = review.Label.from_json(body)
        except KeyError as exc:
            raise HTTPException(
                status_code=422, detail={str(exc.args[0]): "field required"}
            )
        with project.lock:
            try:
                state = project.submit_label(label)
            except review.LabelValidationError as exc:
                raise HTTPException(
                    status_code=422, detail={exc.field_name: exc.message}
                )
            except review.UnknownDiscussionError as exc:
                raise HTTPException(status_code=404, detail=str(exc))
        return state.to_json()

    @app.get("/projects/{project_id}/report")
    def get_report(project_id: str, format: str = metrics.FORMAT_STRUCTURED):
        project = _load_project(project_root, project_id)
        if format not in (metrics.FORMAT_STRUCTURED, metrics.FORMAT_TABLE):
            raise HTTPException(status_code=422, detail=f"unknown format {format!r}")
        payload = project.report_bytes(format)
        media = (
            "application/x-ndjson"
            if format == metrics.FORMAT_STRUCTURED
            else "text/markdown; charset=utf-8"
        )
        return Response(content=payload, media_type=media)

    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
