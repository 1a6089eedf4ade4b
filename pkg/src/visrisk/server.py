"""HTTP/JSON API over a published workspace.

Every GET is a pure read of the current workspace snapshot; POST /api/state
mints permalink tokens (the token IS the stored state, nothing persists)
and POST /api/network/relax is pure given its body.  Rebuilding a
workspace swaps the snapshot atomically, so concurrent readers see either
the old or the new version, never a mixture.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException, Request, Response
from fastapi.staticfiles import StaticFiles

from visrisk import svg_export
from visrisk.state import StateError, ViewState, decode_state, encode_state, state_from_dict
from visrisk.workspace import (
    BadRequest,
    NotFound,
    Workspace,
    WorkspaceHolder,
    ewm_payload,
    events_payload,
    meta_payload,
    network_payload,
    panel_payload,
    relax_payload,
    series_payload,
    som_payload,
    som_plane_payload,
    som_trajectory_payload,
    sotm_payload,
    sotm_plane_payload,
)

TRANSFORMS = ("raw", "percentile")


def build_app(holder: WorkspaceHolder) -> FastAPI:
    app = FastAPI(title="visrisk", docs_url=None, redoc_url=None)

    def ws() -> Workspace:
        return holder.current

    @app.exception_handler(NotFound)
    async def _not_found(request: Request, exc: NotFound):
        raise HTTPException(status_code=404, detail=str(exc))

    @app.exception_handler(BadRequest)
    async def _bad_request(request: Request, exc: BadRequest):
        raise HTTPException(status_code=422, detail=str(exc))

    @app.exception_handler(StateError)
    async def _bad_state(request: Request, exc: StateError):
        raise HTTPException(status_code=422, detail=str(exc))

    def check_transform(transform: str) -> str:
        if transform not in TRANSFORMS:
            raise BadRequest(f"unknown transform {transform!r}")
        return transform

    @app.get("/api/meta")
    def meta():
        return meta_payload(ws())

    @app.get("/api/cube/panel")
    def cube_panel(indicator: str, transform: str = "raw"):
        return panel_payload(ws(), indicator, check_transform(transform))

    @app.get("/api/cube/series")
    def cube_series(entity: str, transform: str = "raw"):
        return series_payload(ws(), entity, check_transform(transform))

    @app.get("/api/events")
    def events():
        return events_payload(ws())

    @app.get("/api/som")
    def som():
        return som_payload(ws())

    @app.get("/api/som/plane")
    def som_plane(indicator: str):
        return som_plane_payload(ws(), indicator)

    @app.get("/api/som/trajectory")
    def som_trajectory(entity: str):
        return som_trajectory_payload(ws(), entity)

    @app.get("/api/sotm")
    def sotm():
        return sotm_payload(ws())

    @app.get("/api/sotm/plane")
    def sotm_plane(indicator: str):
        return sotm_plane_payload(ws(), indicator)

    @app.get("/api/network")
    def network(request: Request, seed: Optional[int] = None):
        # `from` is a Python keyword, so pull the raw query parameters
        start = request.query_params.get("from")
        end = request.query_params.get("to")
        return network_payload(ws(), start, end, seed)

    @app.post("/api/network/relax")
    async def network_relax(request: Request):
        try:
            body = await request.json()
        except Exception:
            raise BadRequest("body must be JSON") from None
        return relax_payload(ws(), body)

    @app.get("/api/ewm")
    def ewm(entity: Optional[str] = None):
        return ewm_payload(ws(), entity)

    @app.post("/api/state")
    async def make_state(request: Request):
        try:
            body = await request.json()
        except Exception:
            raise BadRequest("body must be JSON") from None
        state = state_from_dict(body)
        return {"token": encode_state(state), "state": state.canonical()}

    @app.get("/api/state/{token}")
    def get_state(token: str):
        return decode_state(token).canonical()

    @app.get("/api/export/{view}.svg")
    def export_view(view: str, state: Optional[str] = None):
        view_state = decode_state(state) if state else ViewState(view=view) \
            if view in ("dashboard", "ewm", "fsm", "fsmt", "bim") else None
        if view_state is None:
            raise NotFound(f"unknown view {view!r}")
        svg = svg_export.render_view(ws(), view, view_state)
        return Response(content=svg, media_type="image/svg+xml")

    frontend = ws().config.frontend_dir
    if frontend and Path(frontend).is_dir():
        app.mount("/", StaticFiles(directory=frontend, html=True), name="frontend")

    return app


def serve(holder: WorkspaceHolder, host: str = "127.0.0.1", port: int = 8700) -> None:
    import uvicorn

    uvicorn.run(build_app(holder), host=host, port=port, log_level="warning")
