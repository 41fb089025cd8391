"""HTTP service hosting the oracle queue, run state, and the review UI."""

from __future__ import annotations

import socket
import threading
import time
from pathlib import Path
from typing import Literal

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import HTMLResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .oracle import OracleError, OracleQueue


class ServiceError(RuntimeError):
    pass


class StateSnapshot:
    """Thread-safe view of the running bootstrap, published at /api/state."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._relations: dict[str, dict] = {}

    def update_relation(self, name: str, state, pattern_rows: list[dict], relation_rows: list[dict]) -> None:
        with self._lock:
            self._relations[name] = {
                "iteration": state.iteration,
                "seed_set_sizes": {
                    "relations": len(state.known_relations),
                    "patterns": len(state.known_patterns),
                },
                "last_cycle": {"patterns": pattern_rows, "relations": relation_rows},
            }

    def to_dict(self) -> dict:
        with self._lock:
            iteration = max((r["iteration"] for r in self._relations.values()), default=0)
            return {"iteration": iteration, "relations": dict(self._relations)}


class AnswerBody(BaseModel):
    answer: Literal["yes", "no", "dont_know"]


_FALLBACK_UI = """<!doctype html>
<html><head><title>secrel review</title></head>
<body><p>The review UI has not been built. Run <code>npm run build</code> in
<code>frontend/</code> and restart with <code>--ui-dir frontend/dist</code>.</p></body></html>
"""


def create_app(
    queue: OracleQueue, snapshot: StateSnapshot, ui_dir: str | Path | None = None
) -> FastAPI:
    app = FastAPI(title="secrel review service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.get("/api/queries/pending")
    def pending() -> list[dict]:
        return [q.to_dict() for q in queue.pending()]

    @app.post("/api/queries/{query_id}/answer")
    def answer(query_id: str, body: AnswerBody) -> dict:
        try:
            query = queue.answer(query_id, body.answer)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"no such query {query_id!r}")
        except OracleError:
            raise HTTPException(status_code=404, detail=f"query {query_id!r} is not pending")
        return query.to_dict()

    @app.get("/api/state")
    def state() -> dict:
        return snapshot.to_dict()

    ui_path = Path(ui_dir) if ui_dir else None
    if ui_path is not None and ui_path.is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_path), html=True), name="ui")
    else:

        @app.get("/ui", response_class=HTMLResponse)
        def ui_placeholder() -> str:
            return _FALLBACK_UI

    return app


def ensure_port_free(host: str, port: int) -> None:
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((host, port))
    except OSError as exc:
        raise ServiceError(f"cannot bind {host}:{port}: {exc}") from None
    finally:
        probe.close()


def serve_in_thread(app: FastAPI, host: str, port: int):
    """Start uvicorn in a daemon thread; returns (server, thread)."""
    import uvicorn

    ensure_port_free(host, port)
    config = uvicorn.Config(app, host=host, port=port, log_level="warning")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.monotonic() + 10
    while not server.started:
        if time.monotonic() > deadline:
            raise ServiceError(f"service failed to start on {host}:{port}")
        time.sleep(0.05)
    return server, thread
