"""HTTP/WebSocket service exposing the session engine.

Endpoints (JSON unless noted):
  POST /v1/sessions                                -> 201 {"session_id"}
  POST /v1/sessions/{id}/utterances {"text"}       -> 202 {"utterance_id"}
  POST /v1/sessions/{id}/panels/{i}/regenerate     -> 202 {"panel_index","seed"}
  PUT  /v1/sessions/{id}/panels/{i}/curated        -> {"total_width", ...}
  GET  /v1/sessions/{id}/panels/{i}/image          -> image/png (result|base)
  GET  /v1/sessions/{id}/scroll?offset=&width=     -> image/png (viewport)
  GET  /v1/sessions/{id}/events?from_seq=          -> {"events": [...]}
  GET/PUT /v1/config                               -> config document
  WS   /v1/sessions/{id}/stream?from_seq=          -> SessionEvent frames
"""

from __future__ import annotations

import argparse
import asyncio
import os
import queue
from typing import Any

from fastapi import FastAPI, Request, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse, Response

from .config import EngineConfig
from .errors import (
    ConfigError,
    EmptyInput,
    EquivalenceError,
    OutOfRange,
    TextTooLong,
    UnknownPanel,
    UnknownSession,
)
from .session import Engine, Subscription

ENV_CONFIG = "EQUIV_CONFIG"

STATUS_BY_ERROR = {
    UnknownSession: 404,
    UnknownPanel: 404,
    EmptyInput: 400,
    OutOfRange: 400,
    ConfigError: 400,
    TextTooLong: 413,
}


def _status_for(exc: EquivalenceError) -> int:
    for kind, status in STATUS_BY_ERROR.items():
        if isinstance(exc, kind):
            return status
    return 500


def create_app(engine: Engine) -> FastAPI:
    app = FastAPI(title="equivalence", docs_url=None, redoc_url=None)
    app.state.engine = engine

    @app.exception_handler(EquivalenceError)
    async def engine_error(_request: Request, exc: EquivalenceError):
        return JSONResponse(
            status_code=_status_for(exc),
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.post("/v1/sessions", status_code=201)
    async def create_session():
        session_id = await asyncio.to_thread(engine.create_session)
        return {"session_id": session_id}

    @app.post("/v1/sessions/{session_id}/utterances", status_code=202)
    async def submit_utterance(session_id: str, body: dict[str, Any]):
        text = body.get("text", "")
        if not isinstance(text, str):
            raise EmptyInput("utterance body must carry a 'text' string")
        utterance_id = engine.submit_utterance(session_id, text)
        return {"utterance_id": utterance_id}

    @app.post("/v1/sessions/{session_id}/panels/{panel_index}/regenerate", status_code=202)
    async def regenerate_panel(
        session_id: str, panel_index: int, body: dict[str, Any] | None = None
    ):
        seed = (body or {}).get("seed")
        used = engine.regenerate_panel(session_id, panel_index, seed)
        return {"panel_index": panel_index, "seed": used}

    @app.put("/v1/sessions/{session_id}/panels/{panel_index}/curated")
    async def set_curated(session_id: str, panel_index: int, body: dict[str, Any]):
        curated = bool(body.get("curated", True))
        total = engine.set_panel_curated(session_id, panel_index, curated)
        return {"panel_index": panel_index, "curated": curated, "total_width": total}

    @app.get("/v1/sessions/{session_id}/panels/{panel_index}/image")
    async def panel_image(session_id: str, panel_index: int, kind: str = "result"):
        from .scroll import get_panel

        scroll = engine.scroll_state(session_id)
        panel = get_panel(scroll, panel_index)
        data = panel.base if kind == "base" else panel.result
        return Response(content=data, media_type="image/png")

    @app.get("/v1/sessions/{session_id}/scroll")
    async def scroll_viewport(
        session_id: str, offset: int = 0, width: int | None = None
    ):
        scroll = engine.scroll_state(session_id)
        total = scroll.total_width
        width_px = total - offset if width is None else width
        image = await asyncio.to_thread(
            engine.get_viewport, session_id, offset, width_px
        )
        return Response(
            content=image.to_png(),
            media_type="image/png",
            headers={
                "X-Total-Width": str(total),
                "X-Panel-Height": str(scroll.panel_height),
            },
        )

    @app.get("/v1/sessions/{session_id}/events")
    async def list_events(session_id: str, from_seq: int = 0):
        events = engine.events_since(session_id, from_seq)
        return {"events": [e.to_json() for e in events]}

    @app.get("/v1/config")
    async def get_config():
        config = engine.config
        return {"config": config.to_dict(), "config_hash": config.config_hash()}

    @app.put("/v1/config")
    async def put_config(body: dict[str, Any]):
        new_config = EngineConfig.from_dict(body)  # raises ConfigError -> 400
        digest = engine.apply_config(new_config)
        return {"config_hash": digest}

    @app.websocket("/v1/sessions/{session_id}/stream")
    async def stream(websocket: WebSocket, session_id: str, from_seq: int = 0):
        try:
            backlog, sub = engine.subscribe(session_id, from_seq)
        except UnknownSession:
            await websocket.close(code=1008)
            return
        await websocket.accept()
        receiver = asyncio.create_task(websocket.receive())
        try:
            for event in backlog:
                await websocket.send_json(event.to_json())
            while True:
                if receiver.done():
                    break  # client disconnected (or spoke; we only stream)
                try:
                    item = await asyncio.to_thread(sub.queue.get, True, 0.25)
                except queue.Empty:
                    continue
                if item is Subscription.CLOSE:
                    await websocket.close(code=1011)  # slow consumer dropped
                    break
                await websocket.send_json(item.to_json())
        except WebSocketDisconnect:
            pass
        finally:
            receiver.cancel()
            engine.unsubscribe(session_id, sub)

    return app


def load_config(argv_config: str | None) -> EngineConfig:
    path = argv_config or os.environ.get(ENV_CONFIG)
    if path:
        return EngineConfig.load(path)
    return EngineConfig()


def engine_from_args(args: argparse.Namespace) -> Engine:
    config = load_config(args.config)
    if args.bind:
        config.service.bind = args.bind
    if args.data_dir:
        config.service.data_dir = args.data_dir
    config.validate()
    engine = Engine(config)
    engine.restore()
    return engine


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="equivalence-serve",
        description="Run the utterance-to-scroll session service.",
    )
    parser.add_argument("--config", help=f"JSON config path (default: ${ENV_CONFIG})")
    parser.add_argument("--bind", help="host:port to listen on")
    parser.add_argument("--data-dir", help="directory for session logs and panels")
    return parser


def main(argv: list[str] | None = None) -> None:
    import uvicorn

    args = build_parser().parse_args(argv)
    engine = engine_from_args(args)
    app = create_app(engine)
    service = engine.config.service
    try:
        uvicorn.run(app, host=service.host, port=service.port, log_level="info")
    finally:
        engine.close()


if __name__ == "__main__":
    main()
