"""FastAPI application wrapping the session service."""

from __future__ import annotations

from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from pydantic import TypeAdapter, ValidationError

from ..config import Config, load_config
from .core import ServiceCore, ServiceError
from .models import (
    MESSAGE_TYPES,
    DocEntryModel,
    HealthResponse,
    Message,
    MessageResponse,
    SessionCreated,
    SessionState,
)

_MESSAGE_ADAPTER: TypeAdapter = TypeAdapter(Message)

EVAL_REPORT_NAME = "report.csv"


def create_app(config: Optional[Config] = None, console_dir: Optional[Path] = None) -> FastAPI:
    config = config if config is not None else load_config()
    core = ServiceCore(config)
    app = FastAPI(title="idiolect session service", version="0.1.0")
    app.state.core = core
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(ServiceError)
    async def service_error_handler(_request: Request, exc: ServiceError):
        return JSONResponse(status_code=exc.status, content=exc.body())

    @app.get("/healthz", response_model=HealthResponse)
    def healthz() -> HealthResponse:
        return HealthResponse(status="ok", sessions=core.session_count)

    @app.post("/sessions", response_model=SessionCreated)
    def create_session() -> SessionCreated:
        return SessionCreated(session_id=core.create_session())

    @app.get("/sessions/{sid}", response_model=SessionState)
    def session_state(sid: str) -> SessionState:
        return SessionState(**core.session_state(sid))

    @app.post("/sessions/{sid}/messages", response_model=MessageResponse,
              response_model_exclude_none=True)
    async def post_message(sid: str, request: Request):
        try:
            message = await request.json()
        except Exception as exc:  # malformed JSON body
            raise ServiceError("invalid_message", f"body is not valid JSON: {exc}")
        if not isinstance(message, dict):
            raise ServiceError("invalid_message", "message body must be a JSON object")
        if message.get("type") in MESSAGE_TYPES:
            try:
                message = _MESSAGE_ADAPTER.validate_python(message).model_dump()
            except ValidationError as exc:
                first = exc.errors()[0]
                raise ServiceError(
                    "invalid_message",
                    f"{'.'.join(str(p) for p in first['loc'])}: {first['msg']}",
                )
        return core.handle_message(sid, message)

    @app.get("/sessions/{sid}/events", response_model=MessageResponse,
             response_model_exclude_none=True)
    def poll_events(sid: str, after: int = Query(default=0, ge=0)):
        return core.handle_message(sid, {"type": "subscribe", "after_seq": after})

    @app.get("/actions/docs", response_model=list[DocEntryModel])
    def action_docs(sid: Optional[str] = None):
        return core.docs(sid)

    @app.get("/eval/report", response_class=PlainTextResponse)
    def eval_report():
        path = config.home_dir / EVAL_REPORT_NAME
        if not path.exists():
            raise ServiceError("no_report", "no eval report has been generated", status=404)
        return PlainTextResponse(path.read_text("utf-8"), media_type="text/csv")

    @app.get("/eval/traces", response_class=PlainTextResponse)
    def eval_traces():
        path = config.home_dir / "traces.json"
        if not path.exists():
            raise ServiceError("no_report", "no eval traces have been generated", status=404)
        return PlainTextResponse(path.read_text("utf-8"), media_type="application/json")

    console = console_dir if console_dir is not None else _default_console_dir()
    if console is not None and console.exists():
        app.mount("/", StaticFiles(directory=str(console), html=True), name="console")

    return app


def _default_console_dir() -> Optional[Path]:
    # repo layout: frontend/dist next to the installed source tree, if present
    here = Path(__file__).resolve()
    for parent in here.parents:
        candidate = parent / "frontend" / "dist"
        if candidate.exists():
            return candidate
    return None


def serve(config: Config, bind_address: str = "127.0.0.1:8000") -> None:
    """Run the service until interrupted. Raises SystemExit with a message when
    the port is already taken."""
    import errno
    import uvicorn

    host, _, port_text = bind_address.rpartition(":")
    host = host or "127.0.0.1"
    try:
        port = int(port_text)
    except ValueError:
        raise SystemExit(f"invalid bind address {bind_address!r}; expected HOST:PORT")
    app = create_app(config)
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    except OSError as exc:
        if exc.errno in (errno.EADDRINUSE, errno.EACCES):
            raise SystemExit(f"cannot bind {bind_address}: {exc.strerror}")
        raise
