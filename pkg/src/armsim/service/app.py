"""HTTP and WebSocket surface over sessions.

One registry per app instance. Commands to a session are applied under that
session's lock (single writer); snapshots and stream fan-out read immutable
states, so no reader ever sees a half-applied command. While an animation is
running a per-session ticker advances it at the configured rate and streams
the interpolated states.
"""

from __future__ import annotations

import asyncio
import contextlib
from dataclasses import dataclass, field
from typing import Any

from fastapi import FastAPI, Request, WebSocket, WebSocketDisconnect
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .. import session as sess
from .. import wire
from ..catalog import builtin_catalog, get_model, load_models_dir
from ..errors import (
    InfeasibleBranchError,
    SimError,
    StaleRevisionError,
    UnknownBranchError,
    UnknownModelError,
    UnknownSessionError,
    WrongModeError,
)
from .schemas import Command, CreateSession, to_session_command

DEFAULT_TICK_RATE = 30.0

_STATUS: tuple[tuple[type[SimError], int], ...] = (
    (UnknownModelError, 404),
    (UnknownSessionError, 404),
    (UnknownBranchError, 404),
    (WrongModeError, 409),
    (InfeasibleBranchError, 409),
    (StaleRevisionError, 409),
)


def _status_for(exc: SimError) -> int:
    for kind, status in _STATUS:
        if isinstance(exc, kind):
            return status
    return 400


@dataclass(eq=False)
class _Entry:
    state: sess.SessionState
    lock: asyncio.Lock = field(default_factory=asyncio.Lock)
    queues: set[asyncio.Queue] = field(default_factory=set)
    ticker: asyncio.Task | None = None


class Registry:
    """All live sessions of one app instance."""

    def __init__(self, extra_models: dict | None, tick_rate: float):
        self.extra_models = extra_models
        self.tick_rate = tick_rate
        self.entries: dict[str, _Entry] = {}

    def model(self, name: str):
        return get_model(name, self.extra_models)

    def create(self, model_name: str) -> _Entry:
        state = sess.create_session(self.model(model_name))
        entry = _Entry(state=state)
        self.entries[state.session_id] = entry
        return entry

    def get(self, session_id: str) -> _Entry:
        entry = self.entries.get(session_id)
        if entry is None:
            raise UnknownSessionError(f"unknown session {session_id!r}")
        return entry

    def broadcast(self, entry: _Entry, event: dict[str, Any]) -> None:
        # caller holds entry.lock, so queue order equals revision order
        for queue in entry.queues:
            queue.put_nowait(event)

    def ensure_ticker(self, entry: _Entry) -> None:
        if self.tick_rate <= 0.0:
            return
        if entry.state.animation is not None and entry.ticker is None:
            entry.ticker = asyncio.create_task(self._run_ticker(entry))

    async def _run_ticker(self, entry: _Entry) -> None:
        dt = 1.0 / self.tick_rate
        try:
            while True:
                await asyncio.sleep(dt)
                async with entry.lock:
                    if entry.state.animation is None:
                        break
                    step = sess.apply(entry.state, {"type": "tick", "dt": dt})
                    entry.state = step.state
                    self.broadcast(entry, wire.state_event(step.state))
        finally:
            entry.ticker = None

    async def shutdown(self) -> None:
        for entry in self.entries.values():
            if entry.ticker is not None:
                entry.ticker.cancel()
                with contextlib.suppress(asyncio.CancelledError):
                    await entry.ticker


def create_app(
    models_dir: str | None = None,
    tick_rate: float = DEFAULT_TICK_RATE,
    ui_dir: str | None = None,
) -> FastAPI:
    """Build the service; tick_rate <= 0 disables automatic animation ticking
    (useful for deterministic contract replays). ui_dir, when given, is a
    directory of static files mounted at the root so the browser client is
    served from the same origin as the API."""
    extra = load_models_dir(models_dir) if models_dir is not None else None
    registry = Registry(extra, tick_rate)

    @contextlib.asynccontextmanager
    async def lifespan(_: FastAPI):
        yield
        await registry.shutdown()

    app = FastAPI(title="armsim", lifespan=lifespan)
    app.state.registry = registry

    @app.exception_handler(SimError)
    async def _sim_error(_: Request, exc: SimError) -> JSONResponse:
        return JSONResponse(
            status_code=_status_for(exc),
            content={"error": {"code": exc.code, "message": str(exc)}},
        )

    @app.exception_handler(RequestValidationError)
    async def _bad_body(_: Request, exc: RequestValidationError) -> JSONResponse:
        detail = "; ".join(
            f"{'.'.join(str(p) for p in e['loc'])}: {e['msg']}" for e in exc.errors()
        )
        return JSONResponse(
            status_code=400,
            content={"error": {"code": "malformed_body", "message": detail}},
        )

    @app.get("/api/models")
    async def list_models() -> list[dict[str, Any]]:
        models = list(builtin_catalog())
        if registry.extra_models:
            models.extend(registry.extra_models.values())
        return [wire.model_summary(m) for m in models]

    @app.post("/api/sessions", status_code=201)
    async def create_session(body: CreateSession) -> dict[str, Any]:
        entry = registry.create(body.model)
        return {
            "session_id": entry.state.session_id,
            "state": wire.state_event(entry.state),
        }

    @app.get("/api/sessions/{session_id}")
    async def get_session(session_id: str) -> dict[str, Any]:
        entry = registry.get(session_id)
        async with entry.lock:
            return wire.state_event(entry.state)

    @app.post("/api/sessions/{session_id}/commands")
    async def post_command(session_id: str, command: Command) -> dict[str, Any]:
        entry = registry.get(session_id)
        async with entry.lock:
            expected = command.expected_revision
            if expected is not None and expected != entry.state.revision:
                raise StaleRevisionError(
                    f"session is at revision {entry.state.revision}, "
                    f"command expected {expected}"
                )
            step = sess.apply(entry.state, to_session_command(command))
            entry.state = step.state
            event = wire.state_event(
                step.state, clamped_flags=step.clamped_flags, diffs=step.diffs
            )
            if step.changed:
                registry.broadcast(entry, event)
            registry.ensure_ticker(entry)
        return {"revision": step.state.revision, "changed": step.changed, "state": event}

    @app.websocket("/api/sessions/{session_id}/stream")
    async def stream(websocket: WebSocket, session_id: str) -> None:
        await websocket.accept()
        entry = registry.entries.get(session_id)
        if entry is None:
            await websocket.close(code=4404, reason="unknown_session")
            return
        queue: asyncio.Queue = asyncio.Queue()
        async with entry.lock:
            snapshot = wire.state_event(entry.state)
            entry.queues.add(queue)
        try:
            await websocket.send_json(snapshot)
            while True:
                event = await queue.get()
                await websocket.send_json(event)
        except WebSocketDisconnect:
            pass
        finally:
            entry.queues.discard(queue)

    if ui_dir is not None:
        # Mounted last: every /api route above wins, everything else falls
        # through to the static tree.
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
