"""HTTP + WebSocket gateway exposing a Home to dashboards and clients.

JSON over HTTP/1.1 for state, services, scenes, automations, and store
metrics; a WebSocket stream of every bus event as one JSON text frame per
event, in publish order per connection.

All mutating requests run on the server's single event loop, which is the
world's owning executor, so handlers never race each other. In live mode
a background task advances the virtual clock every 100 ms of real time by
``100 * speed`` simulated milliseconds; speed 0 leaves the clock paused
(the POST /api/clock/advance hook still works, which is how tests and the
dashboard's pause mode drive time).

No authentication: this is a desk-scale artifact, not safe to expose.
"""

from __future__ import annotations

import asyncio
import json
import logging
from pathlib import Path

from aiohttp import WSMsgType, web

from .core import Event, state_to_payload
from .errors import (
    AutomationDisabled,
    HandlerFailure,
    HearthError,
    UnknownAutomation,
    UnknownEntity,
    UnknownScene,
    UnknownService,
)
from .home import Home

logger = logging.getLogger(__name__)

CLOCK_STEP_MS = 100

_ERROR_STATUS = {
    UnknownEntity: (404, "unknown_entity"),
    UnknownService: (404, "unknown_service"),
    UnknownScene: (404, "unknown_scene"),
    UnknownAutomation: (404, "unknown_automation"),
    AutomationDisabled: (409, "automation_disabled"),
    HandlerFailure: (500, "handler_failure"),
}


def _error_response(status: int, code: str, message: str) -> web.Response:
    return web.json_response(
        {"status": status, "code": code, "message": message}, status=status
    )


def _map_error(exc: HearthError) -> web.Response:
    for etype, (status, code) in _ERROR_STATUS.items():
        if isinstance(exc, etype):
            return _error_response(status, code, str(exc))
    return _error_response(500, "internal_error", str(exc))


def _entity_json(entity) -> dict:
    return {
        "entity_id": entity.id,
        "kind": entity.kind.value,
        "state": state_to_payload(entity.state),
        "attributes": dict(entity.attributes),
        "last_changed": entity.last_changed_ms,
    }


def _event_frame(event: Event) -> str:
    return json.dumps(
        {
            "event_type": event.event_type,
            "timestamp": event.timestamp,
            "origin": event.origin,
            "payload": dict(event.payload),
        },
        separators=(",", ":"),
        ensure_ascii=False,
    )


class Gateway:
    """Wires one Home into an aiohttp application."""

    def __init__(self, home: Home, static_dir: Path | None = None):
        self.home = home
        self.static_dir = static_dir
        self._streams: set[asyncio.Queue[str]] = set()
        home.bus.subscribe("*", self._fan_out)

    def _fan_out(self, event: Event) -> None:
        frame = _event_frame(event)
        for queue in self._streams:
            queue.put_nowait(frame)

    # -- handlers -------------------------------------------------------------

    async def get_states(self, request: web.Request) -> web.Response:
        return web.json_response([_entity_json(e) for e in self.home.entities.enumerate()])

    async def get_state(self, request: web.Request) -> web.Response:
        try:
            entity = self.home.entities.get(request.match_info["entity_id"])
        except UnknownEntity as exc:
            return _map_error(exc)
        return web.json_response(_entity_json(entity))

    async def post_service(self, request: web.Request) -> web.Response:
        try:
            body = await request.json()
        except Exception:
            return _error_response(400, "malformed_body", "body must be JSON")
        if not isinstance(body, dict) or not isinstance(body.get("entity_id"), str):
            return _error_response(400, "malformed_body", "body needs an entity_id string")
        data = body.get("data") or {}
        if not isinstance(data, dict):
            return _error_response(400, "malformed_body", "data must be a mapping")
        try:
            result = self.home.services.call(
                request.match_info["domain"],
                request.match_info["service"],
                body["entity_id"],
                data,
                self.home.clock.now_ms,
            )
        except HearthError as exc:
            return _map_error(exc)
        return web.json_response({"ok": result.ok, "message": result.message})

    async def post_scene_activate(self, request: web.Request) -> web.Response:
        try:
            outcome = self.home.engine.activate_scene(request.match_info["scene_id"])
        except HearthError as exc:
            return _map_error(exc)
        return web.json_response(
            {
                "scene_id": outcome.scene_id,
                "applied": outcome.applied,
                "errors": outcome.errors,
            }
        )

    async def post_automation_trigger(self, request: web.Request) -> web.Response:
        skip = False
        if request.can_read_body:
            try:
                body = await request.json()
            except Exception:
                return _error_response(400, "malformed_body", "body must be JSON")
            if not isinstance(body, dict) or (
                "skip_conditions" in body and not isinstance(body["skip_conditions"], bool)
            ):
                return _error_response(400, "malformed_body", "skip_conditions must be a boolean")
            skip = bool(body.get("skip_conditions", False))
        try:
            outcome = self.home.engine.manual_trigger(
                request.match_info["automation_id"], skip_conditions=skip
            )
        except HearthError as exc:
            return _map_error(exc)
        return web.json_response(
            {
                "automation_id": outcome.automation_id,
                "status": outcome.status.value,
                "actions": [
                    {"ok": r.ok, **({"error": r.error} if not r.ok else {})}
                    for r in outcome.action_results
                ],
            }
        )

    async def get_metrics(self, request: web.Request) -> web.Response:
        return web.json_response(self.home.metrics())

    async def get_automations(self, request: web.Request) -> web.Response:
        return web.json_response(
            [
                {
                    "automation_id": a.id,
                    "scenario": a.scenario_kind.value,
                    "enabled": self.home.engine.is_enabled(a.id),
                }
                for a in self.home.engine.automations()
            ]
        )

    async def get_scenes(self, request: web.Request) -> web.Response:
        return web.json_response(
            [
                {"scene_id": s.id, "name": s.name, "targets": [t.entity for t in s.targets]}
                for s in self.home.engine.scenes()
            ]
        )

    async def post_clock_advance(self, request: web.Request) -> web.Response:
        try:
            body = await request.json()
            ms = int(body["ms"])
            if ms < 0:
                raise ValueError
        except Exception:
            return _error_response(400, "malformed_body", "body needs non-negative integer ms")
        self.home.step(ms)
        return web.json_response({"now_ms": self.home.clock.now_ms})

    async def ws_stream(self, request: web.Request) -> web.WebSocketResponse:
        ws = web.WebSocketResponse(heartbeat=30)
        await ws.prepare(request)
        queue: asyncio.Queue[str] = asyncio.Queue()
        self._streams.add(queue)
        drainer = asyncio.create_task(self._drain(ws, queue))
        try:
            async for msg in ws:
                if msg.type in (WSMsgType.ERROR, WSMsgType.CLOSE):
                    break
        finally:
            self._streams.discard(queue)
            drainer.cancel()
        return ws

    async def _drain(self, ws: web.WebSocketResponse, queue: asyncio.Queue[str]) -> None:
        try:
            while True:
                frame = await queue.get()
                await ws.send_str(frame)
        except asyncio.CancelledError:
            pass
        except Exception:
            logger.exception("stream delivery failed")
            self._streams.discard(queue)
            await ws.close(code=1011)

    # -- app assembly -------------------------------------------------------------

    def build_app(self, speed: float | None = None) -> web.Application:
        app = web.Application()
        app.add_routes(
            [
                web.get("/api/states", self.get_states),
                web.get("/api/states/{entity_id}", self.get_state),
                web.post("/api/services/{domain}/{service}", self.post_service),
                web.post("/api/scenes/{scene_id}/activate", self.post_scene_activate),
                web.post("/api/automations/{automation_id}/trigger", self.post_automation_trigger),
                web.get("/api/automations", self.get_automations),
                web.get("/api/scenes", self.get_scenes),
                web.get("/api/memstore/metrics", self.get_metrics),
                web.post("/api/clock/advance", self.post_clock_advance),
                web.get("/api/stream", self.ws_stream),
            ]
        )
        if self.static_dir is not None and self.static_dir.is_dir():
            app.router.add_get("/", self._index)
            app.router.add_static("/", self.static_dir)
        if speed is None:
            speed = self.home.clock.speed
        if speed > 0:
            app.cleanup_ctx.append(self._clock_ctx(speed))
        return app

    async def _index(self, request: web.Request) -> web.Response:
        assert self.static_dir is not None
        return web.FileResponse(self.static_dir / "index.html")

    def _clock_ctx(self, speed: float):
        async def ctx(app: web.Application):
            task = asyncio.create_task(self._clock_loop(speed))
            yield
            task.cancel()
            try:
                await task
            except asyncio.CancelledError:
                pass

        return ctx

    async def _clock_loop(self, speed: float) -> None:
        while True:
            await asyncio.sleep(CLOCK_STEP_MS / 1000.0)
            self.home.step(int(CLOCK_STEP_MS * speed))


def serve(home: Home, port: int, speed: float = 1.0, static_dir: Path | None = None) -> None:
    """Run the gateway until interrupted (blocking)."""
    gateway = Gateway(home, static_dir=static_dir)
    web.run_app(gateway.build_app(speed), port=port)
