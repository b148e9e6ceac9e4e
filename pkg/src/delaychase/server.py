"""WebSocket game service.

One connection = one game session with exclusive state.  A reader task feeds
client messages into a queue; the session loop drains the queue between
frames, advances the simulation to wall clock (capped per frame), and streams
one state message per telemetry period.  Simulated time is paced to wall
clock; falling more than ``max_lag`` behind sets the lag flag in state
messages instead of silently stretching time.
"""
from __future__ import annotations

import asyncio
import json
import time
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles

from .config import AppConfig
from .game import DisturbanceSpec, GameEngine, PRESET_DELAYS

__all__ = ["create_app", "GameSession"]


class PacedClock:
    """Wall clock with pause accounting; elapsed() excludes paused spans."""

    def __init__(self):
        self._start = time.perf_counter()
        self._paused_accum = 0.0
        self._pause_began: float | None = None

    @property
    def paused(self) -> bool:
        return self._pause_began is not None

    def pause(self) -> None:
        if self._pause_began is None:
            self._pause_began = time.perf_counter()

    def resume(self) -> None:
        if self._pause_began is not None:
            self._paused_accum += time.perf_counter() - self._pause_began
            self._pause_began = None

    def elapsed(self) -> float:
        now = time.perf_counter()
        out = now - self._start - self._paused_accum
        if self._pause_began is not None:
            out -= now - self._pause_began
        return out


def _num(value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"expected a number, got {value!r}")
    return float(value)


class GameSession:
    """Session loop for one connection."""

    MAX_CATCHUP = 0.25  # max simulated seconds advanced per frame

    def __init__(self, engine: GameEngine, ws: WebSocket, hz: float, max_lag: float):
        self.engine = engine
        self.ws = ws
        self.period = 1.0 / hz
        self.max_lag = max_lag
        self.queue: asyncio.Queue[str] = asyncio.Queue()
        self.closed = False
        self.clock = PacedClock()
        self._captured_since_frame = False
        self._pending: list[dict] = []

    async def run(self) -> None:
        reader = asyncio.create_task(self._reader())
        try:
            await self._loop()
        finally:
            reader.cancel()

    async def _reader(self) -> None:
        try:
            while True:
                raw = await self.ws.receive_text()
                self.queue.put_nowait(raw)
        except (WebSocketDisconnect, RuntimeError):
            self.closed = True

    async def _loop(self) -> None:
        frame = 0
        start = time.perf_counter()
        while not self.closed:
            self._drain()
            if not self.clock.paused:
                self._advance()
            lag = (not self.clock.paused) and (
                self.clock.elapsed() - self.engine.t > self.max_lag
            )
            try:
                for msg in self._pending:
                    await self.ws.send_text(json.dumps(msg))
                self._pending.clear()
                await self.ws.send_text(json.dumps(self._state_message(lag)))
            except (WebSocketDisconnect, RuntimeError):
                break
            self._captured_since_frame = False
            frame += 1
            next_wall = start + frame * self.period
            await asyncio.sleep(max(0.0, next_wall - time.perf_counter()))

    def _advance(self) -> None:
        engine = self.engine
        target = min(self.clock.elapsed(), engine.t + self.MAX_CATCHUP)
        # at least one tick per frame so state timestamps strictly increase
        # even when the loop runs ahead of schedule
        target = max(target, engine.t + engine.dt)
        while engine.t + engine.dt / 2 < target:
            engine.tick()
            if engine.round_event == "capture":
                self._captured_since_frame = True
                self._pending.append({
                    "type": "round", "event": "capture",
                    "score": engine.score, "t": engine.t,
                })
            elif engine.round_event == "escape":
                self._pending.append({
                    "type": "round", "event": "escape",
                    "score": engine.score, "t": engine.t,
                })
                engine.reset(keep_score=True)

    def _state_message(self, lag: bool) -> dict:
        s = self.engine.snapshot()
        return {
            "type": "state",
            "tick": s.tick,
            "t": s.t,
            "evader": [s.evader[0], s.evader[2]],
            "pursuer": [s.pursuer[0], s.pursuer[2]],
            "cursor": [s.cursor[0], s.cursor[1]],
            "error": [s.error[0], s.error[2]],
            "delays": [s.delays[0], s.delays[1]],
            "disturbance": [s.disturbance_now[0], s.disturbance_now[1]],
            "captured": bool(s.captured or self._captured_since_frame),
            "score": s.score,
            "lag": bool(lag),
        }

    def _ack(self, changed: str) -> dict:
        return {
            "type": "config_ack",
            "changed": changed,
            "delays": [self.engine.tau1, self.engine.tau2],
            "preset": self.engine.preset,
            "paused": self.clock.paused,
        }

    def _drain(self) -> None:
        while True:
            try:
                raw = self.queue.get_nowait()
            except asyncio.QueueEmpty:
                return
            reply = self._handle(raw)
            if reply is not None:
                self._pending.append(reply)

    def _handle(self, raw: str) -> dict | None:
        """Apply one client message; malformed input earns an error reply and
        the connection stays open."""
        try:
            msg = json.loads(raw)
        except json.JSONDecodeError as exc:
            return {"type": "error", "message": f"malformed JSON: {exc.msg}"}
        if not isinstance(msg, dict) or not isinstance(msg.get("type"), str):
            return {"type": "error", "message": "message must be an object with a 'type'"}
        kind = msg["type"]
        try:
            if kind == "cursor":
                self.engine.set_cursor(_num(msg.get("x")), _num(msg.get("y")))
                return None
            if kind == "preset":
                value = msg.get("value")
                if value not in PRESET_DELAYS:
                    raise ValueError(f"unknown preset {value!r}")
                self.engine.set_preset(value)
                return self._ack("preset")
            if kind == "set_delays":
                self.engine.set_delays(_num(msg.get("tau1")), _num(msg.get("tau2")))
                return self._ack("set_delays")
            if kind == "disturbance":
                spec = DisturbanceSpec(
                    kind=msg.get("kind", "none"),
                    amplitude=_num(msg.get("amplitude", 0.0)),
                    start=_num(msg.get("start", self.engine.t)),
                    duration=_num(msg.get("duration", 0.0)),
                    frequency=_num(msg.get("frequency", 0.0)),
                    channel=msg.get("channel", "x"),
                )
                self.engine.add_disturbance(spec)
                return self._ack("disturbance")
            if kind == "reset":
                self.engine.reset()
                self.clock = PacedClock()
                return self._ack("reset")
            if kind == "pause":
                if self.clock.paused:
                    self.clock.resume()
                else:
                    self.clock.pause()
                return self._ack("pause")
            return {"type": "error", "message": f"unknown message type {kind!r}"}
        except (ValueError, TypeError) as exc:
            return {"type": "error", "message": str(exc)}


def create_app(cfg: AppConfig | None = None) -> FastAPI:
    """Build the service app: websocket endpoint /ws plus static hosting of
    the browser client when the configured directory exists."""
    cfg = cfg or AppConfig()
    game_cfg = cfg.build_game()  # fail fast on unservable configs
    app = FastAPI(title="delaychase")
    app.state.app_config = cfg
    app.state.game_config = game_cfg
    app.state.last_engine = None

    @app.websocket("/ws")
    async def game_socket(ws: WebSocket):
        await ws.accept()
        engine = GameEngine(game_cfg)
        app.state.last_engine = engine
        session = GameSession(engine, ws, hz=cfg.telemetry_hz, max_lag=cfg.max_lag)
        await session.run()

    static = Path(cfg.static_dir)
    if static.is_dir() and (static / "index.html").exists():
        app.mount("/", StaticFiles(directory=static, html=True), name="ui")
    else:
        @app.get("/")
        def index():
            return {"service": "delaychase", "websocket": "/ws"}

    return app
