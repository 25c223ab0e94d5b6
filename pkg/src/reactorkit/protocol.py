"""JSON-over-WebSocket session protocol and server.

One WebSocket connection owns one session stack.  The server is
authoritative for time: ticks originate server-side, and the client sends
only keys and interrupts.  Scenes (not raw states) are pushed to the
client, so the client never needs scenario-specific code.

Wire grammar (one-line JSON, "type" discriminator):

  server -> client
    {"type":"session_open","session_id":N,"depth":D,"close_when_stop":B}
    {"type":"frame","session_id":N,"scene":{...}}
    {"type":"session_close","session_id":N,"reason":"stopped"|"interrupted"}
        outermost closes additionally carry "final_state": <codec value>
    {"type":"scenarios","names":[...],"descriptions":{...}}
    {"type":"error","message":T}
  client -> server
    {"type":"start","scenario":T}         optional "params":{name:number}
    {"type":"key","session_id":N,"name":T}
    {"type":"interrupt","session_id":N}
    {"type":"list"}

session_id values are unique per connection and strictly increasing; keys
are honored only for the deepest open session (the top-most frame).
"""

from __future__ import annotations

import itertools
import json
import logging
import os
import queue
import threading
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .core import key_press
from .engine import Display, Engine
from .errors import MalformedMessage, ReactorKitError, UnknownScenario
from .scene import Scene, scene_to_structured, structured_to_scene
from . import scenarios as scenarios_mod

logger = logging.getLogger(__name__)

DEFAULT_PORT = 8642
PORT_ENV_VAR = "REACTOR_PORT"


def default_port() -> int:
    """8642 unless the REACTOR_PORT environment variable overrides it."""
    raw = os.environ.get(PORT_ENV_VAR)
    return int(raw) if raw else DEFAULT_PORT


# -- messages ----------------------------------------------------------------

@dataclass(frozen=True, eq=True)
class SessionOpen:
    session_id: int
    depth: int
    close_when_stop: bool


@dataclass(frozen=True, eq=True)
class Frame:
    session_id: int
    scene: Scene


@dataclass(frozen=True, eq=True)
class SessionClose:
    session_id: int
    reason: str  # "stopped" | "interrupted"
    final_state: object = None  # codec value, outermost session only


@dataclass(frozen=True, eq=True)
class Key:
    session_id: int
    name: str


@dataclass(frozen=True, eq=True)
class Interrupt:
    session_id: int


@dataclass(frozen=True, eq=True)
class Start:
    scenario: str
    params: Optional[Tuple[Tuple[str, float], ...]] = None

    @staticmethod
    def with_params(scenario: str, params: Optional[Dict[str, float]]) -> "Start":
        items = tuple(sorted(params.items())) if params else None
        return Start(scenario, items)

    def params_dict(self) -> Optional[Dict[str, float]]:
        return dict(self.params) if self.params is not None else None


@dataclass(frozen=True, eq=True)
class ListRequest:
    pass


@dataclass(frozen=True, eq=True)
class ScenarioList:
    names: Tuple[str, ...]
    descriptions: Tuple[Tuple[str, str], ...] = ()


@dataclass(frozen=True, eq=True)
class ErrorReply:
    message: str


WireMessage = (
    SessionOpen,
    Frame,
    SessionClose,
    Key,
    Interrupt,
    Start,
    ListRequest,
    ScenarioList,
    ErrorReply,
)


def encode_message(m) -> str:
    """One-line JSON for any wire message; decode_message inverts."""
    if isinstance(m, SessionOpen):
        payload = {
            "type": "session_open",
            "session_id": m.session_id,
            "depth": m.depth,
            "close_when_stop": m.close_when_stop,
        }
    elif isinstance(m, Frame):
        payload = {
            "type": "frame",
            "session_id": m.session_id,
            "scene": scene_to_structured(m.scene),
        }
    elif isinstance(m, SessionClose):
        payload = {
            "type": "session_close",
            "session_id": m.session_id,
            "reason": m.reason,
        }
        if m.final_state is not None:
            payload["final_state"] = m.final_state
    elif isinstance(m, Key):
        payload = {"type": "key", "session_id": m.session_id, "name": m.name}
    elif isinstance(m, Interrupt):
        payload = {"type": "interrupt", "session_id": m.session_id}
    elif isinstance(m, Start):
        payload = {"type": "start", "scenario": m.scenario}
        if m.params is not None:
            payload["params"] = dict(m.params)
    elif isinstance(m, ListRequest):
        payload = {"type": "list"}
    elif isinstance(m, ScenarioList):
        payload = {
            "type": "scenarios",
            "names": list(m.names),
            "descriptions": dict(m.descriptions),
        }
    elif isinstance(m, ErrorReply):
        payload = {"type": "error", "message": m.message}
    else:
        raise MalformedMessage(f"not a wire message: {m!r}")
    return json.dumps(payload, separators=(",", ":"))


def decode_message(text: str):
    try:
        payload = json.loads(text)
    except (json.JSONDecodeError, TypeError) as exc:
        raise MalformedMessage(f"not JSON: {text!r}") from exc
    if not isinstance(payload, dict) or "type" not in payload:
        raise MalformedMessage(f"missing 'type' discriminator: {text!r}")
    kind = payload["type"]
    try:
        if kind == "session_open":
            return SessionOpen(
                int(payload["session_id"]),
                int(payload["depth"]),
                bool(payload["close_when_stop"]),
            )
        if kind == "frame":
            return Frame(
                int(payload["session_id"]), structured_to_scene(payload["scene"])
            )
        if kind == "session_close":
            reason = payload["reason"]
            if reason not in ("stopped", "interrupted"):
                raise MalformedMessage(f"bad close reason {reason!r}")
            return SessionClose(
                int(payload["session_id"]), reason, payload.get("final_state")
            )
        if kind == "key":
            return Key(int(payload["session_id"]), str(payload["name"]))
        if kind == "interrupt":
            return Interrupt(int(payload["session_id"]))
        if kind == "start":
            return Start.with_params(str(payload["scenario"]), payload.get("params"))
        if kind == "list":
            return ListRequest()
        if kind == "scenarios":
            return ScenarioList(
                tuple(payload["names"]),
                tuple(sorted(payload.get("descriptions", {}).items())),
            )
        if kind == "error":
            return ErrorReply(str(payload["message"]))
    except MalformedMessage:
        raise
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise MalformedMessage(f"bad {kind} message: {text!r}") from exc
    raise MalformedMessage(f"unknown message type {kind!r}")


# -- the live display ---------------------------------------------------------

class LiveDisplay(Display):
    """Bridges a session stack to one connection's outgoing message queue.

    Incoming events are pushed into the engine by the connection handler
    (Engine.post_event / post_interrupt), so next_event never produces
    anything here; the engine waits on its own condition instead.
    """

    is_live = True
    pull_based = False

    def __init__(self, outbox: "queue.Queue", encode_state, session_ids):
        self._outbox = outbox
        self._encode_state = encode_state
        self._session_ids = session_ids  # connection-scoped itertools.count
        self._open: List[int] = []
        self._lock = threading.Lock()

    def deepest_session_id(self) -> Optional[int]:
        with self._lock:
            return self._open[-1] if self._open else None

    def show(self, scene) -> None:
        with self._lock:
            sid = self._open[-1]
        self._outbox.put(Frame(sid, scene))

    def session_opened(self, depth: int, close_when_stop: bool) -> None:
        sid = next(self._session_ids)
        with self._lock:
            self._open.append(sid)
        self._outbox.put(SessionOpen(sid, depth, close_when_stop))

    def session_closed(self, depth: int, reason: str, final_state) -> None:
        with self._lock:
            sid = self._open.pop()
        final = self._encode_state(final_state) if depth == 1 else None
        self._outbox.put(SessionClose(sid, reason, final))

    def next_event(self, timeout: Optional[float] = None):
        return None  # none yet: events arrive via Engine.post_event


# -- server -------------------------------------------------------------------

class _Connection:
    """Per-connection state: the outbox, id counter, and the running engine."""

    def __init__(self, registry: Dict[str, "scenarios_mod.Scenario"]):
        self.registry = registry
        self.outbox: queue.Queue = queue.Queue()
        self.session_ids = itertools.count(1)
        self.engine: Optional[Engine] = None
        self.display: Optional[LiveDisplay] = None
        self.thread: Optional[threading.Thread] = None

    def running(self) -> bool:
        return self.thread is not None and self.thread.is_alive()

    def start_scenario(self, name: str, params: Optional[Dict[str, float]]) -> None:
        try:
            scenario = self.registry[name]
        except KeyError:
            raise UnknownScenario(
                f"unknown scenario {name!r} (known: {', '.join(sorted(self.registry))})"
            ) from None
        reactor = scenario.build(params)  # validate params before threading
        display = LiveDisplay(self.outbox, scenario.encode_state, self.session_ids)
        engine = Engine(display)
        self.display = display
        self.engine = engine

        def run():
            try:
                engine.run(reactor)
            except ReactorKitError as exc:
                self.outbox.put(ErrorReply(f"session error: {exc}"))
            except Exception as exc:  # handler bugs must not kill the connection
                logger.exception("scenario %s crashed", name)
                self.outbox.put(ErrorReply(f"session error: {exc!r}"))

        self.thread = threading.Thread(
            target=run, name=f"reactor-session-{name}", daemon=True
        )
        self.thread.start()

    def handle_client_message(self, msg) -> None:
        if isinstance(msg, Start):
            if self.running():
                self.outbox.put(ErrorReply("a session is already running"))
                return
            try:
                self.start_scenario(msg.scenario, msg.params_dict())
            except ReactorKitError as exc:
                self.outbox.put(ErrorReply(str(exc)))
        elif isinstance(msg, Key):
            deepest = self.display.deepest_session_id() if self.display else None
            if deepest is None or msg.session_id != deepest:
                logger.warning(
                    "dropping key %r for session %s (deepest open: %s)",
                    msg.name, msg.session_id, deepest,
                )
                self.outbox.put(
                    ErrorReply(
                        f"key ignored: session {msg.session_id} is not the "
                        f"deepest open session"
                    )
                )
                return
            try:
                self.engine.post_event(key_press(msg.name))
            except ReactorKitError as exc:
                self.outbox.put(ErrorReply(str(exc)))
        elif isinstance(msg, Interrupt):
            deepest = self.display.deepest_session_id() if self.display else None
            if deepest is None or msg.session_id != deepest:
                self.outbox.put(
                    ErrorReply(
                        f"interrupt ignored: session {msg.session_id} is not "
                        f"the deepest open session"
                    )
                )
                return
            self.engine.post_interrupt()
        elif isinstance(msg, ListRequest):
            names = sorted(self.registry)
            descriptions = tuple((n, self.registry[n].description) for n in names)
            self.outbox.put(ScenarioList(tuple(names), descriptions))
        else:
            self.outbox.put(ErrorReply(f"unexpected message: {msg!r}"))

    def shutdown(self) -> None:
        if self.engine is not None:
            self.engine.interrupt_all()
        if self.thread is not None:
            self.thread.join(timeout=5)


_SENDER_STOP = object()


def create_app(registry=None, ui_dir: Optional[str] = None):
    """Build the FastAPI app exposing the /session WebSocket endpoint.

    `registry` maps scenario names to Scenario values and defaults to the
    built-in registry.  If `ui_dir` (or ./frontend in the working
    directory) contains an index.html, it is served at / so the browser
    client and the protocol share one port.
    """
    from fastapi import FastAPI, WebSocket, WebSocketDisconnect
    from starlette.concurrency import run_in_threadpool

    if registry is None:
        registry = {name: scenarios_mod.get_scenario(name)
                    for name in scenarios_mod.list_scenarios()}
    app = FastAPI(title="reactorkit session server")

    @app.websocket("/session")
    async def session_endpoint(ws: WebSocket):
        await ws.accept()
        conn = _Connection(registry)

        async def pump_outbox():
            while True:
                msg = await run_in_threadpool(conn.outbox.get)
                if msg is _SENDER_STOP:
                    return
                await ws.send_text(encode_message(msg))

        import asyncio

        sender = asyncio.ensure_future(pump_outbox())
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    msg = decode_message(raw)
                except MalformedMessage as exc:
                    conn.outbox.put(ErrorReply(str(exc)))
                    continue
                conn.handle_client_message(msg)
        except WebSocketDisconnect:
            pass
        finally:
            conn.shutdown()
            conn.outbox.put(_SENDER_STOP)
            try:
                await sender
            except Exception:
                pass

    ui = ui_dir or os.environ.get("REACTOR_UI_DIR") or "frontend"
    if os.path.isfile(os.path.join(ui, "index.html")):
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui, html=True), name="ui")
    return app


def serve(registry=None, port: Optional[int] = None, host: str = "127.0.0.1",
          ui_dir: Optional[str] = None) -> None:
    """Run the session server until terminated."""
    import uvicorn

    uvicorn.run(create_app(registry, ui_dir=ui_dir),
                host=host, port=port or default_port())
