"""The interaction engine.

`interact` runs a reactor against a display until its stop condition
fires, the user interrupts, or a scripted event source is exhausted.  A
handler may itself call `interact`, which pushes a new session frame on
the same engine and suspends the outer one until the inner reactor
terminates (modal nesting).  The engine maintains the session stack
invariants:

  * every newly arriving event is appended to the queue of the top-most
    frame, and only that frame processes events;
  * on pop, a resumed frame drains its preserved queue before any newly
    arriving events;
  * a frame's event subscriptions are exactly its own reactor's handler
    kinds, and no subscriptions remain once the stack is empty;
  * the tick timer belongs to the top frame, so suspended frames register
    no ticks, and a resumed frame's next tick fires one full period after
    resumption.

Nested sessions run synchronously on the caller's thread (the invoking
handler blocks until the inner session finishes), so each live session
stack needs a dedicated engine thread.  Event delivery is strictly
run-to-completion: a handler finishes before the next event is processed.
"""

from __future__ import annotations

import threading
import time
from collections import deque
from typing import Iterable, List, Optional, Sequence, Tuple, TypeVar

from . import core
from .core import Event, EventKind, HandlerSet, Reactor, TIME_TICK, make_reactor
from .errors import (
    DuplicateHandler,
    EngineReentrancy,
    NoTickHandler,
    ScriptExhaustedInNestedSession,
)
from .scene import empty_scene
from .tracing import TraceTable, get_trace_as_table, start_trace

S = TypeVar("S")


class _Sentinel:
    def __init__(self, name: str):
        self._name = name

    def __repr__(self) -> str:
        return self._name


#: Returned by a display when the user interrupted the session.
INTERRUPT = _Sentinel("INTERRUPT")
#: Returned by a pull display when its event source has run dry.
EXHAUSTED = _Sentinel("EXHAUSTED")

REASON_STOPPED = "stopped"
REASON_INTERRUPTED = "interrupted"


class Display:
    """Abstract event source / frame sink for a session stack.

    Exactly three implementations exist: HeadlessDisplay (shows nothing,
    never produces events), ScriptedDisplay (replays a fixed event list,
    then signals exhaustion), and the protocol module's LiveDisplay
    (bridges a websocket connection; events are pushed into the engine by
    the connection handler rather than pulled).
    """

    #: Live displays render placeholders and keep stopped frames on screen.
    is_live = False
    #: Pull displays answer next_event; push displays feed Engine.post_event.
    pull_based = True

    def show(self, scene) -> None:
        pass

    def session_opened(self, depth: int, close_when_stop: bool) -> None:
        pass

    def session_closed(self, depth: int, reason: str, final_state) -> None:
        pass

    def next_event(self, timeout: Optional[float] = None):
        """Next Event, INTERRUPT, EXHAUSTED, or None when nothing arrived yet."""
        return EXHAUSTED


class HeadlessDisplay(Display):
    """No rendering, no events: an interaction returns as soon as it starts."""


class ScriptedDisplay(Display):
    """Replays a fixed list of events, then signals exhaustion.

    Events are delivered with zero inter-event delay; wall-clock time is
    never observable.  Shown scenes and session open/close notifications
    are recorded for inspection by tests.
    """

    def __init__(self, events: Iterable[Event]):
        self._pending = deque(events)
        self.shown: List[object] = []
        self.opened: List[int] = []
        self.closed: List[Tuple[int, str]] = []

    def show(self, scene) -> None:
        self.shown.append(scene)

    def session_opened(self, depth: int, close_when_stop: bool) -> None:
        self.opened.append(depth)

    def session_closed(self, depth: int, reason: str, final_state) -> None:
        self.closed.append((depth, reason))

    def next_event(self, timeout: Optional[float] = None):
        if not self._pending:
            return EXHAUSTED
        return self._pending.popleft()


class SessionFrame:
    """One level of the session stack: a running reactor plus its event queue."""

    __slots__ = ("reactor", "pending_events", "interrupted", "next_tick_at")

    def __init__(self, reactor: Reactor):
        self.reactor = reactor
        self.pending_events: deque = deque()
        self.interrupted = False
        self.next_tick_at: Optional[float] = None


_tls = threading.local()


def current_engine() -> Optional["Engine"]:
    """The engine whose session stack is running on this thread, if any."""
    return getattr(_tls, "engine", None)


def _subscriptions(r: Reactor) -> frozenset:
    kinds = set()
    if r.handlers.on_tick is not None:
        kinds.add(EventKind.TIME_TICK)
    if r.handlers.on_key is not None:
        kinds.add(EventKind.KEY_PRESS)
    return frozenset(kinds)


class Engine:
    """Runs one session stack against one display.

    All session frames execute on the thread that called run(); other
    threads may only post events and interrupts.
    """

    def __init__(self, display: Display):
        self.display = display
        self._frames: List[SessionFrame] = []
        self._cond = threading.Condition()
        self._owner: Optional[threading.Thread] = None
        self._kill = False

    @property
    def depth(self) -> int:
        return len(self._frames)

    def active_subscriptions(self) -> frozenset:
        """Event kinds currently subscribed: exactly the top reactor's handlers."""
        with self._cond:
            if not self._frames:
                return frozenset()
            return _subscriptions(self._frames[-1].reactor)

    def post_event(self, event: Event) -> None:
        """Append an event to the queue of the top-most frame (thread-safe)."""
        with self._cond:
            if self._frames:
                self._frames[-1].pending_events.append(event)
                self._cond.notify_all()

    def post_interrupt(self) -> None:
        """Interrupt the top session only; a suspended caller resumes with its result."""
        with self._cond:
            if self._frames:
                self._frames[-1].interrupted = True
                self._cond.notify_all()

    def interrupt_all(self) -> None:
        """Unwind the whole stack (connection drop, Ctrl-C)."""
        with self._cond:
            self._kill = True
            for frame in self._frames:
                frame.interrupted = True
            self._cond.notify_all()

    def run(self, reactor: Reactor[S]) -> Reactor[S]:
        """Run `reactor` as the outermost session of this engine."""
        if current_engine() is not None:
            raise EngineReentrancy(
                "an engine is already running on this thread; "
                "nested sessions must go through interact() without a display"
            )
        _tls.engine = self
        self._owner = threading.current_thread()
        try:
            return self.run_session(reactor)
        finally:
            _tls.engine = None
            self._owner = None

    def run_session(self, reactor: Reactor[S]) -> Reactor[S]:
        """Run one session frame to termination; nested calls land here too."""
        if self._owner is not threading.current_thread():
            raise EngineReentrancy(
                "run_session called from outside the engine's own thread"
            )
        if reactor.stopped:
            # A stopped reactor halts immediately, in the same state.
            return reactor
        frame = SessionFrame(reactor)
        with self._cond:
            self._frames.append(frame)
            depth = len(self._frames)
        close_when_stop = reactor.handlers.close_when_stop
        self.display.session_opened(depth, close_when_stop)
        reason = REASON_INTERRUPTED
        try:
            self._render(frame)
            while True:
                if frame.reactor.stopped:
                    reason = REASON_STOPPED
                    if self.display.is_live and not close_when_stop:
                        # Keep the final frame on screen until the user closes it.
                        self._await_interrupt(frame)
                    break
                event = self._next_event(frame)
                if event is INTERRUPT:
                    reason = REASON_INTERRUPTED
                    break
                if event is EXHAUSTED:
                    if depth > 1:
                        raise ScriptExhaustedInNestedSession(
                            f"script ended while the depth-{depth} session "
                            "was still waiting for events"
                        )
                    reason = REASON_INTERRUPTED
                    break
                if event.kind not in _subscriptions(frame.reactor):
                    continue  # never deliver unsubscribed kinds
                frame.reactor = core.react(frame.reactor, event)
                self._render(frame)
            return frame.reactor
        finally:
            final_state = frame.reactor.state
            with self._cond:
                self._frames.pop()
                if self._frames:
                    # The timer belongs to the top frame: re-arm on resumption.
                    self._frames[-1].next_tick_at = None
            self.display.session_closed(depth, reason, final_state)

    # -- internals ---------------------------------------------------------

    def _render(self, frame: SessionFrame) -> None:
        to_draw = frame.reactor.handlers.to_draw
        if to_draw is not None:
            self.display.show(to_draw(frame.reactor.state))
        elif self.display.is_live:
            self.display.show(empty_scene())

    def _next_event(self, frame: SessionFrame):
        wants_tick = frame.reactor.handlers.on_tick is not None
        spt = frame.reactor.handlers.seconds_per_tick
        with self._cond:
            while True:
                if frame.interrupted or self._kill:
                    return INTERRUPT
                if frame.pending_events:
                    return frame.pending_events.popleft()
                if self.display.pull_based:
                    break
                # Push display: wait for posted events, synthesizing ticks
                # at the reactor's rate.  The first tick fires one full
                # period after the session starts (or resumes).
                if not wants_tick:
                    self._cond.wait()
                    continue
                now = time.monotonic()
                if frame.next_tick_at is None:
                    frame.next_tick_at = now + spt
                remaining = frame.next_tick_at - now
                if remaining <= 0:
                    frame.next_tick_at = now + spt
                    return TIME_TICK
                self._cond.wait(timeout=remaining)
        return self.display.next_event()

    def _await_interrupt(self, frame: SessionFrame) -> None:
        with self._cond:
            while not (frame.interrupted or self._kill):
                self._cond.wait()


def interact(r: Reactor[S], display: Optional[Display] = None) -> Reactor[S]:
    """Run a reactor to termination, returning the final reactor.

    On a stopped reactor this immediately returns a reactor in the same
    state.  When called from inside a handler (display omitted), the call
    pushes a nested session on the running engine and the outer session
    suspends until the inner one terminates.
    """
    engine = current_engine()
    if engine is not None:
        if display is not None:
            raise EngineReentrancy(
                "cannot start a new display from inside a running session; "
                "nested interact() takes no display"
            )
        return engine.run_session(r)
    return Engine(display if display is not None else HeadlessDisplay()).run(r)


def interact_trace(r: Reactor[S], display: Optional[Display] = None) -> TraceTable:
    """Run a reactor and return the tick/state table of the run."""
    return get_trace_as_table(interact(start_trace(r), display))


def simulate_trace(r: Reactor[S], n: int) -> TraceTable:
    """Headless run: deliver up to `n` ticks (no user events) and tabulate.

    Stops early when the stop condition fires; a reactor that is already
    stopped yields the single row (0, state).
    """
    if n < 0:
        raise ValueError(f"tick count must be >= 0, got {n}")
    traced = start_trace(r)
    if traced.stopped:
        return get_trace_as_table(traced)
    if n > 0 and r.handlers.on_tick is None:
        raise NoTickHandler("simulate_trace needs an on_tick handler to deliver ticks")
    done = 0
    while done < n and not traced.stopped:
        traced = core.react(traced, TIME_TICK)
        done += 1
    return get_trace_as_table(traced)


def after_n_ticks(r: Reactor[S], n: int) -> Reactor[S]:
    """Fold react over `n` time ticks (errors as react, e.g. if a stop fires mid-fold)."""
    if n < 0:
        raise ValueError(f"tick count must be >= 0, got {n}")
    for _ in range(n):
        r = core.react(r, TIME_TICK)
    return r


def run_scripted(r: Reactor[S], events: Sequence[Event]) -> Reactor[S]:
    """interact() against a ScriptedDisplay over `events`.

    Each scripted event is delivered to the innermost active session at
    the moment of delivery, so a handler-spawned nested session consumes
    subsequent script events until it stops.
    """
    return Engine(ScriptedDisplay(events)).run(r)


# -- big_bang: define-and-immediately-run convenience -----------------------

_BINDING_SLOTS = (
    "on_tick",
    "on_key",
    "to_draw",
    "stop_when",
    "close_when_stop",
    "seconds_per_tick",
)


def on_tick(fn):
    return ("on_tick", fn)


def on_key(fn):
    return ("on_key", fn)


def to_draw(fn):
    return ("to_draw", fn)


def stop_when(fn):
    return ("stop_when", fn)


def close_when_stop(flag: bool = True):
    return ("close_when_stop", flag)


def seconds_per_tick(seconds: float):
    return ("seconds_per_tick", seconds)


def big_bang(init: S, handlers: Sequence[tuple], display: Optional[Display] = None) -> S:
    """Assemble a handler set from bindings, run it, and return the final state."""
    slots = {}
    for name, value in handlers:
        if name not in _BINDING_SLOTS:
            raise ValueError(f"unknown handler binding {name!r}")
        if name in slots:
            raise DuplicateHandler(f"duplicate {name} binding")
        slots[name] = value
    return core.get_value(interact(make_reactor(HandlerSet(init=init, **slots)), display))
