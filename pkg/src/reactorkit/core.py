"""Reactors: event loops as immutable first-class values.

A Reactor bundles a state with a set of pure handlers.  Nothing here
performs I/O: stepping a reactor (`react`) is an ordinary function from a
reactor and a virtualized event to a new reactor, so runs can be scripted,
tested, and replayed deterministically.  Live execution lives in
`reactorkit.engine`.

Handlers are required to be pure; the library documents but cannot enforce
this.  Reactor and HandlerSet instances are frozen and may be freely shared
between threads.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Generic, Optional, Tuple, TypeVar

from .errors import (
    InvalidKeyName,
    NoDrawHandler,
    ReactorStopped,
    UnhandledEventKind,
)

S = TypeVar("S")

#: Keys that arrive as words rather than single characters.
NAMED_KEYS = frozenset(
    {"left", "right", "up", "down", "enter", "escape", "backspace", "tab"}
)

#: Default tick rate: 28 ticks per second.
DEFAULT_SECONDS_PER_TICK = 1 / 28


class EventKind(Enum):
    TIME_TICK = "time-tick"
    KEY_PRESS = "key-press"


def _valid_key_name(name: str) -> bool:
    if name in NAMED_KEYS:
        return True
    return len(name) == 1 and name.isprintable()


@dataclass(frozen=True)
class Event:
    """A virtualized stimulus: a clock tick or a key press.

    Events are constructed programmatically (use TIME_TICK and key_press),
    never read from hardware, so the passage of time and user behavior are
    fully under the program's control.
    """

    kind: EventKind
    key_name: Optional[str] = None

    def __post_init__(self) -> None:
        if self.kind is EventKind.KEY_PRESS:
            if not self.key_name:
                raise InvalidKeyName("key-press events require a key name")
            if not _valid_key_name(self.key_name):
                raise InvalidKeyName(
                    f"{self.key_name!r} is neither a single printable character "
                    f"nor one of {sorted(NAMED_KEYS)}"
                )
        elif self.key_name is not None:
            raise InvalidKeyName("time-tick events carry no key name")


#: The clock-tick event value.
TIME_TICK = Event(EventKind.TIME_TICK)


def key_press(name: str) -> Event:
    """Build a key-press event for a single printable character or named key."""
    return Event(EventKind.KEY_PRESS, name)


@dataclass(frozen=True)
class HandlerSet(Generic[S]):
    """The handler table of a reactor.

    Only `init` is required.  All handlers must be pure:

        on_tick   : S -> S
        on_key    : S, key name -> S
        to_draw   : S -> Scene
        stop_when : S -> bool
    """

    init: S
    on_tick: Optional[Callable[[S], S]] = None
    on_key: Optional[Callable[[S, str], S]] = None
    to_draw: Optional[Callable[[S], object]] = None
    stop_when: Optional[Callable[[S], bool]] = None
    close_when_stop: bool = False
    seconds_per_tick: float = DEFAULT_SECONDS_PER_TICK

    def __post_init__(self) -> None:
        if not self.seconds_per_tick > 0:
            raise ValueError("seconds_per_tick must be positive")


@dataclass(frozen=True)
class Reactor(Generic[S]):
    """An immutable event-loop value.

    Defining a reactor does not run it.  Every operation returns a new
    Reactor; the original is observably unchanged.  `trace_log` is None
    until tracing has been enabled at least once (see reactorkit.tracing).
    """

    state: S
    handlers: HandlerSet[S]
    stopped: bool
    tracing: bool = False
    trace_log: Optional[Tuple[S, ...]] = None

    # Operations are available both as module functions and as methods.
    def react(self, event: Event) -> "Reactor[S]":
        return react(self, event)

    def get_value(self) -> S:
        return self.state

    def is_stopped(self) -> bool:
        return self.stopped

    def draw(self):
        return draw(self)

    def start_trace(self) -> "Reactor[S]":
        from .tracing import start_trace

        return start_trace(self)

    def stop_trace(self) -> "Reactor[S]":
        from .tracing import stop_trace

        return stop_trace(self)

    def get_trace(self):
        from .tracing import get_trace

        return get_trace(self)

    def get_trace_as_table(self):
        from .tracing import get_trace_as_table

        return get_trace_as_table(self)

    def interact(self, display=None) -> "Reactor[S]":
        from .engine import interact

        return interact(self, display)


def make_reactor(handlers: HandlerSet[S]) -> Reactor[S]:
    """Create a reactor over `handlers.init`.

    The stop condition is evaluated on the initial state, so a reactor can
    be stopped at birth.
    """
    stopped = bool(handlers.stop_when(handlers.init)) if handlers.stop_when else False
    return Reactor(state=handlers.init, handlers=handlers, stopped=stopped)


def get_value(r: Reactor[S]) -> S:
    """Return the encapsulated state.  Legal on stopped reactors."""
    return r.state


def is_stopped(r: Reactor[S]) -> bool:
    return r.stopped


def react(r: Reactor[S], event: Event) -> Reactor[S]:
    """Apply one virtualized event, returning the next reactor.

    Raises ReactorStopped on a stopped reactor and UnhandledEventKind when
    the reactor has no handler for the event's kind: both signal
    programmatic misuse rather than a semantic no-op.  The live engine
    never delivers unsubscribed kinds.
    """
    if r.stopped:
        raise ReactorStopped("cannot react: this reactor's stop condition has fired")
    if event.kind is EventKind.TIME_TICK:
        if r.handlers.on_tick is None:
            raise UnhandledEventKind("reactor has no on_tick handler")
        new_state = r.handlers.on_tick(r.state)
    else:
        if r.handlers.on_key is None:
            raise UnhandledEventKind("reactor has no on_key handler")
        new_state = r.handlers.on_key(r.state, event.key_name)
    stopped = bool(r.handlers.stop_when(new_state)) if r.handlers.stop_when else False
    trace_log = r.trace_log
    if r.tracing:
        trace_log = (r.trace_log or ()) + (new_state,)
    return dataclasses.replace(r, state=new_state, stopped=stopped, trace_log=trace_log)


def draw(r: Reactor[S]):
    """Render the current state through the to_draw handler (pure, no display)."""
    if r.handlers.to_draw is None:
        raise NoDrawHandler("reactor has no to_draw handler")
    return r.handlers.to_draw(r.state)
