"""Built-in demo scenarios.

Each scenario packages a reactor builder with a state codec (state to/from
JSON-shaped structured values) so traces and wire frames can carry its
states verbatim.  Builders accept a flat name-to-number parameter map;
every scenario understands "seconds_per_tick", and unknown names are
rejected.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, List, Mapping, Optional

from . import engine
from .core import DEFAULT_SECONDS_PER_TICK, HandlerSet, Reactor, make_reactor
from .errors import UnknownParameter, UnknownScenario
from .scene import circle, text

Params = Optional[Mapping[str, float]]


@dataclass(frozen=True)
class Scenario:
    """A named reactor program plus its state codec."""

    name: str
    description: str
    build: Callable[[Params], Reactor]
    encode_state: Callable[[object], object] = lambda s: s
    decode_state: Callable[[object], object] = lambda v: v
    parameters: tuple = ()


def _take_params(params: Params, allowed: tuple, name: str) -> Dict[str, float]:
    taken = dict(params or {})
    for key in taken:
        if key not in allowed and key != "seconds_per_tick":
            raise UnknownParameter(
                f"scenario {name!r} takes no parameter {key!r} "
                f"(known: {sorted(set(allowed) | {'seconds_per_tick'})})"
            )
    return taken


def _spt(taken: Dict[str, float]) -> float:
    return float(taken.get("seconds_per_tick", DEFAULT_SECONDS_PER_TICK))


# -- counter: tick +1, keys i/m +-10, stops past 100, solid blue circle -----

def _build_counter(params: Params) -> Reactor[int]:
    taken = _take_params(params, (), "counter")

    def time_handler(w):
        return w + 1

    def key_handler(w, k):
        if k == "i":
            return w + 10
        if k == "m":
            return w - 10
        return w

    def drawer(w):
        return circle(w, "solid", "blue")

    def stopper(w):
        return w > 100

    return make_reactor(
        HandlerSet(
            init=0,
            on_tick=time_handler,
            on_key=key_handler,
            to_draw=drawer,
            stop_when=stopper,
            seconds_per_tick=_spt(taken),
        )
    )


# -- increment: the minimal tick-only counter --------------------------------

def _build_increment(params: Params) -> Reactor[int]:
    taken = _take_params(params, (), "increment")

    def increment(x):
        return x + 1

    return make_reactor(
        HandlerSet(init=0, on_tick=increment, seconds_per_tick=_spt(taken))
    )


# -- trace-replay: tick +10, stops past 100, outline blue circle -------------

def _build_trace_replay(params: Params) -> Reactor[int]:
    taken = _take_params(params, (), "trace-replay")

    def time_handler(w):
        return w + 10

    def stopper(w):
        return w > 100

    def drawer1(sz):
        return circle(sz, "outline", "blue")

    return make_reactor(
        HandlerSet(
            init=0,
            on_tick=time_handler,
            to_draw=drawer1,
            stop_when=stopper,
            seconds_per_tick=_spt(taken),
        )
    )


# -- diff-motion: differential model of uniform linear motion ----------------

INIT_X = 0
DELTA_T = 1
VELOCITY = 10


def x_at_t(t: float) -> float:
    """Closed-form (time-parametric) displacement under uniform motion."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    return INIT_X + VELOCITY * t


def _build_diff_motion(params: Params) -> Reactor[float]:
    taken = _take_params(params, (), "diff-motion")

    def next_x(x):
        return x + VELOCITY * DELTA_T

    return make_reactor(
        HandlerSet(init=INIT_X, on_tick=next_x, seconds_per_tick=_spt(taken))
    )


# -- free-fall: y/vy state under constant acceleration, parameterized start --

ACCEL = -0.3


def _build_free_fall(params: Params) -> Reactor[dict]:
    taken = _take_params(params, ("start_y",), "free-fall")
    start_y = float(taken.get("start_y", 200))

    def ticker(w):
        return {"y": w["y"] + w["vy"], "vy": w["vy"] + ACCEL}

    def stopper(w):
        return w["y"] < 0

    return make_reactor(
        HandlerSet(
            init={"y": start_y, "vy": 0.0},
            on_tick=ticker,
            stop_when=stopper,
            seconds_per_tick=_spt(taken),
        )
    )


# -- digit-sum: modal inner prompt sessions feeding an outer accumulator -----

def string_to_digit(k: str) -> Optional[int]:
    """The digit a key names, or None (non-digit keys mean 'no digit yet')."""
    return int(k) if len(k) == 1 and k.isdigit() else None


def get_digit(prompt: str) -> int:
    """Pop up a modal prompt session that loops until an actual digit is entered.

    Must be called from inside a running session (it nests on the ambient
    engine); the spawned reactor closes its window as soon as it stops.
    """
    r = make_reactor(
        HandlerSet(
            init=None,
            to_draw=lambda _: text(prompt, 30, "black"),
            on_key=lambda _, k: string_to_digit(k),
            stop_when=lambda s: s is not None,
            close_when_stop=True,
        )
    )
    return engine.interact(r).get_value()


def _build_digit_sum(params: Params) -> Reactor[dict]:
    taken = _take_params(params, (), "digit-sum")

    def tick(s_d):
        k = get_digit("next number")
        if k == 0:
            return {"sum": s_d["sum"], "done": True}
        return {"sum": s_d["sum"] + k, "done": False}

    return make_reactor(
        HandlerSet(
            init={"sum": 0, "done": False},
            on_tick=tick,
            stop_when=lambda s_d: s_d["done"],
            seconds_per_tick=_spt(taken),
        )
    )


_REGISTRY: Dict[str, Scenario] = {
    s.name: s
    for s in (
        Scenario(
            name="counter",
            description="Counter: ticks add 1, keys i/m add/subtract 10, "
            "stops past 100, drawn as a solid blue circle.",
            build=_build_counter,
        ),
        Scenario(
            name="increment",
            description="Minimal counter: ticks add 1; never stops.",
            build=_build_increment,
        ),
        Scenario(
            name="trace-replay",
            description="Ticks add 10 until the value passes 100; drawn as an "
            "outline blue circle (good for tracing and replaying).",
            build=_build_trace_replay,
        ),
        Scenario(
            name="diff-motion",
            description="Differential model of uniform linear motion "
            "(x += v*dt per tick); compare with the closed form x_at_t.",
            build=_build_diff_motion,
        ),
        Scenario(
            name="free-fall",
            description="Free fall from a parameterized height (start_y): "
            "state {y, vy}, constant acceleration -0.3, stops below ground.",
            build=_build_free_fall,
            parameters=("start_y",),
        ),
        Scenario(
            name="digit-sum",
            description="Each tick opens a modal digit prompt; digits "
            "accumulate into a sum and 0 finishes the run.",
            build=_build_digit_sum,
        ),
    )
}


def get_scenario(name: str) -> Scenario:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise UnknownScenario(
            f"unknown scenario {name!r} (known: {', '.join(list_scenarios())})"
        ) from None


def list_scenarios() -> List[str]:
    return sorted(_REGISTRY)
