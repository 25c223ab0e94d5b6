"""Declarative picture values produced by to_draw handlers.

A Scene is a small immutable tree (circle / text / rectangle / overlay /
empty) with structural equality.  Scenes carry no coordinate system; a
display centers the root scene in its viewport.  `scene_to_structured`
gives the canonical JSON-shaped form used in trace tables and on the wire,
and `structured_to_scene` inverts it exactly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .errors import MalformedScene, NegativeDimension, NonPositiveSize

MODES = ("solid", "outline")

_COLOR_RE = re.compile(r"^(?:[a-z]+|#[0-9a-f]{6})$")


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise ValueError(f"mode must be 'solid' or 'outline', got {mode!r}")


def _check_color(color: str) -> None:
    if not isinstance(color, str) or not _COLOR_RE.match(color):
        raise ValueError(
            f"color must be a lowercase color name or '#rrggbb', got {color!r}"
        )


@dataclass(frozen=True)
class Circle:
    radius: float
    mode: str
    color: str


@dataclass(frozen=True)
class Text:
    content: str
    size: float
    color: str


@dataclass(frozen=True)
class Rectangle:
    width: float
    height: float
    mode: str
    color: str


@dataclass(frozen=True)
class Overlay:
    top: "Scene"
    bottom: "Scene"


@dataclass(frozen=True)
class Empty:
    width: float = 0
    height: float = 0


Scene = Union[Circle, Text, Rectangle, Overlay, Empty]


def circle(radius: float, mode: str, color: str) -> Circle:
    """A circle of the given radius in pixels; radius 0 is a valid point."""
    if radius < 0:
        raise NegativeDimension(f"circle radius must be >= 0, got {radius}")
    _check_mode(mode)
    _check_color(color)
    return Circle(radius, mode, color)


def text(content: str, size: float, color: str) -> Text:
    """A piece of text at the given size in pixels."""
    if not size > 0:
        raise NonPositiveSize(f"text size must be > 0, got {size}")
    _check_color(color)
    return Text(content, size, color)


def rectangle(width: float, height: float, mode: str, color: str) -> Rectangle:
    if width < 0 or height < 0:
        raise NegativeDimension(
            f"rectangle dimensions must be >= 0, got {width}x{height}"
        )
    _check_mode(mode)
    _check_color(color)
    return Rectangle(width, height, mode, color)


def overlay(top: Scene, bottom: Scene) -> Overlay:
    """`top` drawn over `bottom`, both centered."""
    return Overlay(top, bottom)


def empty_scene(width: float = 0, height: float = 0) -> Empty:
    if width < 0 or height < 0:
        raise NegativeDimension(f"empty dimensions must be >= 0, got {width}x{height}")
    return Empty(width, height)


def is_scene(value: object) -> bool:
    return isinstance(value, (Circle, Text, Rectangle, Overlay, Empty))


def scene_to_structured(s: Scene) -> dict:
    """Canonical structured form of a scene (exact wire/table representation)."""
    if isinstance(s, Circle):
        return {"kind": "circle", "radius": s.radius, "mode": s.mode, "color": s.color}
    if isinstance(s, Text):
        return {"kind": "text", "content": s.content, "size": s.size, "color": s.color}
    if isinstance(s, Rectangle):
        return {
            "kind": "rectangle",
            "width": s.width,
            "height": s.height,
            "mode": s.mode,
            "color": s.color,
        }
    if isinstance(s, Overlay):
        return {
            "kind": "overlay",
            "top": scene_to_structured(s.top),
            "bottom": scene_to_structured(s.bottom),
        }
    if isinstance(s, Empty):
        return {"kind": "empty", "width": s.width, "height": s.height}
    raise MalformedScene(f"not a scene value: {s!r}")


def structured_to_scene(value: object) -> Scene:
    """Inverse of scene_to_structured; raises MalformedScene on unknown shapes."""
    if not isinstance(value, dict) or "kind" not in value:
        raise MalformedScene(f"expected an object with a 'kind' key, got {value!r}")
    kind = value["kind"]
    try:
        if kind == "circle":
            return circle(value["radius"], value["mode"], value["color"])
        if kind == "text":
            return text(value["content"], value["size"], value["color"])
        if kind == "rectangle":
            return rectangle(
                value["width"], value["height"], value["mode"], value["color"]
            )
        if kind == "overlay":
            return overlay(
                structured_to_scene(value["top"]), structured_to_scene(value["bottom"])
            )
        if kind == "empty":
            return empty_scene(value["width"], value["height"])
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedScene(f"bad {kind} scene: {value!r}") from exc
    raise MalformedScene(f"unknown scene kind {kind!r}")
