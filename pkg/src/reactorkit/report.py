"""Figure rendering for trace reports.

The CLI `report` subcommand writes a delimited trace table plus matplotlib
figures next to it: a trajectory chart of the numeric state series, and
(when the scenario draws) a strip of scene snapshots, one per early row.
Scenes are drawn here with matplotlib patches; the scene values themselves
stay raster-free.
"""

from __future__ import annotations

import os
from typing import Dict, List, Optional, Tuple

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.patches import Circle as MplCircle
from matplotlib.patches import Rectangle as MplRectangle

from . import scene as scene_mod
from .tracing import TraceTable, render_table

#: Rough advance width of a character relative to the font size.
_TEXT_WIDTH_FACTOR = 0.6


def scene_extent(s: scene_mod.Scene) -> Tuple[float, float]:
    """Approximate (width, height) of a scene in pixels, for axis limits."""
    if isinstance(s, scene_mod.Circle):
        return (2 * s.radius, 2 * s.radius)
    if isinstance(s, scene_mod.Text):
        return (max(len(s.content), 1) * s.size * _TEXT_WIDTH_FACTOR, s.size)
    if isinstance(s, scene_mod.Rectangle):
        return (s.width, s.height)
    if isinstance(s, scene_mod.Overlay):
        tw, th = scene_extent(s.top)
        bw, bh = scene_extent(s.bottom)
        return (max(tw, bw), max(th, bh))
    return (s.width, s.height)


def draw_scene(ax, s: scene_mod.Scene) -> None:
    """Draw a scene centered on (0, 0) of a matplotlib axes."""
    if isinstance(s, scene_mod.Circle):
        ax.add_patch(
            MplCircle(
                (0, 0),
                radius=max(s.radius, 1e-9),
                fill=s.mode == "solid",
                edgecolor=s.color,
                facecolor=s.color if s.mode == "solid" else "none",
            )
        )
    elif isinstance(s, scene_mod.Text):
        ax.text(0, 0, s.content, color=s.color, fontsize=s.size * 0.75,
                ha="center", va="center")
    elif isinstance(s, scene_mod.Rectangle):
        ax.add_patch(
            MplRectangle(
                (-s.width / 2, -s.height / 2),
                s.width,
                s.height,
                fill=s.mode == "solid",
                edgecolor=s.color,
                facecolor=s.color if s.mode == "solid" else "none",
            )
        )
    elif isinstance(s, scene_mod.Overlay):
        draw_scene(ax, s.bottom)
        draw_scene(ax, s.top)
    # Empty draws nothing.


def save_scene_figure(s: scene_mod.Scene, path: str) -> None:
    """Render one scene to an image file."""
    fig, ax = plt.subplots(figsize=(3, 3))
    _prepare_scene_axes(ax, s)
    draw_scene(ax, s)
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)


def _prepare_scene_axes(ax, s: scene_mod.Scene) -> None:
    w, h = scene_extent(s)
    half = max(w, h, 10) / 2 * 1.2
    ax.set_xlim(-half, half)
    ax.set_ylim(-half, half)
    ax.set_aspect("equal")
    ax.axis("off")


def _numeric_series(table: TraceTable) -> Dict[str, List[float]]:
    """Extract plottable series from the state column, keyed by field name."""
    state_idx = table.columns.index("state")
    series: Dict[str, List[float]] = {}
    for row in table.rows:
        cell = row[state_idx]
        if isinstance(cell, bool):
            continue
        if isinstance(cell, (int, float)):
            series.setdefault("state", []).append(float(cell))
        elif isinstance(cell, dict):
            for name, value in cell.items():
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    continue
                series.setdefault(name, []).append(float(value))
    return series


def plot_trace(table: TraceTable, path: str, title: str = "") -> bool:
    """Plot the numeric state series against the tick column.

    Returns False (and writes nothing) when the states carry no numeric
    fields to plot.
    """
    series = _numeric_series(table)
    if not series:
        return False
    tick_idx = table.columns.index("tick")
    ticks = [row[tick_idx] for row in table.rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    for name, values in series.items():
        ax.plot(ticks[: len(values)], values, marker="o", markersize=3, label=name)
    ax.set_xlabel("tick")
    ax.set_ylabel("state")
    if title:
        ax.set_title(title)
    if len(series) > 1:
        ax.legend()
    ax.grid(True, alpha=0.3)
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
    return True


def plot_scene_strip(
    scenes: List[scene_mod.Scene], path: str, max_cells: int = 8
) -> bool:
    """Render up to `max_cells` scene snapshots side by side."""
    shown = scenes[:max_cells]
    if not shown:
        return False
    fig, axes = plt.subplots(1, len(shown), figsize=(2.2 * len(shown), 2.4))
    if len(shown) == 1:
        axes = [axes]
    for i, (ax, s) in enumerate(zip(axes, shown)):
        _prepare_scene_axes(ax, s)
        draw_scene(ax, s)
        ax.set_title(f"tick {i}", fontsize=9)
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
    return True


def write_report(
    table: TraceTable,
    out_dir: str,
    fmt: str = "csv",
    title: str = "",
    scenes: Optional[List[scene_mod.Scene]] = None,
) -> List[str]:
    """Write the delimited table and its figures into `out_dir`.

    Returns the list of paths written (table first).
    """
    os.makedirs(out_dir, exist_ok=True)
    written = []
    table_path = os.path.join(out_dir, f"trace.{fmt}")
    with open(table_path, "w", encoding="utf-8") as fh:
        fh.write(render_table(table, fmt) + "\n")
    written.append(table_path)
    trajectory_path = os.path.join(out_dir, "trajectory.png")
    if plot_trace(table, trajectory_path, title=title):
        written.append(trajectory_path)
    if scenes:
        strip_path = os.path.join(out_dir, "scenes.png")
        if plot_scene_strip(scenes, strip_path):
            written.append(strip_path)
    return written
