"""Trace recording and the tick/state table.

A tracing reactor logs every state it passes through; the log renders as a
table whose first two columns are always "tick" and "state".  The "tick"
column is the state-sequence index (row 0 is the state when tracing
began), which coincides with the number of elapsed clock ticks for
pure-tick runs and stays well-defined when key events appear.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
from dataclasses import dataclass
from typing import Callable, List, Sequence, Tuple, TypeVar

from . import scene as scene_mod
from .core import Reactor
from .errors import DuplicateColumn, NotTracing, UnknownColumn

S = TypeVar("S")


def start_trace(r: Reactor[S]) -> Reactor[S]:
    """Begin logging: the current state becomes row zero of any later table.

    Calling it on an already-tracing reactor resets the log (a fresh
    observation window).
    """
    return dataclasses.replace(r, tracing=True, trace_log=(r.state,))


def stop_trace(r: Reactor[S]) -> Reactor[S]:
    """Stop logging; the accumulated log stays readable afterwards."""
    if not r.tracing:
        return r
    return dataclasses.replace(r, tracing=False)


def get_trace(r: Reactor[S]) -> List[S]:
    """The logged state sequence, oldest first."""
    if r.trace_log is None:
        raise NotTracing("start_trace was never applied to this reactor")
    return list(r.trace_log)


def get_trace_as_table(r: Reactor[S]) -> "TraceTable":
    """The log as a table with columns ("tick", "state")."""
    log = get_trace(r)
    return TraceTable(
        columns=("tick", "state"),
        rows=tuple((i, state) for i, state in enumerate(log)),
    )


class Row:
    """Read-only row view handed to build_column callbacks; index by column name."""

    __slots__ = ("_columns", "_cells")

    def __init__(self, columns: Sequence[str], cells: Sequence[object]):
        self._columns = columns
        self._cells = cells

    def __getitem__(self, name: str) -> object:
        try:
            return self._cells[self._columns.index(name)]
        except ValueError:
            raise UnknownColumn(name) from None


@dataclass(frozen=True)
class TraceTable:
    """An immutable column-named table of trace rows."""

    columns: Tuple[str, ...]
    rows: Tuple[Tuple[object, ...], ...]

    def build_column(self, name: str, fn: Callable[[Row], object]) -> "TraceTable":
        return build_column(self, name, fn)

    def render(self, fmt: str) -> str:
        return render_table(self, fmt)


def build_column(
    t: TraceTable, name: str, fn: Callable[[Row], object]
) -> TraceTable:
    """Functionally extend `t` with a derived column.

    `fn` receives a row accessor supporting lookup by column name and
    returns the new cell.  Existing columns and the row count are never
    altered.
    """
    if name in t.columns:
        raise DuplicateColumn(f"table already has a column named {name!r}")
    new_rows = tuple(row + (fn(Row(t.columns, row)),) for row in t.rows)
    return TraceTable(columns=t.columns + (name,), rows=new_rows)


def _structured_cell(cell: object) -> object:
    if scene_mod.is_scene(cell):
        return scene_mod.scene_to_structured(cell)
    return cell


def _csv_cell(cell: object) -> str:
    # Scenes and structured (dict/list) states render as their canonical
    # compact JSON text; scalars render bare, booleans as true/false.
    if isinstance(cell, bool):
        return "true" if cell else "false"
    if isinstance(cell, (int, float)):
        return str(cell)
    if isinstance(cell, str):
        return cell
    return json.dumps(_structured_cell(cell), separators=(",", ":"))


def render_table(t: TraceTable, fmt: str) -> str:
    """Render a table as RFC 4180 CSV or as compact JSON.

    JSON form: {"columns":[...],"rows":[[...],...]} with scene cells in
    their canonical structured form.  Neither form carries a trailing
    newline.
    """
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(t.columns)
        for row in t.rows:
            writer.writerow(_csv_cell(cell) for cell in row)
        return buf.getvalue()[:-1]
    if fmt == "json":
        payload = {
            "columns": list(t.columns),
            "rows": [[_structured_cell(cell) for cell in row] for row in t.rows],
        }
        return json.dumps(payload, separators=(",", ":"))
    raise ValueError(f"unknown table format {fmt!r} (expected 'csv' or 'json')")
