"""ASCII spacetime diagrams.

One row per time step with t increasing downward, one column per lattice
cell. Requests show as ``!n`` markers at their submission cell, signal
fronts advance one cell per row as ``>`` or ``<``, arrivals are ``*``, and
two fronts crossing in one cell collapse to ``X``. When several glyphs
compete for a cell the busiest wins: request over arrival over crossing
over a plain front.
"""

from __future__ import annotations

from .protocol import Trace
from .spacetime import SpacetimeConfig

_CELL = 3


def _task_marker(task_id: str) -> str:
    digits = "".join(ch for ch in task_id if ch.isdigit())
    return "!" + (digits or task_id[:1])


def render_diagram(trace: Trace, cfg: SpacetimeConfig) -> str:
    """Deterministic text rendering of a trace; newline-terminated, no
    trailing spaces."""
    coords = cfg.locations
    xmin = min(coords.values())
    xmax = max(coords.values())
    span = xmax - xmin + 1

    fronts: dict[tuple[int, int], set[str]] = {}
    for origin, dest, depart in sorted(trace.departures):
        x0, x1 = coords[origin], coords[dest]
        step = 1 if x1 > x0 else -1
        glyph = ">" if step > 0 else "<"
        for k in range(abs(x1 - x0)):
            t = depart + k
            if t > cfg.horizon:
                break
            fronts.setdefault((t, x0 + step * k), set()).add(glyph)

    cells: dict[tuple[int, int], str] = {}
    for (t, x), glyphs in fronts.items():
        cells[(t, x)] = glyphs.pop() if len(glyphs) == 1 else "X"
    for origin, dest, at in trace.arrivals:
        cells[(at, coords[dest])] = "*"
    for task_id, location, time in trace.requests:
        cells[(time, coords[location])] = _task_marker(task_id)

    names = {coords[name]: name for name in coords}
    header = "  t " + "".join(
        f"{names.get(xmin + i, '')[:_CELL - 1]:<{_CELL}}" for i in range(span)
    )
    lines = [header.rstrip()]
    for t in range(cfg.horizon + 1):
        row = f"{t:>3} " + "".join(
            f"{cells.get((t, xmin + i), ''):<{_CELL}}" for i in range(span)
        )
        lines.append(row.rstrip())
    return "\n".join(lines) + "\n"
