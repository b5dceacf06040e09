"""Figure recipes: JSON descriptions of panel layouts over CSV data.

A recipe never triggers any computation; it only names CSV files (paths
relative to the input directory), the columns to plot, and presentation
details. Validation is strict: a referenced column that does not exist in
its CSV is a schema mismatch, reported by name.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path


class SchemaMismatch(Exception):
    """A recipe references a CSV column that the data does not provide."""

    def __init__(self, csv: str, column: str):
        self.csv = csv
        self.column = column
        super().__init__(f"{csv}: missing column {column!r}")


class RecipeError(Exception):
    """The recipe file itself is malformed."""


_PANEL_KINDS = ("lines", "contour")
_OPS = ("<=", ">=", "<", ">", "==")


@dataclass(frozen=True)
class Where:
    col: str
    op: str
    value: float


@dataclass(frozen=True)
class Panel:
    kind: str
    csv: str
    x: str
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    curves: tuple[str, ...] = ()          # lines
    y: str = ""                           # contour
    z: str = ""                           # contour
    mark_maxima: bool = False
    where: Where | None = None
    xlim: tuple[float, float] | None = None
    ylim: tuple[float, float] | None = None

    def columns(self) -> list[str]:
        cols = [self.x]
        if self.kind == "lines":
            cols += list(self.curves)
        else:
            cols += [self.y, self.z]
        if self.where is not None:
            cols.append(self.where.col)
        return cols


@dataclass(frozen=True)
class FigureRecipe:
    figure_id: str
    layout: tuple[int, int]
    panels: tuple[Panel, ...]
    csvs: tuple[str, ...] = field(init=False)

    def __post_init__(self):
        object.__setattr__(
            self, "csvs", tuple(dict.fromkeys(p.csv for p in self.panels))
        )


def _panel(raw: dict, idx: int) -> Panel:
    kind = raw.get("kind", "lines")
    if kind not in _PANEL_KINDS:
        raise RecipeError(f"panel {idx}: kind must be one of {_PANEL_KINDS}, got {kind!r}")
    for key in ("csv", "x"):
        if not raw.get(key):
            raise RecipeError(f"panel {idx}: missing {key!r}")
    if kind == "lines" and not raw.get("curves"):
        raise RecipeError(f"panel {idx}: lines panel needs a non-empty 'curves' list")
    if kind == "contour" and not (raw.get("y") and raw.get("z")):
        raise RecipeError(f"panel {idx}: contour panel needs 'y' and 'z'")
    where = None
    if raw.get("where") is not None:
        w = raw["where"]
        if w.get("op") not in _OPS:
            raise RecipeError(f"panel {idx}: where.op must be one of {_OPS}")
        where = Where(col=str(w["col"]), op=w["op"], value=float(w["value"]))
    lims = {}
    for key in ("xlim", "ylim"):
        if raw.get(key) is not None:
            pair = raw[key]
            if len(pair) != 2:
                raise RecipeError(f"panel {idx}: {key} must be [lo, hi]")
            lims[key] = (float(pair[0]), float(pair[1]))
    return Panel(
        kind=kind,
        csv=str(raw["csv"]),
        x=str(raw["x"]),
        title=str(raw.get("title", "")),
        xlabel=str(raw.get("xlabel", "")),
        ylabel=str(raw.get("ylabel", "")),
        curves=tuple(str(c) for c in raw.get("curves", ())),
        y=str(raw.get("y", "")),
        z=str(raw.get("z", "")),
        mark_maxima=bool(raw.get("mark_maxima", False)),
        where=where,
        **lims,
    )


def load_recipe(path: str | Path) -> FigureRecipe:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise RecipeError(f"cannot parse recipe {path}: {e}")
    figure_id = raw.get("figure_id")
    if not figure_id:
        raise RecipeError(f"{path}: missing figure_id")
    layout = raw.get("layout")
    if not (isinstance(layout, list) and len(layout) == 2 and min(layout) >= 1):
        raise RecipeError(f"{path}: layout must be [rows, cols]")
    panels = raw.get("panels")
    if not panels:
        raise RecipeError(f"{path}: needs at least one panel")
    if len(panels) > layout[0] * layout[1]:
        raise RecipeError(f"{path}: {len(panels)} panels exceed layout {layout}")
    return FigureRecipe(
        figure_id=str(figure_id),
        layout=(int(layout[0]), int(layout[1])),
        panels=tuple(_panel(p, i) for i, p in enumerate(panels)),
    )
