"""Deterministic panel rendering from CSV tables.

Strictly a data consumer: nothing here re-solves physics. Maxima dots come
from per-curve argmax over the CSV rows; empty cells stay NaN and draw as
gaps (matplotlib never interpolates across NaN).
"""

from __future__ import annotations

import warnings
from pathlib import Path

import matplotlib
import numpy as np
import pandas as pd

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

from .recipes import FigureRecipe, Panel, SchemaMismatch  # noqa: E402

DPI = 120

_OPS = {
    "<=": np.less_equal,
    ">=": np.greater_equal,
    "<": np.less,
    ">": np.greater,
    "==": np.equal,
}


def load_table(path: Path, csv_name: str, columns: list[str]) -> pd.DataFrame:
    """Read a CSV and check that every referenced column exists."""
    df = pd.read_csv(path)
    for col in columns:
        if col not in df.columns:
            raise SchemaMismatch(csv_name, col)
    return df


def apply_where(df: pd.DataFrame, panel: Panel) -> pd.DataFrame:
    if panel.where is None:
        return df
    w = panel.where
    return df[_OPS[w.op](df[w.col], w.value)]


def curve_maxima(df: pd.DataFrame, x: str, curves) -> dict[str, tuple[float, float]]:
    """Per-curve (x, y) at the maximal tabulated value; all-NaN curves skipped."""
    out = {}
    for c in curves:
        vals = df[c].to_numpy(dtype=float)
        if np.all(np.isnan(vals)):
            continue
        idx = int(np.nanargmax(vals))
        out[c] = (float(df[x].to_numpy(dtype=float)[idx]), float(vals[idx]))
    return out


def _lattice(df: pd.DataFrame, panel: Panel):
    """Reshape scattered rows into a grid, validating against the axis columns."""
    xs = np.unique(df[panel.x].to_numpy(dtype=float))
    ys = np.unique(df[panel.y].to_numpy(dtype=float))
    if len(xs) * len(ys) != len(df):
        raise ValueError(
            f"{panel.csv}: {len(df)} rows do not form a {len(ys)}x{len(xs)} grid "
            f"over ({panel.x}, {panel.y})"
        )
    pivot = df.pivot(index=panel.y, columns=panel.x, values=panel.z)
    # round trip: the pivoted lattice must cover exactly the axis values
    if not (
        np.array_equal(pivot.index.to_numpy(dtype=float), ys)
        and np.array_equal(pivot.columns.to_numpy(dtype=float), xs)
    ):
        raise ValueError(f"{panel.csv}: grid reshape does not match axis columns")
    return xs, ys, np.ma.masked_invalid(pivot.to_numpy(dtype=float))


def _draw_lines(ax, df: pd.DataFrame, panel: Panel):
    df = apply_where(df, panel)
    plotted = False
    for curve in panel.curves:
        vals = df[curve].to_numpy(dtype=float)
        if np.all(np.isnan(vals)):
            warnings.warn(f"{panel.csv}: column {curve!r} is empty; curve omitted")
            continue
        ax.plot(df[panel.x].to_numpy(dtype=float), vals, label=curve)
        plotted = True
    if panel.mark_maxima:
        for curve, (mx, my) in curve_maxima(df, panel.x, panel.curves).items():
            ax.plot([mx], [my], marker="o", markersize=5, color="black", zorder=5)
    if plotted:
        ax.legend(fontsize=8)


def _draw_contour(ax, df: pd.DataFrame, panel: Panel):
    xs, ys, grid = _lattice(apply_where(df, panel), panel)
    mappable = ax.contourf(xs, ys, grid, levels=21)
    ax.figure.colorbar(mappable, ax=ax)


def render(recipe: FigureRecipe, in_dir: str | Path, out_dir: str | Path) -> Path:
    """Render one figure; returns the written image path.

    Raises
    ------
    SchemaMismatch
        If any panel references a column its CSV does not carry.
    """
    in_dir, out_dir = Path(in_dir), Path(out_dir)
    tables = {
        p.csv: load_table(
            in_dir / p.csv,
            p.csv,
            sorted({c for q in recipe.panels if q.csv == p.csv for c in q.columns()}),
        )
        for p in recipe.panels
    }

    rows, cols = recipe.layout
    fig, axes = plt.subplots(rows, cols, figsize=(4.4 * cols, 3.4 * rows), squeeze=False)
    flat = axes.ravel()
    for ax in flat[len(recipe.panels):]:
        ax.set_axis_off()
    for panel, ax in zip(recipe.panels, flat):
        if panel.kind == "lines":
            _draw_lines(ax, tables[panel.csv], panel)
        else:
            _draw_contour(ax, tables[panel.csv], panel)
        ax.set_title(panel.title, fontsize=10)
        ax.set_xlabel(panel.xlabel, fontsize=9)
        ax.set_ylabel(panel.ylabel, fontsize=9)
        if panel.xlim:
            ax.set_xlim(*panel.xlim)
        if panel.ylim:
            ax.set_ylim(*panel.ylim)
    fig.tight_layout()

    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / f"{recipe.figure_id}.png"
    fig.savefig(out_path, dpi=DPI)
    plt.close(fig)
    return out_path
