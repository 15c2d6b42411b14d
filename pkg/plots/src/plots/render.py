"""Render one figure CSV to an image file.

Rendering is stateless and deterministic: a fixed svg.hashsalt replaces
matplotlib's per-process element ids and the SVG date stamp is suppressed,
so the same CSV always produces byte-identical output.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .errors import PlotsError  # noqa: E402
from .figures import FIGURES, FigureDef  # noqa: E402
from .reader import Table, read_table  # noqa: E402

matplotlib.rcParams["svg.hashsalt"] = "optomech-plots"

_FORMATS = (".png", ".svg")


def _axis_label(table: Table, name: str) -> str:
    unit = table.unit_of(name)
    return name if unit == "1" else f"{name} [{unit}]"


def _shared_unit_label(table: Table, names: list[str]) -> str:
    units = {table.unit_of(n) for n in names}
    if len(units) == 1:
        unit = units.pop()
        return "" if unit == "1" else f"[{unit}]"
    return ""


def build_figure(figure_id: str, table: Table):
    """Draw the figure into a new matplotlib Figure and return it."""
    try:
        spec: FigureDef = FIGURES[figure_id]
    except KeyError:
        raise PlotsError(
            f"unknown figure id '{figure_id}' "
            f"(known: {', '.join(sorted(FIGURES))})"
        ) from None
    y_names = spec.y_columns(table)
    x = table.column(spec.x)

    fig, ax = plt.subplots(figsize=(6.4, 4.2), dpi=150)
    for k, name in enumerate(y_names):
        values = table.column(name)
        if spec.yscale == "log":
            values = [v if v > 0 else math.nan for v in values]
        marker = spec.markers[k % len(spec.markers)] or None
        ax.plot(x, values, marker=marker, markersize=4, label=name)
    ax.set_xscale(spec.xscale)
    ax.set_yscale(spec.yscale)
    ax.set_xlabel(_axis_label(table, spec.x))
    if len(y_names) == 1:
        ax.set_ylabel(_axis_label(table, y_names[0]))
    else:
        ax.set_ylabel(_shared_unit_label(table, y_names))
    if spec.legend and len(y_names) > 1:
        ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    ax.set_title(figure_id)
    fig.tight_layout()
    return fig


def render(figure_id: str, csv_path: str | Path, out_path: str | Path) -> Path:
    """Read ``csv_path``, draw ``figure_id``, write ``out_path``; returns it."""
    out_path = Path(out_path)
    suffix = out_path.suffix.lower()
    if suffix not in _FORMATS:
        raise PlotsError(
            f"unsupported output format '{out_path.suffix}' "
            f"(use one of: {', '.join(_FORMATS)})"
        )
    table = read_table(csv_path)
    fig = build_figure(figure_id, table)
    try:
        out_path.parent.mkdir(parents=True, exist_ok=True)
        if suffix == ".svg":
            fig.savefig(out_path, format="svg", metadata={"Date": None})
        else:
            fig.savefig(out_path, format="png")
    finally:
        plt.close(fig)
    return out_path
