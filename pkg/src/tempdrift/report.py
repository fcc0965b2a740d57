"""Deterministic report renderers: SVG heatmaps, matrix CSVs, Markdown tables.

Everything here is a pure function of its inputs; identical views produce
byte-identical files. SVGs are written directly (no plotting library) with a
light-to-dark blue ramp, the numeric value printed in each cell, and a star
glyph on cells flagged by the significance mask.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Union
from xml.sax.saxutils import escape

import numpy as np

from .correlation import CorrelationGrid, display_name
from .errors import DataError

VALUE_KINDS = ("similarity", "distance", "delta")


@dataclass
class MatrixView:
    """K x K matrix keyed by domain labels in ordinal order."""

    row_labels: List[str]
    col_labels: List[str]
    values: np.ndarray
    value_kind: str
    mask: Optional[np.ndarray] = None  # True -> star glyph

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.value_kind not in VALUE_KINDS:
            raise DataError(f"unknown value kind {self.value_kind!r}")
        if self.values.shape != (len(self.row_labels), len(self.col_labels)):
            raise DataError(f"matrix shape {self.values.shape} does not match labels")
        if self.mask is not None:
            self.mask = np.asarray(self.mask, dtype=bool)
            if self.mask.shape != self.values.shape:
                raise DataError("mask shape does not match values")


_LIGHT = (0xF7, 0xFB, 0xFF)
_DARK = (0x08, 0x30, 0x6B)

_CELL_W = 96
_CELL_H = 56
_MARGIN_LEFT = 80
_MARGIN_TOP = 60


def _blend(t: float) -> str:
    r = round(_LIGHT[0] + (_DARK[0] - _LIGHT[0]) * t)
    g = round(_LIGHT[1] + (_DARK[1] - _LIGHT[1]) * t)
    b = round(_LIGHT[2] + (_DARK[2] - _LIGHT[2]) * t)
    return f"#{r:02x}{g:02x}{b:02x}"


def render_heatmap_svg(view: MatrixView, path: Union[str, Path]) -> None:
    """Colored K x K grid; lighter cells carry lower values."""
    if not np.all(np.isfinite(view.values)):
        raise DataError("heatmap values must be finite")
    lo = float(view.values.min())
    hi = float(view.values.max())
    span = hi - lo
    n_rows, n_cols = view.values.shape
    width = _MARGIN_LEFT + _CELL_W * n_cols + 20
    height = _MARGIN_TOP + _CELL_H * n_rows + 20
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<title>{escape(view.value_kind)} matrix</title>',
        f'<text x="{_MARGIN_LEFT}" y="24" font-family="sans-serif" font-size="16">'
        f'{escape(view.value_kind)}</text>',
    ]
    for c, label in enumerate(view.col_labels):
        x = _MARGIN_LEFT + c * _CELL_W + _CELL_W // 2
        parts.append(f'<text x="{x}" y="{_MARGIN_TOP - 10}" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="13">{escape(label)}</text>')
    for r, label in enumerate(view.row_labels):
        y = _MARGIN_TOP + r * _CELL_H + _CELL_H // 2 + 5
        parts.append(f'<text x="{_MARGIN_LEFT - 10}" y="{y}" text-anchor="end" '
                     f'font-family="sans-serif" font-size="13">{escape(label)}</text>')
    for r in range(n_rows):
        for c in range(n_cols):
            v = float(view.values[r, c])
            t = (v - lo) / span if span > 0.0 else 0.5
            x = _MARGIN_LEFT + c * _CELL_W
            y = _MARGIN_TOP + r * _CELL_H
            fill = _blend(t)
            text_fill = "#ffffff" if t > 0.6 else "#000000"
            starred = bool(view.mask[r, c]) if view.mask is not None else False
            label = f"{v:.3f}" + ("*" if starred else "")
            parts.append(f'<rect x="{x}" y="{y}" width="{_CELL_W}" height="{_CELL_H}" '
                         f'fill="{fill}" stroke="#ffffff"/>')
            parts.append(f'<text x="{x + _CELL_W // 2}" y="{y + _CELL_H // 2 + 5}" '
                         f'text-anchor="middle" font-family="sans-serif" font-size="13" '
                         f'fill="{text_fill}">{label}</text>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")


def write_matrix_csv(view: MatrixView, path: Union[str, Path]) -> None:
    """Header row of column labels, one row per row label, 17 significant digits.

    When a mask is present a companion <stem>_stars.csv of booleans is written
    alongside.
    """
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([""] + list(view.col_labels))
        for label, row in zip(view.row_labels, view.values):
            writer.writerow([label] + [f"{float(v):.17g}" for v in row])
    if view.mask is not None:
        star_path = path.with_name(path.stem + "_stars.csv")
        with open(star_path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([""] + list(view.col_labels))
            for label, row in zip(view.row_labels, view.mask):
                writer.writerow([label] + ["true" if v else "false" for v in row])


def read_matrix_csv(path: Union[str, Path]) -> MatrixView:
    """Inverse of write_matrix_csv (mask not recovered; kind unknown -> delta)."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        col_labels = header[1:]
        row_labels = []
        rows = []
        for row in reader:
            row_labels.append(row[0])
            rows.append([float(v) for v in row[1:]])
    return MatrixView(row_labels=row_labels, col_labels=col_labels,
                      values=np.array(rows, dtype=np.float64), value_kind="delta")


def render_correlation_markdown(grid: CorrelationGrid, path: Union[str, Path]) -> None:
    """Markdown table: drift metrics as rows, performance metrics as columns."""
    if not grid.columns:
        raise DataError("nothing to render: empty performance-metric column list")
    lines = ["| Metrics | " + " | ".join(grid.columns) + " |",
             "| --- |" + " --- |" * len(grid.columns)]
    for metric in grid.rows:
        cells = [grid.cell(metric, column).rendered() for column in grid.columns]
        lines.append("| " + display_name(metric) + " | " + " | ".join(cells) + " |")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_correlation_csv(grid: CorrelationGrid, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["drift_family", "encoder_id", "measure", "perf_metric",
                         "r", "p", "n", "stars"])
        for metric in grid.rows:
            for column in grid.columns:
                cell = grid.cell(metric, column)
                writer.writerow([metric.family, metric.encoder_id or "",
                                 metric.measure or "", column,
                                 repr(cell.r), repr(cell.p_value), cell.n, cell.stars])
