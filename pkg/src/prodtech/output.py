"""Deterministic result tables and the CSV/JSON/SVG writers.

Numeric cells are written with ``repr``'s shortest round-trip representation
so identical runs produce byte-identical files. Every format embeds the
resolved-config header block: ``#``-prefixed lines in CSV, a ``config``
object in JSON, an XML comment in SVG.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ParamDomain

__all__ = ["ResultTable", "format_value", "write_output"]

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2")


@dataclass
class ResultTable:
    """Columnar task output plus optional polyline groups for SVG rendering."""

    columns: tuple[str, ...]
    rows: list[tuple]
    groups: list[tuple[str, np.ndarray]] | None = None
    notes: dict = field(default_factory=dict)

    def __post_init__(self):
        self.columns = tuple(str(c) for c in self.columns)
        width = len(self.columns)
        for row in self.rows:
            if len(row) != width:
                raise ParamDomain(
                    f"row width {len(row)} does not match {width} columns"
                )


def format_value(value) -> str:
    """Shortest round-trip text for header lines and CSV cells."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, str):
        return value
    if isinstance(value, (list, tuple, np.ndarray)):
        return "[" + ", ".join(format_value(v) for v in value) + "]"
    if value is None:
        return "none"
    raise ParamDomain(f"cannot format value of type {type(value).__name__}")


def _json_ready(value):
    if isinstance(value, bool):
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        f = float(value)
        return None if not np.isfinite(f) else f
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_json_ready(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _json_ready(v) for k, v in value.items()}
    return value


def _write_csv(table: ResultTable, path: str, header_lines: list[str]) -> None:
    parts = [f"# {line}\n" for line in header_lines]
    for key, val in table.notes.items():
        parts.append(f"# {key} = {format_value(val)}\n")
    parts.append(",".join(table.columns) + "\n")
    for row in table.rows:
        parts.append(",".join(format_value(v) for v in row) + "\n")
    with open(path, "w", newline="") as fh:
        fh.write("".join(parts))


def _write_json(table: ResultTable, path: str, config: dict, version: str) -> None:
    doc = {
        "version": version,
        "config": _json_ready(config),
        "columns": list(table.columns),
        "records": [
            {col: _json_ready(v) for col, v in zip(table.columns, row)}
            for row in table.rows
        ],
    }
    if table.notes:
        doc["notes"] = _json_ready(table.notes)
    with open(path, "w", newline="") as fh:
        fh.write(json.dumps(doc, indent=2))
        fh.write("\n")


def _write_svg(table: ResultTable, path: str, header_lines: list[str]) -> None:
    if not table.groups:
        raise ConfigError(
            "svg output needs polyline data; this task only produces a table "
            "(use csv or json)"
        )
    pts = np.vstack([g[1] for g in table.groups])
    x0, y0 = pts.min(axis=0)
    x1, y1 = pts.max(axis=0)
    span = max(x1 - x0, y1 - y0, 1e-12)
    pad = 0.05 * span
    x0, y0 = x0 - pad, y0 - pad
    scale = 600.0 / (span + 2 * pad)
    width = (x1 + pad - x0) * scale
    height = (y1 + pad - y0) * scale

    def sx(x: float) -> str:
        return repr(round((x - x0) * scale, 3))

    def sy(y: float) -> str:
        # SVG y grows downward; flip so larger c plots higher.
        return repr(round(height - (y - y0) * scale, 3))

    lines = [
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="0 0 {sx(x1 + pad)} {sy(y0)}">',
    ]
    comment = "\n".join(line.replace("--", "- -") for line in header_lines)
    lines.insert(0, f"<!--\n{comment}\n-->")
    for idx, (label, points) in enumerate(table.groups):
        color = _PALETTE[idx % len(_PALETTE)]
        coords = " ".join(f"{sx(px)},{sy(py)}" for px, py in points)
        lines.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="2" '
            f'points="{coords}"><title>{label}</title></polyline>'
        )
    lines.append("</svg>")
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")


def write_output(table: ResultTable, path: str, fmt: str,
                 header_lines: list[str], config: dict, version: str) -> None:
    """Write a result table in the requested format."""
    if fmt == "csv":
        _write_csv(table, path, header_lines)
    elif fmt == "json":
        _write_json(table, path, config, version)
    elif fmt == "svg":
        _write_svg(table, path, header_lines)
    else:
        raise ConfigError(f"unknown output format {fmt!r}")
