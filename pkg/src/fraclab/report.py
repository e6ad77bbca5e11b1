"""Deterministic output: JSON reports, CSV tables and a small SVG line plotter."""

from __future__ import annotations

import csv
import enum
import json
import math
from dataclasses import asdict, is_dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__


def jsonable(obj):
    """Convert numpy scalars and arrays, enums, fractions and dataclasses to JSON types."""
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        # NaN and infinities are not JSON
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    if is_dataclass(obj):
        return jsonable(asdict(obj))
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def write_report(path, command: str, config: dict, results: dict, ok: bool | None = None) -> dict:
    """Write ``report.json`` with the resolved config and the package version embedded."""
    doc = {"command": command, "version": __version__, "config": jsonable(config),
           "results": jsonable(results)}
    if ok is not None:
        doc["ok"] = bool(ok)
    Path(path).write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    return doc


def write_csv(path, header: Sequence[str], rows) -> None:
    """RFC 4180 CSV with 17 significant digits for floats."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(list(header))
        for row in rows:
            w.writerow([f"{v:.17g}" if isinstance(v, (float, np.floating)) else v for v in row])


def read_csv(path) -> tuple[list[str], np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array([[float(v) for v in r] for r in rows[1:]])


# {{{ svg

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / n
    mag = 10.0 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    first = math.ceil(lo / step - 1.0e-9) * step
    out = []
    t = first
    while t <= hi + 1.0e-9 * step:
        out.append(0.0 if abs(t) < 1.0e-12 * step else t)
        t += step
    return out


def svg_plot(x: np.ndarray, curves: Sequence[np.ndarray], labels: Sequence[str],
             title: str = "", width: int = 640, height: int = 420) -> str:
    """Polylines with axes, ticks and a legend."""
    x = np.asarray(x, dtype=float)
    ys = [np.asarray(c, dtype=float) for c in curves]
    x0, x1 = float(x.min()), float(x.max())
    finite = np.concatenate([y[np.isfinite(y)] for y in ys])
    y0, y1 = float(finite.min()), float(finite.max())
    if y1 == y0:
        y0, y1 = y0 - 1.0, y1 + 1.0
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad
    left, right, top, bottom = 60, 20, 30, 40
    pw, ph = width - left - right, height - top - bottom

    def px(v):
        return left + pw * (v - x0) / (x1 - x0)

    def py(v):
        return top + ph * (1.0 - (v - y0) / (y1 - y0))

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
           f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    if title:
        out.append(f'<text x="{width / 2:.1f}" y="18" text-anchor="middle" font-size="14">{title}</text>')
    for t in _ticks(x0, x1):
        out.append(f'<line x1="{px(t):.2f}" y1="{top + ph}" x2="{px(t):.2f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{px(t):.2f}" y="{top + ph + 18}" text-anchor="middle" font-size="11">{t:g}</text>')
    for t in _ticks(y0, y1):
        out.append(f'<line x1="{left - 5}" y1="{py(t):.2f}" x2="{left}" y2="{py(t):.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{py(t) + 4:.2f}" text-anchor="end" font-size="11">{t:g}</text>')
    if y0 < 0 < y1:
        out.append(f'<line x1="{left}" y1="{py(0):.2f}" x2="{left + pw}" y2="{py(0):.2f}" '
                   'stroke="#999" stroke-dasharray="4 3"/>')
    for k, (y, lab) in enumerate(zip(ys, labels)):
        color = PALETTE[k % len(PALETTE)]
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, y) if math.isfinite(b))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        ly = top + 16 + 16 * k
        out.append(f'<line x1="{left + pw - 120}" y1="{ly}" x2="{left + pw - 100}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw - 95}" y="{ly + 4}" font-size="11">{lab}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(path, x, curves, labels, title: str = "") -> None:
    Path(path).write_text(svg_plot(x, curves, labels, title))


# }}}


def emit_figures(out_dir, n: int = 1001) -> list[Path]:
    """CSV and SVG for both polynomial figures; returns the written paths."""
    from .explicit import figure_data

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    titles = {1: "Harnack family f_eps", 2: "touching polynomial f"}
    paths = []
    for which in (1, 2):
        header, table = figure_data(which, n)
        csv_path = out / f"figure{which}.csv"
        svg_path = out / f"figure{which}.svg"
        write_csv(csv_path, header, table)
        write_svg(svg_path, table[:, 0], [table[:, j] for j in range(1, table.shape[1])],
                  header[1:], titles[which])
        paths += [csv_path, svg_path]
    return paths
