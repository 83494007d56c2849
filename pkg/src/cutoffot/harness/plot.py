"""Minimal deterministic SVG line plots from CSV tables."""
from __future__ import annotations

import csv
import math

from ..errors import MissingColumn

WIDTH, HEIGHT, MARGIN = 640, 420, 60
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


class EmptyData(MissingColumn):
    """The table has no usable rows."""


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def _load(csv_path):
    with open(csv_path, newline="") as fh:
        reader = csv.DictReader(fh)
        return reader.fieldnames or [], list(reader)


def emit_plot(csv_path: str, layout: dict, out_path: str) -> str:
    """Line plot of ``layout['series']`` columns against ``layout['x']``.

    layout keys: x, series (list of column names), logx, logy (bools), title,
    where (optional {column: value} row filter).
    Non-positive values are dropped on log axes; NaN/empty cells are dropped.
    Output depends only on the table and layout.
    """
    header, rows = _load(csv_path)
    cols = [layout["x"], *layout["series"]]
    for c in cols:
        if c not in header:
            raise MissingColumn(c)
    for k, v in layout.get("where", {}).items():
        if k not in header:
            raise MissingColumn(k)
        rows = [r for r in rows if r[k] == str(v)]
    if not rows:
        raise EmptyData("no rows to plot")
    logx, logy = bool(layout.get("logx")), bool(layout.get("logy"))
    tx = (lambda v: math.log10(v)) if logx else (lambda v: v)
    ty = (lambda v: math.log10(v)) if logy else (lambda v: v)

    series = {}
    for name in layout["series"]:
        pts = []
        for r in rows:
            try:
                x, y = float(r[layout["x"]]), float(r[name])
            except ValueError:
                continue
            if not (math.isfinite(x) and math.isfinite(y)):
                continue
            if (logx and x <= 0) or (logy and y <= 0):
                continue
            pts.append((tx(x), ty(y)))
        series[name] = sorted(pts)
    allp = [p for pts in series.values() for p in pts]
    if not allp:
        raise EmptyData("no finite points to plot")
    x0, x1 = min(p[0] for p in allp), max(p[0] for p in allp)
    y0, y1 = min(p[1] for p in allp), max(p[1] for p in allp)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    sx = lambda v: MARGIN + (v - x0) / (x1 - x0) * (WIDTH - 2 * MARGIN)
    sy = lambda v: HEIGHT - MARGIN - (v - y0) / (y1 - y0) * (HEIGHT - 2 * MARGIN)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'viewBox="0 0 {WIDTH} {HEIGHT}">',
           f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
           f'<rect x="{MARGIN}" y="{MARGIN}" width="{WIDTH - 2 * MARGIN}" height="{HEIGHT - 2 * MARGIN}" '
           'fill="none" stroke="black"/>']
    title = layout.get("title", "")
    if title:
        out.append(f'<text x="{WIDTH // 2}" y="24" text-anchor="middle" font-size="14">{_esc(title)}</text>')
    xl = ("log10 " if logx else "") + layout["x"]
    yl = ("log10 " if logy else "") + "value"
    out.append(f'<text x="{WIDTH // 2}" y="{HEIGHT - 16}" text-anchor="middle" font-size="12">{_esc(xl)}</text>')
    out.append(f'<text x="16" y="{HEIGHT // 2}" text-anchor="middle" font-size="12" '
               f'transform="rotate(-90 16 {HEIGHT // 2})">{_esc(yl)}</text>')
    for v, anchor in ((x0, "start"), (x1, "end")):
        out.append(f'<text x="{_fmt(sx(v))}" y="{HEIGHT - MARGIN + 16}" text-anchor="{anchor}" '
                   f'font-size="10">{_fmt(v)}</text>')
    for v in (y0, y1):
        out.append(f'<text x="{MARGIN - 4}" y="{_fmt(sy(v))}" text-anchor="end" font-size="10">{_fmt(v)}</text>')
    for k, (name, pts) in enumerate(series.items()):
        color = COLORS[k % len(COLORS)]
        if pts:
            coords = " ".join(f"{_fmt(sx(a))},{_fmt(sy(b))}" for a, b in pts)
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{coords}"/>')
        ly = MARGIN + 14 + 16 * k
        out.append(f'<line x1="{WIDTH - MARGIN - 150}" y1="{ly}" x2="{WIDTH - MARGIN - 130}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{WIDTH - MARGIN - 125}" y="{ly + 4}" font-size="11">{_esc(name)}</text>')
    out.append("</svg>")
    text = "\n".join(out) + "\n"
    with open(out_path, "w", newline="\n") as fh:
        fh.write(text)
    return out_path


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
