"""Minimal deterministic SVG 1.1 output: line charts and filled cell
contours for sweep CSV data.  No plotting dependency; identical input bytes
give identical output bytes."""

from __future__ import annotations

import math
from typing import Dict, List, Optional, Sequence

from .errors import KyleEqError

WIDTH, HEIGHT = 800, 520
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 150, 40, 60

PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")

CONTOUR_COLORS = ("#30123b", "#4145ab", "#4675ed", "#39a2fc", "#1bcfd4",
                  "#24eca6", "#61fc6c", "#a4fc3b", "#d1e834", "#f3c63a",
                  "#fe9b2d", "#f36315", "#d93806", "#b11901")


def _f(x: float) -> str:
    return f"{x:.3f}".rstrip("0").rstrip(".")


def _finite(values):
    return [v for v in values if v is not None and not math.isnan(v)]


def _axis_range(values):
    vals = _finite(values)
    if not vals:
        raise KyleEqError("no finite data to plot")
    lo, hi = min(vals), max(vals)
    if hi == lo:
        hi = lo + 1.0
    pad = 0.04 * (hi - lo)
    return lo - pad, hi + pad


def _ticks(lo: float, hi: float, n: int = 5):
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


class _Doc:
    def __init__(self):
        self.parts: List[str] = [
            '<?xml version="1.0" encoding="UTF-8"?>\n',
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}">\n',
            f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>\n',
        ]

    def add(self, s: str):
        self.parts.append(s)

    def text(self, x, y, s, size=12, anchor="middle", rotate=None):
        t = (f'<text x="{_f(x)}" y="{_f(y)}" font-size="{size}" '
             f'font-family="sans-serif" text-anchor="{anchor}"')
        if rotate is not None:
            t += f' transform="rotate({rotate} {_f(x)} {_f(y)})"'
        self.add(t + f'>{s}</text>\n')

    def finish(self) -> str:
        return "".join(self.parts) + "</svg>\n"


def _frame(doc: _Doc, x_lo, x_hi, y_lo, y_hi, x_label, y_label, title):
    px0, px1 = MARGIN_L, WIDTH - MARGIN_R
    py0, py1 = HEIGHT - MARGIN_B, MARGIN_T

    def sx(x):
        return px0 + (x - x_lo) / (x_hi - x_lo) * (px1 - px0)

    def sy(y):
        return py0 + (y - y_lo) / (y_hi - y_lo) * (py1 - py0)

    doc.add(f'<rect x="{px0}" y="{py1}" width="{px1 - px0}" '
            f'height="{py0 - py1}" fill="none" stroke="black"/>\n')
    for t in _ticks(x_lo, x_hi):
        doc.add(f'<line x1="{_f(sx(t))}" y1="{py0}" x2="{_f(sx(t))}" '
                f'y2="{py0 + 5}" stroke="black"/>\n')
        doc.text(sx(t), py0 + 20, f"{t:.4g}")
    for t in _ticks(y_lo, y_hi):
        doc.add(f'<line x1="{px0 - 5}" y1="{_f(sy(t))}" x2="{px0}" '
                f'y2="{_f(sy(t))}" stroke="black"/>\n')
        doc.text(px0 - 10, sy(t) + 4, f"{t:.4g}", anchor="end")
    doc.text((px0 + px1) / 2, HEIGHT - 15, x_label)
    doc.text(20, (py0 + py1) / 2, y_label, rotate=-90)
    doc.text((px0 + px1) / 2, 22, title, size=14)
    return sx, sy


def line_svg(rows: List[dict], x_col: str, y_cols: Sequence[str],
             title: str = "") -> str:
    """One polyline per y column; sqrt-scaled axes are annotated by their
    column names."""
    for c in (x_col, *y_cols):
        if rows and c not in rows[0]:
            raise KyleEqError(f"column {c!r} not in data")
    doc = _Doc()
    if not rows:
        _frame(doc, 0.0, 1.0, 0.0, 1.0, x_col, "", title)
        return doc.finish()
    xs = [float(r[x_col]) for r in rows]
    all_y = []
    for c in y_cols:
        all_y.extend(float(r[c]) for r in rows
                     if r.get(c) not in ("", None))
    x_lo, x_hi = _axis_range(xs)
    y_lo, y_hi = _axis_range(all_y)
    sx, sy = _frame(doc, x_lo, x_hi, y_lo, y_hi, x_col,
                    y_cols[0] if len(y_cols) == 1 else "value", title)
    for i, c in enumerate(y_cols):
        pts = []
        for r in rows:
            val = r.get(c)
            if val in ("", None) or (isinstance(val, float) and math.isnan(val)):
                continue
            pts.append(f"{_f(sx(float(r[x_col])))},{_f(sy(float(val)))}")
        color = PALETTE[i % len(PALETTE)]
        if pts:
            doc.add(f'<polyline points="{" ".join(pts)}" fill="none" '
                    f'stroke="{color}" stroke-width="1.5"/>\n')
        ly = MARGIN_T + 16 * i + 10
        doc.add(f'<line x1="{WIDTH - MARGIN_R + 8}" y1="{ly}" '
                f'x2="{WIDTH - MARGIN_R + 28}" y2="{ly}" stroke="{color}" '
                f'stroke-width="1.5"/>\n')
        doc.text(WIDTH - MARGIN_R + 32, ly + 4, c, size=10, anchor="start")
    return doc.finish()


def contour_svg(rows: List[dict], x_col: str, y_col: str, z_col: str,
                title: str = "") -> str:
    """Filled-cell rendering of z over a regular (x, y) grid."""
    for c in (x_col, y_col, z_col):
        if rows and c not in rows[0]:
            raise KyleEqError(f"column {c!r} not in data")
    doc = _Doc()
    if not rows:
        _frame(doc, 0.0, 1.0, 0.0, 1.0, x_col, y_col, title)
        return doc.finish()
    xs = sorted({float(r[x_col]) for r in rows})
    ys = sorted({float(r[y_col]) for r in rows})
    zmap: Dict[tuple, float] = {}
    for r in rows:
        val = r.get(z_col)
        if val in ("", None):
            continue
        val = float(val)
        if not math.isnan(val):
            zmap[(float(r[x_col]), float(r[y_col]))] = val
    z_vals = list(zmap.values())
    if not z_vals:
        raise KyleEqError("no finite contour data")
    z_lo, z_hi = min(z_vals), max(z_vals)
    if z_hi == z_lo:
        z_hi = z_lo + 1.0
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    sx, sy = _frame(doc, x_lo, x_hi, y_lo, y_hi, x_col, y_col, title)

    def half_steps(vals):
        edges = [vals[0] - (vals[1] - vals[0]) / 2 if len(vals) > 1 else vals[0] - 0.5]
        for i in range(len(vals) - 1):
            edges.append((vals[i] + vals[i + 1]) / 2)
        edges.append(vals[-1] + (vals[-1] - vals[-2]) / 2 if len(vals) > 1
                     else vals[-1] + 0.5)
        return edges

    xe, ye = half_steps(xs), half_steps(ys)
    nc = len(CONTOUR_COLORS)
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            if (x, y) not in zmap:
                continue
            z = zmap[(x, y)]
            bin_ = min(int((z - z_lo) / (z_hi - z_lo) * nc), nc - 1)
            x0, x1 = sx(max(xe[i], x_lo)), sx(min(xe[i + 1], x_hi))
            y0, y1 = sy(max(ye[j], y_lo)), sy(min(ye[j + 1], y_hi))
            doc.add(f'<rect x="{_f(min(x0, x1))}" y="{_f(min(y0, y1))}" '
                    f'width="{_f(abs(x1 - x0))}" height="{_f(abs(y1 - y0))}" '
                    f'fill="{CONTOUR_COLORS[bin_]}" stroke="none"/>\n')
    # colorbar
    bar_x = WIDTH - MARGIN_R + 20
    bar_h = (HEIGHT - MARGIN_T - MARGIN_B) / nc
    for k in range(nc):
        y = HEIGHT - MARGIN_B - (k + 1) * bar_h
        doc.add(f'<rect x="{bar_x}" y="{_f(y)}" width="18" '
                f'height="{_f(bar_h + 0.5)}" fill="{CONTOUR_COLORS[k]}"/>\n')
    doc.text(bar_x + 24, HEIGHT - MARGIN_B + 4, f"{z_lo:.4g}", size=10,
             anchor="start")
    doc.text(bar_x + 24, MARGIN_T + 10, f"{z_hi:.4g}", size=10, anchor="start")
    doc.text(bar_x + 9, MARGIN_T - 8, z_col, size=10)
    return doc.finish()
