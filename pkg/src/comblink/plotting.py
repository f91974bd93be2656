"""Minimal standalone SVG line plots.

Output depends only on the input table, so identical inputs give
byte-identical files.
"""

import math
from dataclasses import dataclass
from pathlib import Path
from xml.sax.saxutils import escape

__all__ = ["AxesSpec", "emit_plot", "render_svg"]

_WIDTH, _HEIGHT = 640, 420
_MARGIN = dict(left=70, right=150, top=20, bottom=50)
_PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)


@dataclass(frozen=True)
class AxesSpec:
    """Which columns to draw and how.

    ``series`` names the column(s) whose values split rows into separate
    polylines; rows keep their table order within a series.
    """

    x: str
    y: str
    series: tuple = ()
    x_log: bool = False
    y_log: bool = False
    x_label: str = None
    y_label: str = None


def _fmt(v):
    return f"{v:.2f}"


def _ticks(lo, hi, log, n=5):
    if log:
        first, last = math.floor(math.log10(lo)), math.ceil(math.log10(hi))
        return [10.0**k for k in range(first, last + 1) if lo <= 10.0**k <= hi] or [lo, hi]
    if hi == lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    return [start + k * step for k in range(int((hi - start) / step + 1e-9) + 1)]


def render_svg(table, axes):
    """Render ``table`` (a list of dict rows) to an SVG document string."""
    if not table:
        raise ValueError("cannot plot an empty table")
    groups = {}
    for row in table:
        x, y = row[axes.x], row[axes.y]
        if x is None or y is None or not (math.isfinite(x) and math.isfinite(y)):
            continue
        if (axes.x_log and x <= 0) or (axes.y_log and y <= 0):
            continue
        key = tuple(row[s] for s in axes.series)
        groups.setdefault(key, []).append((float(x), float(y)))
    if not groups:
        raise ValueError("no finite points to plot")

    xs = [p[0] for pts in groups.values() for p in pts]
    ys = [p[1] for pts in groups.values() for p in pts]

    def span(vals, log):
        lo, hi = min(vals), max(vals)
        if log:
            lo, hi = math.log10(lo), math.log10(hi)
        if hi == lo:
            lo, hi = lo - 0.5, hi + 0.5
        return lo, hi

    x_lo, x_hi = span(xs, axes.x_log)
    y_lo, y_hi = span(ys, axes.y_log)
    left, top = _MARGIN["left"], _MARGIN["top"]
    pw = _WIDTH - _MARGIN["left"] - _MARGIN["right"]
    ph = _HEIGHT - _MARGIN["top"] - _MARGIN["bottom"]

    def px(x):
        v = math.log10(x) if axes.x_log else x
        return left + (v - x_lo) / (x_hi - x_lo) * pw

    def py(y):
        v = math.log10(y) if axes.y_log else y
        return top + ph - (v - y_lo) / (y_hi - y_lo) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}" font-family="sans-serif" font-size="11">',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    x_range = (10**x_lo, 10**x_hi) if axes.x_log else (x_lo, x_hi)
    y_range = (10**y_lo, 10**y_hi) if axes.y_log else (y_lo, y_hi)
    for t in _ticks(*x_range, axes.x_log):
        out.append(f'<text x="{_fmt(px(t))}" y="{top + ph + 16}" text-anchor="middle">{t:g}</text>')
    for t in _ticks(*y_range, axes.y_log):
        out.append(f'<text x="{left - 6}" y="{_fmt(py(t) + 4)}" text-anchor="end">{t:g}</text>')
    out.append(
        f'<text x="{left + pw / 2:.1f}" y="{_HEIGHT - 12}" text-anchor="middle">{escape(axes.x_label or axes.x)}</text>'
    )
    out.append(
        f'<text x="16" y="{top + ph / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {top + ph / 2:.1f})">{escape(axes.y_label or axes.y)}</text>'
    )
    for k, (key, pts) in enumerate(groups.items()):
        colour = _PALETTE[k % len(_PALETTE)]
        coords = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in pts)
        out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{coords}"/>')
        if key:
            label = escape(", ".join(f"{s}={v}" for s, v in zip(axes.series, key)))
            ly = top + 12 + 14 * k
            out.append(f'<text x="{left + pw + 8}" y="{ly}" fill="{colour}">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_plot(table, axes, path):
    """Write an SVG line plot of ``table`` to ``path``.

    Nothing is written if the table is empty or has no plottable points.
    """
    svg = render_svg(table, axes)
    Path(path).write_text(svg, encoding="utf-8")
    return path
