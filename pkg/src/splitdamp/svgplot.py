"""Self-contained SVG line plots by direct text emission.

Fixed 800x600 viewport, linear axes auto-scaled to the data with 5%
margins, one polyline per series, text legend.  No external references
or stylesheets, so every file is standalone and parses as XML.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 800, 600
MARGIN_LEFT, MARGIN_RIGHT = 80, 25
MARGIN_TOP, MARGIN_BOTTOM = 45, 55

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _finite_bounds(series, index):
    lo, hi = math.inf, -math.inf
    for entry in series:
        data = np.asarray(entry[index], dtype=float)
        data = data[np.isfinite(data)]
        if data.size:
            lo = min(lo, float(data.min()))
            hi = max(hi, float(data.max()))
    if lo > hi:
        lo, hi = 0.0, 1.0
    if lo == hi:
        pad = 1.0 if lo == 0.0 else abs(lo) * 0.05
        lo, hi = lo - pad, hi + pad
    else:
        pad = 0.05 * (hi - lo)
        lo, hi = lo - pad, hi + pad
    return lo, hi


def _tick_values(lo, hi, count=5):
    return np.linspace(lo, hi, count)


def line_plot(series, title="", xlabel="", ylabel="", log_x=False, log_y=False):
    """Render series [(x, y, label), ...] to an SVG document string.

    With log_x/log_y the corresponding data are plotted as log10 values
    and tick labels show the original magnitudes.  Non-finite and (on log
    axes) non-positive points are dropped.
    """
    prepared = []
    for x, y, label in series:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        keep = np.isfinite(x) & np.isfinite(y)
        if log_x:
            keep &= x > 0.0
        if log_y:
            keep &= y > 0.0
        x, y = x[keep], y[keep]
        if log_x:
            x = np.log10(x)
        if log_y:
            y = np.log10(y)
        prepared.append((x, y, label))

    x_lo, x_hi = _finite_bounds(prepared, 0)
    y_lo, y_hi = _finite_bounds(prepared, 1)
    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def px(x):
        return MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y):
        return MARGIN_TOP + (y_hi - y) / (y_hi - y_lo) * plot_h

    def tick_text(value, logscale):
        return f"{10.0 ** value:.3g}" if logscale else f"{value:.4g}"

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        parts.append(f'<text x="{WIDTH / 2:.1f}" y="24" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="16">{escape(title)}</text>')

    # axes frame
    x0, x1 = MARGIN_LEFT, WIDTH - MARGIN_RIGHT
    y0, y1 = MARGIN_TOP, HEIGHT - MARGIN_BOTTOM
    parts.append(f'<rect x="{x0}" y="{y0}" width="{plot_w}" height="{plot_h}" '
                 f'fill="none" stroke="black" stroke-width="1"/>')
    for tick in _tick_values(x_lo, x_hi):
        tx = px(tick)
        parts.append(f'<line x1="{tx:.2f}" y1="{y1}" x2="{tx:.2f}" y2="{y1 + 5}" '
                     f'stroke="black" stroke-width="1"/>')
        parts.append(f'<text x="{tx:.2f}" y="{y1 + 20}" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="11">'
                     f'{escape(tick_text(tick, log_x))}</text>')
    for tick in _tick_values(y_lo, y_hi):
        ty = py(tick)
        parts.append(f'<line x1="{x0 - 5}" y1="{ty:.2f}" x2="{x0}" y2="{ty:.2f}" '
                     f'stroke="black" stroke-width="1"/>')
        parts.append(f'<text x="{x0 - 8}" y="{ty + 4:.2f}" text-anchor="end" '
                     f'font-family="sans-serif" font-size="11">'
                     f'{escape(tick_text(tick, log_y))}</text>')
    if xlabel:
        parts.append(f'<text x="{(x0 + x1) / 2:.1f}" y="{HEIGHT - 12}" '
                     f'text-anchor="middle" font-family="sans-serif" '
                     f'font-size="13">{escape(xlabel)}</text>')
    if ylabel:
        cy = (y0 + y1) / 2
        parts.append(f'<text x="18" y="{cy:.1f}" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="13" '
                     f'transform="rotate(-90 18 {cy:.1f})">{escape(ylabel)}</text>')

    for i, (x, y, label) in enumerate(prepared):
        color = PALETTE[i % len(PALETTE)]
        if x.size == 1:
            parts.append(f'<circle cx="{px(x[0]):.2f}" cy="{py(y[0]):.2f}" r="3" '
                         f'fill="{color}"/>')
        elif x.size > 1:
            points = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, y))
            parts.append(f'<polyline fill="none" stroke="{color}" '
                         f'stroke-width="1.2" points="{points}"/>')
        if label:
            ly = y0 + 18 + 16 * i
            parts.append(f'<line x1="{x1 - 150}" y1="{ly - 4}" x2="{x1 - 125}" '
                         f'y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
            parts.append(f'<text x="{x1 - 118}" y="{ly}" font-family="sans-serif" '
                         f'font-size="12">{escape(label)}</text>')

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
