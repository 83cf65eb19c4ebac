"""Minimal static SVG line plots (no plotting library needed)."""
from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 640, 420
MARGIN = {"left": 70, "right": 20, "top": 40, "bottom": 55}
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


def _ticks(lo, hi, count=5):
    return np.linspace(lo, hi, count)


def line_plot_svg(xs, curves, title="", xlabel="x", ylabel="") -> str:
    """Render curves sharing one x axis.

    ``curves`` is a sequence of ``(label, ys, dashed)`` tuples.
    """
    xs = np.asarray(xs, dtype=float)
    ys_all = np.concatenate([np.asarray(ys, dtype=float) for _, ys, _ in curves])
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys_all.min()), float(ys_all.max())
    if y1 == y0:
        y0, y1 = y0 - 1.0, y1 + 1.0
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad
    if x1 == x0:
        x1 = x0 + 1.0

    left, top = MARGIN["left"], MARGIN["top"]
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def sx(x):
        return left + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return top + (y1 - y) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in _ticks(x0, x1):
        X = sx(t)
        out.append(f'<line x1="{X:.2f}" y1="{top + ph}" x2="{X:.2f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{X:.2f}" y="{top + ph + 18}" font-size="11" text-anchor="middle">{t:.3g}</text>')
    for t in _ticks(y0, y1):
        Y = sy(t)
        out.append(f'<line x1="{left - 5}" y1="{Y:.2f}" x2="{left}" y2="{Y:.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{Y + 4:.2f}" font-size="11" text-anchor="end">{t:.3g}</text>')
    for i, (label, ys, dashed) in enumerate(curves):
        ys = np.asarray(ys, dtype=float)
        pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys))
        color = COLORS[i % len(COLORS)]
        dash = ' stroke-dasharray="6,4"' if dashed else ""
        out.append(
            f'<polyline class="curve" points="{pts}" fill="none" stroke="{color}" stroke-width="1.6"{dash}>'
            f"<title>{escape(label)}</title></polyline>"
        )
        ly = top + 16 + 16 * i
        lx = left + pw - 150
        out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 24}" y2="{ly - 4}" stroke="{color}" stroke-width="1.6"{dash}/>')
        out.append(f'<text x="{lx + 30}" y="{ly}" font-size="12">{escape(label)}</text>')
    out.append(
        f'<text class="xlabel" x="{left + pw / 2}" y="{HEIGHT - 12}" font-size="13" text-anchor="middle">{escape(xlabel)}</text>'
    )
    out.append(
        f'<text class="ylabel" x="16" y="{top + ph / 2}" font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 16 {top + ph / 2})">{escape(ylabel)}</text>'
    )
    if title:
        out.append(f'<text x="{WIDTH / 2}" y="24" font-size="15" text-anchor="middle">{escape(title)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
