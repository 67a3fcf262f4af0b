"""Minimal SVG emission for log-log scatter plots with a fitted line.

No plotting dependency: the file is assembled as text, so identical inputs
produce byte-identical output.
"""

from __future__ import annotations

import math

WIDTH, HEIGHT = 640, 480
MARGIN = 60


def _ticks(lo, hi):
    lo_e = math.floor(lo)
    hi_e = math.ceil(hi)
    step = max(1, (hi_e - lo_e) // 6)
    return list(range(int(lo_e), int(hi_e) + 1, step))


def loglog_scatter(xs, ys, slope=None, intercept=None, xlabel="x", ylabel="y",
                   title=""):
    """SVG text for a log10-log10 scatter, optionally with the fitted line
    y = slope * x + intercept (in log10 coordinates)."""
    pts = [(math.log10(x), math.log10(y)) for x, y in zip(xs, ys)
           if x > 0 and y > 0]
    if not pts:
        raise ValueError("nothing to plot")
    lx = [p[0] for p in pts]
    ly = [p[1] for p in pts]
    pad = 0.3
    x0, x1 = min(lx) - pad, max(lx) + pad
    y0, y1 = min(ly) - pad, max(ly) + pad

    def sx(v):
        return MARGIN + (v - x0) / (x1 - x0) * (WIDTH - 2 * MARGIN)

    def sy(v):
        return HEIGHT - MARGIN - (v - y0) / (y1 - y0) * (HEIGHT - 2 * MARGIN)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
           f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
           f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
           f'<text x="{WIDTH // 2}" y="24" text-anchor="middle" '
           f'font-family="sans-serif" font-size="14">{title}</text>']
    # axes
    out.append(f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" '
               f'y2="{HEIGHT - MARGIN}" stroke="black"/>')
    out.append(f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" '
               f'y2="{HEIGHT - MARGIN}" stroke="black"/>')
    for e in _ticks(x0, x1):
        if x0 <= e <= x1:
            out.append(f'<line x1="{sx(e):.1f}" y1="{HEIGHT - MARGIN}" '
                       f'x2="{sx(e):.1f}" y2="{HEIGHT - MARGIN + 6}" stroke="black"/>')
            out.append(f'<text x="{sx(e):.1f}" y="{HEIGHT - MARGIN + 20}" '
                       f'text-anchor="middle" font-family="sans-serif" '
                       f'font-size="11">1e{e}</text>')
    for e in _ticks(y0, y1):
        if y0 <= e <= y1:
            out.append(f'<line x1="{MARGIN - 6}" y1="{sy(e):.1f}" x2="{MARGIN}" '
                       f'y2="{sy(e):.1f}" stroke="black"/>')
            out.append(f'<text x="{MARGIN - 10}" y="{sy(e):.1f}" '
                       f'text-anchor="end" font-family="sans-serif" '
                       f'font-size="11">1e{e}</text>')
    out.append(f'<text x="{WIDTH // 2}" y="{HEIGHT - 16}" text-anchor="middle" '
               f'font-family="sans-serif" font-size="12">{xlabel}</text>')
    out.append(f'<text x="18" y="{HEIGHT // 2}" text-anchor="middle" '
               f'font-family="sans-serif" font-size="12" '
               f'transform="rotate(-90 18 {HEIGHT // 2})">{ylabel}</text>')
    if slope is not None and intercept is not None:
        ya, yb = slope * x0 + intercept, slope * x1 + intercept
        out.append(f'<line x1="{sx(x0):.1f}" y1="{sy(ya):.1f}" x2="{sx(x1):.1f}" '
                   f'y2="{sy(yb):.1f}" stroke="#d62728" stroke-width="1.5"/>')
        out.append(f'<text x="{WIDTH - MARGIN}" y="{MARGIN - 8}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="12" fill="#d62728">'
                   f'slope {slope:.4f}</text>')
    for px, py in pts:
        out.append(f'<circle cx="{sx(px):.2f}" cy="{sy(py):.2f}" r="3.5" '
                   f'fill="#1f77b4" fill-opacity="0.8"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
