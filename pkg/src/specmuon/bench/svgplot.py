"""Dependency-free SVG output for loss overlays.

One fixed-size canvas, log10 y axis, a small palette and a text legend.
Coordinates are rounded to 0.01 px so the same curves always serialize
to the same bytes.
"""
from __future__ import annotations

import math
from pathlib import Path

from ..errors import InvalidArgumentError

WIDTH, HEIGHT = 640, 420
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 64, 150, 36, 48
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
MAX_POINTS = 2000
_FLOOR = 1e-300


def _decades(lo: float, hi: float):
    first = math.ceil(lo)
    last = math.floor(hi)
    if first > last:
        return []
    stride = max(1, math.ceil((last - first) / 8))
    return list(range(first, last + 1, stride))


def write_loss_overlay(path, curves: dict, title: str = "") -> None:
    """Write an SVG overlaying each named loss curve on a log10 axis."""
    if not curves:
        raise InvalidArgumentError("need at least one curve to plot")
    logs = {}
    for name, losses in curves.items():
        if len(losses) == 0:
            raise InvalidArgumentError(f"curve {name!r} is empty")
        logs[name] = [math.log10(max(float(v), _FLOOR)) for v in losses]
    y_lo = min(min(v) for v in logs.values())
    y_hi = max(max(v) for v in logs.values())
    if y_hi - y_lo < 1.0:
        pad = (1.0 - (y_hi - y_lo)) / 2.0
        y_lo, y_hi = y_lo - pad, y_hi + pad
    x_hi = max(len(v) for v in logs.values()) - 1
    x_hi = max(x_hi, 1)

    px_w = WIDTH - MARGIN_L - MARGIN_R
    px_h = HEIGHT - MARGIN_T - MARGIN_B

    def xpix(i):
        return MARGIN_L + px_w * i / x_hi

    def ypix(v):
        return MARGIN_T + px_h * (y_hi - v) / (y_hi - y_lo)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{MARGIN_L}" y="22" font-family="sans-serif" '
        f'font-size="14">{title}</text>',
        # axes
        f'<line x1="{MARGIN_L}" y1="{MARGIN_T}" x2="{MARGIN_L}" '
        f'y2="{HEIGHT - MARGIN_B}" stroke="black"/>',
        f'<line x1="{MARGIN_L}" y1="{HEIGHT - MARGIN_B}" '
        f'x2="{WIDTH - MARGIN_R}" y2="{HEIGHT - MARGIN_B}" stroke="black"/>',
    ]
    for p in _decades(y_lo, y_hi):
        y = ypix(p)
        out.append(f'<line x1="{MARGIN_L - 4}" y1="{y:.2f}" x2="{MARGIN_L}" '
                   f'y2="{y:.2f}" stroke="black"/>')
        out.append(f'<text x="{MARGIN_L - 8}" y="{y + 4:.2f}" '
                   f'font-family="sans-serif" font-size="11" '
                   f'text-anchor="end">1e{p}</text>')
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        i = round(frac * x_hi)
        x = xpix(i)
        out.append(f'<line x1="{x:.2f}" y1="{HEIGHT - MARGIN_B}" '
                   f'x2="{x:.2f}" y2="{HEIGHT - MARGIN_B + 4}" stroke="black"/>')
        out.append(f'<text x="{x:.2f}" y="{HEIGHT - MARGIN_B + 18}" '
                   f'font-family="sans-serif" font-size="11" '
                   f'text-anchor="middle">{i}</text>')
    out.append(f'<text x="{MARGIN_L + px_w / 2:.2f}" y="{HEIGHT - 10}" '
               f'font-family="sans-serif" font-size="12" '
               f'text-anchor="middle">iteration</text>')

    for idx, (name, values) in enumerate(logs.items()):
        color = PALETTE[idx % len(PALETTE)]
        stride = max(1, math.ceil(len(values) / MAX_POINTS))
        pts = []
        for i in range(0, len(values), stride):
            pts.append(f"{xpix(i):.2f},{ypix(values[i]):.2f}")
        if (len(values) - 1) % stride:
            i = len(values) - 1
            pts.append(f"{xpix(i):.2f},{ypix(values[i]):.2f}")
        out.append(f'<polyline points="{" ".join(pts)}" fill="none" '
                   f'stroke="{color}" stroke-width="1.5"/>')
        ly = MARGIN_T + 14 + 18 * idx
        lx = WIDTH - MARGIN_R + 12
        out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 22}" '
                   f'y2="{ly - 4}" stroke="{color}" stroke-width="1.5"/>')
        out.append(f'<text x="{lx + 28}" y="{ly}" font-family="sans-serif" '
                   f'font-size="12">{name}</text>')
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n", encoding="ascii")
