"""Minimal log-log line plots as standalone SVG text (deterministic output)."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _decades(lo: float, hi: float) -> list[int]:
    return list(range(math.floor(lo), math.ceil(hi) + 1))


def svg_loglog(curves, title: str = "", xlabel: str = "gamma", ylabel: str = "value",
               width: int = 480, height: int = 320) -> str:
    """``curves``: iterable of dicts with ``label``, ``x`` and ``y``; non-positive points are dropped."""
    pts = []
    for c in curves:
        xy = [(math.log10(x), math.log10(y)) for x, y in zip(c["x"], c["y"]) if x > 0 and y > 0]
        pts.append((c["label"], xy))
    allx = [p[0] for _, xy in pts for p in xy] or [0.0, 1.0]
    ally = [p[1] for _, xy in pts for p in xy] or [0.0, 1.0]
    x0, x1 = math.floor(min(allx)), math.ceil(max(allx))
    y0, y1 = math.floor(min(ally)), math.ceil(max(ally))
    x1 = x1 if x1 > x0 else x0 + 1
    y1 = y1 if y1 > y0 else y0 + 1
    ml, mr, mt, mb = 60, 120, 30, 40
    pw, ph = width - ml - mr, height - mt - mb

    def sx(v):
        return ml + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return mt + (y1 - v) / (y1 - y0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="10">',
           f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="#000"/>']
    for d in _decades(x0, x1):
        out.append(f'<line x1="{_fmt(sx(d))}" y1="{mt}" x2="{_fmt(sx(d))}" y2="{mt + ph}" stroke="#ddd"/>')
        out.append(f'<text x="{_fmt(sx(d))}" y="{mt + ph + 14}" text-anchor="middle">1e{d}</text>')
    for d in _decades(y0, y1):
        out.append(f'<line x1="{ml}" y1="{_fmt(sy(d))}" x2="{ml + pw}" y2="{_fmt(sy(d))}" stroke="#ddd"/>')
        out.append(f'<text x="{ml - 4}" y="{_fmt(sy(d) + 3)}" text-anchor="end">1e{d}</text>')
    for i, (label, xy) in enumerate(pts):
        colour = PALETTE[i % len(PALETTE)]
        if xy:
            path = " ".join(f"{_fmt(sx(a))},{_fmt(sy(b))}" for a, b in xy)
            out.append(f'<polyline points="{path}" fill="none" stroke="{colour}" stroke-width="1.5"/>')
        ly = mt + 12 * (i + 1)
        out.append(f'<line x1="{ml + pw + 8}" y1="{ly - 3}" x2="{ml + pw + 22}" y2="{ly - 3}" stroke="{colour}"/>')
        out.append(f'<text x="{ml + pw + 26}" y="{ly}">{escape(label)}</text>')
    out.append(f'<text x="{ml + pw / 2}" y="{height - 6}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="14" y="{mt + ph / 2}" text-anchor="middle" '
               f'transform="rotate(-90 14 {_fmt(mt + ph / 2)})">{escape(ylabel)}</text>')
    if title:
        out.append(f'<text x="{width / 2}" y="18" text-anchor="middle" font-size="12">{escape(title)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
