"""SVG layout diagrams of first-level images ``f_i([0,1]^d)``.

Overlaps are found in exact arithmetic; coordinates are only converted to
12-significant-digit decimals when written.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence
from xml.sax.saxutils import escape

from .ifs_model import HomogeneousIFS, cylinder

PANEL = 360
MARGIN = 30
TITLE = 24


def _num(x) -> str:
    return f"{float(x):.12g}"


def _overlaps(boxes):
    out = []
    for i in range(len(boxes)):
        for j in range(i + 1, len(boxes)):
            inter = boxes[i].intersect(boxes[j])
            if inter is not None:
                out.append((i + 1, j + 1, inter))
    return out


def _panel_1d(ifs: HomogeneousIFS, x0: float, title: str) -> list[str]:
    boxes = [cylinder(ifs, (i,)) for i in range(1, ifs.m + 1)]
    W = Fraction(PANEL)
    rows = ["  <g>", f'    <text x="{_num(x0 + PANEL / 2)}" y="{TITLE - 8}" text-anchor="middle">{escape(title)}</text>']
    base_y = TITLE + 20
    bar_h = 24
    rows.append(f'    <line x1="{_num(x0)}" y1="{base_y + 2 * bar_h + 20}" x2="{_num(x0 + PANEL)}" '
                f'y2="{base_y + 2 * bar_h + 20}" stroke="black"/>')
    for i, b in enumerate(boxes, start=1):
        y = base_y + (0 if i % 2 else bar_h + 4)
        x = x0 + W * b.lower[0]
        w = W * b.side
        rows.append(f'    <rect x="{_num(x)}" y="{y}" width="{_num(w)}" height="{bar_h}" '
                    f'fill="none" stroke="black"/>')
        rows.append(f'    <text x="{_num(x + w / 2)}" y="{y + bar_h - 7}" text-anchor="middle" '
                    f'font-size="11">f{i}</text>')
    for i, j, inter in _overlaps(boxes):
        x = x0 + W * inter.lower[0]
        w = W * (inter.upper[0] - inter.lower[0])
        rows.append(f'    <rect class="overlap" x="{_num(x)}" y="{base_y}" width="{_num(w)}" '
                    f'height="{2 * bar_h + 4}" fill="#d62728" fill-opacity="0.5"/>')
    rows.append("  </g>")
    return rows


def _panel_2d(ifs: HomogeneousIFS, x0: float, title: str) -> list[str]:
    boxes = [cylinder(ifs, (i,)) for i in range(1, ifs.m + 1)]
    W = Fraction(PANEL)
    top = TITLE

    def sx(v):
        return x0 + W * v

    def sy(v):
        return top + W * (1 - v)

    rows = ["  <g>", f'    <text x="{_num(x0 + PANEL / 2)}" y="{TITLE - 8}" text-anchor="middle">{escape(title)}</text>',
            f'    <rect x="{_num(x0)}" y="{top}" width="{PANEL}" height="{PANEL}" fill="none" '
            'stroke="#999999" stroke-dasharray="4 3"/>']
    for i, b in enumerate(boxes, start=1):
        s = W * b.side
        rows.append(f'    <rect x="{_num(sx(b.lower[0]))}" y="{_num(sy(b.upper[1]))}" width="{_num(s)}" '
                    f'height="{_num(s)}" fill="none" stroke="black"/>')
        cx, cy = b.midpoint()
        rows.append(f'    <text x="{_num(sx(cx))}" y="{_num(sy(cy) + 4)}" text-anchor="middle" '
                    f'font-size="11">f{i}</text>')
    for i, j, inter in _overlaps(boxes):
        w = W * (inter.upper[0] - inter.lower[0])
        h = W * (inter.upper[1] - inter.lower[1])
        rows.append(f'    <rect class="overlap" x="{_num(sx(inter.lower[0]))}" y="{_num(sy(inter.upper[1]))}" '
                    f'width="{_num(w)}" height="{_num(h)}" fill="#d62728" fill-opacity="0.5"/>')
    rows.append("  </g>")
    return rows


def render_svg(systems: Sequence[tuple[str, HomogeneousIFS]]) -> str:
    """SVG 1.1 document with one panel per ``(title, ifs)``, left to right."""
    panels = []
    height = 0
    for k, (title, ifs) in enumerate(systems):
        x0 = MARGIN + k * (PANEL + 2 * MARGIN)
        if ifs.dim == 1:
            panels += _panel_1d(ifs, x0, title)
            height = max(height, TITLE + 120)
        else:
            panels += _panel_2d(ifs, x0, title)
            height = max(height, TITLE + PANEL + MARGIN)
    width = len(systems) * (PANEL + 2 * MARGIN)
    head = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif">',
    ]
    return "\n".join(head + panels + ["</svg>"]) + "\n"
