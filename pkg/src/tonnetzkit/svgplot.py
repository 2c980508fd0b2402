"""Deterministic SVG rendering for persistence diagrams and dendrograms.

Output depends only on the input values: fixed canvases, generic font
families, and fixed-precision coordinates, so equal inputs give byte-equal
documents.
"""

from __future__ import annotations

from typing import Sequence

__all__ = ["render_diagram_svg", "render_dendrogram_svg"]

_FONT = "sans-serif"


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _label(x: float) -> str:
    return f"{x:g}"


def render_diagram_svg(diagram: dict) -> str:
    """Persistence diagram plot: diagonal, dots for proper points, vertical
    lines for essential classes."""
    degree = diagram.get("degree", 0)
    essential = [float(u) for u in diagram.get("essential", [])]
    proper = [(float(p[0]), float(p[1])) for p in diagram.get("proper", [])]

    size, margin = 480, 56
    values = essential + [u for u, _ in proper] + [v for _, v in proper]
    lo = min(values + [0.0])
    hi = max(values + [1.0])
    pad = 0.05 * (hi - lo)
    view_lo, view_hi = lo - pad, hi + pad
    span = view_hi - view_lo
    inner = size - 2 * margin

    def sx(u: float) -> float:
        return margin + (u - view_lo) / span * inner

    def sy(v: float) -> float:
        return size - margin - (v - view_lo) / span * inner

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
        f'<text x="{margin}" y="28" font-family="{_FONT}" font-size="14">'
        f"degree {degree} persistence diagram</text>",
        # axes
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{size - margin}" '
        f'stroke="black" stroke-width="1"/>',
        f'<line x1="{margin}" y1="{size - margin}" x2="{size - margin}" '
        f'y2="{size - margin}" stroke="black" stroke-width="1"/>',
        # the diagonal u = v
        f'<line x1="{_fmt(sx(view_lo))}" y1="{_fmt(sy(view_lo))}" '
        f'x2="{_fmt(sx(view_hi))}" y2="{_fmt(sy(view_hi))}" '
        f'stroke="gray" stroke-width="1" class="diagonal"/>',
        f'<text x="{margin}" y="{size - margin + 20}" font-family="{_FONT}" '
        f'font-size="11">{_label(lo)}</text>',
        f'<text x="{size - margin - 24}" y="{size - margin + 20}" '
        f'font-family="{_FONT}" font-size="11">{_label(hi)}</text>',
    ]
    for u in essential:
        parts.append(
            f'<line x1="{_fmt(sx(u))}" y1="{_fmt(sy(u))}" x2="{_fmt(sx(u))}" '
            f'y2="{margin}" stroke="firebrick" stroke-width="2" class="essential"/>'
        )
    for u, v in proper:
        parts.append(
            f'<circle cx="{_fmt(sx(u))}" cy="{_fmt(sy(v))}" r="4" '
            f'fill="steelblue" class="proper"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _leaf_order(n: int, merges: Sequence[Sequence[float]]) -> list[int]:
    children = {n + m: (int(a), int(b)) for m, (a, b, *_rest) in enumerate(merges)}
    order: list[int] = []
    stack = [n + len(merges) - 1 if merges else 0]
    while stack:
        node = stack.pop()
        if node < n:
            order.append(node)
        else:
            a, b = children[node]
            stack.append(b)  # a is drawn above b
            stack.append(a)
    return order


def render_dendrogram_svg(labels: Sequence[str], merges: Sequence[Sequence[float]]) -> str:
    """Horizontal dendrogram; the abscissa of each split is its merge height."""
    n = len(labels)
    order = _leaf_order(n, merges)
    row_h, gutter, width, pad = 24, 176, 640, 16
    height = 2 * pad + row_h * n
    hmax = max((float(m[2]) for m in merges), default=0.0) or 1.0

    def x(h: float) -> float:
        return gutter + (width - gutter - pad) * (h / hmax)

    ys = {leaf: pad + row_h * (pos + 0.5) for pos, leaf in enumerate(order)}
    anchors: dict[int, tuple[float, float]] = {i: (x(0.0), ys[i]) for i in range(n)}

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    for i in range(n):
        parts.append(
            f'<text x="{gutter - 8}" y="{_fmt(ys[i] + 4)}" font-family="{_FONT}" '
            f'font-size="12" text-anchor="end">{labels[i]}</text>'
        )
    for m, (a, b, h, *_rest) in enumerate(merges):
        a, b, h = int(a), int(b), float(h)
        xa, ya = anchors[a]
        xb, yb = anchors[b]
        xm = x(h)
        parts.append(
            f'<line x1="{_fmt(xa)}" y1="{_fmt(ya)}" x2="{_fmt(xm)}" y2="{_fmt(ya)}" '
            f'stroke="black" stroke-width="1"/>'
        )
        parts.append(
            f'<line x1="{_fmt(xb)}" y1="{_fmt(yb)}" x2="{_fmt(xm)}" y2="{_fmt(yb)}" '
            f'stroke="black" stroke-width="1"/>'
        )
        parts.append(
            f'<line x1="{_fmt(xm)}" y1="{_fmt(ya)}" x2="{_fmt(xm)}" y2="{_fmt(yb)}" '
            f'stroke="black" stroke-width="1" class="split"/>'
        )
        anchors[n + m] = (xm, (ya + yb) / 2.0)
    parts.append(
        f'<text x="{gutter}" y="{height - 2}" font-family="{_FONT}" font-size="11">0</text>'
    )
    parts.append(
        f'<text x="{width - pad - 24}" y="{height - 2}" font-family="{_FONT}" '
        f'font-size="11">{_label(hmax)}</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
