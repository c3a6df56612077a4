"""Static SVG rendering of dendrograms, leaves colored by genus."""

from __future__ import annotations

from .phylo import Dendrogram

__all__ = ["render_svg", "PALETTE"]

PALETTE = (
    "#1b6fb4", "#d95f02", "#1b9e77", "#d01c8b", "#7570b3",
    "#e6ab02", "#66a61e", "#a6611a", "#542788", "#c51b1b",
)

_ROW_H = 22.0
_MARGIN = 12.0
_LABEL_W = 90.0
_PLOT_W = 420.0
_FONT = 13


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def genus_colors(genera) -> dict[str, str]:
    ordered = sorted(set(genera))
    return {g: PALETTE[i % len(PALETTE)] for i, g in enumerate(ordered)}


def render_svg(dg: Dendrogram, labels=None) -> str:
    """Left-growing dendrogram (root at the right edge) as a standalone
    SVG document. ``labels`` maps leaf name to genus; same genus, same
    color. Output is a pure function of the inputs."""
    labels = labels or {}
    n = dg.n_leaves
    children = dg.children()
    heights = dg.heights()
    h_max = max(heights.values()) or 1.0
    colors = genus_colors(labels.values()) if labels else {}

    # leaf display order: depth-first, smaller cluster id first
    order: list[int] = []
    stack = [dg.root]
    while stack:
        v = stack.pop()
        if v < n:
            order.append(v)
        else:
            a, b = children[v]
            stack.append(b)
            stack.append(a)

    x_leaf = _MARGIN + _LABEL_W
    ys = {leaf: _MARGIN + _ROW_H * (i + 0.5) for i, leaf in enumerate(order)}
    xs = {v: x_leaf + _PLOT_W * (heights[v] / h_max) for v in heights}
    for v in range(n, dg.root + 1):
        a, b = children[v]
        ys[v] = (ys[a] + ys[b]) / 2.0

    width = x_leaf + _PLOT_W + _MARGIN
    height = _MARGIN * 2 + _ROW_H * n
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" '
        f'height="{_fmt(height)}" viewBox="0 0 {_fmt(width)} {_fmt(height)}">',
        f'<rect width="{_fmt(width)}" height="{_fmt(height)}" fill="white"/>',
    ]
    for leaf in order:
        name = dg.labels[leaf]
        color = colors.get(labels.get(name), "#000000")
        out.append(
            f'<text x="{_fmt(_MARGIN)}" y="{_fmt(ys[leaf] + _FONT / 3)}" '
            f'font-family="sans-serif" font-size="{_FONT}" '
            f'fill="{color}">{_escape(name)}</text>')
    for v in range(n, dg.root + 1):
        a, b = children[v]
        for c in (a, b):
            out.append(_segment(xs[c], ys[c], xs[v], ys[c]))
        out.append(_segment(xs[v], ys[a], xs[v], ys[b]))
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _segment(x1, y1, x2, y2) -> str:
    return (f'<path d="M {_fmt(x1)} {_fmt(y1)} L {_fmt(x2)} {_fmt(y2)}" '
            'stroke="#333333" stroke-width="1.5" fill="none"/>')


def _escape(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;"))
