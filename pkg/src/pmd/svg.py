"""Deterministic SVG diagrams for barcodes and block lists."""

from __future__ import annotations

from xml.sax.saxutils import escape

from .structure import Barcode, BlockList

BLOCK_COLORS = {"db": "#1f77b4", "bb": "#d62728", "vb": "#2ca02c", "hb": "#ff7f0e"}
_TAG_ORDER = ("db", "bb", "vb", "hb")
_NAMES = {"db": "death block", "bb": "birth block", "vb": "vertical band", "hb": "horizontal band"}


def _primary_tag(tags) -> str:
    for t in _TAG_ORDER:
        if tags and t in tags:
            return t
    return "db"


def _head(width: int, height: int) -> list[str]:
    return ['<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">']


def barcode_svg(barcode: Barcode) -> str:
    """Horizontal bars over the element axis, one row per distinct bar."""
    n = barcode.poset.size
    rows = sorted(barcode.as_pairs())
    cell, left, top, row_h = 40, 40, 20, 18
    width = left + cell * n + 20
    height = top + row_h * max(len(rows), 1) + 40
    axis_y = height - 25
    out = _head(width, height)
    out.append(f'<line class="axis" x1="{left}" y1="{axis_y}" x2="{left + cell * n}" y2="{axis_y}" stroke="black"/>')
    out.append(f'<line class="axis" x1="{left}" y1="{top - 5}" x2="{left}" y2="{axis_y}" stroke="black"/>')
    for x in range(n):
        cx = left + cell * x + cell // 2
        out.append(f'<text x="{cx}" y="{axis_y + 15}" text-anchor="middle">{x}</text>')
    for r, (b, d, k) in enumerate(rows):
        y = top + row_h * r
        x0 = left + cell * b + 4
        w = cell * (d - b + 1) - 8
        out.append(f'<rect class="bar" x="{x0}" y="{y}" width="{w}" height="{row_h - 6}" fill="#333333"/>')
        if k > 1:
            out.append(f'<text x="{x0 + w + 4}" y="{y + row_h - 8}">x{k}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def blocks_svg(blocks: BlockList) -> str:
    """Block carriers as translucent rectangles over the grid, with a legend."""
    m, n = blocks.poset.grid_dims
    cell, left, top = 36, 40, 20
    gw, gh = cell * m, cell * n
    legend_x = left + gw + 20
    width = legend_x + 150
    height = top + max(gh, 20 * 4) + 40
    base_y = top + gh
    out = _head(width, height)
    out.append(f'<line class="axis" x1="{left}" y1="{base_y}" x2="{left + gw}" y2="{base_y}" stroke="black"/>')
    out.append(f'<line class="axis" x1="{left}" y1="{top}" x2="{left}" y2="{base_y}" stroke="black"/>')
    for i in range(m):
        out.append(f'<text x="{left + cell * i + cell // 2}" y="{base_y + 15}" text-anchor="middle">{i}</text>')
    for j in range(n):
        out.append(f'<text x="{left - 8}" y="{base_y - cell * j - cell // 2 + 4}" text-anchor="end">{j}</text>')
    for (i, j) in blocks.poset.labels:
        out.append(f'<circle cx="{left + cell * i + cell // 2}" cy="{base_y - cell * j - cell // 2}" r="2" fill="#999999"/>')
    used = []
    for ((i0, i1), (j0, j1)), tags, (_, k) in zip(blocks.rectangles(), blocks.tags, blocks.bars):
        tag = _primary_tag(tags)
        if tag not in used:
            used.append(tag)
        x = left + cell * i0 + 3
        y = base_y - cell * (j1 + 1) + 3
        w = cell * (i1 - i0 + 1) - 6
        h = cell * (j1 - j0 + 1) - 6
        out.append(f'<rect class="block {tag}" x="{x}" y="{y}" width="{w}" height="{h}" '
                   f'fill="{BLOCK_COLORS[tag]}" fill-opacity="0.25" stroke="{BLOCK_COLORS[tag]}">'
                   f'<title>{escape(tag)} x{k}</title></rect>')
    for r, tag in enumerate(t for t in _TAG_ORDER if t in used):
        y = top + 20 * r + 6
        out.append(f'<line class="legend {tag}" x1="{legend_x}" y1="{y}" x2="{legend_x + 16}" y2="{y}" '
                   f'stroke="{BLOCK_COLORS[tag]}" stroke-width="8"/>')
        out.append(f'<text x="{legend_x + 22}" y="{y + 4}">{tag}: {_NAMES[tag]}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_svg(result: Barcode, path: str | None = None) -> str:
    """SVG text for a Barcode or BlockList; also written to ``path`` if given."""
    text = blocks_svg(result) if isinstance(result, BlockList) else barcode_svg(result)
    if path is not None:
        from .io import write_text
        write_text(path, text)
    return text
