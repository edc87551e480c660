"""ASCII and SVG pictures of tilings, plus a parser for the ASCII form."""
from __future__ import annotations

import colorsys
import enum
import string
from dataclasses import dataclass
from xml.sax.saxutils import escape

from .geometry import ORIENTATIONS, CellCoord, Kind, Placement
from .solver import Tiling

LETTERS = string.ascii_lowercase
MONOMINO_CHAR = "."
CELL_PX = 20


class Format(enum.Enum):
    ASCII = "ascii"
    SVG = "svg"


@dataclass(frozen=True)
class RenderedTiling:
    format: Format
    payload: str


def _cell_labels(t: Tiling) -> dict[CellCoord, int]:
    """Cell -> index of its T among the T placements, -1 for monominoes."""
    labels = {}
    k = 0
    for p in t.placements:
        if p.kind is Kind.MONOMINO:
            labels[p.anchor] = -1
            continue
        for c in p.cells():
            labels[c] = k
        k += 1
    return labels


def render_ascii(t: Tiling, gap: int | None = None) -> str:
    gap = t.monomino_count if gap is None else gap
    labels = _cell_labels(t)
    lines = [f"{t.width} {t.length} {gap}"]
    for row in range(t.width, 0, -1):
        line = []
        for col in range(1, t.length + 1):
            k = labels.get(CellCoord(col, row))
            if k is None:
                line.append("?")
            elif k < 0:
                line.append(MONOMINO_CHAR)
            else:
                line.append(LETTERS[k % len(LETTERS)])
        lines.append("".join(line))
    return "\n".join(lines) + "\n"


class ParseError(ValueError):
    pass


def _shapes():
    # each orientation normalized so its first cell (col, then row) is the origin
    out = []
    for o in ORIENTATIONS:
        first = min(o.offsets)
        out.append((o, [(dc - first[0], dr - first[1]) for dc, dr in o.offsets], first))
    return out


def _split_component(cells: set[tuple[int, int]]) -> list[Placement] | None:
    if not cells:
        return []
    c0 = min(cells)
    for o, shape, first in _shapes():
        part = {(c0[0] + dc, c0[1] + dr) for dc, dr in shape}
        if part <= cells:
            rest = _split_component(cells - part)
            if rest is not None:
                anchor = (c0[0] - first[0], c0[1] - first[1])
                return [Placement.tee(o, *anchor)] + rest
    return None


def parse_ascii(text: str) -> Tiling:
    """Inverse of ``render_ascii``: same-letter regions are cut into Ts."""
    lines = [ln.rstrip("\n") for ln in text.strip("\n").splitlines()]
    if not lines:
        raise ParseError("empty input")
    try:
        w, n, _ = (int(x) for x in lines[0].split())
    except ValueError:
        raise ParseError(f"bad header {lines[0]!r}") from None
    grid = lines[1:]
    if len(grid) != w or any(len(ln) != n for ln in grid):
        raise ParseError(f"expected {w} lines of {n} characters")
    char = {}
    for i, ln in enumerate(grid):
        row = w - i
        for j, ch in enumerate(ln):
            char[(j + 1, row)] = ch
    placements: list[Placement] = []
    seen: set[tuple[int, int]] = set()
    for cell in sorted(char):
        ch = char[cell]
        if cell in seen:
            continue
        if ch == MONOMINO_CHAR:
            seen.add(cell)
            placements.append(Placement.monomino(*cell))
            continue
        if ch not in LETTERS:
            raise ParseError(f"unexpected character {ch!r} at {cell}")
        comp, stack = set(), [cell]
        while stack:
            c = stack.pop()
            if c in comp or char.get(c) != ch:
                continue
            comp.add(c)
            x, y = c
            stack.extend([(x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)])
        seen |= comp
        parts = _split_component(comp)
        if parts is None:
            raise ParseError(f"region of {ch!r} at {cell} is not a union of Ts")
        placements.extend(parts)
    return Tiling(w, n, placements)


def _fill(k: int) -> str:
    h = (k * 0.618033988749895) % 1.0
    r, g, b = colorsys.hls_to_rgb(h, 0.62, 0.55)
    return f"#{round(r * 255):02x}{round(g * 255):02x}{round(b * 255):02x}"


def render_svg(t: Tiling, gap: int | None = None) -> str:
    """Unit squares filled per tile, grid lines at every cell boundary."""
    gap = t.monomino_count if gap is None else gap
    s = CELL_PX
    wpx, hpx = t.length * s, t.width * s
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{wpx}" height="{hpx}"'
        f' viewBox="0 0 {wpx} {hpx}">',
        f"<title>{escape(f'{t.width} x {t.length}, {gap} monominoes')}</title>",
    ]
    k = 0
    for p in t.placements:
        fill = "#ffffff" if p.kind is Kind.MONOMINO else _fill(k)
        if p.kind is Kind.T:
            k += 1
        for c in p.cells():
            x, y = (c.col - 1) * s, (t.width - c.row) * s
            out.append(f'<rect x="{x}" y="{y}" width="{s}" height="{s}" fill="{fill}"/>')
    grid = []
    for col in range(t.length + 1):
        grid.append(f"M{col * s} 0V{hpx}")
    for row in range(t.width + 1):
        grid.append(f"M0 {row * s}H{wpx}")
    out.append(f'<path d="{" ".join(grid)}" stroke="#444444" stroke-width="1" fill="none"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render(t: Tiling, fmt: Format | str = Format.ASCII, gap: int | None = None) -> RenderedTiling:
    fmt = Format(fmt)
    text = render_ascii(t, gap) if fmt is Format.ASCII else render_svg(t, gap)
    return RenderedTiling(fmt, text)
