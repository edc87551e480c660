"""Grid model, T-tetromino orientations and greedy fringe transitions.

Coordinates are 1-based ``(col, row)`` pairs with row 1 at the bottom of the
strip.  A fringe is packed into a single integer: the cell at fringe column
``c`` and row ``r`` owns bit ``(c - 1) * width + (r - 1)``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

MAX_WIDTH = 21  # 3 * 21 = 63 bits, so a fringe key fits a signed 64-bit word
FRINGE_COLUMNS = 3


class CellCoord(NamedTuple):
    col: int
    row: int


class Kind(enum.Enum):
    T = "T"
    MONOMINO = "M"


class Orientation(enum.Enum):
    """The four placements of the T; offsets are ``(dcol, drow)`` from the anchor."""

    BAR_VERTICAL_STEM_RIGHT = ((0, 0), (0, 1), (0, 2), (1, 1))
    BAR_VERTICAL_STEM_LEFT = ((0, 0), (0, 1), (0, 2), (-1, 1))
    BAR_HORIZONTAL_STEM_UP = ((0, 0), (1, 0), (2, 0), (1, 1))
    BAR_HORIZONTAL_STEM_DOWN = ((0, 0), (1, 0), (2, 0), (1, -1))

    @property
    def offsets(self) -> tuple[tuple[int, int], ...]:
        return self.value

    @property
    def lead(self) -> tuple[int, int]:
        """Offset of the lowest cell in the leftmost column of the shape."""
        return min(self.value)


# Fixed enumeration order; edge ids and witnesses depend on it.
ORIENTATIONS: tuple[Orientation, ...] = tuple(Orientation)
ORIENTATION_CODES = {o: i for i, o in enumerate(ORIENTATIONS)}
MONOMINO_CODE = len(ORIENTATIONS)


def check_width(width: int) -> int:
    if not isinstance(width, int) or isinstance(width, bool):
        raise TypeError(f"width must be an int, got {type(width).__name__}")
    if width < 1:
        raise ValueError(f"width must be >= 1, got {width}")
    if width > MAX_WIDTH:
        raise ValueError(f"width {width} exceeds the packed-fringe limit {MAX_WIDTH}")
    return width


@dataclass(frozen=True)
class Placement:
    kind: Kind
    anchor: CellCoord
    orientation: Orientation | None = None

    def __post_init__(self):
        if (self.kind is Kind.T) != (self.orientation is not None):
            raise ValueError("a T placement needs an orientation and a monomino must not have one")
        object.__setattr__(self, "anchor", CellCoord(*self.anchor))

    @classmethod
    def monomino(cls, col: int, row: int) -> Placement:
        return cls(Kind.MONOMINO, CellCoord(col, row))

    @classmethod
    def tee(cls, orientation: Orientation, col: int, row: int) -> Placement:
        return cls(Kind.T, CellCoord(col, row), orientation)

    @property
    def code(self) -> int:
        """Placement-order index: orientation position, or 4 for the monomino."""
        if self.orientation is None:
            return MONOMINO_CODE
        return ORIENTATION_CODES[self.orientation]

    def cells(self) -> list[CellCoord]:
        c, r = self.anchor
        if self.orientation is None:
            return [CellCoord(c, r)]
        return [CellCoord(c + dc, r + dr) for dc, dr in self.orientation.offsets]

    def shifted(self, dcol: int) -> Placement:
        return Placement(self.kind, CellCoord(self.anchor.col + dcol, self.anchor.row), self.orientation)

    def to_dict(self) -> dict:
        d = {"kind": self.kind.value, "col": self.anchor.col, "row": self.anchor.row}
        if self.orientation is not None:
            d["orientation"] = self.orientation.name
        return d

    @classmethod
    def from_dict(cls, d: dict) -> Placement:
        kind = Kind(d["kind"])
        orientation = Orientation[d["orientation"]] if kind is Kind.T else None
        return cls(kind, CellCoord(int(d["col"]), int(d["row"])), orientation)


def placement_from_code(code: int, target: CellCoord) -> Placement:
    """Rebuild the placement with the given order index that covers ``target``."""
    if code == MONOMINO_CODE:
        return Placement.monomino(target.col, target.row)
    o = ORIENTATIONS[code]
    lc, lr = o.lead
    return Placement.tee(o, target.col - lc, target.row - lr)


def _bit(width: int, col: int, row: int) -> int:
    return 1 << ((col - 1) * width + (row - 1))


@dataclass(frozen=True)
class Fringe:
    """Tiled cells of the (at most three) partially tiled frontier columns."""

    width: int
    bits: int = 0

    def __post_init__(self):
        check_width(self.width)
        w = self.width
        if self.bits < 0 or self.bits >> (FRINGE_COLUMNS * w):
            raise ValueError(f"fringe bits 0x{self.bits:x} exceed {FRINGE_COLUMNS} columns of width {w}")
        first = self.bits & ((1 << w) - 1)
        if self.bits and (first == 0 or first == (1 << w) - 1):
            raise ValueError("fringe is not canonical: first column must be partially tiled")

    @classmethod
    def empty(cls, width: int) -> Fringe:
        return cls(width, 0)

    @classmethod
    def from_cells(cls, width: int, cells) -> Fringe:
        bits = 0
        for col, row in cells:
            bits |= _bit(width, col, row)
        return cls(width, bits)

    @property
    def is_empty(self) -> bool:
        return self.bits == 0

    def is_tiled(self, col: int, row: int) -> bool:
        return bool(self.bits & _bit(self.width, col, row))

    def tiled_cells(self) -> list[CellCoord]:
        w = self.width
        return [
            CellCoord(c, r)
            for c in range(1, FRINGE_COLUMNS + 1)
            for r in range(1, w + 1)
            if self.bits & _bit(w, c, r)
        ]

    def count(self) -> int:
        return self.bits.bit_count()

    def hex(self) -> str:
        return format(self.bits, "x")


def canonicalize(width: int, bits: int) -> tuple[int, int]:
    """Flush fully tiled leading columns; returns ``(bits, columns_flushed)``."""
    full = (1 << width) - 1
    flushed = 0
    while bits & full == full:
        bits >>= width
        flushed += 1
    return bits, flushed


def target_cell(f: Fringe) -> CellCoord:
    """Lowest untiled cell of the leftmost incomplete column."""
    first = f.bits & ((1 << f.width) - 1)
    low_zero = ~first & (first + 1)
    return CellCoord(1, low_zero.bit_length())


def _fits(f: Fringe, cells) -> bool:
    for col, row in cells:
        if not (1 <= row <= f.width and 1 <= col <= FRINGE_COLUMNS):
            return False
        if f.bits & _bit(f.width, col, row):
            return False
    return True


def legal_placements(f: Fringe) -> list[Placement]:
    """Every tile covering the target cell, T orientations first, monomino last."""
    target = target_cell(f)
    out = []
    for code in range(len(ORIENTATIONS)):
        p = placement_from_code(code, target)
        if _fits(f, p.cells()):
            out.append(p)
    out.append(Placement.monomino(target.col, target.row))
    return out


class IllegalPlacementError(ValueError):
    pass


def advance(f: Fringe, p: Placement) -> tuple[Fringe, int, Kind]:
    """Apply a legal placement; returns the canonical successor and columns flushed."""
    if p not in legal_placements(f):
        raise IllegalPlacementError(f"{p} is not a legal placement for fringe 0x{f.hex()}")
    bits = f.bits
    for col, row in p.cells():
        bits |= _bit(f.width, col, row)
    bits, flushed = canonicalize(f.width, bits)
    return Fringe(f.width, bits), flushed, p.kind
