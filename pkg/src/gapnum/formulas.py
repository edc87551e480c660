"""Closed-form gap numbers for the widths where one is known.

The formulas cover sides 1, 2, 3, even sides up to 12, and sides 13 and 15,
each with its short list of exceptional lengths.  Sides 5, 7, 9 and 11 only
have asymptotic descriptions and return ``None``.
"""
from __future__ import annotations

from dataclasses import dataclass

_WIDTH10_SIX = frozenset({3, 7, 11, 15, 19, 23})
_WIDTH13_SIX = frozenset({14, 18, 22, 30, 34, 38})
_WIDTH15_SIX = frozenset({10, 14, 18, 22, 26})
_ODD_FROM_TWO = {0: 4, 1: 5, 2: 2, 3: 3}  # least k >= 2 in each class mod 4


def _width3(n: int) -> int:
    if n == 3:
        return 5
    q, r = divmod(n, 3)
    return q + (0, 3, 2)[r]


def _even(w: int, n: int) -> int:
    if w == 10 and n in _WIDTH10_SIX:
        return 6
    r = (w * n) % 4
    if r:
        return r
    return 0 if w % 4 == 0 and n % 4 == 0 else 4


def _odd_large(w: int, n: int) -> int:
    if w == 13:
        if n == 3:
            return 7
        if n in _WIDTH13_SIX:
            return 6
    if w == 15:
        if n == 5:
            return 7
        if n in _WIDTH15_SIX:
            return 6
    return _ODD_FROM_TWO[(w * n) % 4]


def _one_side(w: int, n: int) -> int | None:
    if w == 1:
        return n
    if n == 1:
        return w
    if w == 3:
        return _width3(n)
    if w % 2 == 0 and w <= 12:
        return _even(w, n)
    if w in (13, 15):
        return _odd_large(w, n)
    return None


def expected_gap_number(w: int, n: int) -> int | None:
    """Known exact value of M(w, n), or ``None`` if neither side has a formula."""
    if w < 1 or n < 1:
        raise ValueError("sides must be positive")
    v = _one_side(w, n)
    return v if v is not None else _one_side(n, w)


def known_values(w: int, n: int) -> set[int]:
    """Every formula value that applies, from either side (for consistency checks)."""
    return {v for v in (_one_side(w, n), _one_side(n, w)) if v is not None}


@dataclass(frozen=True)
class Piece:
    height: int
    length: int
    gaps: int

    def to_dict(self) -> dict:
        return {"height": self.height, "length": self.length, "gaps": self.gaps}


@dataclass(frozen=True)
class Decomposition:
    m: int
    n: int
    bound: int
    pieces: tuple[Piece, ...]
    layout: str  # "bottom-full", "right-full", "l-border" or "block"

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "bound": self.bound,
            "layout": self.layout,
            "pieces": [p.to_dict() for p in self.pieces],
        }


_RESIDUE = {0: 0, 1: 13, 2: 2, 3: 15}


def _piece(h: int, ln: int) -> Piece | None:
    if h == 0 or ln == 0:
        return None
    g = expected_gap_number(h, ln)
    assert g is not None, (h, ln)
    return Piece(h, ln, g)


def strip_decomposition_bound(m: int, n: int) -> Decomposition:
    """Upper bound on M(m, n) from cutting off strips of height 2, 13 or 15.

    ``m = 4l + r1``, ``n = 4k + r2`` with ``r1, r2`` in {0, 13, 2, 15}.  The
    remaining ``4l x 4k`` block tiles without gaps.  The strips meet in one
    corner, which goes to either the bottom strip or the right strip; the
    cheaper choice is kept.  When both residues are 2 the L-shaped border
    is tiled as a whole with four gaps.
    """
    if m < 12 or n < 12:
        raise ValueError("both sides must be at least 12")
    r1, r2 = _RESIDUE[m % 4], _RESIDUE[n % 4]
    if r1 == 0 and r2 == 0:
        return Decomposition(m, n, 0, (), "block")
    if r1 == 2 and r2 == 2:
        return Decomposition(m, n, 4, (Piece(m, n, 4),), "l-border")
    options = []
    for layout, parts in (
        ("bottom-full", ((r1, n), (m - r1, r2))),
        ("right-full", ((r1, n - r2), (m, r2))),
    ):
        pieces = tuple(p for p in (_piece(*parts[0]), _piece(*parts[1])) if p is not None)
        options.append((sum(p.gaps for p in pieces), layout, pieces))
    bound, layout, pieces = min(options, key=lambda o: o[0])
    return Decomposition(m, n, bound, pieces, layout)
