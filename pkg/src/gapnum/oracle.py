"""Brute-force gap numbers on a raw grid, independent of the fringe machinery."""
from __future__ import annotations

import sys
from dataclasses import dataclass

from .geometry import ORIENTATIONS


class OracleBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleConfig:
    area_cap: int = 64
    node_budget: int = 50_000_000

    def __post_init__(self):
        if self.area_cap < 1:
            raise ValueError("area_cap must be >= 1")


def _cell_moves(w: int, n: int) -> list[list[int]]:
    """For each cell ``col*w + row``: masks of Ts whose first cell (in scan order) it is."""
    moves = []
    for col in range(n):
        for row in range(w):
            masks = []
            for o in ORIENTATIONS:
                cells = [(col + dc, row + dr) for dc, dr in o.offsets]
                first = min(cells)
                cells = [(c - first[0] + col, r - first[1] + row) for c, r in cells]
                if all(0 <= c < n and 0 <= r < w for c, r in cells):
                    m = 0
                    for c, r in cells:
                        m |= 1 << (c * w + r)
                    masks.append(m)
            moves.append(masks)
    return moves


def brute_gap_number(w: int, n: int, cfg: OracleConfig = OracleConfig()) -> int:
    """Exact minimum monomino count by exhaustive branch and bound."""
    if w < 1 or n < 1:
        raise ValueError("sides must be positive")
    area = w * n
    if area > cfg.area_cap:
        raise ValueError(f"area {area} exceeds the oracle cap {cfg.area_cap}")
    moves = _cell_moves(w, n)
    full = (1 << area) - 1
    best = area  # all monominoes
    nodes = 0

    def search(mask: int, used: int, left: int):
        nonlocal best, nodes
        nodes += 1
        if nodes > cfg.node_budget:
            raise OracleBudgetExceeded(f"{w}x{n}: more than {cfg.node_budget} search nodes")
        if mask == full:
            best = used
            return
        # gaps still to come are congruent to the uncovered area mod 4
        if used + left % 4 >= best:
            return
        low = ~mask & (mask + 1)
        i = low.bit_length() - 1
        for m in moves[i]:
            if not mask & m:
                search(mask | m, used, left - 4)
        search(mask | low, used + 1, left - 1)

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, area + 100))
    try:
        search(0, 0, area)
    finally:
        sys.setrecursionlimit(limit)
    return best
