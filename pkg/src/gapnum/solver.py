"""Exact gap numbers with witness tilings.

``togo[r][v]`` is the fewest monominoes needed to go from fringe ``v`` back
to the empty fringe while absorbing exactly ``r`` more columns.  A w x n
rectangle corresponds to ``togo[n][0]``.  Layer ``r`` depends on layers
``r-1 .. r-3`` through absorbing edges and on itself through edges that
absorb nothing; the latter always add cells, so sweeping sources by
decreasing popcount settles a layer in one pass.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .digraph import CapacityError, FringeDigraph, get_digraph, memory_cap_bytes
from .geometry import CellCoord, Kind, Orientation, Placement, check_width

LENGTH_CAP = 10_000
INF = np.int32(2**30)

_TRANSPOSED = {
    Orientation.BAR_VERTICAL_STEM_RIGHT: Orientation.BAR_HORIZONTAL_STEM_UP,
    Orientation.BAR_HORIZONTAL_STEM_UP: Orientation.BAR_VERTICAL_STEM_RIGHT,
    Orientation.BAR_VERTICAL_STEM_LEFT: Orientation.BAR_HORIZONTAL_STEM_DOWN,
    Orientation.BAR_HORIZONTAL_STEM_DOWN: Orientation.BAR_VERTICAL_STEM_LEFT,
}


class Method(enum.Enum):
    DP = "DP"
    ORACLE = "ORACLE"


@dataclass
class Tiling:
    width: int
    length: int
    placements: list[Placement] = field(default_factory=list)

    @property
    def monomino_count(self) -> int:
        return sum(p.kind is Kind.MONOMINO for p in self.placements)

    def transposed(self) -> Tiling:
        out = []
        for p in self.placements:
            c, r = p.anchor
            if p.orientation is None:
                out.append(Placement.monomino(r, c))
            else:
                out.append(Placement.tee(_TRANSPOSED[p.orientation], r, c))
        return Tiling(self.length, self.width, out)

    def to_dict(self) -> dict:
        return {
            "width": self.width,
            "length": self.length,
            "monomino_count": self.monomino_count,
            "placements": [p.to_dict() for p in self.placements],
        }

    @classmethod
    def from_dict(cls, d: dict) -> Tiling:
        return cls(int(d["width"]), int(d["length"]), [Placement.from_dict(p) for p in d["placements"]])


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    monomino_count: int
    error: str | None = None
    cell: CellCoord | None = None

    def __bool__(self):
        return self.ok


def validate_tiling(t: Tiling) -> ValidationReport:
    """Check shapes, bounds, disjointness and exact coverage of the rectangle."""
    mono = t.monomino_count
    owner: dict[CellCoord, int] = {}
    for i, p in enumerate(t.placements):
        cells = p.cells()
        if p.kind is Kind.T and (p.orientation is None or len(set(cells)) != 4):
            return ValidationReport(False, mono, f"placement {i} is not a T-tetromino", p.anchor)
        for cell in cells:
            if not (1 <= cell.col <= t.length and 1 <= cell.row <= t.width):
                return ValidationReport(False, mono, f"placement {i} leaves the rectangle", cell)
            if cell in owner:
                return ValidationReport(
                    False, mono, f"placements {owner[cell]} and {i} overlap", cell
                )
            owner[cell] = i
    if len(owner) != t.width * t.length:
        for col in range(1, t.length + 1):
            for row in range(1, t.width + 1):
                if (col, row) not in owner:
                    return ValidationReport(False, mono, "cell left uncovered", CellCoord(col, row))
    return ValidationReport(True, mono)


@dataclass
class GapResult:
    width: int
    length: int
    gap_number: int
    witness: Tiling | None
    lower_bound_used: int
    method: Method = Method.DP

    def to_dict(self) -> dict:
        return {
            "width": self.width,
            "length": self.length,
            "gap_number": self.gap_number,
            "lower_bound_used": self.lower_bound_used,
            "method": self.method.value,
            "witness": None if self.witness is None else self.witness.to_dict(),
        }


def congruence_floor(w: int, n: int) -> int:
    """Smallest count allowed by mod-4 counting plus the classical exclusions.

    Zero needs both sides divisible by 4, and a single gap is impossible when
    ``w*n = 1 (mod 4)``; both facts are quoted results, checked by the tests.
    """
    r = (w * n) % 4
    if r == 0 and not (w % 4 == 0 and n % 4 == 0):
        return 4
    if r == 1 and w * n > 1:
        return 5
    return r


class _Plan:
    """Edge groupings for the layered sweep, cached per digraph."""

    def __init__(self, g: FringeDigraph):
        src = g.src.astype(np.int64)
        cost = (~g.is_t).astype(np.int32)
        cols = g.cols.astype(np.int64)
        absorbing = np.flatnonzero(cols > 0)
        self.n = g.node_count
        # edges are CSR-ordered, so any subset stays sorted by source
        self.abs_src, self.abs_starts, self.abs_heads = _segments(src[absorbing])
        self.abs_dst = g.dst[absorbing].astype(np.int64)
        self.abs_cost = cost[absorbing]
        self.abs_cols = cols[absorbing]
        self.abs_by_cols = [(a, np.flatnonzero(self.abs_cols == a)) for a in (1, 2, 3)]
        zero = np.flatnonzero(cols == 0)
        pop = g.popcount[src[zero]]
        self.levels = []
        for level in np.unique(pop)[::-1]:
            sel = zero[pop == level]
            _, starts, heads = _segments(src[sel])
            self.levels.append((starts, heads, g.dst[sel].astype(np.int64), cost[sel]))

    def layer(self, r: int, prev: dict[int, np.ndarray]) -> np.ndarray:
        out = np.full(self.n, INF, dtype=np.int32)
        if r == 0:
            out[0] = 0
            return out
        cand = np.full(len(self.abs_dst), INF, dtype=np.int32)
        for a, sel in self.abs_by_cols:
            if r - a < 0:
                continue
            cand[sel] = self.abs_cost[sel] + prev[r - a][self.abs_dst[sel]]
        out[self.abs_heads] = np.minimum.reduceat(cand, self.abs_starts)
        for starts, heads, dst, cost in self.levels:
            best = np.minimum.reduceat(cost + out[dst], starts)
            out[heads] = np.minimum(out[heads], best)
        return np.minimum(out, INF)


def _segments(src: np.ndarray):
    if not len(src):
        return src, np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    starts = np.flatnonzero(np.r_[True, src[1:] != src[:-1]])
    return src, starts, src[starts]


_PLANS: dict[int, tuple[FringeDigraph, _Plan]] = {}


def _plan(g: FringeDigraph) -> _Plan:
    hit = _PLANS.get(id(g))
    if hit is None or hit[0] is not g:
        _PLANS.clear()
        hit = _PLANS[id(g)] = (g, _Plan(g))
    return hit[1]


class _Layers:
    """Cost-to-go layers ``0..n`` with checkpointed recomputation.

    When all layers do not fit the memory budget, only the three layers in
    front of each block of ``block`` layers are kept and a block is rebuilt
    on demand; a backward access pattern rebuilds each block once.
    """

    def __init__(self, plan: _Plan, n: int, budget: int):
        self.plan = plan
        self.n = n
        per_layer = 4 * plan.n
        if per_layer * (n + 1) <= budget:
            self.block = n + 1
        else:
            self.block = max(4, math.isqrt(3 * (n + 1)) + 1)
            need = per_layer * (3 * ((n + 1) // self.block + 1) + 2 * self.block + 4)
            if need > budget:
                raise CapacityError(
                    f"DP for length {n} needs about {need / 2**20:.0f} MB of layers; "
                    f"budget is {budget / 2**20:.0f} MB"
                )
        self.checkpoints: dict[int, np.ndarray] = {}
        self.cache: dict[int, np.ndarray] = {}
        self.cached_blocks: list[int] = []
        window: dict[int, np.ndarray] = {}
        for r in range(n + 1):
            window[r] = plan.layer(r, window)
            window.pop(r - 4, None)
            if self.block == n + 1:
                self.cache[r] = window[r]
            elif r % self.block >= self.block - 3:
                self.checkpoints[r] = window[r]
        self.top = window[n]

    def __getitem__(self, r: int) -> np.ndarray:
        if r in self.cache:
            return self.cache[r]
        if r in self.checkpoints:
            return self.checkpoints[r]
        b = r // self.block
        lo, hi = b * self.block, min(self.n, (b + 1) * self.block - 1)
        window = {k: self.checkpoints[k] for k in range(lo - 3, lo) if k in self.checkpoints}
        fresh = {}
        for k in range(lo, hi + 1):
            window[k] = fresh[k] = self.plan.layer(k, window)
        self.cached_blocks.append(b)
        self.cache.update(fresh)
        if len(self.cached_blocks) > 2:
            old = self.cached_blocks.pop(0)
            for k in range(old * self.block, (old + 1) * self.block):
                self.cache.pop(k, None)
        return self.cache[r]


def gap_number_table(width: int, n_max: int, digraph: FringeDigraph | None = None) -> np.ndarray:
    """``M(width, n)`` for ``n = 0 .. n_max`` (entry 0 is 0), without witnesses."""
    check_width(width)
    if not 0 <= n_max <= LENGTH_CAP:
        raise CapacityError(f"length must lie in [0, {LENGTH_CAP}], got {n_max}")
    g = digraph or get_digraph(width)
    plan = _plan(g)
    out = np.empty(n_max + 1, dtype=np.int64)
    window: dict[int, np.ndarray] = {}
    for r in range(n_max + 1):
        window[r] = plan.layer(r, window)
        window.pop(r - 4, None)
        out[r] = window[r][0]
    return out


def _walk(g: FringeDigraph, layers: _Layers, n: int) -> list[Placement]:
    """Forward walk taking the smallest optimal edge id at every step."""
    v, r = 0, n
    remaining = int(layers.top[0])
    placements = []
    while r > 0 or v != 0:
        here = layers[r]
        assert here[v] == remaining
        for e in g.out_edges(v):
            a = int(g.cols[e])
            if a > r:
                continue
            cost = 0 if g.is_t[e] else 1
            u = int(g.dst[e])
            if cost + int(layers[r - a][u]) == remaining:
                break
        else:  # pragma: no cover - layers are self-consistent
            raise RuntimeError(f"no optimal edge out of node {v} at {r} columns to go")
        absorbed_so_far = n - r
        p = g.edge_placement(e).shifted(absorbed_so_far)
        if cost:
            # a gap always lands in the first incomplete column
            assert p.anchor.col == absorbed_so_far + 1
        placements.append(p)
        remaining -= cost
        v, r = u, r - a
    return placements


def gap_number(
    width: int,
    length: int,
    *,
    transpose: bool | None = None,
    digraph: FringeDigraph | None = None,
    density=None,
) -> GapResult:
    """Exact ``M(width, length)`` with a witness tiling.

    ``transpose=None`` runs the strip along the shorter side; ``True`` or
    ``False`` forces the choice.  ``density`` (a ``DensityBound`` for the strip
    width) folds its lower bound into ``lower_bound_used``.
    """
    for name, v in (("width", width), ("length", length)):
        if not isinstance(v, int) or v < 1:
            raise ValueError(f"{name} must be a positive int, got {v!r}")
    if transpose is None:
        transpose = length < width
    if transpose:
        res = gap_number(length, width, transpose=False, digraph=digraph, density=density)
        return GapResult(width, length, res.gap_number, res.witness.transposed(), res.lower_bound_used)
    if length > LENGTH_CAP:
        raise CapacityError(f"length {length} is above the cap {LENGTH_CAP}")
    g = digraph or get_digraph(width)
    if g.width != width:
        raise ValueError(f"digraph has width {g.width}, expected {width}")
    layers = _Layers(_plan(g), length, memory_cap_bytes() // 2)
    best = int(layers.top[0])
    if best >= INF:  # pragma: no cover - the all-monomino walk always exists
        raise RuntimeError(f"no tiling found for {width}x{length}")
    witness = Tiling(width, length, _walk(g, layers, length))
    lb = congruence_floor(width, length)
    if density is not None:
        from .bounds import monomino_lower_bound

        lb = max(lb, monomino_lower_bound(density, length))
    return GapResult(width, length, best, witness, lb)
