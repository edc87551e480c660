"""Monomino density lower bounds from negative-cycle-free edge weightings.

T-edges weigh -1 and M-edges weigh ``m``.  If no cycle of F_w is negative,
every closed walk with ``tau`` T-edges and ``mu`` M-edges has ``tau <= m*mu``;
since such a walk tiles ``4*tau + mu = w*cols`` cells, a tiling needs at least
one monomino per ``(4m + 1)/w`` columns.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .digraph import FringeDigraph

T_WEIGHT = -1
_CHECK_EVERY = 16


@dataclass(frozen=True)
class BoundWeights:
    m_weight: int
    t_weight: int = T_WEIGHT

    def __post_init__(self):
        if self.t_weight != T_WEIGHT:
            raise ValueError("T-edges always weigh -1")
        if self.m_weight < 0:
            raise ValueError("m must be >= 0")


@dataclass(frozen=True)
class DensityBound:
    width: int
    minimal_m: int | None  # None: a T-only cycle exists, no finite m works

    @property
    def unbounded(self) -> bool:
        return self.minimal_m is None

    @property
    def columns_per_monomino(self) -> Fraction | None:
        if self.minimal_m is None:
            return None
        return Fraction(4 * self.minimal_m + 1, self.width)

    def to_dict(self) -> dict:
        cpm = self.columns_per_monomino
        return {
            "width": self.width,
            "minimal_m": self.minimal_m,
            "unbounded": self.unbounded,
            "columns_per_monomino": None if cpm is None else str(cpm),
        }


class _Relaxer:
    """Jacobi-style Bellman-Ford rounds over edges grouped by head node."""

    def __init__(self, g: FringeDigraph):
        order = np.argsort(g.dst, kind="stable")
        self.n = g.node_count
        self.edge = order
        self.src = g.src[order].astype(np.int64)
        self.is_t = g.is_t[order]
        heads = g.dst[order]
        self.starts = np.flatnonzero(np.r_[True, heads[1:] != heads[:-1]])
        self.heads = heads[self.starts].astype(np.int64)
        self.seg = np.repeat(np.arange(len(self.starts)), np.diff(np.r_[self.starts, len(heads)]))

    def weights(self, m: int) -> np.ndarray:
        return np.where(self.is_t, T_WEIGHT, m).astype(np.int64)

    def best(self, dist, wt):
        cand = dist[self.src] + wt
        return cand, np.minimum.reduceat(cand, self.starts)

    def improve(self, dist, wt, pred_edge) -> bool:
        """One round; updates ``dist`` and ``pred_edge`` in place."""
        cand, best = self.best(dist, wt)
        better = best < dist[self.heads]
        if not better.any():
            return False
        tight = (cand == best[self.seg]) & better[self.seg]
        idx = np.flatnonzero(tight)
        seg_of, first = np.unique(self.seg[idx], return_index=True)
        pred_edge[self.heads[seg_of]] = idx[first]
        dist[self.heads[seg_of]] = best[seg_of]
        return True

    def pred_cycle(self, pred_edge) -> list[int] | None:
        """Some cycle of the predecessor graph, as original edge ids."""
        pred = np.where(pred_edge >= 0, self.src[np.maximum(pred_edge, 0)], np.arange(self.n))
        jump = pred
        for _ in range(max(1, self.n.bit_length())):
            jump = jump[jump]
        # after >= n pointer jumps every non-root chain sits on its cycle
        on_cycle = np.flatnonzero(pred_edge[jump] >= 0)
        if not len(on_cycle):
            return None
        start = v = int(jump[on_cycle[0]])
        loop = []
        while True:
            e = int(pred_edge[v])
            loop.append(e)
            v = int(self.src[e])
            if v == start:
                break
        return [int(self.edge[e]) for e in reversed(loop)]


def find_negative_cycle(g: FringeDigraph, m: int, *, relaxer: _Relaxer | None = None):
    """Return ``(found, cycle_edge_ids)`` under weights (-1 per T, ``m`` per M).

    All nodes start at distance 0 (a virtual source joined to every node), so
    every cycle of the digraph is examined.  ``cycle_edge_ids`` is an explicit
    negative cycle when one was isolated, else ``None``.
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    r = relaxer or _Relaxer(g)
    wt = r.weights(m)
    dist = np.zeros(r.n, dtype=np.int64)
    pred_edge = np.full(r.n, -1, dtype=np.int64)
    # V relaxation rounds settle every simple path out of the virtual source;
    # a change in round V + 1 can only come from a negative cycle.
    for rnd in range(1, r.n + 2):
        if not r.improve(dist, wt, pred_edge):
            return False, None
        if rnd % _CHECK_EVERY == 0:
            cyc = r.pred_cycle(pred_edge)
            # predecessor cycles have weight <= 0; only a strict one is a certificate
            if cyc is not None and cycle_weight(g, cyc, m) < 0:
                return True, cyc
    cyc = r.pred_cycle(pred_edge)
    return True, cyc if cyc is not None and cycle_weight(g, cyc, m) < 0 else None


def has_negative_cycle(g: FringeDigraph, m: int) -> bool:
    return find_negative_cycle(g, m)[0]


def cycle_weight(g: FringeDigraph, edges, m: int) -> int:
    edges = np.asarray(edges, dtype=np.int64)
    t = int(np.count_nonzero(g.is_t[edges]))
    return T_WEIGHT * t + m * (len(edges) - t)


def t_subgraph_is_cyclic(g: FringeDigraph) -> bool:
    t = g.is_t
    src, dst = g.src[t], g.dst[t]
    if np.any(src == dst):
        return True
    adj = csr_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(g.node_count,) * 2)
    n, _ = connected_components(adj, directed=True, connection="strong")
    return n < g.node_count


def minimal_m(g: FringeDigraph) -> DensityBound:
    """Least ``m >= 0`` leaving no negative cycle, or an unbounded marker."""
    if t_subgraph_is_cyclic(g):
        return DensityBound(g.width, None)
    r = _Relaxer(g)
    if not find_negative_cycle(g, 0, relaxer=r)[0]:
        return DensityBound(g.width, 0)
    # Without T-only cycles every simple cycle has >= 1 M-edge and < V T-edges,
    # so m = V already makes every cycle non-negative.
    lo, hi = 0, 1
    while hi < g.node_count and find_negative_cycle(g, hi, relaxer=r)[0]:
        lo, hi = hi, 2 * hi
    hi = min(hi, g.node_count)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if find_negative_cycle(g, mid, relaxer=r)[0]:
            lo = mid
        else:
            hi = mid
    return DensityBound(g.width, hi)


def monomino_lower_bound(d: DensityBound, n: int) -> int:
    """``ceil(n*w / (4m + 1))``; 0 when the density is unbounded."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if d.minimal_m is None:
        return 0
    return math.ceil(Fraction(n * d.width, 4 * d.minimal_m + 1))
