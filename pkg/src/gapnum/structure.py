"""Monomino-free column runs and periodic (cylinder) tilings of a strip."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order, connected_components

from .digraph import CapacityError, FringeDigraph, get_digraph
from .geometry import CellCoord, Kind, Placement
from .solver import Tiling, ValidationReport

DEFAULT_MAX_WORK = 4 * 10**10
_SLOT_BYTES = 64 * 2**20


class SearchBudgetExceeded(CapacityError):
    """The search hit its work budget before it could decide."""


def walk_placements(g: FringeDigraph, edges, start_node: int = 0, start_count: int = 0):
    """Absolute placements along a walk; returns ``(placements, columns_absorbed)``."""
    v, count, out = start_node, start_count, []
    for e in edges:
        e = int(e)
        if int(g.src[e]) != v:
            raise ValueError(f"edge {e} does not leave node {v}")
        p = g.edge_placement(e).shifted(count)
        if p.kind is Kind.MONOMINO:
            assert p.anchor.col == count + 1
        out.append(p)
        count += int(g.cols[e])
        v = int(g.dst[e])
    return out, count - start_count


def _monomino_fill(g: FringeDigraph, v: int) -> list[int]:
    edges = []
    while v != 0:
        e = int(g.offsets[v + 1]) - 1  # the monomino is always the last edge
        edges.append(e)
        v = int(g.dst[e])
    return edges


def _path_from_root(g: FringeDigraph, target: int) -> list[int]:
    adj = csr_matrix(
        (np.arange(1, g.edge_count + 1), g.dst, g.offsets), shape=(g.node_count,) * 2
    )
    _, pred = breadth_first_order(adj, 0, directed=True, return_predecessors=True)
    path, v = [], target
    while v != 0:
        u = int(pred[v])
        path.append(next(e for e in g.out_edges(u) if int(g.dst[e]) == v))
        v = u
    return path[::-1]


def _t_edges(g: FringeDigraph):
    t = np.flatnonzero(g.is_t)
    return t, g.src[t].astype(np.int64), g.dst[t].astype(np.int64), g.cols[t].astype(np.int64)


def t_components(g: FringeDigraph) -> list[np.ndarray]:
    """Node sets of the T-only subgraph's components that carry a cycle."""
    _, s, d, _ = _t_edges(g)
    adj = csr_matrix((np.ones(len(s), dtype=np.int8), (s, d)), shape=(g.node_count,) * 2)
    _, lab = connected_components(adj, directed=True, connection="strong")
    sizes = np.bincount(lab)
    cyclic = sizes > 1
    cyclic[lab[s[s == d]]] = True
    return [np.flatnonzero(lab == c) for c in np.flatnonzero(cyclic)]


def longest_t_absorption(g: FringeDigraph, *, reverse: bool = False):
    """Most columns any T-only path out of (or into) each node can absorb.

    Returns ``(best, via)`` where ``via`` is the first (last) edge of a best
    path, ``-1`` when the path is empty.  The T-only subgraph must be acyclic.
    """
    t, s, d, a = _t_edges(g)
    if reverse:
        s, d = d, s
        order = np.argsort(s, kind="stable")
        t, s, d, a = t[order], s[order], d[order], a[order]
    starts = np.flatnonzero(np.r_[True, s[1:] != s[:-1]]) if len(s) else np.zeros(0, np.int64)
    heads = s[starts]
    best = np.zeros(g.node_count, dtype=np.int64)
    via = np.full(g.node_count, -1, dtype=np.int64)
    for _ in range(g.node_count + 1):
        cand = a + best[d]
        top = np.maximum.reduceat(cand, starts) if len(starts) else cand
        better = top > best[heads]
        if not better.any():
            return best, via
        seg = np.repeat(np.arange(len(starts)), np.diff(np.r_[starts, len(s)]))
        hit = np.flatnonzero((cand == top[seg]) & better[seg])
        seg_of, first = np.unique(seg[hit], return_index=True)
        best[heads[seg_of]] = top[seg_of]
        via[heads[seg_of]] = t[hit[first]]
    raise ValueError("the T-only subgraph has a cycle")


@dataclass
class RunResult:
    width: int
    max_gapless_columns: int | None  # None: unbounded
    witness_path: list[int] = field(default_factory=list)
    first_column: int | None = None

    @property
    def unbounded(self) -> bool:
        return self.max_gapless_columns is None

    def tiling(self, g: FringeDigraph) -> Tiling:
        """A full strip tiling realizing the run (bounded case only)."""
        placements, length = walk_placements(g, self.witness_path)
        return Tiling(g.width, length, placements)

    def to_dict(self) -> dict:
        return {
            "width": self.width,
            "max_gapless_columns": self.max_gapless_columns,
            "unbounded": self.unbounded,
            "first_column": self.first_column,
            "witness_path": [int(e) for e in self.witness_path],
        }


def max_gapless_run(width: int, *, digraph: FringeDigraph | None = None) -> RunResult:
    """Longest block of consecutive monomino-free columns in any strip tiling.

    A monomino placed after ``c`` absorbed columns lands in column ``c + 1``,
    so columns ``j+1 .. j+k`` are gap-free exactly when no M-edge is taken
    while the absorbed count lies in ``[j, j+k-1]``.  The first edge to lift
    the count to ``j`` or beyond may itself overshoot by up to two columns,
    hence ``k = max(cols(e) - 1 + longest T-path after e)``.
    """
    g = digraph or get_digraph(width)
    comps = t_components(g)
    if comps:
        return RunResult(width, None, _t_cycle(g, comps[0]))
    best, via = longest_t_absorption(g)
    cols = g.cols.astype(np.int64)
    score = np.where(cols > 0, cols - 1 + best[g.dst], -1)
    e = int(np.argmax(score))
    if best[0] >= score[e]:
        entry, head, k, first = [], 0, int(best[0]), 1
    else:
        entry = _path_from_root(g, int(g.src[e])) + [e]
        _, before = walk_placements(g, entry[:-1])
        head, k, first = int(g.dst[e]), int(score[e]), before + 2
    path = list(entry)
    v = head
    while via[v] >= 0:
        path.append(int(via[v]))
        v = int(g.dst[via[v]])
    path += _monomino_fill(g, v)
    return RunResult(width, k, path, first)


def _t_cycle(g: FringeDigraph, comp: np.ndarray) -> list[int]:
    """Some T-only cycle inside one cyclic component."""
    inside = np.zeros(g.node_count, dtype=bool)
    inside[comp] = True
    s0 = int(comp[0])
    prev = {s0: None}
    frontier = [s0]
    while frontier:
        nxt = []
        for u in frontier:
            for e in g.out_edges(u):
                v = int(g.dst[e])
                if not g.is_t[e] or not inside[v]:
                    continue
                if v == s0:
                    path = [e]
                    while prev[u] is not None:
                        path.append(prev[u])
                        u = int(g.src[prev[u]])
                    return path[::-1]
                if v not in prev:
                    prev[v] = e
                    nxt.append(v)
        frontier = nxt
    raise AssertionError("component without a cycle")  # pragma: no cover


@dataclass
class CylinderWitness:
    width: int
    period: int
    monominoes: int
    start_node: int
    cycle: list[int]

    def placements(self, g: FringeDigraph) -> list[Placement]:
        out, _ = walk_placements(g, self.cycle, self.start_node)
        return out

    def to_dict(self) -> dict:
        return {
            "width": self.width,
            "period": self.period,
            "monominoes": self.monominoes,
            "start_node": self.start_node,
            "cycle": [int(e) for e in self.cycle],
        }


def validate_cylinder(g: FringeDigraph, wit: CylinderWitness) -> ValidationReport:
    """Closed walk check plus exact cover of the width x period cylinder."""
    edges = wit.cycle
    if not edges:
        return ValidationReport(False, 0, "empty cycle")
    v = wit.start_node
    for e in edges:
        if int(g.src[e]) != v:
            return ValidationReport(False, wit.monominoes, f"walk breaks at edge {e}")
        v = int(g.dst[e])
    if v != wit.start_node:
        return ValidationReport(False, wit.monominoes, "walk is not closed")
    placements, absorbed = walk_placements(g, edges, wit.start_node)
    mono = sum(p.kind is Kind.MONOMINO for p in placements)
    if absorbed != wit.period:
        return ValidationReport(False, mono, f"walk absorbs {absorbed} columns, not {wit.period}")
    if mono != wit.monominoes:
        return ValidationReport(False, mono, f"walk has {mono} monominoes, not {wit.monominoes}")
    seen = set()
    for p in placements:
        for c in p.cells():
            cell = CellCoord((c.col - 1) % wit.period + 1, c.row)
            if cell in seen:
                return ValidationReport(False, mono, "cylinder cell covered twice", cell)
            seen.add(cell)
    if len(seen) != wit.width * wit.period:
        return ValidationReport(False, mono, "cylinder not covered")
    return ValidationReport(True, mono)


class _Group:
    __slots__ = ("src", "starts", "heads", "edge")

    def __init__(self, src, dst, edge):
        order = np.lexsort((src, dst))
        self.src, dst, self.edge = src[order], dst[order], edge[order]
        self.starts = np.flatnonzero(np.r_[True, dst[1:] != dst[:-1]]) if len(dst) else dst
        self.heads = dst[self.starts] if len(dst) else dst


class _Domain:
    """A node subset of F_w with its internal edges, grouped for bitset pushes."""

    def __init__(self, g: FringeDigraph, nodes: np.ndarray, *, t_only: bool):
        self.g = g
        self.nodes = nodes
        local = np.full(g.node_count, -1, dtype=np.int64)
        local[nodes] = np.arange(len(nodes))
        self.local = local
        keep = (local[g.src] >= 0) & (local[g.dst] >= 0)
        if t_only:
            keep &= g.is_t
        e = np.flatnonzero(keep)
        self.edge = e
        self.src = local[g.src[e]]
        self.dst = local[g.dst[e]]
        self.is_m = ~g.is_t[e]
        self.cols = g.cols[e].astype(np.int64)
        pop = g.popcount[nodes]
        self.pop = pop
        self.cross = {}
        for a in (1, 2, 3):
            for m in (False, True):
                sel = (self.cols == a) & (self.is_m == m)
                if sel.any():
                    self.cross[a, m] = _Group(self.src[sel], self.dst[sel], e[sel])
        zt = (self.cols == 0) & ~self.is_m
        self.zero_t = []
        zpop = pop[self.src[zt]]
        for level in np.unique(zpop):
            sel = np.flatnonzero(zt)[zpop == level]
            self.zero_t.append(_Group(self.src[sel], self.dst[sel], e[sel]))
        zm = (self.cols == 0) & self.is_m
        self.zero_m = _Group(self.src[zm], self.dst[zm], e[zm]) if zm.any() else None
        order = np.argsort(self.dst, kind="stable")
        self.in_order = order
        self.in_ptr = np.searchsorted(self.dst[order], np.arange(len(nodes) + 1))


class _Search:
    """Layered reachability over (node, columns, monominoes) for many starts at once."""

    def __init__(self, dom: _Domain, p: int, mu_max: int, allowed=None, max_work=DEFAULT_MAX_WORK):
        self.dom, self.p, self.mu_max = dom, p, mu_max
        self.allowed = allowed  # callable (c, mu) -> bool mask over local nodes, or None
        self.max_work = max_work
        self.work = 0

    def _push(self, group, src_arr, dst_arr):
        if group is None or not len(group.src):
            return
        self.work += len(group.src) * src_arr.shape[1]
        if self.work > self.max_work:
            raise SearchBudgetExceeded(f"cylinder search exceeded {self.max_work} work units")
        vals = src_arr[group.src]
        dst_arr[group.heads] |= np.bitwise_or.reduceat(vals, group.starts, axis=0)

    def run(self, inits, words: int, keep_layers: bool = False):
        """``inits``: ``(bit, local_node, c0, mu0)``; returns final layer or all layers."""
        K, p, mu_max = len(self.dom.nodes), self.p, self.mu_max
        by_layer: dict[int, list] = {}
        for bit, node, c0, mu0 in inits:
            by_layer.setdefault(c0, []).append((bit, node, mu0))
        ring: dict[int, list[np.ndarray]] = {}
        kept = {}
        for c in range(p + 1):
            cur = [np.zeros((K, words), dtype=np.uint64) for _ in range(mu_max + 1)]
            for bit, node, mu0 in by_layer.get(c, ()):
                cur[mu0][node, bit >> 6] |= np.uint64(1) << np.uint64(bit & 63)
            for (a, m), group in self.dom.cross.items():
                if c - a < 0 or c - a not in ring:
                    continue
                prev = ring[c - a]
                for mu in range(mu_max + 1):
                    if m and mu == 0:
                        continue
                    self._push(group, prev[mu - m], cur[mu])
            for mu in range(mu_max + 1):
                for group in self.dom.zero_t:
                    self._push(group, cur[mu], cur[mu])
                if self.allowed is not None:
                    cur[mu][~self.allowed(c, mu)] = 0
                if mu < mu_max:
                    self._push(self.dom.zero_m, cur[mu], cur[mu + 1])
            ring[c] = cur
            ring.pop(c - 4, None)
            if keep_layers:
                kept[c] = [x[:, 0].copy() for x in cur]
        return kept if keep_layers else ring[p]


def _hits(final, targets, bits) -> tuple[int, int] | None:
    """First ``(index, mu)`` whose start bit reaches its target in the last layer."""
    targets = np.asarray(targets, dtype=np.int64)
    bits = np.asarray(bits, dtype=np.int64)
    words = bits >> 6
    masks = np.uint64(1) << (bits & 63).astype(np.uint64)
    for mu, layer in enumerate(final):
        ok = (layer[targets, words] & masks) != 0
        if ok.any():
            return int(np.argmax(ok)), mu
    return None


def _backtrack(dom: _Domain, layers, init, goal) -> list[int]:
    """Edge ids of some walk from ``init`` to ``goal`` through reached states."""
    node, c, mu = goal
    path = []
    while (node, c, mu) != init:
        for i in dom.in_order[dom.in_ptr[node] : dom.in_ptr[node + 1]]:
            u, a, m = int(dom.src[i]), int(dom.cols[i]), int(dom.is_m[i])
            pc, pmu = c - a, mu - m
            if pc < 0 or pmu < 0 or not layers[pc][pmu][u]:
                continue
            if a == 0 and m == 0 and dom.pop[u] >= dom.pop[node]:
                continue  # pragma: no cover - zero-column T-edges always add cells
            path.append(int(dom.edge[i]))
            node, c, mu = u, pc, pmu
            break
        else:  # pragma: no cover
            raise AssertionError("reached state without a reached predecessor")
    return path[::-1]


def _words_for(K: int, batch: int, slots: int) -> int:
    need = -(-batch // 64)
    cap = max(1, _SLOT_BYTES // max(1, 8 * K * slots))
    return max(1, min(need, cap, 16))


def cylinder_search(
    width: int,
    period: int,
    mu_max: int,
    *,
    digraph: FringeDigraph | None = None,
    max_work: int = DEFAULT_MAX_WORK,
) -> CylinderWitness | None:
    """A closed walk in F_w absorbing exactly ``period`` columns with at most
    ``mu_max`` monominoes, or ``None`` when none exists.

    ``None`` is a proof of non-existence; running out of ``max_work`` raises
    :class:`SearchBudgetExceeded` instead.
    """
    if period < 1 or mu_max < 0:
        raise ValueError("period must be >= 1 and mu_max >= 0")
    g = digraph or get_digraph(width)
    residue = (width * period) % 4
    feasible = [mu for mu in range(mu_max + 1) if mu % 4 == residue]
    if not feasible:
        return None
    budget = [max_work]

    if 0 in feasible:
        wit = _search_gapless(g, period, budget)
        if wit is not None:
            return wit
    if any(mu >= 1 for mu in feasible):
        return _search_with_gaps(g, period, mu_max, budget)
    return None


def _search_gapless(g, period, budget):
    for comp in t_components(g):
        dom = _Domain(g, comp, t_only=True)
        K = len(comp)
        starts = np.arange(K)
        words = _words_for(K, K, 4)
        batch = 64 * words
        for lo in range(0, K, batch):
            chunk = starts[lo : lo + batch]
            search = _Search(dom, period, 0, max_work=budget[0])
            inits = [(b, int(s), 0, 0) for b, s in enumerate(chunk)]
            final = search.run(inits, words)
            budget[0] -= search.work
            hit = _hits(final, chunk, np.arange(len(chunk)))
            if hit is not None:
                s = int(chunk[hit[0]])
                layers = _Search(dom, period, 0).run([(0, s, 0, 0)], 1, keep_layers=True)
                cyc = _backtrack(dom, layers, (s, 0, 0), (s, period, 0))
                return CylinderWitness(g.width, period, 0, int(comp[s]), cyc)
    return None


def _longest_with_gaps(g: FringeDigraph, k_max: int, reverse: bool):
    """``out[k][v]``: most columns absorbed by walks out of (into) ``v`` using <= k M-edges."""
    base, _ = longest_t_absorption(g, reverse=reverse)
    t, s, d, a = _t_edges(g)
    m = np.flatnonzero(~g.is_t)
    ms, md, ma = g.src[m].astype(np.int64), g.dst[m].astype(np.int64), g.cols[m].astype(np.int64)
    if reverse:
        s, d, ms, md = d, s, md, ms
    out = [base]
    for _ in range(k_max):
        cur = out[-1].copy()
        np.maximum.at(cur, ms, ma + out[-1][md])
        while True:
            nxt = cur.copy()
            np.maximum.at(nxt, s, a + cur[d])
            if np.array_equal(nxt, cur):
                break
            cur = nxt
        out.append(cur)
    return out


def _search_with_gaps(g, period, mu_max, budget):
    from .bounds import t_subgraph_is_cyclic

    m_edges = np.flatnonzero(~g.is_t)
    x = g.src[m_edges].astype(np.int64)
    y = g.dst[m_edges].astype(np.int64)
    a0 = g.cols[m_edges].astype(np.int64)
    keep = a0 <= period
    allowed = None
    if not t_subgraph_is_cyclic(g):
        fwd = _longest_with_gaps(g, mu_max, reverse=False)
        back = _longest_with_gaps(g, mu_max - 1, reverse=True)
        need = period - a0
        keep &= (fwd[mu_max - 1][y] >= need) & (back[mu_max - 1][x] >= need)

        def allowed(c, mu):
            return c + fwd[mu_max - mu] >= period

    cand = np.flatnonzero(keep)
    if not len(cand):
        return None
    dom = _Domain(g, np.arange(g.node_count), t_only=False)
    K = g.node_count
    words = _words_for(K, len(cand), 4 * (mu_max + 1))
    batch = 64 * words
    for lo in range(0, len(cand), batch):
        chunk = cand[lo : lo + batch]
        search = _Search(dom, period, mu_max, allowed, max_work=budget[0])
        inits = [(b, int(y[i]), int(a0[i]), 1) for b, i in enumerate(chunk)]
        final = search.run(inits, words)
        budget[0] -= search.work
        hit = _hits(final, x[chunk], np.arange(len(chunk)))
        if hit is not None:
            i, mu = int(chunk[hit[0]]), hit[1]
            layers = _Search(dom, period, mu_max, allowed).run(
                [(0, int(y[i]), int(a0[i]), 1)], 1, keep_layers=True
            )
            init = (int(y[i]), int(a0[i]), 1)
            cyc = [int(m_edges[i])] + _backtrack(dom, layers, init, (int(x[i]), period, mu))
            return CylinderWitness(g.width, period, mu, int(x[i]), cyc)
    return None
