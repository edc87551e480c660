"""Construction of the fringe digraph F_w.

Nodes are canonical fringes, numbered in breadth-first discovery order from
the empty fringe (node 0).  Edges are kept in CSR form sorted by source and,
within a source, by placement code (the four T orientations, then the
monomino), so an edge id is simply its CSR position.
"""
from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .geometry import (
    FRINGE_COLUMNS,
    MONOMINO_CODE,
    ORIENTATIONS,
    CellCoord,
    Fringe,
    Kind,
    Placement,
    check_width,
    placement_from_code,
)

log = logging.getLogger(__name__)

DIGRAPH_WIDTH_CAP = 17
MEMORY_ENV = "GAPNUM_MAX_MEM_MB"


class CapacityError(RuntimeError):
    """A request exceeds the configured width, length or memory limits."""


def memory_cap_bytes() -> int:
    """Soft memory cap: ``$GAPNUM_MAX_MEM_MB`` or 75% of physical memory."""
    env = os.environ.get(MEMORY_ENV)
    if env:
        try:
            return int(float(env) * 2**20)
        except ValueError:
            raise CapacityError(f"{MEMORY_ENV}={env!r} is not a number") from None
    try:
        return int(os.sysconf("SC_PHYS_PAGES") * os.sysconf("SC_PAGE_SIZE") * 0.75)
    except (ValueError, OSError, AttributeError):  # pragma: no cover - non-POSIX
        return 8 * 2**30


def _shape_masks(width: int) -> list[tuple[int, int, int]]:
    """``(mask, row_min, row_max)`` per placement code, relative to the target cell."""
    out = []
    for o in ORIENTATIONS:
        lc, lr = o.lead
        cells = [(dc - lc, dr - lr) for dc, dr in o.offsets]
        rmin = min(r for _, r in cells)
        rmax = max(r for _, r in cells)
        mask = 0
        for c, r in cells:
            mask |= 1 << (c * width + r - rmin)
        out.append((mask, rmin, rmax))
    out.append((1, 0, 0))
    return out


def _lowest_zero_row(keys: np.ndarray) -> np.ndarray:
    low = ~keys & (keys + np.uint64(1))
    return np.bitwise_count(low - np.uint64(1)).astype(np.int64)


@dataclass(frozen=True, eq=False)
class FringeDigraph:
    width: int
    keys: np.ndarray  # uint64 fringe bits per node id
    offsets: np.ndarray  # int64, CSR row pointer
    dst: np.ndarray  # int32
    code: np.ndarray  # int8 placement code, MONOMINO_CODE for M-edges
    cols: np.ndarray  # int8 columns absorbed

    @property
    def node_count(self) -> int:
        return len(self.keys)

    @property
    def edge_count(self) -> int:
        return len(self.dst)

    @cached_property
    def src(self) -> np.ndarray:
        return np.repeat(np.arange(self.node_count, dtype=np.int32), np.diff(self.offsets))

    @cached_property
    def is_t(self) -> np.ndarray:
        return self.code != MONOMINO_CODE

    @cached_property
    def target_rows(self) -> np.ndarray:
        return _lowest_zero_row(self.keys) + 1

    @cached_property
    def popcount(self) -> np.ndarray:
        return np.bitwise_count(self.keys).astype(np.int16)

    @cached_property
    def _key_index(self) -> tuple[np.ndarray, np.ndarray]:
        order = np.argsort(self.keys, kind="stable")
        return self.keys[order], order

    def fringe(self, node: int) -> Fringe:
        return Fringe(self.width, int(self.keys[node]))

    def node_id(self, f: Fringe) -> int:
        if f.width != self.width:
            raise ValueError(f"fringe width {f.width} != digraph width {self.width}")
        sk, order = self._key_index
        i = int(np.searchsorted(sk, np.uint64(f.bits)))
        if i == len(sk) or int(sk[i]) != f.bits:
            raise KeyError(f"fringe 0x{f.hex()} is not a node of F_{self.width}")
        return int(order[i])

    def out_edges(self, node: int) -> range:
        return range(int(self.offsets[node]), int(self.offsets[node + 1]))

    def edge_placement(self, e: int) -> Placement:
        """Fringe-relative placement carried by edge ``e``."""
        row = int(self.target_rows[self.src[e]])
        return placement_from_code(int(self.code[e]), CellCoord(1, row))

    def edge_kind(self, e: int) -> Kind:
        return Kind.T if self.code[e] != MONOMINO_CODE else Kind.MONOMINO

    def to_dict(self) -> dict:
        src = self.src
        nodes = [{"id": i, "fringe": format(int(k), "x")} for i, k in enumerate(self.keys)]
        edges = []
        for e in range(self.edge_count):
            edges.append(
                {
                    "from": int(src[e]),
                    "to": int(self.dst[e]),
                    "kind": self.edge_kind(e).value,
                    "cols": int(self.cols[e]),
                    "placement": self.edge_placement(e).to_dict(),
                }
            )
        return {"width": self.width, "nodes": nodes, "edges": edges}

    def __eq__(self, other):
        if not isinstance(other, FringeDigraph):
            return NotImplemented
        return self.width == other.width and all(
            np.array_equal(getattr(self, a), getattr(other, a))
            for a in ("keys", "offsets", "dst", "code", "cols")
        )

    __hash__ = None


def build_fringe_digraph(width: int, *, max_bytes: int | None = None) -> FringeDigraph:
    """Close ``{empty fringe}`` under every legal placement, breadth first."""
    check_width(width)
    if width > DIGRAPH_WIDTH_CAP:
        raise CapacityError(f"width {width} is above the digraph width cap {DIGRAPH_WIDTH_CAP}")
    cap = memory_cap_bytes() if max_bytes is None else max_bytes
    try:
        return _build(width, cap)
    except MemoryError:
        raise CapacityError(f"out of memory while building F_{width}") from None


def _build(w: int, cap: int) -> FringeDigraph:
    full = np.uint64((1 << w) - 1)
    shift = np.uint64(w)
    shapes = [(np.uint64(m), lo, hi) for m, lo, hi in _shape_masks(w)]

    frontier = np.zeros(1, dtype=np.uint64)
    level_keys = [frontier]
    known_keys = frontier.copy()  # sorted
    known_ids = np.zeros(1, dtype=np.int64)
    next_id = 1
    dst_parts, code_parts, cols_parts, deg_parts = [], [], [], []
    held = 0

    while len(frontier):
        rows = _lowest_zero_row(frontier)
        cand, srcs, codes, absorbed = [], [], [], []
        for code, (mask, lo, hi) in enumerate(shapes):
            idx = np.flatnonzero((rows + lo >= 0) & (rows + hi < w))
            pm = mask << (rows[idx] + lo).astype(np.uint64)
            ok = (frontier[idx] & pm) == 0
            idx = idx[ok]
            nxt = frontier[idx] | pm[ok]
            flushed = np.zeros(len(nxt), dtype=np.int8)
            for _ in range(FRINGE_COLUMNS):
                f = (nxt & full) == full
                nxt = np.where(f, nxt >> shift, nxt)
                flushed += f
            cand.append(nxt)
            srcs.append(idx)
            codes.append(np.full(len(nxt), code, dtype=np.int8))
            absorbed.append(flushed)
        cand = np.concatenate(cand)
        srcs = np.concatenate(srcs)
        codes = np.concatenate(codes)
        absorbed = np.concatenate(absorbed)
        order = np.lexsort((codes, srcs))
        cand, srcs, codes, absorbed = cand[order], srcs[order], codes[order], absorbed[order]

        uniq, first, inverse = np.unique(cand, return_index=True, return_inverse=True)
        pos = np.minimum(np.searchsorted(known_keys, uniq), len(known_keys) - 1)
        seen = known_keys[pos] == uniq
        ids = np.empty(len(uniq), dtype=np.int64)
        ids[seen] = known_ids[pos[seen]]
        fresh = np.flatnonzero(~seen)
        fresh = fresh[np.argsort(first[fresh], kind="stable")]
        ids[fresh] = np.arange(next_id, next_id + len(fresh))
        next_id += len(fresh)

        dst_parts.append(ids[inverse].astype(np.int32))
        code_parts.append(codes)
        cols_parts.append(absorbed)
        deg_parts.append(np.bincount(srcs, minlength=len(frontier)))

        frontier = uniq[fresh]
        level_keys.append(frontier)
        merged = np.concatenate([known_keys, frontier])
        merged_ids = np.concatenate([known_ids, ids[fresh]])
        o = np.argsort(merged, kind="stable")
        known_keys, known_ids = merged[o], merged_ids[o]

        held += sum(a.nbytes for a in (dst_parts[-1], codes, absorbed)) + 24 * len(frontier)
        workspace = 40 * len(cand) + 16 * len(known_keys)
        if held + workspace > cap:
            raise CapacityError(
                f"F_{w} exceeds the memory cap of {cap / 2**20:.0f} MB after {next_id} nodes "
                f"(set {MEMORY_ENV} to raise it)"
            )

    keys = np.concatenate(level_keys)
    deg = np.concatenate(deg_parts)
    offsets = np.zeros(len(keys) + 1, dtype=np.int64)
    np.cumsum(deg, out=offsets[1:])
    g = FringeDigraph(
        width=w,
        keys=keys,
        offsets=offsets,
        dst=np.concatenate(dst_parts),
        code=np.concatenate(code_parts),
        cols=np.concatenate(cols_parts),
    )
    log.info("built F_%d: %d nodes, %d edges", w, g.node_count, g.edge_count)
    return g


_CACHE: dict[int, FringeDigraph] = {}
_CACHE_SIZE = 3


def get_digraph(width: int) -> FringeDigraph:
    """Memoized :func:`build_fringe_digraph` holding the most recent few widths."""
    g = _CACHE.pop(width, None)
    if g is None:
        g = build_fringe_digraph(width)
    _CACHE[width] = g
    while len(_CACHE) > _CACHE_SIZE:
        _CACHE.pop(next(iter(_CACHE)))
    return g


def clear_cache():
    _CACHE.clear()


@dataclass(frozen=True)
class DigraphStats:
    width: int
    node_count: int
    t_edge_count: int
    m_edge_count: int
    max_out_degree: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def digraph_stats(g: FringeDigraph) -> DigraphStats:
    t = int(np.count_nonzero(g.is_t))
    return DigraphStats(
        width=g.width,
        node_count=g.node_count,
        t_edge_count=t,
        m_edge_count=g.edge_count - t,
        max_out_degree=int(np.diff(g.offsets).max()),
    )


def export_digraph(g: FringeDigraph, fp=None) -> str | None:
    """Serialize to JSON; writes to ``fp`` (path or file object) when given."""
    doc = g.to_dict()
    if fp is None:
        return json.dumps(doc)
    if isinstance(fp, (str, os.PathLike)):
        with open(fp, "w") as fh:
            json.dump(doc, fh)
    else:
        json.dump(doc, fp)
    return None


def import_digraph(source) -> FringeDigraph:
    """Inverse of :func:`export_digraph`; accepts a dict, JSON text, path or file object."""
    if isinstance(source, dict):
        doc = source
    elif isinstance(source, os.PathLike) or (isinstance(source, str) and not source.lstrip().startswith("{")):
        with open(source) as fh:
            doc = json.load(fh)
    elif isinstance(source, str):
        doc = json.loads(source)
    else:
        doc = json.load(source)

    w = check_width(int(doc["width"]))
    nodes = sorted(doc["nodes"], key=lambda n: n["id"])
    if [n["id"] for n in nodes] != list(range(len(nodes))):
        raise ValueError("node ids must be dense and start at 0")
    keys = np.array([int(n["fringe"], 16) for n in nodes], dtype=np.uint64)
    edges = doc["edges"]
    src = np.array([e["from"] for e in edges], dtype=np.int64)
    if len(src) and np.any(np.diff(src) < 0):
        raise ValueError("edges must be grouped by source node")
    code = np.empty(len(edges), dtype=np.int8)
    for i, e in enumerate(edges):
        p = Placement.from_dict(e["placement"])
        if p.kind.value != e["kind"]:
            raise ValueError(f"edge {i}: kind {e['kind']!r} disagrees with its placement")
        code[i] = p.code
    offsets = np.zeros(len(keys) + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=len(keys)), out=offsets[1:])
    return FringeDigraph(
        width=w,
        keys=keys,
        offsets=offsets,
        dst=np.array([e["to"] for e in edges], dtype=np.int32),
        code=code,
        cols=np.array([e["cols"] for e in edges], dtype=np.int8),
    )
