"""Hypergraphs, primal/dual construction from region families, Delaunay graphs.

Vertex subsets are handled internally as integer bitmasks so that Delaunay
edge counts of many trace subhypergraphs can be evaluated at once with numpy.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Optional, Sequence

import numpy as np

from .geometry import Point, RegionFamily, arc_midpoints, candidate_points, membership_matrix

EXHAUSTIVE_LIMIT = 20
MASK_LIMIT = 62


@dataclass(frozen=True)
class Graph:
    n_vertices: int
    edges: frozenset[frozenset[int]]

    def __post_init__(self):
        for e in self.edges:
            if len(e) != 2:
                raise ValueError(f"graph edge {set(e)} is not a pair")


@dataclass(frozen=True)
class Hypergraph:
    """H = (V, E) with V = {0..n_vertices-1}; edges are distinct non-empty sets."""

    n_vertices: int
    edges: frozenset[frozenset[int]]
    vertex_labels: Optional[tuple[int, ...]] = field(default=None, compare=False)

    def __post_init__(self):
        edges = frozenset(frozenset(e) for e in self.edges)
        object.__setattr__(self, "edges", edges)
        for e in edges:
            if not e:
                raise ValueError("empty hyperedge")
            if min(e) < 0 or max(e) >= self.n_vertices:
                raise ValueError(f"hyperedge {set(e)} outside vertex range")

    @classmethod
    def from_edges(cls, n_vertices: int, edges: Iterable[Iterable[int]], vertex_labels=None) -> Hypergraph:
        es = frozenset(frozenset(e) for e in edges)
        return cls(n_vertices, frozenset(e for e in es if e), vertex_labels)

    @property
    def max_edge_size(self) -> int:
        return max((len(e) for e in self.edges), default=0)

    @cached_property
    def masks(self) -> np.ndarray:
        if self.n_vertices > MASK_LIMIT:
            raise ValueError(f"bitmask routines support at most {MASK_LIMIT} vertices")
        return np.array(sorted(_to_mask(e) for e in self.edges), dtype=np.int64)

    def maximal(self) -> Hypergraph:
        es = sorted(self.edges, key=len, reverse=True)
        kept: list[frozenset[int]] = []
        for e in es:
            if not any(e <= k for k in kept):
                kept.append(e)
        return Hypergraph(self.n_vertices, frozenset(kept), self.vertex_labels)


@dataclass(frozen=True)
class HypergraphStats:
    n: int
    k: int
    friend_count: int
    c: float


@dataclass
class LinearityReport:
    passed: bool
    mode: str
    subsets_checked: int
    worst_subset: tuple[int, ...]
    worst_edges: int
    worst_ratio: float


def _to_mask(vs: Iterable[int]) -> int:
    m = 0
    for v in vs:
        m |= 1 << v
    return m


def _from_mask(m: int) -> tuple[int, ...]:
    out, i = [], 0
    while m:
        if m & 1:
            out.append(i)
        m >>= 1
        i += 1
    return tuple(out)


def _signatures(mem: np.ndarray) -> set[frozenset[int]]:
    sigs = set()
    for col in np.unique(mem.T, axis=0):
        s = frozenset(np.flatnonzero(col).tolist())
        if s:
            sigs.add(s)
    return sigs


def dual_hypergraph(f: RegionFamily, maximal: bool = False) -> Hypergraph:
    """Depth-cell signatures {regions containing x} over all plane points x.

    Signatures are read off at anchors, boundary crossings (vertices of the
    arrangement) and one point per boundary arc; the face just outside an
    arc has the arc's signature minus the arc's owner.
    """
    cands = candidate_points(f)
    arcs = arc_midpoints(f)
    sigs = _signatures(membership_matrix(f, cands))
    arc_mem = membership_matrix(f, [p for _, p in arcs])
    for j, (owner, _) in enumerate(arcs):
        inside = frozenset(np.flatnonzero(arc_mem[:, j]).tolist())
        for s in (inside, inside - {owner}):
            if s:
                sigs.add(s)
    h = Hypergraph(len(f), frozenset(sigs), tuple(range(len(f))))
    return h.maximal() if maximal else h


def primal_hypergraph(points: Sequence[Point], f: RegionFamily) -> Hypergraph:
    if not points:
        raise ValueError("primal hypergraph needs at least one point")
    mem = membership_matrix(f, points)
    edges = {frozenset(np.flatnonzero(row).tolist()) for row in mem}
    return Hypergraph.from_edges(len(points), edges, tuple(range(len(points))))


def delaunay_graph(h: Hypergraph) -> Graph:
    return Graph(h.n_vertices, frozenset(e for e in h.edges if len(e) == 2))


def induced(h: Hypergraph, s: Iterable[int]) -> Hypergraph:
    """Trace of ``h`` on ``s``, reindexed; labels map new ids to original ones."""
    keep = sorted(set(s))
    if not keep:
        raise ValueError("induced subhypergraph needs a non-empty vertex subset")
    if keep[0] < 0 or keep[-1] >= h.n_vertices:
        raise ValueError("subset outside vertex range")
    index = {v: i for i, v in enumerate(keep)}
    edges = {frozenset(index[v] for v in e if v in index) for e in h.edges}
    labels = h.vertex_labels or tuple(range(h.n_vertices))
    return Hypergraph.from_edges(len(keep), edges, tuple(labels[v] for v in keep))


def friends_pairs(h: Hypergraph) -> set[frozenset[int]]:
    out: set[frozenset[int]] = set()
    for e in h.maximal().edges:
        out.update(frozenset(p) for p in combinations(sorted(e), 2))
    return out


def stats(h: Hypergraph, c: float = 3.0) -> HypergraphStats:
    return HypergraphStats(h.n_vertices, h.max_edge_size, len(friends_pairs(h)), c)


# --- batched Delaunay edge counts over trace subhypergraphs -----------------


def _minimal_masks(ms: np.ndarray) -> list[int]:
    kept: list[int] = []
    for m in sorted(set(ms.tolist()), key=lambda v: bin(v).count("1")):
        if not any(m & k == k for k in kept):
            kept.append(m)
    return kept


def pair_blockers(h: Hypergraph) -> dict[tuple[int, int], list[int]]:
    """For each friend pair, the minimal sets R = e minus the pair over edges e containing it.

    {u, v} is a Delaunay edge of the trace on S iff u, v are in S and some R avoids S.
    """
    masks = h.masks
    out = {}
    for pr in sorted(tuple(sorted(p)) for p in friends_pairs(h)):
        pm = (1 << pr[0]) | (1 << pr[1])
        sel = masks[(masks & pm) == pm]
        out[pr] = _minimal_masks(sel & ~np.int64(pm))
    return out


def delaunay_edge_counts(h: Hypergraph, subsets: np.ndarray, blockers=None) -> np.ndarray:
    """|E(Delaunay(h|S))| for every bitmask S in ``subsets``."""
    subsets = np.asarray(subsets, dtype=np.int64)
    if blockers is None:
        blockers = pair_blockers(h)
    counts = np.zeros(subsets.shape, dtype=np.int64)
    for (u, v), rests in blockers.items():
        pm = np.int64((1 << u) | (1 << v))
        has_pair = (subsets & pm) == pm
        free = np.zeros(subsets.shape, dtype=bool)
        for r in rests:
            free |= (subsets & np.int64(r)) == 0
        counts += has_pair & free
    return counts


def _popcount(a: np.ndarray) -> np.ndarray:
    a = a.astype(np.uint64)
    out = np.zeros(a.shape, dtype=np.int64)
    while np.any(a):
        out += (a & np.uint64(1)).astype(np.int64)
        a = a >> np.uint64(1)
    return out


def check_hereditary_linearity(
    h: Hypergraph,
    c: float,
    mode: str = "auto",
    trials: int = 2000,
    seed: int = 0,
) -> LinearityReport:
    """Test |E(Delaunay(h|S))| < c|S| over subsets S.

    ``exhaustive`` covers every non-empty S (a certificate); ``sampled`` draws
    random subsets plus the full set (a falsifier only). ``auto`` is exhaustive
    for n <= 15.
    """
    if c <= 0:
        raise ValueError("c must be positive")
    n = h.n_vertices
    if mode == "auto":
        mode = "exhaustive" if n <= 15 else "sampled"
    if mode == "exhaustive":
        if n > EXHAUSTIVE_LIMIT:
            raise ValueError(f"exhaustive check refused for n={n} > {EXHAUSTIVE_LIMIT}")
        subsets = np.arange(1, 1 << n, dtype=np.int64)
    elif mode == "sampled":
        rng = np.random.default_rng(seed)
        probs = rng.uniform(0.05, 1.0, size=(trials, 1))
        bits = rng.random((trials, n)) < probs
        weights = np.left_shift(np.int64(1), np.arange(n, dtype=np.int64))
        subsets = np.unique(np.concatenate([(bits * weights).sum(axis=1), [(1 << n) - 1]]))
        subsets = subsets[subsets != 0]
    else:
        raise ValueError(f"unknown mode {mode!r}")
    counts = delaunay_edge_counts(h, subsets)
    sizes = _popcount(subsets)
    ratios = counts / sizes
    worst = int(np.argmax(ratios))
    return LinearityReport(
        passed=bool(np.all(counts < c * sizes)),
        mode=mode,
        subsets_checked=int(len(subsets)),
        worst_subset=_from_mask(int(subsets[worst])),
        worst_edges=int(counts[worst]),
        worst_ratio=float(ratios[worst]),
    )


def edge_count_bound_ok(h: Hypergraph, c: float = 3.0) -> bool:
    return len(delaunay_graph(h).edges) < c * h.n_vertices
