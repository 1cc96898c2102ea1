"""Exact ground truth: minimum transversal, maximum packing, VC dimension,
and a grid falsifier for candidate-point dominance.

These searches are exponential in the worst case and are guarded by an
:class:`OracleBudget`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from .geometry import Point, RegionFamily, candidate_points, intersection_graph, membership_matrix
from .hypergraph import Hypergraph


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleBudget:
    max_regions: int = 40
    max_candidates: int = 2000
    max_vc_probe: int = 6
    max_nodes: int = 500_000

    def __post_init__(self):
        if min(self.max_regions, self.max_candidates, self.max_vc_probe, self.max_nodes) <= 0:
            raise ValueError("budget fields must be positive")


DEFAULT_BUDGET = OracleBudget()


def _popcount(m: int) -> int:
    return bin(m).count("1")


def _bits(m: int):
    while m:
        low = m & -m
        yield low.bit_length() - 1
        m ^= low


# --- minimum transversal (set cover over candidate points) ------------------


def _maximal_columns(cols: list[int]) -> list[tuple[int, int]]:
    """Inclusion-maximal distinct columns as (mask, first original index)."""
    first: dict[int, int] = {}
    for j, c in enumerate(cols):
        if c and c not in first:
            first[c] = j
    kept: list[tuple[int, int]] = []
    for c in sorted(first, key=_popcount, reverse=True):
        if not any(c & k == c for k, _ in kept):
            kept.append((c, first[c]))
    return kept


def _lp_bound(cols: list[int], rows: int) -> float:
    ids = list(_bits(rows))
    use = [c for c in cols if c & rows]
    a = np.array([[(c >> i) & 1 for c in use] for i in ids], dtype=float)
    res = linprog(np.ones(len(use)), A_ub=-a, b_ub=-np.ones(len(ids)), bounds=(0, None), method="highs")
    return float(res.fun) if res.status == 0 else 0.0


class _SetCover:
    def __init__(self, cols: list[int], n: int, max_nodes: int):
        self.cols = cols
        self.n = n
        self.cover_of = [[j for j, c in enumerate(cols) if (c >> i) & 1] for i in range(n)]
        # co-covered pairs: two regions some column hits together
        self.friends = [0] * n
        for c in cols:
            for i in _bits(c):
                self.friends[i] |= c
        self.best: list[int] = []
        self.nodes = 0
        self.max_nodes = max_nodes
        self.lp_cache: dict[int, int] = {}

    def packing_bound(self, uncovered: int) -> int:
        # regions never co-covered need distinct points
        count, rest = 0, uncovered
        while rest:
            i = min(_bits(rest), key=lambda v: _popcount(self.friends[v] & rest))
            count += 1
            rest &= ~self.friends[i] & ~(1 << i)
        return count

    def lp_bound(self, uncovered: int) -> int:
        if uncovered not in self.lp_cache:
            self.lp_cache[uncovered] = math.ceil(_lp_bound(self.cols, uncovered) - 1e-6)
        return self.lp_cache[uncovered]

    def greedy(self, uncovered: int) -> list[int]:
        chosen = []
        while uncovered:
            j = max(range(len(self.cols)), key=lambda j: (_popcount(self.cols[j] & uncovered), -j))
            chosen.append(j)
            uncovered &= ~self.cols[j]
        return chosen

    def search(self, uncovered: int, chosen: list[int]) -> None:
        self.nodes += 1
        if self.nodes > self.max_nodes:
            raise BudgetExceeded(f"set-cover search exceeded {self.max_nodes} nodes")
        if not uncovered:
            if len(chosen) < len(self.best):
                self.best = list(chosen)
            return
        if len(chosen) + self.packing_bound(uncovered) >= len(self.best):
            return
        if _popcount(uncovered) >= 4 and len(chosen) + self.lp_bound(uncovered) >= len(self.best):
            return
        # branch on the hardest-to-cover region, widest columns first
        r = min(_bits(uncovered), key=lambda i: (len(self.cover_of[i]), i))
        opts = sorted(self.cover_of[r], key=lambda j: (-_popcount(self.cols[j] & uncovered), j))
        for j in opts:
            chosen.append(j)
            self.search(uncovered & ~self.cols[j], chosen)
            chosen.pop()


def min_transversal_exact(f: RegionFamily, budget: OracleBudget = DEFAULT_BUDGET) -> list[Point]:
    """A minimum-cardinality set of candidate points stabbing every region."""
    n = len(f)
    if n > budget.max_regions:
        raise BudgetExceeded(f"{n} regions exceeds oracle budget {budget.max_regions}")
    pts = candidate_points(f)
    if len(pts) > budget.max_candidates:
        raise BudgetExceeded(f"{len(pts)} candidates exceeds oracle budget {budget.max_candidates}")
    mem = membership_matrix(f, pts)
    weights = 1 << np.arange(n, dtype=object)
    raw = [int((mem[:, j] * weights).sum()) for j in range(len(pts))]
    kept = _maximal_columns(raw)
    cols = [c for c, _ in kept]
    sc = _SetCover(cols, n, budget.max_nodes)
    full = (1 << n) - 1
    sc.best = sc.greedy(full)
    if len(sc.best) > sc.lp_bound(full):
        sc.search(full, [])
    return [pts[kept[j][1]] for j in sorted(sc.best)]


# --- maximum packing (independent set in the intersection graph) -----------


def max_packing_exact(f: RegionFamily, budget: OracleBudget = DEFAULT_BUDGET) -> list[int]:
    """Largest pairwise-disjoint subfamily, as sorted region ids."""
    n = len(f)
    if n > budget.max_regions:
        raise BudgetExceeded(f"{n} regions exceeds oracle budget {budget.max_regions}")
    adj = [sum(1 << j for j in nb) for nb in intersection_graph(f)]
    return max_independent_set(adj, budget.max_nodes)


def max_independent_set(adj: list[int], max_nodes: int = DEFAULT_BUDGET.max_nodes) -> list[int]:
    """Branch on a min-degree vertex and its neighbours; bound by a greedy clique cover."""
    n = len(adj)
    closed = [adj[i] | (1 << i) for i in range(n)]
    best: list[int] = []
    nodes = 0

    def clique_cover(p: int) -> int:
        # each clique contributes at most one vertex to an independent set
        count = 0
        while p:
            v = p & -p
            clique = v
            cand = p & adj[v.bit_length() - 1]
            while cand:
                w = cand & -cand
                clique |= w
                cand &= adj[w.bit_length() - 1]
            p &= ~clique
            count += 1
        return count

    def rec(p: int, cur: list[int]) -> None:
        nonlocal best, nodes
        nodes += 1
        if nodes > max_nodes:
            raise BudgetExceeded(f"independent-set search exceeded {max_nodes} nodes")
        if not p:
            if len(cur) > len(best):
                best = list(cur)
            return
        if len(cur) + clique_cover(p) <= len(best):
            return
        v = min(_bits(p), key=lambda i: (_popcount(adj[i] & p), i))
        for w in [v] + list(_bits(adj[v] & p)):
            cur.append(w)
            rec(p & ~closed[w], cur)
            cur.pop()

    rec((1 << n) - 1, [])
    return sorted(best)


# --- VC dimension ----------------------------------------------------------


@dataclass
class VCReport:
    dimension: int
    capped: bool
    witness: tuple[int, ...]


def vc_dimension_exact(h: Hypergraph, probe_cap: int = 6, include_empty: bool = True) -> VCReport:
    """Largest vertex set (up to ``probe_cap``) shattered by edge traces.

    With ``include_empty`` the empty trace is always realised, matching range
    spaces where some range misses every probe point; hypergraphs here never
    store the empty edge.
    """
    if not 0 <= probe_cap <= 8:
        raise ValueError("probe_cap must be in [0, 8]")
    masks = [sum(1 << v for v in e) for e in h.edges]

    def shattered(s: int) -> bool:
        traces = {m & s for m in masks}
        if include_empty:
            traces.add(0)
        return len(traces) == 1 << _popcount(s)

    if not shattered(0):
        return VCReport(-1, False, ())
    level = {0}
    dim, witness = 0, ()
    for size in range(1, probe_cap + 1):
        nxt = set()
        for s in level:
            top = s.bit_length()
            for v in range(top, h.n_vertices):
                t = s | (1 << v)
                # every subset of a shattered set is shattered
                if all((t & ~(1 << u)) in level for u in _bits(t)) and shattered(t):
                    nxt.add(t)
        if not nxt:
            break
        level = nxt
        dim = size
        witness = tuple(_bits(min(nxt)))
    return VCReport(dim, dim == probe_cap, witness)


# --- dominance falsifier ---------------------------------------------------


@dataclass
class GridReport:
    passed: bool
    resolution: int
    grid_signatures: int
    worst_point: Optional[Point]


def signature_grid_check(f: RegionFamily, resolution: int = 200) -> GridReport:
    """Every grid signature must be contained in some candidate's signature."""
    if resolution < 10:
        raise ValueError("resolution must be at least 10")
    x0, y0, x1, y1 = f.bbox()
    dx, dy = (x1 - x0) * 0.05, (y1 - y0) * 0.05
    xs = np.linspace(x0 - dx, x1 + dx, resolution)
    ys = np.linspace(y0 - dy, y1 + dy, resolution)
    gx, gy = np.meshgrid(xs, ys)
    grid = [Point(float(a), float(b)) for a, b in zip(gx.ravel(), gy.ravel())]
    n = len(f)
    weights = 1 << np.arange(n, dtype=object)
    gmem = membership_matrix(f, grid)
    cands = candidate_points(f)
    cmem = membership_matrix(f, cands)
    cand_sigs = {int((cmem[:, j] * weights).sum()) for j in range(len(cands))}
    uniq, first = np.unique(gmem.T, axis=0, return_index=True)
    worst = None
    for col, j in zip(uniq, first):
        g = int((col * weights).sum())
        if g and not any(g & c == g for c in cand_sigs):
            worst = grid[int(j)]
            break
    return GridReport(worst is None, resolution, len(uniq), worst)

