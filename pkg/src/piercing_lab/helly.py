"""Fractional Helly for hypergraphs with a hereditarily linear Delaunay graph.

The certified bound comes from the friend-counting inequality

    (1 - x)^(k-2) * x^2 * |X|  <=  E|E(G')|  <=  c * x * n

where G' is the Delaunay graph of the trace on a random vertex subset that
keeps each vertex with probability x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Optional

import numpy as np

from .hypergraph import Hypergraph, delaunay_edge_counts, friends_pairs, pair_blockers

EXACT_BLOCKER_LIMIT = 12


@dataclass
class HellyReport:
    alpha: float
    k_observed: int
    k_certified: int
    c: float
    beta: float
    n: int
    friend_count: int
    witness: frozenset[int]

    @property
    def sound(self) -> bool:
        return self.k_observed >= self.k_certified


@dataclass
class FriendLemmaReport:
    x: float
    k: int
    friend_count: int
    trials: int
    empirical_mean: float
    stderr: float
    lower_bound: float
    upper_bound_cxn: float
    exact_mean: Optional[float]

    @property
    def lower_ok(self) -> bool:
        return self.lower_bound <= self.empirical_mean + 3 * self.stderr + 1e-12

    @property
    def upper_ok(self) -> bool:
        return self.empirical_mean - 3 * self.stderr <= self.upper_bound_cxn + 1e-12

    @property
    def passed(self) -> bool:
        return self.lower_ok and self.upper_ok


def friend_density(h: Hypergraph) -> float:
    n = h.n_vertices
    if n < 2:
        raise ValueError("friend density needs at least two vertices")
    return len(friends_pairs(h)) / math.comb(n, 2)


def certified_deep_bound(n: int, c: float, x_count: int) -> int:
    """Lower bound on the max edge size given |X| = x_count friend pairs.

    k = 2 forces |X| < cn (all friends are Delaunay edges); k = 3 forces
    |X| <= 4cn (x = 1/2); k >= 4 gives |X| <= 4cn(k-2) via x = 1/(k-2) and
    (1 - 1/m)^m >= 1/4.
    """
    if n < 1 or c <= 0 or x_count < 0:
        raise ValueError("need n >= 1, c > 0 and x_count >= 0")
    if x_count == 0:
        return 1
    if x_count <= c * n:
        return 2
    if x_count <= 4 * c * n:
        return 3
    return math.floor(x_count / (4 * c * n)) + 2


def deep_edge(h: Hypergraph, c: float = 3.0) -> HellyReport:
    if h.n_vertices < 2:
        raise ValueError("deep_edge needs at least two vertices")
    if not h.edges:
        raise ValueError("edgeless hypergraph has no deep edge")
    witness = max(h.edges, key=lambda e: (len(e), sorted(e)))
    x_count = len(friends_pairs(h))
    n = h.n_vertices
    kc = certified_deep_bound(n, c, x_count)
    return HellyReport(
        alpha=x_count / math.comb(n, 2),
        k_observed=len(witness),
        k_certified=kc,
        c=c,
        beta=kc / n,
        n=n,
        friend_count=x_count,
        witness=witness,
    )


def exact_delaunay_expectation(h: Hypergraph, x: float, blockers=None) -> Optional[float]:
    """E|E(G')| by inclusion-exclusion; None when some pair has too many blockers."""
    if blockers is None:
        blockers = pair_blockers(h)
    total = 0.0
    for rests in blockers.values():
        if len(rests) > EXACT_BLOCKER_LIMIT:
            return None
        p_free = 0.0
        for size in range(1, len(rests) + 1):
            sign = 1.0 if size % 2 else -1.0
            for group in combinations(rests, size):
                union = 0
                for r in group:
                    union |= r
                p_free += sign * (1 - x) ** bin(union).count("1")
        total += x * x * p_free
    return total


def validate_friend_lemma(
    h: Hypergraph,
    x: float,
    trials: int = 10_000,
    seed: int = 0,
    c: float = 3.0,
) -> FriendLemmaReport:
    """Monte-Carlo check of the friend-counting sandwich on random traces."""
    if not 0 < x < 1:
        raise ValueError("x must lie in (0, 1)")
    if trials < 1:
        raise ValueError("trials must be positive")
    n = h.n_vertices
    k = h.max_edge_size
    x_count = len(friends_pairs(h))
    blockers = pair_blockers(h)
    rng = np.random.default_rng(seed)
    weights = np.left_shift(np.int64(1), np.arange(n, dtype=np.int64))
    subsets = ((rng.random((trials, n)) < x) * weights).sum(axis=1)
    counts = delaunay_edge_counts(h, subsets, blockers).astype(float)
    mean = float(counts.mean())
    stderr = float(counts.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    lower = (1 - x) ** max(k - 2, 0) * x * x * x_count
    return FriendLemmaReport(
        x=x,
        k=k,
        friend_count=x_count,
        trials=trials,
        empirical_mean=mean,
        stderr=stderr,
        lower_bound=lower,
        upper_bound_cxn=c * x * n,
        exact_mean=exact_delaunay_expectation(h, x, blockers),
    )
