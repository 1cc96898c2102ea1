"""(p,2) piercing: packing checks, the covering LP, epsilon-net rounding and
the greedy neighbourhood-removal scheme.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linprog

from . import oracle
from .geometry import Point, RegionFamily, candidate_points, intersection_graph, membership_matrix

EXACT_PACKING_LIMIT = 40
EXACT_COVER_LIMIT = 25
FEAS_TOL = 1e-9
GAP_TOL = 1e-6


class LPError(RuntimeError):
    pass


class NetError(RuntimeError):
    pass


class TransversalError(RuntimeError):
    pass


@dataclass(frozen=True)
class WeightedPointSet:
    points: tuple[Point, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if len(self.points) != len(self.weights):
            raise ValueError("one weight per point required")
        if any(w < 0 or not math.isfinite(w) for w in self.weights):
            raise ValueError("weights must be finite and non-negative")
        if self.points and sum(self.weights) <= 0:
            raise ValueError("total weight must be positive")

    def probabilities(self) -> np.ndarray:
        w = np.asarray(self.weights, dtype=float)
        return w / w.sum()


@dataclass
class LPSolution:
    points: list[Point]
    primal_weights: np.ndarray
    dual_weights: np.ndarray
    primal_value: float
    dual_value: float
    primal_residual: float
    dual_residual: float

    @property
    def gap(self) -> float:
        return self.primal_value - self.dual_value

    @property
    def tau(self) -> float:
        return self.primal_value

    @property
    def converged(self) -> bool:
        return self.primal_residual <= FEAS_TOL and self.dual_residual <= FEAS_TOL and abs(self.gap) <= GAP_TOL

    def multiset(self) -> WeightedPointSet:
        """The weighted point set Q; each region carries at least 1/tau of its mass."""
        keep = np.flatnonzero(self.primal_weights > 0)
        return WeightedPointSet(
            tuple(self.points[j] for j in keep), tuple(self.primal_weights[keep] / self.primal_value)
        )


@dataclass
class NetResult:
    points: list[Point]
    indices: list[int]
    rounds: int
    sample_size: int


@dataclass
class TransversalReport:
    p: int
    method: str
    tau_points: list[Point]
    nu: Optional[int] = None
    tau_frac: Optional[float] = None
    iterations: Optional[int] = None
    selected: list[int] = field(default_factory=list)
    net_rounds: Optional[int] = None
    timings_ms: dict[str, float] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.tau_points)


# --- packing ----------------------------------------------------------------


def _adjacency_masks(f: RegionFamily) -> list[int]:
    return [sum(1 << j for j in nb) for nb in intersection_graph(f)]


def _bits(m: int):
    while m:
        low = m & -m
        yield low.bit_length() - 1
        m ^= low


def _max_clique(comp: list[int], within: int) -> list[int]:
    """Maximum clique of the graph ``comp`` inside vertex set ``within``.

    Branch and bound with a greedy colouring bound; vertices are expanded in
    decreasing colour order.
    """
    best: list[int] = []

    def colour_sort(p: int) -> tuple[list[int], list[int]]:
        order, colours = [], []
        uncoloured, colour = p, 0
        while uncoloured:
            colour += 1
            avail = uncoloured
            while avail:
                v = (avail & -avail).bit_length() - 1
                avail &= ~comp[v] & ~(1 << v)
                uncoloured &= ~(1 << v)
                order.append(v)
                colours.append(colour)
        return order, colours

    def expand(r: list[int], p: int) -> None:
        nonlocal best
        order, colours = colour_sort(p)
        for idx in range(len(order) - 1, -1, -1):
            if len(r) + colours[idx] <= len(best):
                return
            v = order[idx]
            sub = p & comp[v]
            if sub:
                expand(r + [v], sub)
            elif len(r) + 1 > len(best):
                best = r + [v]
            p &= ~(1 << v)

    if within:
        expand([], within)
    return sorted(best)


def _disjoint_graph(adj: list[int]) -> list[int]:
    full = (1 << len(adj)) - 1
    return [full & ~adj[i] & ~(1 << i) for i in range(len(adj))]


def _greedy_packing(adj: list[int], within: int) -> list[int]:
    chosen, rest = [], within
    while rest:
        v = min(_bits(rest), key=lambda i: (bin(adj[i] & rest).count("1"), i))
        chosen.append(v)
        rest &= ~adj[v] & ~(1 << v)
    return chosen


def packing_number(f: RegionFamily, mode: str = "exact") -> int:
    """Size of a largest pairwise-disjoint subfamily (``greedy`` gives a lower bound)."""
    n = len(f)
    adj = _adjacency_masks(f)
    full = (1 << n) - 1
    if mode == "greedy":
        return len(_greedy_packing(adj, full))
    if mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")
    if n > EXACT_PACKING_LIMIT:
        raise oracle.BudgetExceeded(f"exact packing refused for n={n} > {EXACT_PACKING_LIMIT}")
    return len(_max_clique(_disjoint_graph(adj), full))


def check_p2(f: RegionFamily, p: int) -> bool:
    """Among any p regions some two intersect."""
    if p < 2:
        raise ValueError("p must be at least 2")
    if p > len(f):
        return True
    return packing_number(f, "exact") <= p - 1


def turan_intersection_bound(n: int, p: int) -> int:
    """Fewest intersecting pairs a (p,2) family of n regions can have.

    The disjointness graph is K_p-free, so by Turan it has at most
    (1 - 1/(p-1)) n^2 / 2 edges.
    """
    if not 2 <= p <= n + 1:
        raise ValueError("need 2 <= p <= n + 1")
    return math.ceil(Fraction(n * n, 2 * (p - 1)) - Fraction(n, 2))


def intersecting_pairs(f: RegionFamily) -> int:
    return sum(len(nb) for nb in intersection_graph(f)) // 2


# --- covering LP --------------------------------------------------------------


def fractional_transversal(f: RegionFamily, points: Optional[Sequence[Point]] = None) -> LPSolution:
    """min sum(y) s.t. every region holds weight >= 1, with the dual packing.

    Columns with duplicate or dominated signatures are dropped before solving;
    the solution is then rescaled so both sides are feasible to rounding.
    """
    pts = list(points) if points is not None else candidate_points(f)
    n, m = len(f), len(pts)
    mem = membership_matrix(f, pts)
    if not mem.any(axis=1).all():
        raise LPError("some region contains no candidate point")
    cols = {}
    for j in range(m):
        cols.setdefault(mem[:, j].tobytes(), j)
    keep = _undominated([j for j in cols.values()], mem)
    a = mem[:, keep].astype(float)
    res = linprog(
        np.ones(len(keep)),
        A_ub=-a,
        b_ub=-np.ones(n),
        bounds=(0, None),
        method="highs",
        options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10},
    )
    if res.status != 0:
        raise LPError(f"covering LP failed: {res.message}")
    y = np.zeros(m)
    y[keep] = np.clip(res.x, 0, None)
    z = np.clip(-res.ineqlin.marginals, 0, None)
    full = mem.astype(float)
    cover = full @ y
    if cover.min() < 1:
        y /= cover.min()
    load = full.T @ z
    if load.max() > 1:
        z /= load.max()
    cover, load = full @ y, full.T @ z
    sol = LPSolution(
        points=pts,
        primal_weights=y,
        dual_weights=z,
        primal_value=float(y.sum()),
        dual_value=float(z.sum()),
        primal_residual=float(max(0.0, 1 - cover.min())),
        dual_residual=float(max(0.0, load.max() - 1)),
    )
    return sol


def _undominated(cols: list[int], mem: np.ndarray) -> list[int]:
    order = sorted(cols, key=lambda j: (-int(mem[:, j].sum()), j))
    kept: list[int] = []
    for j in order:
        c = mem[:, j]
        if not any(np.all(mem[:, k] >= c) for k in kept):
            kept.append(j)
    return sorted(kept)


# --- epsilon nets -----------------------------------------------------------------


def epsilon_net(
    q: WeightedPointSet,
    f: RegionFamily,
    eps: float,
    seed: int = 0,
    kappa: float = 8.0,
    max_rounds: int = 10,
) -> NetResult:
    """Sample-and-verify net: every region with q-mass >= eps gets a sampled point.

    Draws ceil(kappa/eps * ln(2/eps)) points i.i.d. from q, doubling the
    sample on failure.
    """
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    if not q.points:
        raise ValueError("empty weighted point set")
    prob = q.probabilities()
    mem = membership_matrix(f, q.points)
    heavy = mem.astype(float) @ prob >= eps - 1e-12
    rng = np.random.default_rng(seed)
    size = math.ceil(kappa / eps * math.log(2 / eps))
    for rnd in range(1, max_rounds + 1):
        idx = np.unique(rng.choice(len(prob), size=size, p=prob))
        hit = mem[:, idx].any(axis=1)
        if np.all(hit | ~heavy):
            return NetResult([q.points[j] for j in idx], idx.tolist(), rnd, size)
        size *= 2
    missed = np.flatnonzero(heavy & ~hit).tolist()
    raise NetError(f"no verified net after {max_rounds} rounds (eps={eps:.4g}, last size {size // 2}, missed {missed})")


def _prune(mem: np.ndarray, idx: list[int], weights: np.ndarray) -> list[int]:
    """Drop net points (lightest first) while every region stays stabbed."""
    keep = list(idx)
    for j in sorted(idx, key=lambda j: (weights[j], j)):
        trial = [k for k in keep if k != j]
        if trial and mem[:, trial].any(axis=1).all():
            keep = trial
    return sorted(keep)


def stabs_all(f: RegionFamily, points: Sequence[Point]) -> bool:
    return bool(points) and bool(membership_matrix(f, points).any(axis=1).all())


def pierce_p2(
    f: RegionFamily,
    p: int,
    seed: int = 0,
    assume_p2: bool = False,
    prune: bool = True,
    kappa: float = 8.0,
) -> TransversalReport:
    """Covering LP, then an epsilon-net of its weights with eps = 1/tau*."""
    nu = None
    if not assume_p2:
        nu = packing_number(f, "exact")
        if nu > p - 1:
            raise ValueError(f"family violates the ({p},2)-property: {nu} pairwise disjoint regions")
    t0 = time.perf_counter()
    lp = fractional_transversal(f)
    if not lp.converged:
        raise LPError(
            f"LP did not meet tolerances: gap={lp.gap:.3g}, residuals={lp.primal_residual:.3g}/{lp.dual_residual:.3g}"
        )
    t1 = time.perf_counter()
    q = lp.multiset()
    eps = min(1.0, 1.0 / lp.tau)
    net = epsilon_net(q, f, eps, seed=seed, kappa=kappa)
    pts = net.points
    if prune:
        mem = membership_matrix(f, q.points)
        kept = _prune(mem, net.indices, np.asarray(q.weights))
        pts = [q.points[j] for j in kept]
    t2 = time.perf_counter()
    if not stabs_all(f, pts):
        raise TransversalError("pipeline output misses a region")
    return TransversalReport(
        p=p,
        method="pipeline",
        tau_points=pts,
        nu=nu,
        tau_frac=lp.tau,
        net_rounds=net.rounds,
        timings_ms={"lp": (t1 - t0) * 1e3, "net": (t2 - t1) * 1e3},
    )


def greedy_pierce(f: RegionFamily, p: int, seed: int = 0, assume_p2: bool = False) -> TransversalReport:
    """Repeatedly pierce and remove the closed neighbourhood N[B] of the region B
    whose neighbourhood has the smallest packing number.
    """
    n = len(f)
    t0 = time.perf_counter()
    adj = _adjacency_masks(f)
    disjoint = _disjoint_graph(adj)
    nu = None
    if not assume_p2:
        nu = len(_max_clique(disjoint, (1 << n) - 1)) if n <= EXACT_PACKING_LIMIT else None
        if nu is None:
            raise oracle.BudgetExceeded(f"exact packing refused for n={n} > {EXACT_PACKING_LIMIT}")
        if nu > p - 1:
            raise ValueError(f"family violates the ({p},2)-property: {nu} pairwise disjoint regions")
    remaining = (1 << n) - 1
    points: list[Point] = []
    selected: list[int] = []
    while remaining:
        best_key, best_b = None, -1
        for b in _bits(remaining):
            nb = (adj[b] | (1 << b)) & remaining
            if bin(nb).count("1") > EXACT_PACKING_LIMIT:
                raise oracle.BudgetExceeded("neighbourhood too large for exact packing")
            key = (len(_max_clique(disjoint, nb)), bin(nb).count("1"), b)
            if best_key is None or key < best_key:
                best_key, best_b = key, b
        nb = (adj[best_b] | (1 << best_b)) & remaining
        ids = list(_bits(nb))
        sub = f.subfamily(ids)
        if len(ids) <= EXACT_COVER_LIMIT:
            points.extend(oracle.min_transversal_exact(sub))
        else:
            points.extend(pierce_p2(sub, best_key[0] + 1, seed=seed, assume_p2=True).tau_points)
        selected.append(best_b)
        remaining &= ~nb
    if not stabs_all(f, points):
        raise TransversalError("greedy output misses a region")
    return TransversalReport(
        p=p,
        method="greedy",
        tau_points=points,
        nu=nu,
        iterations=len(selected),
        selected=selected,
        timings_ms={"greedy": (time.perf_counter() - t0) * 1e3},
    )


def exact_pierce(f: RegionFamily, p: int, budget: oracle.OracleBudget = oracle.DEFAULT_BUDGET) -> TransversalReport:
    t0 = time.perf_counter()
    pts = oracle.min_transversal_exact(f, budget)
    return TransversalReport(p=p, method="exact", tau_points=pts, timings_ms={"exact": (time.perf_counter() - t0) * 1e3})
