"""Closed planar regions (discs and convex polygons) and their arrangements.

All regions are closed: a point within ``TOL`` of a region counts as inside.
Boundary crossing points are computed analytically in floating point; tangent
contacts are resolved by the same tolerance rather than symbolically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence, Union

import numpy as np

TOL = 1e-9


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")

    def __iter__(self):
        yield self.x
        yield self.y


@dataclass(frozen=True)
class Disc:
    center: Point
    radius: float

    def __post_init__(self):
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise ValueError(f"disc radius must be positive, got {self.radius}")

    @property
    def anchor(self) -> Point:
        return self.center

    @property
    def perimeter(self) -> float:
        return 2 * math.pi * self.radius

    def bbox(self) -> tuple[float, float, float, float]:
        cx, cy, r = self.center.x, self.center.y, self.radius
        return cx - r, cy - r, cx + r, cy + r

    def scaled(self, lam: float) -> Disc:
        return Disc(Point(self.center.x * lam, self.center.y * lam), self.radius * lam)


@dataclass(frozen=True)
class ConvexPolygon:
    """Strictly convex polygon with counterclockwise vertices."""

    vertices: tuple[Point, ...]

    def __post_init__(self):
        vs = tuple(self.vertices)
        object.__setattr__(self, "vertices", vs)
        if len(vs) < 3:
            raise ValueError("polygon needs at least 3 vertices")
        if len(set(vs)) != len(vs):
            raise ValueError("polygon has repeated vertices")
        m = len(vs)
        for i in range(m):
            a, b, c = vs[i], vs[(i + 1) % m], vs[(i + 2) % m]
            cross = (b.x - a.x) * (c.y - b.y) - (b.y - a.y) * (c.x - b.x)
            if cross <= 0:
                raise ValueError("polygon must be strictly convex and counterclockwise")

    @property
    def anchor(self) -> Point:
        # vertex average is interior for a convex polygon
        m = len(self.vertices)
        return Point(sum(v.x for v in self.vertices) / m, sum(v.y for v in self.vertices) / m)

    def edges(self) -> list[tuple[Point, Point]]:
        vs = self.vertices
        return [(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))]

    @property
    def perimeter(self) -> float:
        return sum(math.hypot(b.x - a.x, b.y - a.y) for a, b in self.edges())

    def bbox(self) -> tuple[float, float, float, float]:
        xs = [v.x for v in self.vertices]
        ys = [v.y for v in self.vertices]
        return min(xs), min(ys), max(xs), max(ys)

    def scaled(self, lam: float) -> ConvexPolygon:
        return ConvexPolygon(tuple(Point(v.x * lam, v.y * lam) for v in self.vertices))


Region = Union[Disc, ConvexPolygon]


def axis_square(cx: float, cy: float, side: float = 1.0) -> ConvexPolygon:
    h = side / 2
    return ConvexPolygon(
        (Point(cx - h, cy - h), Point(cx + h, cy - h), Point(cx + h, cy + h), Point(cx - h, cy + h))
    )


@dataclass(frozen=True)
class RegionFamily:
    """Ordered family of regions; a region's id is its index."""

    regions: tuple[Region, ...]

    def __post_init__(self):
        object.__setattr__(self, "regions", tuple(self.regions))
        if not self.regions:
            raise ValueError("a region family needs at least one region")

    def __len__(self) -> int:
        return len(self.regions)

    def __getitem__(self, i: int) -> Region:
        return self.regions[i]

    def __iter__(self):
        return iter(self.regions)

    def subfamily(self, ids: Sequence[int]) -> RegionFamily:
        return RegionFamily(tuple(self.regions[i] for i in ids))

    def scaled(self, lam: float) -> RegionFamily:
        return RegionFamily(tuple(r.scaled(lam) for r in self.regions))

    def bbox(self) -> tuple[float, float, float, float]:
        boxes = [r.bbox() for r in self.regions]
        return (
            min(b[0] for b in boxes),
            min(b[1] for b in boxes),
            max(b[2] for b in boxes),
            max(b[3] for b in boxes),
        )


# --- point/segment helpers -------------------------------------------------


def _seg_point_dist(px, py, ax, ay, bx, by) -> float:
    dx, dy = bx - ax, by - ay
    ll = dx * dx + dy * dy
    t = 0.0 if ll == 0 else max(0.0, min(1.0, ((px - ax) * dx + (py - ay) * dy) / ll))
    return math.hypot(px - ax - t * dx, py - ay - t * dy)


def _polygon_point_dist(poly: ConvexPolygon, px: float, py: float) -> float:
    """Distance from a point to the closed polygon (0 inside)."""
    if _polygon_contains(poly, px, py, 0.0):
        return 0.0
    return min(_seg_point_dist(px, py, a.x, a.y, b.x, b.y) for a, b in poly.edges())


def _polygon_contains(poly: ConvexPolygon, px: float, py: float, tol: float) -> bool:
    for a, b in poly.edges():
        ex, ey = b.x - a.x, b.y - a.y
        # signed distance to the edge line, positive on the inner (left) side
        if (ex * (py - a.y) - ey * (px - a.x)) / math.hypot(ex, ey) < -tol:
            return False
    return True


def contains_point(r: Region, p: Point, tol: float = TOL) -> bool:
    if isinstance(r, Disc):
        return math.hypot(p.x - r.center.x, p.y - r.center.y) <= r.radius + tol
    return _polygon_contains(r, p.x, p.y, tol)


def membership_matrix(family: RegionFamily, points: Sequence[Point], tol: float = TOL) -> np.ndarray:
    """Boolean matrix M[i, j] = point j lies in region i."""
    n, m = len(family), len(points)
    out = np.zeros((n, m), dtype=bool)
    if m == 0:
        return out
    xs = np.fromiter((p.x for p in points), float, m)
    ys = np.fromiter((p.y for p in points), float, m)
    for i, r in enumerate(family):
        if isinstance(r, Disc):
            out[i] = np.hypot(xs - r.center.x, ys - r.center.y) <= r.radius + tol
        else:
            inside = np.ones(m, dtype=bool)
            for a, b in r.edges():
                ex, ey = b.x - a.x, b.y - a.y
                inside &= (ex * (ys - a.y) - ey * (xs - a.x)) / math.hypot(ex, ey) >= -tol
            out[i] = inside
    return out


# --- intersection predicates -----------------------------------------------


def _project(poly: ConvexPolygon, ax: float, ay: float) -> tuple[float, float]:
    vals = [v.x * ax + v.y * ay for v in poly.vertices]
    return min(vals), max(vals)


def _polygons_intersect(a: ConvexPolygon, b: ConvexPolygon, tol: float) -> bool:
    for poly in (a, b):
        for p, q in poly.edges():
            nx, ny = q.y - p.y, p.x - q.x
            ln = math.hypot(nx, ny)
            nx, ny = nx / ln, ny / ln
            amin, amax = _project(a, nx, ny)
            bmin, bmax = _project(b, nx, ny)
            if amax < bmin - tol or bmax < amin - tol:
                return False
    return True


def intersects(a: Region, b: Region, tol: float = TOL) -> bool:
    """True iff the closed regions share a point (up to ``tol``)."""
    if isinstance(a, Disc) and isinstance(b, Disc):
        d = math.hypot(a.center.x - b.center.x, a.center.y - b.center.y)
        return d <= a.radius + b.radius + tol
    if isinstance(a, Disc):
        a, b = b, a
    if isinstance(b, Disc):
        return _polygon_point_dist(a, b.center.x, b.center.y) <= b.radius + tol
    return _polygons_intersect(a, b, tol)


def intersection_graph(family: RegionFamily) -> list[set[int]]:
    """Adjacency sets of the intersection graph (no self loops)."""
    adj: list[set[int]] = [set() for _ in range(len(family))]
    for i, j in combinations(range(len(family)), 2):
        if intersects(family[i], family[j]):
            adj[i].add(j)
            adj[j].add(i)
    return adj


# --- boundary crossings ----------------------------------------------------


def _circle_circle(a: Disc, b: Disc, tol: float) -> list[Point]:
    x1, y1, r1 = a.center.x, a.center.y, a.radius
    x2, y2, r2 = b.center.x, b.center.y, b.radius
    d = math.hypot(x2 - x1, y2 - y1)
    if d == 0 or d > r1 + r2 + tol or d < abs(r1 - r2) - tol:
        return []
    along = (r1 * r1 - r2 * r2 + d * d) / (2 * d)
    h2 = r1 * r1 - along * along
    ux, uy = (x2 - x1) / d, (y2 - y1) / d
    mx, my = x1 + along * ux, y1 + along * uy
    if h2 <= 0:
        return [Point(mx, my)]
    h = math.sqrt(h2)
    return [Point(mx + h * uy, my - h * ux), Point(mx - h * uy, my + h * ux)]


def _circle_segment(c: Disc, p: Point, q: Point, tol: float) -> list[Point]:
    cx, cy, r = c.center.x, c.center.y, c.radius
    dx, dy = q.x - p.x, q.y - p.y
    fx, fy = p.x - cx, p.y - cy
    A = dx * dx + dy * dy
    B = 2 * (fx * dx + fy * dy)
    C = fx * fx + fy * fy - r * r
    disc = B * B - 4 * A * C
    seg_len = math.sqrt(A)
    if disc < 0:
        # near-tangent: emit the foot of the perpendicular if it is within tol of the circle
        t = -B / (2 * A)
        if -TOL <= t * seg_len and (t - 1) * seg_len <= TOL:
            t = min(1.0, max(0.0, t))
            fxp, fyp = p.x + t * dx, p.y + t * dy
            if abs(math.hypot(fxp - cx, fyp - cy) - r) <= tol:
                return [Point(fxp, fyp)]
        return []
    s = math.sqrt(disc)
    out = []
    for t in {(-B - s) / (2 * A), (-B + s) / (2 * A)}:
        if -tol <= t * seg_len and (t - 1) * seg_len <= tol:
            t = min(1.0, max(0.0, t))
            out.append(Point(p.x + t * dx, p.y + t * dy))
    return out


def _segment_segment(p1: Point, p2: Point, q1: Point, q2: Point, tol: float) -> list[Point]:
    rx, ry = p2.x - p1.x, p2.y - p1.y
    sx, sy = q2.x - q1.x, q2.y - q1.y
    denom = rx * sy - ry * sx
    wx, wy = q1.x - p1.x, q1.y - p1.y
    rl, sl = math.hypot(rx, ry), math.hypot(sx, sy)
    if abs(denom) <= 1e-14 * rl * sl:
        # parallel; only collinear overlaps produce crossings (the overlap's endpoints)
        if abs(wx * ry - wy * rx) / rl > tol:
            return []
        t0 = (wx * rx + wy * ry) / (rl * rl)
        t1 = t0 + (sx * rx + sy * ry) / (rl * rl)
        lo, hi = max(0.0, min(t0, t1)), min(1.0, max(t0, t1))
        if (lo - hi) * rl > tol:
            return []
        out = []
        for t in sorted({lo, hi}):
            # midway between the two near-coincident lines, so within tol/2 of both edges
            px, py = p1.x + t * rx, p1.y + t * ry
            u = min(1.0, max(0.0, ((px - q1.x) * sx + (py - q1.y) * sy) / (sl * sl)))
            out.append(Point((px + q1.x + u * sx) / 2, (py + q1.y + u * sy) / 2))
        return out
    t = (wx * sy - wy * sx) / denom
    u = (wx * ry - wy * rx) / denom
    if -tol <= t * rl and (t - 1) * rl <= tol and -tol <= u * sl and (u - 1) * sl <= tol:
        t, u = min(1.0, max(0.0, t)), min(1.0, max(0.0, u))
        return [Point((p1.x + t * rx + q1.x + u * sx) / 2, (p1.y + t * ry + q1.y + u * sy) / 2)]
    return []


def boundary_crossings(a: Region, b: Region, tol: float = TOL) -> list[Point]:
    """Points where the boundaries of ``a`` and ``b`` meet, tangencies included."""
    if isinstance(a, Disc) and isinstance(b, Disc):
        pts = _circle_circle(a, b, tol)
    elif isinstance(a, Disc) or isinstance(b, Disc):
        disc, poly = (a, b) if isinstance(a, Disc) else (b, a)
        pts = [x for e in poly.edges() for x in _circle_segment(disc, e[0], e[1], tol)]
    else:
        pts = [x for e in a.edges() for f in b.edges() for x in _segment_segment(e[0], e[1], f[0], f[1], tol)]
    return _dedupe(pts)


def _dedupe(pts: list[Point], tol: float = TOL) -> list[Point]:
    out: list[Point] = []
    for p in pts:
        if all(abs(p.x - q.x) > tol or abs(p.y - q.y) > tol for q in out):
            out.append(p)
    return out


def candidate_points(f: RegionFamily) -> list[Point]:
    """Anchors of every region followed by all pairwise boundary crossings.

    Every depth cell of the arrangement is dominated: for each plane point x
    some candidate lies in every region containing x.
    """
    pts = [r.anchor for r in f]
    for i, j in combinations(range(len(f)), 2):
        if intersects(f[i], f[j]):
            pts.extend(boundary_crossings(f[i], f[j]))
    return pts


# --- boundary parametrisation (arcs of the arrangement) --------------------


def boundary_param(r: Region, p: Point) -> float:
    """Arc-length position of a boundary point, in [0, perimeter)."""
    if isinstance(r, Disc):
        ang = math.atan2(p.y - r.center.y, p.x - r.center.x) % (2 * math.pi)
        return ang * r.radius
    best, best_d, offset = 0.0, math.inf, 0.0
    for a, b in r.edges():
        ln = math.hypot(b.x - a.x, b.y - a.y)
        d = _seg_point_dist(p.x, p.y, a.x, a.y, b.x, b.y)
        if d < best_d:
            t = max(0.0, min(1.0, ((p.x - a.x) * (b.x - a.x) + (p.y - a.y) * (b.y - a.y)) / (ln * ln)))
            best, best_d = offset + t * ln, d
        offset += ln
    return best


def boundary_point(r: Region, s: float) -> Point:
    """Inverse of :func:`boundary_param`."""
    s %= r.perimeter
    if isinstance(r, Disc):
        ang = s / r.radius
        return Point(r.center.x + r.radius * math.cos(ang), r.center.y + r.radius * math.sin(ang))
    for a, b in r.edges():
        ln = math.hypot(b.x - a.x, b.y - a.y)
        if s <= ln:
            t = s / ln
            return Point(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y))
        s -= ln
    return r.vertices[0]


def arc_midpoints(f: RegionFamily) -> list[tuple[int, Point]]:
    """One relative-interior point per boundary arc of the arrangement.

    An arc is a maximal piece of one region's boundary between consecutive
    crossings with other boundaries. Returns ``(owner_id, point)`` pairs.
    """
    params: list[list[float]] = [[] for _ in f]
    for i, j in combinations(range(len(f)), 2):
        if not intersects(f[i], f[j]):
            continue
        for x in boundary_crossings(f[i], f[j]):
            params[i].append(boundary_param(f[i], x))
            params[j].append(boundary_param(f[j], x))
    out = []
    for i, r in enumerate(f):
        per = r.perimeter
        ps = sorted(params[i])
        if not ps:
            out.append((i, boundary_point(r, per / 2)))
            continue
        uniq = [ps[0]]
        for s in ps[1:]:
            if s - uniq[-1] > 1e-12 * per:
                uniq.append(s)
        if len(uniq) > 1 and uniq[0] + per - uniq[-1] <= 1e-12 * per:
            uniq.pop()
        for k, s in enumerate(uniq):
            nxt = uniq[k + 1] if k + 1 < len(uniq) else uniq[0] + per
            out.append((i, boundary_point(r, (s + nxt) / 2)))
    return out
