"""Seeded instance generation and the JSON instance format."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .geometry import ConvexPolygon, Disc, Point, Region, RegionFamily, axis_square
from .transversal import packing_number

FAMILY_CLASSES = ("discs", "unit_squares", "polygons")
MAX_RESAMPLES = 100


class InstanceError(ValueError):
    pass


@dataclass(frozen=True)
class InstanceSpec:
    family_class: str = "discs"
    n: int = 10
    density: Optional[int] = None  # target packing number
    radius_range: tuple[float, float] = (0.5, 1.5)
    seed: int = 0
    bbox: float = 10.0
    max_nu: Optional[int] = None

    def __post_init__(self):
        if self.family_class not in FAMILY_CLASSES:
            raise InstanceError(f"family_class must be one of {FAMILY_CLASSES}, got {self.family_class!r}")
        if self.n < 1:
            raise InstanceError("n must be at least 1")
        lo, hi = self.radius_range
        if not 0 < lo <= hi:
            raise InstanceError("radius_range needs 0 < min <= max")
        if self.bbox <= 0:
            raise InstanceError("bbox must be positive")
        if self.density is not None and self.density < 1:
            raise InstanceError("density (target packing number) must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise InstanceError("seed must be a 64-bit unsigned integer")


@dataclass
class GeneratedInstance:
    family: RegionFamily
    spec: InstanceSpec
    attempts: int
    nu: Optional[int]
    bbox_used: float


def _sample(spec: InstanceSpec, rng: np.random.Generator, side: float) -> RegionFamily:
    lo, hi = spec.radius_range
    regions: list[Region] = []
    for _ in range(spec.n):
        cx, cy = rng.uniform(0, side, 2)
        if spec.family_class == "discs":
            regions.append(Disc(Point(float(cx), float(cy)), float(rng.uniform(lo, hi))))
        elif spec.family_class == "unit_squares":
            regions.append(axis_square(float(cx), float(cy), 1.0))
        else:
            r = float(rng.uniform(lo, hi))
            k = int(rng.integers(3, 9))
            # sorted distinct angles with every gap < pi give a strictly convex ccw polygon
            while True:
                ang = np.sort(rng.uniform(0, 2 * math.pi, k))
                gaps = np.diff(np.append(ang, ang[0] + 2 * math.pi))
                if gaps.max() < math.pi and gaps.min() > 1e-3:
                    break
            regions.append(
                ConvexPolygon(tuple(Point(float(cx + r * math.cos(a)), float(cy + r * math.sin(a))) for a in ang))
            )
    return RegionFamily(tuple(regions))


def generate(spec: InstanceSpec) -> GeneratedInstance:
    """Deterministic family from ``spec.seed``.

    With a density target, families are resampled until the exact packing
    number is within one of the target (and at most ``max_nu`` if set); the
    sampling box is shrunk or grown by 10% after each miss.
    """
    rng = np.random.default_rng(spec.seed)
    side = spec.bbox
    if spec.density is None:
        return GeneratedInstance(_sample(spec, rng, side), spec, 1, None, side)
    fam, nu = None, None
    for attempt in range(1, MAX_RESAMPLES + 1):
        fam = _sample(spec, rng, side)
        nu = packing_number(fam, "exact")
        ok = abs(nu - spec.density) <= 1 and (spec.max_nu is None or nu <= spec.max_nu)
        if ok:
            return GeneratedInstance(fam, spec, attempt, nu, side)
        side *= 0.9 if nu > spec.density else 1.1
    return GeneratedInstance(fam, spec, MAX_RESAMPLES, nu, side)


# --- file format -------------------------------------------------------------


def region_to_json(r: Region) -> dict:
    if isinstance(r, Disc):
        return {"type": "disc", "cx": r.center.x, "cy": r.center.y, "r": r.radius}
    return {"type": "polygon", "vertices": [[v.x, v.y] for v in r.vertices]}


def family_to_json(f: RegionFamily, meta: Optional[dict] = None) -> str:
    doc: dict = {"regions": [region_to_json(r) for r in f]}
    if meta:
        doc["meta"] = meta
    return json.dumps(doc, indent=1) + "\n"


def spec_meta(inst: GeneratedInstance) -> dict:
    meta = asdict(inst.spec)
    meta["radius_range"] = list(inst.spec.radius_range)
    meta.update(attempts=inst.attempts, nu=inst.nu, bbox_used=inst.bbox_used)
    return meta


def write_instance(path, f: RegionFamily, meta: Optional[dict] = None) -> None:
    Path(path).write_text(family_to_json(f, meta))


def _num(obj: dict, key: str, where: str) -> float:
    if key not in obj:
        raise InstanceError(f"{where}: missing field {key!r}")
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise InstanceError(f"{where}.{key}: expected a finite number, got {v!r}")
    return float(v)


def _vertex(v, where: str) -> Point:
    if not (isinstance(v, list) and len(v) == 2):
        raise InstanceError(f"{where}: expected [x, y]")
    return Point(_num({"x": v[0]}, "x", where), _num({"y": v[1]}, "y", where))


def family_from_json(text: str) -> RegionFamily:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceError(f"line {e.lineno}, column {e.colno}: {e.msg}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("regions"), list):
        raise InstanceError("top level must be an object with a 'regions' list")
    regions: list[Region] = []
    for i, obj in enumerate(doc["regions"]):
        where = f"regions[{i}]"
        if not isinstance(obj, dict):
            raise InstanceError(f"{where}: expected an object")
        kind = obj.get("type")
        try:
            if kind == "disc":
                regions.append(Disc(Point(_num(obj, "cx", where), _num(obj, "cy", where)), _num(obj, "r", where)))
            elif kind == "polygon":
                verts = obj.get("vertices")
                if not isinstance(verts, list):
                    raise InstanceError(f"{where}.vertices: expected a list of [x, y] pairs")
                regions.append(ConvexPolygon(tuple(_vertex(v, f"{where}.vertices[{j}]") for j, v in enumerate(verts))))
            else:
                raise InstanceError(f"{where}.type: expected 'disc' or 'polygon', got {kind!r}")
        except ValueError as e:
            if isinstance(e, InstanceError):
                raise
            raise InstanceError(f"{where}: {e}") from None
    if not regions:
        raise InstanceError("instance has no regions")
    return RegionFamily(tuple(regions))


def read_instance(path) -> RegionFamily:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise InstanceError(f"cannot read {path}: {e.strerror}") from None
    return family_from_json(text)


def is_pseudodisc_class(f: RegionFamily) -> bool:
    """Discs, or congruent axis-aligned squares."""
    if all(isinstance(r, Disc) for r in f):
        return True
    sides = set()
    for r in f:
        if not isinstance(r, ConvexPolygon) or len(r.vertices) != 4:
            return False
        xs = sorted({v.x for v in r.vertices})
        ys = sorted({v.y for v in r.vertices})
        if len(xs) != 2 or len(ys) != 2 or not math.isclose(xs[1] - xs[0], ys[1] - ys[0]):
            return False
        sides.add(round(xs[1] - xs[0], 9))
    return len(sides) == 1
