"""Geometry-aware database generation: random shapes plus derived shapes.

Each new geometry either comes from the random-shape strategy or is derived
from geometries already in the database by an edit function.  Derivation
shares coordinates with existing geometries, which is what produces the
touching/covering relationships that purely random shapes almost never hit.
"""
from __future__ import annotations

import functools
import random
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from .exact import orient, signed_area2
from .geometry import (
    BASIC_TYPES,
    MULTI_OF,
    Empty,
    Geometry,
    GeometryCollection,
    GeometryType,
    LineString,
    MultiPolygon,
    Point,
    Point2,
    Polygon,
    is_collection,
    iter_basic,
    iter_points,
    make_collection,
    pt,
)
from .topology import boundary, polygon_problem


@dataclass
class GeneratorConfig:
    geometry_count: int = 10
    table_count: int = 2
    coordinate_range: tuple[int, int] = (0, 1000)
    max_points_per_line: int = 8
    max_rings: int = 2
    max_elements: int = 4
    derivative_probability: Fraction = Fraction(1, 2)
    empty_probability: Fraction = Fraction(1, 20)
    seed: int = 0

    def __post_init__(self):
        if self.geometry_count < 1 or self.table_count < 1:
            raise ValueError("geometry_count and table_count must be positive")
        lo, hi = self.coordinate_range
        if lo > hi:
            raise ValueError("coordinate_range is empty")
        if self.max_points_per_line < 2 or self.max_rings < 1 or self.max_elements < 1:
            raise ValueError("size caps too small")
        self.derivative_probability = Fraction(self.derivative_probability)
        self.empty_probability = Fraction(self.empty_probability)
        if not (0 <= self.derivative_probability <= 1 and 0 <= self.empty_probability <= 1):
            raise ValueError("probabilities must lie in [0, 1]")


@dataclass
class Table:
    name: str
    rows: list[tuple[int, Geometry]] = field(default_factory=list)


@dataclass
class SpatialDatabase:
    tables: list[Table] = field(default_factory=list)

    @classmethod
    def with_tables(cls, m: int) -> "SpatialDatabase":
        return cls([Table(f"t{i}") for i in range(1, m + 1)])

    @property
    def table_names(self) -> list[str]:
        return [t.name for t in self.tables]

    def table(self, name: str) -> Table:
        for t in self.tables:
            if t.name == name:
                return t
        raise KeyError(name)

    def insert(self, name: str, g: Geometry) -> int:
        t = self.table(name)
        gid = len(t.rows) + 1
        t.rows.append((gid, g))
        return gid

    def geometries(self) -> list[Geometry]:
        return [g for t in self.tables for _, g in t.rows]

    def rows(self):
        """(table, id, geometry) in table order then insertion order."""
        for t in self.tables:
            for gid, g in t.rows:
                yield t.name, gid, g

    def map(self, f) -> "SpatialDatabase":
        return SpatialDatabase([Table(t.name, [(i, f(g)) for i, g in t.rows]) for t in self.tables])

    def __len__(self) -> int:
        return sum(len(t.rows) for t in self.tables)


# -- random shapes -----------------------------------------------------------

def _coord(rng: random.Random, cfg: GeneratorConfig) -> Point2:
    lo, hi = cfg.coordinate_range
    return pt(rng.randint(lo, hi), rng.randint(lo, hi))


def _chance(rng: random.Random, p: Fraction) -> bool:
    return rng.random() < p


def _angular_ring(points: list[Point2]) -> list[Point2]:
    """Sort points around their centroid with exact comparisons."""
    n = len(points)
    cx = sum(p.x for p in points) / n
    cy = sum(p.y for p in points) / n
    c = (cx, cy)

    def half(p):
        dx, dy = p.x - cx, p.y - cy
        return 0 if dy > 0 or (dy == 0 and dx > 0) else 1

    def cmp(p, q):
        hp, hq = half(p), half(q)
        if hp != hq:
            return hp - hq
        o = orient(c, p, q)
        if o:
            return -1 if o > 0 else 1
        dp = (p.x - cx) ** 2 + (p.y - cy) ** 2
        dq = (q.x - cx) ** 2 + (q.y - cy) ** 2
        return (dp > dq) - (dp < dq)

    return sorted(points, key=functools.cmp_to_key(cmp))


def _ring(rng: random.Random, cfg: GeneratorConfig, tangle: bool = False) -> tuple[Point2, ...]:
    n = rng.randint(3, max(3, cfg.max_points_per_line - 1))
    for _ in range(20):
        pts = [_coord(rng, cfg) for _ in range(n)]
        if not tangle:
            pts = _angular_ring(pts)
        ring = tuple(pts) + (pts[0],)
        if signed_area2(ring) != 0:
            return ring
    lo, hi = cfg.coordinate_range
    if lo == hi:
        p = pt(lo, lo)
        return (p, p, p, p)
    return (pt(lo, lo), pt(hi, lo), pt(lo, hi), pt(lo, lo))


def _polygon(rng: random.Random, cfg: GeneratorConfig) -> Polygon:
    # 1 in 10 shells skips the angular sort, so self-intersecting rings occur
    shell = _ring(rng, cfg, tangle=rng.random() < 0.1)
    rings = [shell]
    for _ in range(rng.randint(0, cfg.max_rings - 1)):
        hole = _hole_inside(rng, cfg, shell)
        if hole is not None:
            rings.append(hole)
    return Polygon(tuple(rings))


def _hole_inside(rng, cfg, shell) -> tuple[Point2, ...] | None:
    xs = [p.x for p in shell]
    ys = [p.y for p in shell]
    x0, x1, y0, y1 = int(min(xs)), int(max(xs)), int(min(ys)), int(max(ys))
    for _ in range(10):
        tri = [pt(rng.randint(x0, x1), rng.randint(y0, y1)) for _ in range(3)]
        ring = tuple(tri) + (tri[0],)
        if signed_area2(ring) == 0:
            continue
        if polygon_problem(Polygon((shell, ring))) is None:
            return ring
    return None


def _basic(rng: random.Random, cfg: GeneratorConfig, kind: GeometryType) -> Geometry:
    if kind is GeometryType.POINT:
        return Point(_coord(rng, cfg))
    if kind is GeometryType.LINESTRING:
        n = rng.randint(2, cfg.max_points_per_line)
        pts = [_coord(rng, cfg) for _ in range(n)]
        if n > 2 and rng.random() < 0.1:
            i = rng.randrange(n - 1)
            pts.insert(i + 1, pts[i])                # a repeated vertex
        if n > 3 and rng.random() < 0.1:
            pts[-1] = pts[0]                         # a closed line
        return LineString(tuple(pts))
    return _polygon(rng, cfg)


ALL_TYPES = tuple(GeometryType)


def random_shape(rng: random.Random, cfg: GeneratorConfig,
                 kind: GeometryType | None = None, depth: int = 0) -> Geometry:
    """A syntactically valid geometry of a uniformly chosen type (or ``kind``)."""
    kind = kind if kind is not None else rng.choice(ALL_TYPES)
    if _chance(rng, cfg.empty_probability):
        return Empty(kind)
    if kind in BASIC_TYPES:
        return _basic(rng, cfg, kind)
    count = rng.randint(1, cfg.max_elements)
    if kind is GeometryType.GEOMETRYCOLLECTION:
        choices = ALL_TYPES if depth == 0 else BASIC_TYPES
        elements = [random_shape(rng, cfg, rng.choice(choices), depth + 1) for _ in range(count)]
    else:
        basic = {v: k for k, v in MULTI_OF.items()}[kind]
        elements = [Empty(basic) if _chance(rng, cfg.empty_probability) else _basic(rng, cfg, basic)
                    for _ in range(count)]
    return make_collection(kind, elements)


# -- edit functions ----------------------------------------------------------

class EditFailure(ValueError):
    """The edit function does not apply to its inputs."""


class EditClass(str, Enum):
    LINE = "line-based"
    POLYGON = "polygon-based"
    MULTI = "multi-dimensional"
    GENERIC = "generic"


class EditFunction(Enum):
    """Edit functions with (input count k, input class, natural output type)."""

    SET_POINT = ("SetPoint", 1, EditClass.LINE, GeometryType.LINESTRING)
    POLYGONIZE = ("Polygonize", 1, EditClass.LINE, GeometryType.GEOMETRYCOLLECTION)
    DUMP_RINGS = ("DumpRings", 1, EditClass.POLYGON, GeometryType.MULTILINESTRING)
    FORCE_POLYGON_CW = ("ForcePolygonCW", 1, EditClass.POLYGON, GeometryType.POLYGON)
    GEOMETRY_N = ("GeometryN", 1, EditClass.MULTI, GeometryType.GEOMETRYCOLLECTION)
    COLLECTION_EXTRACT = ("CollectionExtract", 1, EditClass.MULTI, GeometryType.GEOMETRYCOLLECTION)
    BOUNDARY = ("Boundary", 1, EditClass.GENERIC, GeometryType.GEOMETRYCOLLECTION)
    CONVEX_HULL = ("ConvexHull", 1, EditClass.GENERIC, GeometryType.GEOMETRYCOLLECTION)

    def __init__(self, label: str, k: int, cls: EditClass, output: GeometryType):
        self.label = label
        self.k = k
        self.cls = cls
        self.output_type = output


def _set_point(g: Geometry, index: int, new: Point2) -> Geometry:
    if not isinstance(g, LineString):
        raise EditFailure("SetPoint needs a LINESTRING")
    if not 0 <= index < len(g.points):
        raise EditFailure("point index out of range")
    pts = list(g.points)
    pts[index] = new
    return LineString(tuple(pts))


def _polygonize(g: Geometry) -> Geometry:
    lines = [e for e in iter_basic(g)]
    if len(lines) != 1 or not isinstance(lines[0], LineString):
        raise EditFailure("Polygonize supports a single line")
    line = lines[0]
    if not line.is_closed or len(line.points) < 4:
        raise EditFailure("line does not close a ring")
    poly = Polygon((line.points,))
    if polygon_problem(poly) is not None:
        raise EditFailure("line is not a simple ring")
    return GeometryCollection((poly,))


def _polygons_of(g: Geometry) -> list[Polygon]:
    if isinstance(g, Polygon):
        return [g]
    if isinstance(g, MultiPolygon):
        return [e for e in g.elements if isinstance(e, Polygon)]
    raise EditFailure("needs a POLYGON or MULTIPOLYGON")


def _dump_rings(g: Geometry) -> Geometry:
    rings = [LineString(r) for p in _polygons_of(g) for r in p.rings]
    return make_collection(GeometryType.MULTILINESTRING, rings)


def _oriented(ring, clockwise: bool):
    area = signed_area2(ring)
    if (area > 0 and clockwise) or (area < 0 and not clockwise):
        return tuple(reversed(ring))
    return ring


def _force_cw(g: Geometry) -> Geometry:
    polys = _polygons_of(g)
    out = [Polygon((_oriented(p.rings[0], True),) + tuple(_oriented(r, False) for r in p.rings[1:]))
           for p in polys]
    if isinstance(g, Polygon):
        return out[0]
    it = iter(out)
    return MultiPolygon(tuple(next(it) if isinstance(e, Polygon) else e for e in g.elements))


def _geometry_n(g: Geometry, n: int) -> Geometry:
    if not is_collection(g):
        raise EditFailure("GeometryN needs a MULTI or MIXED geometry")
    if not 1 <= n <= len(g.elements):
        raise EditFailure("element index out of range")
    return g.elements[n - 1]


def _collection_extract(g: Geometry, kind: GeometryType) -> Geometry:
    if not is_collection(g):
        raise EditFailure("CollectionExtract needs a MULTI or MIXED geometry")
    if kind not in BASIC_TYPES:
        raise EditFailure("extract type must be a basic type")
    return make_collection(MULTI_OF[kind], [e for e in iter_basic(g) if e.type == kind])


def convex_hull(g: Geometry) -> Geometry:
    """Exact hull: a point, a segment for collinear input, otherwise a polygon."""
    pts = sorted(set(iter_points(g)))
    if not pts:
        raise EditFailure("hull of an empty geometry")
    if len(pts) == 1:
        return Point(pts[0])

    def chain(points):
        out = []
        for p in points:
            while len(out) >= 2 and orient(out[-2], out[-1], p) <= 0:
                out.pop()
            out.append(p)
        return out

    lower, upper = chain(pts), chain(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        return LineString((pts[0], pts[-1]))
    return Polygon((tuple(hull) + (hull[0],),))


def _drop_split_vertices(g: Geometry) -> Geometry:
    """Remove non-integral vertices that only subdivide a straight run."""
    if isinstance(g, LineString):
        pts = list(g.points)
        i = 1
        while i < len(pts) - 1:
            p = pts[i]
            if (p.x.denominator != 1 or p.y.denominator != 1) and orient(pts[i - 1], p, pts[i + 1]) == 0 \
                    and min(pts[i - 1], pts[i + 1]) < p < max(pts[i - 1], pts[i + 1]):
                del pts[i]
            else:
                i += 1
        return LineString(tuple(pts))
    if is_collection(g):
        return type(g)(tuple(_drop_split_vertices(e) for e in g.elements))
    return g


def _integral(g: Geometry) -> Geometry:
    if any(c.denominator != 1 for p in iter_points(g) for c in p):
        raise EditFailure("result needs non-integer coordinates")
    return g


def apply_edit(edit: EditFunction, inputs: list[Geometry], **args) -> Geometry:
    """Apply ``edit``; raises :class:`EditFailure` when it does not apply."""
    if len(inputs) != edit.k:
        raise EditFailure(f"{edit.label} takes {edit.k} input(s)")
    g = inputs[0]
    if edit is EditFunction.SET_POINT:
        return _set_point(g, args["index"], args["point"])
    if edit is EditFunction.POLYGONIZE:
        return _polygonize(g)
    if edit is EditFunction.DUMP_RINGS:
        return _dump_rings(g)
    if edit is EditFunction.FORCE_POLYGON_CW:
        return _force_cw(g)
    if edit is EditFunction.GEOMETRY_N:
        return _geometry_n(g, args["n"])
    if edit is EditFunction.COLLECTION_EXTRACT:
        return _collection_extract(g, args["kind"])
    if edit is EditFunction.BOUNDARY:
        return _integral(_drop_split_vertices(boundary(g)))
    if edit is EditFunction.CONVEX_HULL:
        return convex_hull(g)
    raise EditFailure(f"unknown edit {edit}")


def _draw_args(edit: EditFunction, inputs, rng: random.Random, cfg: GeneratorConfig) -> dict:
    g = inputs[0]
    if edit is EditFunction.SET_POINT:
        n = len(g.points) if isinstance(g, LineString) else 1
        return {"index": rng.randrange(n), "point": _coord(rng, cfg)}
    if edit is EditFunction.GEOMETRY_N:
        n = len(g.elements) if is_collection(g) else 1
        return {"n": rng.randint(1, n)}
    if edit is EditFunction.COLLECTION_EXTRACT:
        return {"kind": rng.choice(BASIC_TYPES)}
    return {}


def derive(sdb: SpatialDatabase, edit: EditFunction, rng: random.Random,
           cfg: GeneratorConfig | None = None) -> Geometry:
    """Apply ``edit`` to randomly chosen existing geometries; failure gives EMPTY."""
    cfg = cfg or GeneratorConfig()
    pool = sdb.geometries()
    if not pool:
        raise ValueError("cannot derive from an empty database")
    inputs = [rng.choice(pool) for _ in range(edit.k)]
    args = _draw_args(edit, inputs, rng, cfg)
    try:
        return apply_edit(edit, inputs, **args)
    except EditFailure:
        return Empty(edit.output_type)


@dataclass
class GenerationTrace:
    """Which strategy produced each geometry (for coverage checks)."""

    strategies: list[str] = field(default_factory=list)


def generate(cfg: GeneratorConfig, rng: random.Random | None = None,
             trace: GenerationTrace | None = None) -> SpatialDatabase:
    """Populate ``cfg.table_count`` tables with ``cfg.geometry_count`` geometries."""
    rng = rng if rng is not None else random.Random(cfg.seed)
    sdb = SpatialDatabase.with_tables(cfg.table_count)
    names = sdb.table_names
    edits = list(EditFunction)
    for i in range(cfg.geometry_count):
        if i > 0 and _chance(rng, cfg.derivative_probability):
            g = derive(sdb, rng.choice(edits), rng, cfg)
            strategy = "derive"
        else:
            g = random_shape(rng, cfg)
            strategy = "random"
        sdb.insert(rng.choice(names), g)
        if trace is not None:
            trace.strategies.append(strategy)
    return sdb


__all__ = [
    "GeneratorConfig", "SpatialDatabase", "Table", "EditFunction", "EditClass", "EditFailure",
    "GenerationTrace", "generate", "random_shape", "derive", "apply_edit", "convex_hull",
]
