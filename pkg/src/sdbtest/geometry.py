"""Exact-coordinate 2D geometry values.

Coordinates are :class:`fractions.Fraction` everywhere; nothing in this
package ever stores a float coordinate.  Values are immutable and hashable.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
from typing import Callable, Iterator, NamedTuple, Union


class GeometryType(IntEnum):
    """The seven 2D types.  The integer order is the canonical type order."""

    POINT = 1
    LINESTRING = 2
    POLYGON = 3
    MULTIPOINT = 4
    MULTILINESTRING = 5
    MULTIPOLYGON = 6
    GEOMETRYCOLLECTION = 7

    @property
    def wkt_tag(self) -> str:
        return self.name


BASIC_TYPES = (GeometryType.POINT, GeometryType.LINESTRING, GeometryType.POLYGON)
MULTI_OF = {
    GeometryType.POINT: GeometryType.MULTIPOINT,
    GeometryType.LINESTRING: GeometryType.MULTILINESTRING,
    GeometryType.POLYGON: GeometryType.MULTIPOLYGON,
}
BASIC_OF = {v: k for k, v in MULTI_OF.items()}


class Point2(NamedTuple):
    x: Fraction
    y: Fraction


def pt(x, y) -> Point2:
    """Build a point, converting ints/strings/decimals exactly."""
    return Point2(Fraction(x), Fraction(y))


@dataclass(frozen=True)
class Point:
    coord: Point2
    type = GeometryType.POINT


@dataclass(frozen=True)
class LineString:
    points: tuple[Point2, ...]
    type = GeometryType.LINESTRING

    def __post_init__(self):
        if len(self.points) < 2:
            raise GeometryError("LINESTRING needs at least 2 points")

    @property
    def is_closed(self) -> bool:
        return self.points[0] == self.points[-1]


@dataclass(frozen=True)
class Polygon:
    rings: tuple[tuple[Point2, ...], ...]
    type = GeometryType.POLYGON

    def __post_init__(self):
        if not self.rings:
            raise GeometryError("POLYGON needs at least one ring (use Empty)")
        for ring in self.rings:
            if len(ring) < 4:
                raise GeometryError("polygon ring needs at least 4 points")
            if ring[0] != ring[-1]:
                raise GeometryError("polygon ring is not closed")


@dataclass(frozen=True)
class Empty:
    """An empty geometry that remembers its declared type."""

    kind: GeometryType

    @property
    def type(self) -> GeometryType:
        return self.kind


@dataclass(frozen=True)
class MultiPoint:
    elements: tuple[Union[Point, Empty], ...]
    type = GeometryType.MULTIPOINT

    def __post_init__(self):
        _check_members(self, GeometryType.POINT)


@dataclass(frozen=True)
class MultiLineString:
    elements: tuple[Union[LineString, Empty], ...]
    type = GeometryType.MULTILINESTRING

    def __post_init__(self):
        _check_members(self, GeometryType.LINESTRING)


@dataclass(frozen=True)
class MultiPolygon:
    elements: tuple[Union[Polygon, Empty], ...]
    type = GeometryType.MULTIPOLYGON

    def __post_init__(self):
        _check_members(self, GeometryType.POLYGON)


@dataclass(frozen=True)
class GeometryCollection:
    elements: tuple["Geometry", ...]
    type = GeometryType.GEOMETRYCOLLECTION

    def __post_init__(self):
        if not self.elements:
            raise GeometryError("empty collection must be represented by Empty")


Geometry = Union[
    Point, LineString, Polygon, MultiPoint, MultiLineString, MultiPolygon,
    GeometryCollection, Empty,
]
Collection = (MultiPoint, MultiLineString, MultiPolygon, GeometryCollection)
_MULTI_CLASSES = {}


class GeometryError(ValueError):
    """A structurally impossible geometry value (arity, closure, member type)."""


def _check_members(g, basic: GeometryType) -> None:
    if not g.elements:
        raise GeometryError(f"empty {g.type.name} must be represented by Empty")
    for e in g.elements:
        if e.type != basic:
            raise GeometryError(f"{g.type.name} may only contain {basic.name} elements")


def make_collection(kind: GeometryType, elements) -> Geometry:
    """Build a MULTI/MIXED geometry of ``kind``; no elements gives ``Empty(kind)``."""
    elements = tuple(elements)
    if not elements:
        return Empty(kind)
    return _MULTI_CLASSES[kind](elements)


_MULTI_CLASSES.update({
    GeometryType.MULTIPOINT: MultiPoint,
    GeometryType.MULTILINESTRING: MultiLineString,
    GeometryType.MULTIPOLYGON: MultiPolygon,
    GeometryType.GEOMETRYCOLLECTION: GeometryCollection,
})


def is_empty(g: Geometry) -> bool:
    """True when ``g`` contains no points at all (recursively)."""
    if isinstance(g, Empty):
        return True
    if isinstance(g, Collection):
        return all(is_empty(e) for e in g.elements)
    return False


def is_collection(g: Geometry) -> bool:
    return isinstance(g, Collection)


def dimension(g: Geometry) -> int | None:
    """Declared dimension: 0, 1, 2, or ``None`` for a fully empty geometry."""
    if isinstance(g, Empty):
        return None
    if isinstance(g, Point):
        return 0
    if isinstance(g, LineString):
        return 1
    if isinstance(g, Polygon):
        return 2
    dims = [d for d in (dimension(e) for e in g.elements) if d is not None]
    return max(dims) if dims else None


def for_each_point(g: Geometry, f: Callable[[Point2], Point2]) -> Geometry:
    """Rewrite every coordinate through ``f`` keeping the structure intact."""
    if isinstance(g, Empty):
        return g
    if isinstance(g, Point):
        return Point(f(g.coord))
    if isinstance(g, LineString):
        return LineString(tuple(f(p) for p in g.points))
    if isinstance(g, Polygon):
        return Polygon(tuple(tuple(f(p) for p in ring) for ring in g.rings))
    return type(g)(tuple(for_each_point(e, f) for e in g.elements))


def iter_points(g: Geometry) -> Iterator[Point2]:
    if isinstance(g, Point):
        yield g.coord
    elif isinstance(g, LineString):
        yield from g.points
    elif isinstance(g, Polygon):
        for ring in g.rings:
            yield from ring
    elif isinstance(g, Collection):
        for e in g.elements:
            yield from iter_points(e)


def iter_basic(g: Geometry) -> Iterator[Geometry]:
    """Yield the non-empty basic elements of ``g``, flattening all nesting."""
    if isinstance(g, Empty):
        return
    if isinstance(g, Collection):
        for e in g.elements:
            yield from iter_basic(e)
    else:
        yield g


def bbox(g: Geometry):
    pts = list(iter_points(g))
    if not pts:
        return None
    xs = [p.x for p in pts]
    ys = [p.y for p in pts]
    return min(xs), min(ys), max(xs), max(ys)
