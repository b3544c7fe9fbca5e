"""Canonical representation of geometries at the element and value level.

Canonicalization is the identity-matrix case of building an affine
equivalent geometry: the point set is kept, only the representation moves.
The element-level passes (EMPTY removal, homogenization, duplicate removal,
reordering) run first, then the value-level passes on every basic element
(consecutive duplicate removal, coordinate reordering).  One pass of the
value level can expose new work for the element level (a line collapsing to
EMPTY, say), so :func:`canonicalize` repeats both until nothing changes.
"""
from __future__ import annotations

from .de9im import EQUALS_PATTERN, matches, relate
from .exact import dedup_consecutive, signed_area2
from .geometry import (
    MULTI_OF,
    Empty,
    Geometry,
    GeometryCollection,
    GeometryType,
    LineString,
    Polygon,
    dimension,
    is_collection,
    make_collection,
)
from .wkt import to_wkt

MAX_ROUNDS = 10


def _rebuild(g: Geometry, elements) -> Geometry:
    return make_collection(g.type, elements)


# -- element level ---------------------------------------------------------

def empty_removal(g: Geometry) -> Geometry:
    """Drop EMPTY elements (recursively inside nested collections)."""
    if not is_collection(g):
        return g
    kept = []
    for e in g.elements:
        e = empty_removal(e)
        if not isinstance(e, Empty):
            kept.append(e)
    return _rebuild(g, kept)


def _flatten(g: Geometry, out: list) -> None:
    if is_collection(g):
        for e in g.elements:
            _flatten(e, out)
    elif not isinstance(g, Empty):
        out.append(g)


def homogenize(g: Geometry) -> Geometry:
    """Collapse singletons, flatten nested collections, retype uniform collections."""
    if not is_collection(g):
        return g
    if g.type is not GeometryType.GEOMETRYCOLLECTION:
        return g.elements[0] if len(g.elements) == 1 else g
    flat: list = []
    _flatten(g, flat)
    if not flat:
        return Empty(GeometryType.GEOMETRYCOLLECTION)
    if len(flat) == 1:
        return flat[0]
    kinds = {e.type for e in flat}
    if len(kinds) == 1:
        return make_collection(MULTI_OF[kinds.pop()], flat)
    return GeometryCollection(tuple(flat))


def _same_shape(a: Geometry, b: Geometry) -> bool:
    return a.type == b.type and (a == b or matches(relate(a, b), EQUALS_PATTERN))


def duplicate_removal(g: Geometry) -> Geometry:
    """Keep one element per class of point-set-equal elements.

    Elements are only compared with elements of the same basic type, and
    the survivor of each class is the one with the smallest value-canonical
    WKT, so the result does not depend on the input order.
    """
    if not is_collection(g):
        return g
    elements = g.elements
    classes: list[list[int]] = []
    for i, e in enumerate(elements):
        for cls in classes:
            if _same_shape(elements[cls[0]], e):
                cls.append(i)
                break
        else:
            classes.append([i])
    if len(classes) == len(elements):
        return g
    keep = {min(cls, key=lambda i: (_text_key(_value_level(elements[i])), i)) for cls in classes}
    # relative input order is kept; reordering is a separate pass
    return _rebuild(g, [e for i, e in enumerate(elements) if i in keep])


def _text_key(e: Geometry) -> str:
    try:
        return to_wkt(e)
    except ValueError:
        return repr(e)


def _dim_key(e: Geometry) -> int:
    d = dimension(e)
    return -1 if d is None else d


def reorder_elements(g: Geometry) -> Geometry:
    """Stable sort of elements by (dimension, WKT text)."""
    if not is_collection(g):
        return g
    ordered = sorted(g.elements, key=lambda e: (_dim_key(e), _text_key(e)))
    return _rebuild(g, ordered)


def _element_level(g: Geometry) -> Geometry:
    return reorder_elements(duplicate_removal(homogenize(empty_removal(g))))


# -- value level -----------------------------------------------------------

def consecutive_duplicate_removal(g: Geometry) -> Geometry:
    """Collapse repeated consecutive points; degenerate lines/shells become EMPTY."""
    if isinstance(g, LineString):
        pts = dedup_consecutive(g.points)
        return LineString(tuple(pts)) if len(pts) >= 2 else Empty(GeometryType.LINESTRING)
    if isinstance(g, Polygon):
        rings = [tuple(dedup_consecutive(r)) for r in g.rings]
        if len(rings[0]) < 4:
            return Empty(GeometryType.POLYGON)
        return Polygon(tuple([rings[0]] + [r for r in rings[1:] if len(r) >= 4]))
    if is_collection(g):
        return type(g)(tuple(consecutive_duplicate_removal(e) for e in g.elements))
    return g


def _min_rotation(seq: tuple) -> tuple:
    n = len(seq)
    return min(seq[i:] + seq[:i] for i in range(n))


def _canonical_ring(ring: tuple) -> tuple:
    body = tuple(ring[:-1])
    area = signed_area2(ring)
    if area > 0:
        candidates = [body[::-1]]
    elif area < 0:
        candidates = [body]
    else:
        candidates = [body, body[::-1]]
    best = min(_min_rotation(c) for c in candidates)
    return best + (best[0],)


def reorder_coords(g: Geometry) -> Geometry:
    """Lines start at their smaller endpoint; rings run clockwise from their minimum."""
    if isinstance(g, LineString):
        pts = g.points
        if pts[0] == pts[-1]:
            body = _min_rotation(tuple(pts[:-1]))
            return LineString(body + (body[0],))
        return LineString(tuple(reversed(pts))) if pts[-1] < pts[0] else g
    if isinstance(g, Polygon):
        shell = _canonical_ring(g.rings[0])
        holes = sorted(_canonical_ring(r) for r in g.rings[1:])
        return Polygon((shell, *holes))
    if is_collection(g):
        return type(g)(tuple(reorder_coords(e) for e in g.elements))
    return g


def _value_level(g: Geometry) -> Geometry:
    return reorder_coords(consecutive_duplicate_removal(g))


# -- pipeline ----------------------------------------------------------------

def canonicalize(g: Geometry) -> Geometry:
    """Canonical form of ``g``; idempotent and invariant under element permutation."""
    for _ in range(MAX_ROUNDS):
        nxt = _value_level(_element_level(g))
        if nxt == g:
            return nxt
        g = nxt
    return g


__all__ = [
    "canonicalize", "empty_removal", "homogenize", "duplicate_removal", "reorder_elements",
    "consecutive_duplicate_removal", "reorder_coords",
]
