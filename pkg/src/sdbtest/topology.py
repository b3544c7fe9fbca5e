"""Interior / boundary / exterior of geometries over an exact planar arrangement.

Every geometry is reduced to point cells, line cells (segments) and polygon
cells (rings with an even-odd region).  Segments of all operands are noded at
every shared point so that cells meet only in common faces; the noded
complex is then classified cell by cell:

* a face is interior when it lies inside some polygon region;
* an edge is boundary when exactly one of its sides is inside the region,
  or when it is a ring edge with the region on neither side (zero-area
  ring parts); other covered edges are interior;
* a vertex is boundary when an incident edge is boundary, or when it is the
  free end of a purely linear part (one incident edge, no region around it)
  that is not also a point cell; other covered vertices are interior.

Nothing here depends on ring orientation, vertex order or element order,
and every test is an exact sign of an integer/rational polynomial, so the
classification is invariant under invertible affine maps.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .exact import P, dedup_consecutive, on_segment, orient, segment_intersection, signed_area2
from .geometry import (
    Empty,
    Geometry,
    GeometryCollection,
    GeometryType,
    LineString,
    Point,
    Polygon,
    iter_basic,
    make_collection,
    pt,
)

I, B, E = "I", "B", "E"


class InvalidGeometryError(ValueError):
    """The geometry is well-formed but semantically invalid (e.g. a bow-tie ring)."""


@dataclass(frozen=True)
class Prepared:
    points: frozenset
    lines: tuple            # ((p, q), ...)
    polygons: tuple         # per polygon: per ring: ((p, q), ...) edges

    @property
    def is_empty(self) -> bool:
        return not (self.points or self.lines or self.polygons)


def _clean_ring(ring):
    pts = dedup_consecutive([P(x, y) for x, y in ring])
    if len(pts) < 4:
        return None
    return tuple(zip(pts, pts[1:]))


@lru_cache(maxsize=4096)
def prepare(g: Geometry) -> Prepared:
    """Split a geometry into point, segment and polygon cells.

    Zero-length segments are dropped; a line left without any segment and a
    ring left with fewer than three distinct vertices contribute nothing.  A
    polygon whose shell degenerates that way contributes nothing at all.
    """
    points, lines, polygons = set(), [], []
    for e in iter_basic(g):
        if isinstance(e, Point):
            points.add(P(*e.coord))
        elif isinstance(e, LineString):
            pts = dedup_consecutive([P(x, y) for x, y in e.points])
            lines.extend(zip(pts, pts[1:]))
        else:
            rings = [_clean_ring(r) for r in e.rings]
            if rings[0] is None:
                continue
            polygons.append(tuple(r for r in rings if r is not None))
    return Prepared(frozenset(points), tuple(lines), tuple(polygons))


def _region_at(p, owner_polys, segs) -> bool:
    """Even-odd membership of ``p`` (not on any ring) in the union of polygons."""
    px, py = p
    for poly in owner_polys:
        inside = False
        for si in poly:
            a, b, _, _ = segs[si]
            if (a[1] > py) != (b[1] > py):
                o = orient(a, b, p)
                if (o > 0) == (b[1] > a[1]):
                    inside = not inside
        if inside:
            return True
    return False


class Arrangement:
    """Noded arrangement of the segments and points of one or more geometries."""

    def __init__(self, preps: list[Prepared]):
        self.preps = preps
        self.k = len(preps)
        segs = []                      # (p, q, owner, poly index or -1)
        self.owner_polys = []          # per owner: per polygon: seg indices
        self.owner_rings = []          # per owner: per polygon: per ring: seg indices
        self.owner_points = [p.points for p in preps]
        for o, prep in enumerate(preps):
            for a, b in prep.lines:
                segs.append((a, b, o, -1))
            polys, rings = [], []
            for pi, poly in enumerate(prep.polygons):
                idx, ring_idx = [], []
                for ring in poly:
                    r = []
                    for a, b in ring:
                        r.append(len(segs))
                        segs.append((a, b, o, pi))
                    idx.extend(r)
                    ring_idx.append(r)
                polys.append(idx)
                rings.append(ring_idx)
            self.owner_polys.append(polys)
            self.owner_rings.append(rings)
        self.segs = segs
        self._node()
        self._classify()

    # -- construction ---------------------------------------------------

    def _node(self):
        segs = self.segs
        n = len(segs)
        splits = [{a, b} for a, b, _, _ in segs]
        boxes = [(min(a[0], b[0]), max(a[0], b[0]), min(a[1], b[1]), max(a[1], b[1]))
                 for a, b, _, _ in segs]
        order = sorted(range(n), key=lambda i: boxes[i][0])
        for ii, i in enumerate(order):
            bi = boxes[i]
            a, b = segs[i][0], segs[i][1]
            for j in order[ii + 1:]:
                bj = boxes[j]
                if bj[0] > bi[1]:
                    break
                if bj[3] < bi[2] or bj[2] > bi[3]:
                    continue
                for p in segment_intersection(a, b, segs[j][0], segs[j][1]):
                    splits[i].add(p)
                    splits[j].add(p)
        all_points = set()
        for pts in self.owner_points:
            all_points |= pts
        for p in all_points:
            for i, (a, b, _, _) in enumerate(segs):
                bx = boxes[i]
                if bx[0] <= p[0] <= bx[1] and bx[2] <= p[1] <= bx[3] and orient(a, b, p) == 0:
                    splits[i].add(p)

        self.vertices = set(all_points)
        self.edges = {}                # key -> list of seg indices covering it
        self.adj = {}
        self.chains = []               # per seg: ordered points from a to b
        for i, (a, b, _, _) in enumerate(segs):
            dx, dy = b[0] - a[0], b[1] - a[1]
            pts = sorted(splits[i], key=lambda p: (p[0] - a[0]) * dx + (p[1] - a[1]) * dy)
            self.chains.append(pts)
            self.vertices.update(pts)
            for u, w in zip(pts, pts[1:]):
                key = (u, w) if u < w else (w, u)
                cover = self.edges.get(key)
                if cover is None:
                    self.edges[key] = [i]
                    self.adj.setdefault(u, []).append(key)
                    self.adj.setdefault(w, []).append(key)
                else:
                    cover.append(i)

    def _side_regions(self, key, cover, owner):
        """(left, right) region membership of ``owner`` beside edge ``key``."""
        polys = self.owner_polys[owner]
        if not polys:
            return False, False
        segs = self.segs
        (ux, uy), (wx, wy) = key
        dx, dy = wx - ux, wy - uy
        mx, my = ux + wx, uy + wy      # doubled midpoint
        covering = set(cover)
        left_any = right_any = False
        for poly in polys:
            crossings = 0
            on_count = 0
            for si in poly:
                if si in covering:
                    on_count += 1
                    continue
                a, b = segs[si][0], segs[si][1]
                ax, ay = 2 * a[0] - mx, 2 * a[1] - my
                bx, by = 2 * b[0] - mx, 2 * b[1] - my
                la = -(dx * ax + dy * ay)
                lb = -(dx * bx + dy * by)
                if (la > 0) != (lb > 0):
                    sa = dx * ay - dy * ax
                    sb = dx * by - dy * bx
                    t = la * sb - sa * lb
                    if (t > 0) == (la - lb > 0):
                        crossings += 1
            left = crossings % 2 == 1
            right = left != (on_count % 2 == 1)
            left_any = left_any or left
            right_any = right_any or right
            if left_any and right_any:
                break
        return left_any, right_any

    def _classify(self):
        k = self.k
        segs = self.segs
        self.edge_labels = {}
        self.faces = {(E,) * k}
        edge_sides = {}
        for key, cover in self.edges.items():
            labels = []
            sides = []
            is_ring_any = False
            for o in range(k):
                on = [si for si in cover if segs[si][2] == o]
                left, right = self._side_regions(key, cover, o)
                sides.append((left, right))
                if not on:
                    labels.append(I if left else E)
                    continue
                ring = any(segs[si][3] >= 0 for si in on)
                is_ring_any = is_ring_any or ring
                if left and right:
                    labels.append(I)
                elif left or right:
                    labels.append(B)
                else:
                    labels.append(B if ring else I)
            self.edge_labels[key] = tuple(labels)
            edge_sides[key] = sides
            if is_ring_any:
                self.faces.add(tuple(I if s[0] else E for s in sides))
                self.faces.add(tuple(I if s[1] else E for s in sides))
        self.edge_sides = edge_sides

        self.vertex_labels = {}
        for v in self.vertices:
            incident = self.adj.get(v, ())
            labels = []
            for o in range(k):
                on_edges = [key for key in incident
                            if any(segs[si][2] == o for si in self.edges[key])]
                is_point = v in self.owner_points[o]
                if any(self.edge_labels[key][o] == B for key in on_edges):
                    labels.append(B)
                elif len(on_edges) == 1 and not is_point and edge_sides[on_edges[0]][o] == (False, False):
                    labels.append(B)
                elif on_edges or is_point:
                    labels.append(I)
                else:
                    labels.append(I if _region_at(v, self.owner_polys[o], segs) else E)
            self.vertex_labels[v] = tuple(labels)

    # -- queries --------------------------------------------------------

    def cells(self):
        """Yield (dimension, labels) for every vertex, edge and face class."""
        for labels in self.vertex_labels.values():
            yield 0, labels
        for labels in self.edge_labels.values():
            yield 1, labels
        for labels in self.faces:
            yield 2, labels


@dataclass
class TopoDecomposition:
    """Interior and boundary of one geometry as exact vertices, open edges, faces."""

    interior_points: set = field(default_factory=set)
    boundary_points: set = field(default_factory=set)
    interior_edges: set = field(default_factory=set)
    boundary_edges: set = field(default_factory=set)
    has_area: bool = False

    @property
    def dimension(self) -> int | None:
        if self.has_area:
            return 2
        if self.interior_edges or self.boundary_edges:
            return 1
        if self.interior_points or self.boundary_points:
            return 0
        return None

    @property
    def is_empty(self) -> bool:
        return self.dimension is None


def _decompose_arrangement(g: Geometry) -> tuple[Arrangement, TopoDecomposition]:
    arr = Arrangement([prepare(g)])
    d = TopoDecomposition()
    for v, (lab,) in arr.vertex_labels.items():
        if lab == I:
            d.interior_points.add(v)
        elif lab == B:
            d.boundary_points.add(v)
    for key, (lab,) in arr.edge_labels.items():
        if lab == I:
            d.interior_edges.add(key)
        elif lab == B:
            d.boundary_edges.add(key)
    d.has_area = (I,) in arr.faces
    return arr, d


def decompose(g: Geometry) -> TopoDecomposition:
    return _decompose_arrangement(g)[1]


def topological_dimension(g: Geometry) -> int | None:
    """Dimension of the point set (ignores degenerate parts, unlike the declared one)."""
    prep = prepare(g)
    if prep.polygons:
        return decompose(g).dimension
    if prep.lines:
        return 1
    if prep.points:
        return 0
    return None


def boundary(g: Geometry) -> Geometry:
    """The boundary as a geometry: rings and ring pieces first, then isolated points."""
    arr, d = _decompose_arrangement(g)
    lines = []
    emitted = set()
    for poly in arr.owner_rings[0]:
        for ring in poly:
            runs, run = [], None
            for si in ring:
                pts = arr.chains[si]
                for u, w in zip(pts, pts[1:]):
                    key = (u, w) if u < w else (w, u)
                    if key in d.boundary_edges and key not in emitted:
                        emitted.add(key)
                        if run is None:
                            run = [u]
                        run.append(w)
                    elif run is not None:
                        runs.append(run)
                        run = None
            if run is not None:
                runs.append(run)
            if len(runs) > 1 and runs[-1][-1] == runs[0][0]:
                last = runs.pop()
                runs[0] = last + runs[0][1:]
            lines.extend(runs)
    covered = {p for line in lines for p in line}
    points = sorted(p for p in d.boundary_points if p not in covered)
    # boundary edges not on any ring (cannot happen with current rules, kept total)
    for key in sorted(d.boundary_edges - emitted):
        lines.append(list(key))
    line_geoms = [LineString(tuple(pt(*p) for p in line)) for line in lines]
    point_geoms = [Point(pt(*p)) for p in points]
    if line_geoms and point_geoms:
        return GeometryCollection((make_collection(GeometryType.MULTIPOINT, point_geoms),
                                   make_collection(GeometryType.MULTILINESTRING, line_geoms)))
    if line_geoms:
        return make_collection(GeometryType.MULTILINESTRING, line_geoms)
    if point_geoms:
        return make_collection(GeometryType.MULTIPOINT, point_geoms)
    dim = d.dimension
    if dim == 2:
        return Empty(GeometryType.MULTILINESTRING)
    if dim == 1:
        return Empty(GeometryType.MULTIPOINT)
    return Empty(GeometryType.GEOMETRYCOLLECTION)


# -- validity ------------------------------------------------------------

def _ring_problem(ring) -> str | None:
    if signed_area2(ring) == 0:
        return "ring has zero area"
    edges = list(zip(ring, ring[1:]))
    n = len(edges)
    for i in range(n):
        for j in range(i + 1, n):
            shared = segment_intersection(*edges[i], *edges[j])
            if not shared:
                continue
            if j == i + 1:
                common = edges[i][1]
            elif i == 0 and j == n - 1:
                common = edges[i][0]
            else:
                return "ring self-intersects"
            if shared != [common]:
                return "ring self-intersects"
    return None


def _rings_problem(r1, r2) -> str | None:
    for a, b in zip(r1, r1[1:]):
        for c, d in zip(r2, r2[1:]):
            shared = segment_intersection(a, b, c, d)
            if len(shared) == 2:
                return "rings overlap"
            if len(shared) == 1:
                p = shared[0]
                if p not in (a, b) and p not in (c, d):
                    return "rings cross"
    return None


def polygon_problem(poly: Polygon) -> str | None:
    rings = [dedup_consecutive([P(x, y) for x, y in r]) for r in poly.rings]
    for r in rings:
        if len(r) < 4:
            return "ring has fewer than three distinct vertices"
        why = _ring_problem(r)
        if why:
            return why
    for i in range(len(rings)):
        for j in range(i + 1, len(rings)):
            why = _rings_problem(rings[i], rings[j])
            if why:
                return why
    shell = rings[0]
    shell_edges = list(zip(shell, shell[1:]))
    for hole in rings[1:]:
        probe = next((p for p in hole[:-1]
                      if not any(on_segment(a, b, p) for a, b in shell_edges)), None)
        if probe is not None and not _inside_ring(probe, shell_edges):
            return "hole lies outside the shell"
    return None


def _inside_ring(p, edges) -> bool:
    inside = False
    for a, b in edges:
        if (a[1] > p[1]) != (b[1] > p[1]):
            o = orient(a, b, p)
            if (o > 0) == (b[1] > a[1]):
                inside = not inside
    return inside


def validate(g: Geometry) -> None:
    """Raise :class:`InvalidGeometryError` for invalid polygons anywhere in ``g``."""
    for e in iter_basic(g):
        if isinstance(e, Polygon):
            why = polygon_problem(e)
            if why:
                raise InvalidGeometryError(why)


def is_valid(g: Geometry) -> bool:
    try:
        validate(g)
    except InvalidGeometryError:
        return False
    return True


__all__ = [
    "I", "B", "E", "Arrangement", "TopoDecomposition", "InvalidGeometryError",
    "prepare", "decompose", "boundary", "validate", "is_valid", "topological_dimension",
]
