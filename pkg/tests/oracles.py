"""Independent reference computations used only by the tests.

``brute_mask`` decides the F / non-F pattern of the DE-9IM by classifying a
dense set of exact sample points, each one on its own, from the local
neighbourhood of the point.  It shares no code with the arrangement: no
noding, no edge keys, no face parity bookkeeping.  Sample points are all
vertices, all pairwise segment intersections, midpoints of the pieces
between them, and tiny normal offsets from those midpoints, so every
vertex, open edge and face of the joint arrangement holds a sample.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from sdbtest.geometry import LineString, Point, Polygon, iter_basic, iter_points

EPS = Fraction(1, 10**6)        # offset from an edge into its neighbouring faces
DELTA = Fraction(1, 10**9)      # step along an edge away from a vertex


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _on_closed(a, b, p):
    return (_cross(a, b, p) == 0 and min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
            and min(a[1], b[1]) <= p[1] <= max(a[1], b[1]))


def _dedup(pts):
    out = []
    for p in pts:
        if not out or out[-1] != p:
            out.append(p)
    return out


class Shape:
    """Cells of one geometry in a form convenient for pointwise tests."""

    def __init__(self, g):
        self.points = set()
        self.line_segs = []
        self.polys = []              # list of list of ring segments
        for e in iter_basic(g):
            if isinstance(e, Point):
                self.points.add(tuple(e.coord))
            elif isinstance(e, LineString):
                pts = _dedup([tuple(p) for p in e.points])
                self.line_segs += list(zip(pts, pts[1:]))
            elif isinstance(e, Polygon):
                rings = []
                for r in e.rings:
                    pts = _dedup([tuple(p) for p in r])
                    rings.append(list(zip(pts, pts[1:])) if len(pts) >= 4 else None)
                if rings[0] is None:
                    continue
                self.polys.append([s for r in rings if r for s in r])
        self.ring_segs = [s for p in self.polys for s in p]
        self.segs = self.line_segs + self.ring_segs

    def in_region(self, p) -> bool:
        """p strictly inside some polygon (p must not lie on a ring)."""
        for poly in self.polys:
            inside = False
            for a, b in poly:
                if (a[1] > p[1]) != (b[1] > p[1]):
                    x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1])
                    if x > p[0]:
                        inside = not inside
            if inside:
                return True
        return False

    def _edge_label(self, p, d, eps=EPS):
        """Label of the open edge through p with direction d (p interior to it)."""
        n = (-d[1], d[0])
        left = (p[0] + eps * n[0], p[1] + eps * n[1])
        right = (p[0] - eps * n[0], p[1] - eps * n[1])
        lin, rin = self.in_region(left), self.in_region(right)
        if lin and rin:
            return "I"
        if lin or rin:
            return "B"
        on_ring = any(_on_closed(a, b, p) for a, b in self.ring_segs)
        return "B" if on_ring else "I"

    def label(self, p) -> str:
        through = [(a, b) for a, b in self.segs if _on_closed(a, b, p)]
        if not through:
            if p in self.points:
                return "I"
            return "I" if self.in_region(p) else "E"
        dirs = set()
        for a, b in through:
            for q in (a, b):
                if q != p:
                    v = (q[0] - p[0], q[1] - p[1])
                    m = max(abs(v[0]), abs(v[1]))
                    dirs.add((v[0] / m, v[1] / m))
        if len(dirs) == 2:
            d1, d2 = dirs
            if d1 == (-d2[0], -d2[1]):
                # relative interior of a straight piece, unless an endpoint of
                # a collinear segment sits here (then it is still a vertex)
                if not any(p in (a, b) for a, b in through) and p not in self.points:
                    return self._edge_label(p, d1)
        labels = []
        for d in dirs:
            q = (p[0] + DELTA * d[0], p[1] + DELTA * d[1])
            # side probes must stay much closer to the edge than DELTA
            labels.append(self._edge_label(q, d, EPS * DELTA))
        if "B" in labels:
            return "B"
        if len(dirs) == 1 and p not in self.points:
            d = next(iter(dirs))
            n = (-d[1], d[0])
            q = (p[0] + DELTA * d[0], p[1] + DELTA * d[1])
            near = [(q[0] + EPS * DELTA * n[0], q[1] + EPS * DELTA * n[1]),
                    (q[0] - EPS * DELTA * n[0], q[1] - EPS * DELTA * n[1])]
            if not any(self.in_region(x) for x in near):
                return "B"
        return "I"


def _intersections(s, t):
    (a, b), (c, d) = s, t
    out = []
    for p in (a, b):
        if _on_closed(c, d, p):
            out.append(p)
    for p in (c, d):
        if _on_closed(a, b, p):
            out.append(p)
    den = (b[0] - a[0]) * (d[1] - c[1]) - (b[1] - a[1]) * (d[0] - c[0])
    if den != 0:
        t_ = Fraction((c[0] - a[0]) * (d[1] - c[1]) - (c[1] - a[1]) * (d[0] - c[0]), 1) / den
        u_ = Fraction((c[0] - a[0]) * (b[1] - a[1]) - (c[1] - a[1]) * (b[0] - a[0]), 1) / den
        if 0 <= t_ <= 1 and 0 <= u_ <= 1:
            out.append((a[0] + t_ * (b[0] - a[0]), a[1] + t_ * (b[1] - a[1])))
    return out


def sample_points(shapes) -> set:
    segs = [s for sh in shapes for s in sh.segs]
    verts = set()
    for sh in shapes:
        verts |= sh.points
        for a, b in sh.segs:
            verts.add(a)
            verts.add(b)
    for s, t in combinations(segs, 2):
        verts.update(_intersections(s, t))
    samples = set(verts)
    for a, b in segs:
        on = sorted((p for p in verts if _on_closed(a, b, p)),
                    key=lambda p: (p[0] - a[0]) * (b[0] - a[0]) + (p[1] - a[1]) * (b[1] - a[1]))
        for p, q in zip(on, on[1:]):
            m = ((p[0] + q[0]) / 2, (p[1] + q[1]) / 2)
            d = (q[0] - p[0], q[1] - p[1])
            samples.add(m)
            samples.add((m[0] - EPS * d[1], m[1] + EPS * d[0]))
            samples.add((m[0] + EPS * d[1], m[1] - EPS * d[0]))
    samples.add((Fraction(-10**6), Fraction(-10**6 + 1, 3)))
    return samples


def brute_mask(g1, g2) -> str:
    """Nine characters over {T, F}: which DE-9IM entries are non-empty."""
    s1, s2 = Shape(g1), Shape(g2)
    hit = set()
    for p in sample_points([s1, s2]):
        p = (Fraction(p[0]), Fraction(p[1]))
        hit.add((s1.label(p), s2.label(p)))
    return "".join("T" if (r, c) in hit else "F" for r in "IBE" for c in "IBE")


def hull_vertices(g) -> set:
    """Exhaustive convex hull corners: points not inside any triangle of others."""
    pts = set(tuple(p) for p in iter_points(g))
    corners = set()
    for p in pts:
        others = pts - {p}
        inside = False
        for a, b, c in combinations(others, 3):
            o = [_cross(a, b, p), _cross(b, c, p), _cross(c, a, p)]
            if (all(x >= 0 for x in o) or all(x <= 0 for x in o)) and _cross(a, b, c) != 0:
                inside = True
                break
        if not inside:
            # also drop points strictly between two others on a line
            if not any(_on_closed(a, b, p) for a, b in combinations(others, 2)):
                corners.add(p)
    return corners
