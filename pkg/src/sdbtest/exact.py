"""Exact orientation and segment predicates.

Coordinates inside the oracle are Python ints when integral and gmpy2
``mpq`` otherwise; both compare and hash equal to the matching Fraction,
and are an order of magnitude faster than :class:`fractions.Fraction`.
"""
from __future__ import annotations

from gmpy2 import mpq

from .geometry import Point2


def num(v):
    """Integral values as int, everything else as mpq."""
    if isinstance(v, int):
        return v
    if v.denominator == 1:
        return int(v.numerator)
    return mpq(v.numerator, v.denominator)


def P(x, y) -> Point2:
    return Point2(num(x), num(y))


def orient(a, b, c):
    """Twice the signed area of (a, b, c); > 0 means counter-clockwise."""
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def sign(v) -> int:
    return (v > 0) - (v < 0)


def between(a, b, p) -> bool:
    """``p`` collinear with a-b lies on the closed segment a-b."""
    return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])


def on_segment(a, b, p) -> bool:
    return orient(a, b, p) == 0 and between(a, b, p)


def segment_intersection(a, b, c, d) -> list:
    """Points shared by closed segments a-b and c-d.

    Returns [] when disjoint, one point for a crossing or touch, and the two
    overlap end points for collinear overlaps (one if they meet end to end).
    """
    o1 = orient(a, b, c)
    o2 = orient(a, b, d)
    if o1 == 0 and o2 == 0:
        out = []
        for p in (a, b):
            if between(c, d, p) and p not in out:
                out.append(p)
        for p in (c, d):
            if between(a, b, p) and p not in out:
                out.append(p)
        return out
    o3 = orient(c, d, a)
    o4 = orient(c, d, b)
    s1, s2, s3, s4 = sign(o1), sign(o2), sign(o3), sign(o4)
    if s1 * s2 > 0 or s3 * s4 > 0:
        return []
    if s1 == 0:
        return [c]
    if s2 == 0:
        return [d]
    if s3 == 0:
        return [a]
    if s4 == 0:
        return [b]
    # proper crossing
    t = mpq(o3) / (o3 - o4)
    return [P(a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))]


def signed_area2(ring) -> object:
    """Twice the signed area of a closed ring (first point repeated last)."""
    s = 0
    for i in range(len(ring) - 1):
        s += ring[i][0] * ring[i + 1][1] - ring[i + 1][0] * ring[i][1]
    return s


def dedup_consecutive(points) -> list:
    out = []
    for p in points:
        if not out or out[-1] != p:
            out.append(p)
    return out
