"""WKT reading and writing for the 2D geometry model.

The writer emits one canonical spelling: upper-case tags, no spaces after
commas, fully parenthesised MULTIPOINT members.  The reader is more lenient
(case-insensitive tags, arbitrary whitespace, bare MULTIPOINT members).
"""
from __future__ import annotations

import re
from fractions import Fraction

from .geometry import (
    BASIC_OF,
    Empty,
    Geometry,
    GeometryCollection,
    GeometryError,
    GeometryType,
    LineString,
    MultiLineString,
    MultiPoint,
    MultiPolygon,
    Point,
    Point2,
    Polygon,
)


class WKTError(ValueError):
    pass


class WKTSyntaxError(WKTError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class WKTSemanticError(WKTError):
    """Well-formed text describing an impossible value (e.g. a 3-point ring)."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnprintableCoordinate(ValueError):
    """A rational with no finite decimal expansion."""


_TOKEN = re.compile(
    r"\s*(?:(?P<num>[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)|(?P<word>[A-Za-z]+)|(?P<punct>[(),]))"
)


class _Reader:
    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        n = len(text)
        while pos < n:
            if text[pos].isspace():
                pos += 1
                continue
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise WKTSyntaxError(f"unexpected character {text[pos]!r}", _byte_offset(text, pos))
            kind = m.lastgroup
            start = m.start(kind)
            self.tokens.append((kind, m.group(kind), start))
            pos = m.end()
        self.i = 0

    def offset(self) -> int:
        if self.i < len(self.tokens):
            return _byte_offset(self.text, self.tokens[self.i][2])
        return len(self.text.encode())

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, len(self.text))

    def next(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, _ = self.peek()
        if val != value:
            raise WKTSyntaxError(f"expected {value!r}, found {val!r}", self.offset())
        self.i += 1

    def peek_word(self) -> str | None:
        kind, val, _ = self.peek()
        return val.upper() if kind == "word" else None

    def number(self) -> Fraction:
        kind, val, _ = self.peek()
        if kind != "num":
            raise WKTSyntaxError(f"expected number, found {val!r}", self.offset())
        self.i += 1
        return Fraction(val)


def _byte_offset(text: str, char_index: int) -> int:
    return len(text[:char_index].encode())


def parse_wkt(text: str) -> Geometry:
    """Parse WKT into a geometry, converting decimals to exact rationals."""
    r = _Reader(text)
    g = _geometry(r)
    if r.i != len(r.tokens):
        raise WKTSyntaxError("trailing input", r.offset())
    return g


def _geometry(r: _Reader) -> Geometry:
    word = r.peek_word()
    try:
        kind = GeometryType[word] if word else None
    except KeyError:
        kind = None
    if kind is None:
        raise WKTSyntaxError(f"expected geometry tag, found {r.peek()[1]!r}", r.offset())
    r.next()
    if r.peek_word() in ("Z", "M", "ZM"):
        raise WKTSyntaxError("Z/M coordinates are not supported", r.offset())
    if r.peek_word() == "EMPTY":
        r.next()
        return Empty(kind)
    start = r.offset()
    try:
        return _BODY[kind](r)
    except GeometryError as exc:
        raise WKTSemanticError(str(exc), start) from None


def _coord(r: _Reader) -> Point2:
    x = r.number()
    y = r.number()
    if r.peek()[0] == "num":
        raise WKTSyntaxError("only 2D coordinates are supported", r.offset())
    return Point2(x, y)


def _coord_list(r: _Reader) -> tuple[Point2, ...]:
    r.expect("(")
    pts = [_coord(r)]
    while r.peek()[1] == ",":
        r.next()
        pts.append(_coord(r))
    r.expect(")")
    return tuple(pts)


def _point_body(r):
    r.expect("(")
    p = _coord(r)
    r.expect(")")
    return Point(p)


def _line_body(r):
    start = r.offset()
    pts = _coord_list(r)
    if len(pts) < 2:
        raise WKTSemanticError("LINESTRING needs at least 2 points", start)
    return LineString(pts)


def _rings(r):
    r.expect("(")
    rings = []
    while True:
        start = r.offset()
        ring = _coord_list(r)
        if len(ring) < 4:
            raise WKTSemanticError("polygon ring needs at least 4 points", start)
        if ring[0] != ring[-1]:
            raise WKTSemanticError("polygon ring is not closed", start)
        rings.append(ring)
        if r.peek()[1] != ",":
            break
        r.next()
    r.expect(")")
    return tuple(rings)


def _polygon_body(r):
    return Polygon(_rings(r))


def _members(r, one):
    r.expect("(")
    out = []
    while True:
        out.append(one(r))
        if r.peek()[1] != ",":
            break
        r.next()
    r.expect(")")
    return tuple(out)


def _maybe_empty(kind, parse):
    def one(r):
        if r.peek_word() == "EMPTY":
            r.next()
            return Empty(kind)
        return parse(r)
    return one


def _multipoint_member(r):
    if r.peek()[1] == "(":
        return _point_body(r)
    return Point(_coord(r))


_BODY = {
    GeometryType.POINT: _point_body,
    GeometryType.LINESTRING: _line_body,
    GeometryType.POLYGON: _polygon_body,
    GeometryType.MULTIPOINT: lambda r: MultiPoint(
        _members(r, _maybe_empty(GeometryType.POINT, _multipoint_member))),
    GeometryType.MULTILINESTRING: lambda r: MultiLineString(
        _members(r, _maybe_empty(GeometryType.LINESTRING, _line_body))),
    GeometryType.MULTIPOLYGON: lambda r: MultiPolygon(
        _members(r, _maybe_empty(GeometryType.POLYGON, _polygon_body))),
    GeometryType.GEOMETRYCOLLECTION: lambda r: GeometryCollection(_members(r, _geometry)),
}


def format_rational(v: Fraction) -> str:
    """Exact decimal text for ``v``; integers carry no decimal point."""
    v = Fraction(v)
    if v.denominator == 1:
        return str(v.numerator)
    d = v.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        raise UnprintableCoordinate(f"{v} has no finite decimal expansion")
    places = max(twos, fives)
    scaled = abs(v.numerator) * (10 ** places // v.denominator)
    digits = str(scaled).rjust(places + 1, "0")
    text = f"{digits[:-places]}.{digits[-places:]}".rstrip("0")
    return ("-" if v < 0 else "") + text


def _fmt_coord(p: Point2) -> str:
    return f"{format_rational(p.x)} {format_rational(p.y)}"


def _fmt_seq(pts) -> str:
    return "(" + ",".join(_fmt_coord(p) for p in pts) + ")"


def _body(g: Geometry) -> str:
    if isinstance(g, Point):
        return f"({_fmt_coord(g.coord)})"
    if isinstance(g, LineString):
        return _fmt_seq(g.points)
    if isinstance(g, Polygon):
        return "(" + ",".join(_fmt_seq(r) for r in g.rings) + ")"
    if isinstance(g, GeometryCollection):
        return "(" + ",".join(to_wkt(e) for e in g.elements) + ")"
    return "(" + ",".join("EMPTY" if isinstance(e, Empty) else _body(e) for e in g.elements) + ")"


def to_wkt(g: Geometry) -> str:
    if isinstance(g, Empty):
        return f"{g.kind.name} EMPTY"
    return g.type.name + _body(g)


__all__ = [
    "WKTError", "WKTSyntaxError", "WKTSemanticError", "UnprintableCoordinate",
    "parse_wkt", "to_wkt", "format_rational", "BASIC_OF",
]
