"""In-process reference engine backed by the exact oracle.

It understands exactly the statement shapes the harness emits (CREATE, DROP,
INSERT, DELETE, and the COUNT(*) join template) and answers the join with a
nested loop over the exact DE-9IM.  Optional :class:`FaultSpec` overrides turn
it into a deliberately buggy engine for testing the tester.
"""
from __future__ import annotations

import re
import time
from dataclasses import dataclass
from fractions import Fraction

from ..de9im import Predicate, evaluate, relate_full
from ..geometry import Geometry, GeometryType, is_collection, iter_points
from ..topology import InvalidGeometryError, validate
from ..wkt import WKTSemanticError, WKTSyntaxError, parse_wkt
from .base import Adapter, Dialect, EngineError, ErrorKind, get_dialect

_IDENT = r"([A-Za-z_][A-Za-z0-9_]*)"
_DROP = re.compile(rf"DROP TABLE IF EXISTS {_IDENT};?$", re.I)
_CREATE = re.compile(rf"CREATE TABLE {_IDENT} \(id INTEGER, g geometry\);?$", re.I)
_INSERT = re.compile(
    rf"INSERT INTO {_IDENT} \(id, g\) VALUES \((-?\d+), "
    r"(?:ST_GeomFromText\('([^']*)'\)|'([^']*)'::geometry)\);?$", re.I)
_DELETE = re.compile(rf"DELETE FROM {_IDENT} WHERE id = (-?\d+);?$", re.I)
_COUNT = re.compile(
    rf"SELECT COUNT\(\*\) FROM {_IDENT}(?: AS {_IDENT})? JOIN {_IDENT}(?: AS {_IDENT})? "
    rf"ON ST_(\w+)\({_IDENT}\.g,{_IDENT}\.g\);?$", re.I)


@dataclass(frozen=True)
class FaultSpec:
    """Wrong answers for one predicate whenever the trigger fires.

    ``trigger`` is one of ``coord_gt`` (any coordinate of either operand above
    ``value``), ``type`` (either operand has declared type ``value``) or
    ``elements_gt`` (either operand has more than ``value`` elements).
    ``policy`` is ``negate`` or ``constant`` (answer ``constant``).
    """

    predicate: str
    trigger: str
    value: str
    policy: str = "negate"
    constant: bool = False

    def __post_init__(self):
        object.__setattr__(self, "predicate", Predicate.parse(self.predicate).value)
        if self.trigger not in ("coord_gt", "type", "elements_gt"):
            raise ValueError(f"unknown fault trigger {self.trigger!r}")
        if self.policy not in ("negate", "constant"):
            raise ValueError(f"unknown fault policy {self.policy!r}")
        if self.trigger == "type":
            GeometryType[self.value.upper()]

    @classmethod
    def parse(cls, text: str) -> "FaultSpec":
        """``Covers:coord_gt=50:constant=false`` or ``Touches:type=POLYGON:negate``."""
        parts = text.split(":")
        if len(parts) != 3 or "=" not in parts[1]:
            raise ValueError(f"bad fault spec {text!r}; want PRED:TRIGGER=VALUE:POLICY")
        trigger, value = parts[1].split("=", 1)
        policy, constant = parts[2], False
        if "=" in policy:
            policy, c = policy.split("=", 1)
            if c.lower() not in ("true", "false"):
                raise ValueError(f"constant must be true or false, not {c!r}")
            constant = c.lower() == "true"
        return cls(parts[0], trigger, value, policy, constant)

    def __str__(self) -> str:
        pol = f"constant={str(self.constant).lower()}" if self.policy == "constant" else "negate"
        return f"{self.predicate}:{self.trigger}={self.value}:{pol}"

    def fires(self, g1: Geometry, g2: Geometry) -> bool:
        if self.trigger == "coord_gt":
            t = Fraction(self.value)
            return any(c > t for g in (g1, g2) for p in iter_points(g) for c in p)
        if self.trigger == "type":
            kind = GeometryType[self.value.upper()]
            return g1.type == kind or g2.type == kind
        k = int(self.value)
        return any(is_collection(g) and len(g.elements) > k for g in (g1, g2))

    def apply(self, pred: str, g1: Geometry, g2: Geometry, answer: bool) -> bool:
        if pred != self.predicate or not self.fires(g1, g2):
            return answer
        return (not answer) if self.policy == "negate" else self.constant


class ReferenceAdapter(Adapter):
    """Pure in-memory engine; one instance is one isolated database."""

    def __init__(self, dialect: Dialect | None = None, faults: tuple[FaultSpec, ...] = (),
                 delay: float = 0.0, cache: dict | None = None):
        super().__init__(dialect or get_dialect("reference"))
        self.tables: dict[str, list[tuple[int, Geometry]]] = {}
        self.faults = tuple(faults)
        self.delay = delay
        self._cache = cache if cache is not None else {}

    def _send(self, sql: str):
        if self.delay:
            time.sleep(self.delay)
        sql = sql.strip()
        if m := _COUNT.match(sql):
            return self._count(m)
        if m := _INSERT.match(sql):
            return self._insert(m)
        if m := _DELETE.match(sql):
            table = self._table(m.group(1))
            gid = int(m.group(2))
            table[:] = [r for r in table if r[0] != gid]
            return None
        if m := _CREATE.match(sql):
            name = m.group(1).lower()
            if name in self.tables:
                raise EngineError(ErrorKind.ENGINE, f"table {name} already exists")
            self.tables[name] = []
            return None
        if m := _DROP.match(sql):
            self.tables.pop(m.group(1).lower(), None)
            return None
        raise EngineError(ErrorKind.SYNTAX, f"syntax error: unsupported statement {sql[:60]!r}")

    def _table(self, name: str) -> list:
        try:
            return self.tables[name.lower()]
        except KeyError:
            raise EngineError(ErrorKind.ENGINE, f"no such table {name}") from None

    def _insert(self, m):
        table = self._table(m.group(1))
        text = m.group(3) if m.group(3) is not None else m.group(4)
        try:
            g = parse_wkt(text)
            validate(g)
        except WKTSyntaxError as exc:
            raise EngineError(ErrorKind.SYNTAX, f"parse error: {exc}") from None
        except (WKTSemanticError, InvalidGeometryError) as exc:
            raise EngineError(ErrorKind.SEMANTIC, f"invalid geometry: {exc}") from None
        table.append((int(m.group(2)), g))
        return None

    def relation(self, g1: Geometry, g2: Geometry):
        key = (g1, g2)
        hit = self._cache.get(key)
        if hit is None:
            flipped = self._cache.get((g2, g1))
            if flipped is not None:
                m, d2, d1 = flipped
                hit = (m.transpose(), d1, d2)
            else:
                hit = relate_full(g1, g2)
            if len(self._cache) > 500_000:
                self._cache.clear()
            self._cache[key] = hit
        return hit

    def predicate(self, name: str, g1: Geometry, g2: Geometry) -> bool:
        pred = Predicate.parse(name)
        m, d1, d2 = self.relation(g1, g2)
        answer = evaluate(pred, m, d1, d2)
        for f in self.faults:
            answer = f.apply(pred.value, g1, g2, answer)
        return answer

    def _count(self, m) -> int:
        t1, a1, t2, a2, pred, x, y = m.groups()
        aliases = {(a1 or t1).lower(): 1, (a2 or t2).lower(): 2}
        if len(aliases) != 2:
            raise EngineError(ErrorKind.ENGINE, "ambiguous self-join; alias the tables")
        try:
            first = aliases[x.lower()]
            second = aliases[y.lower()]
        except KeyError:
            raise EngineError(ErrorKind.ENGINE, "predicate references an unknown table") from None
        try:
            name = Predicate.parse(pred).value
        except ValueError:
            raise EngineError(ErrorKind.ENGINE, f"function ST_{pred} does not exist") from None
        if name not in self.dialect.predicates:
            raise EngineError(ErrorKind.ENGINE, f"function ST_{pred} does not exist")
        rows1, rows2 = self._table(t1), self._table(t2)
        total = 0
        for _, g1 in rows1:
            for _, g2 in rows2:
                pick = {1: g1, 2: g2}
                if self.predicate(name, pick[first], pick[second]):
                    total += 1
        return total
