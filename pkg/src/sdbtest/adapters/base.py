"""Adapter contract: SQL text in, an integer or a classified error out."""
from __future__ import annotations

import json
import re
import time
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path

from ..geometry import Geometry
from ..wkt import to_wkt


class ErrorKind(str, Enum):
    SYNTAX = "syntax"
    SEMANTIC = "semantic"
    TRANSPORT = "transport"
    ENGINE = "engine"


class EngineError(Exception):
    """An error reported by the engine for one statement."""

    def __init__(self, kind: ErrorKind, message: str):
        super().__init__(f"{kind.value}: {message}")
        self.kind = kind
        self.message = message


class TransportError(EngineError):
    """The engine could not be reached; distinct from any verdict."""

    def __init__(self, message: str):
        super().__init__(ErrorKind.TRANSPORT, message)


@dataclass(frozen=True)
class Dialect:
    name: str
    create_table: str
    drop_table: str
    insert: str
    delete: str
    literal: str
    predicates: dict
    errors: dict = field(default_factory=dict)
    session_prefix: str = ""

    @property
    def supported(self) -> tuple[str, ...]:
        return tuple(self.predicates)

    def render_literal(self, g: Geometry) -> str:
        return self.literal.format(wkt=to_wkt(g))

    def render_create(self, table: str) -> list[str]:
        return [self.drop_table.format(table=table), self.create_table.format(table=table)]

    def render_insert(self, table: str, gid: int, g: Geometry) -> str:
        return self.insert.format(table=table, id=gid, literal=self.render_literal(g))

    def render_delete(self, table: str, gid: int) -> str:
        return self.delete.format(table=table, id=gid)

    def render_predicate(self, name: str, a: str, b: str) -> str:
        try:
            template = self.predicates[name]
        except KeyError:
            raise ValueError(f"{self.name} does not support {name}") from None
        return template.format(a=a, b=b)

    def classify(self, message: str) -> ErrorKind:
        """Map an engine error message to a kind using the dialect's patterns."""
        for kind in (ErrorKind.TRANSPORT, ErrorKind.SEMANTIC, ErrorKind.SYNTAX):
            for pat in self.errors.get(kind.value, ()):
                if re.search(re.escape(pat), message, re.IGNORECASE):
                    return kind
        return ErrorKind.ENGINE


def load_dialects(path: str | Path | None = None) -> dict[str, Dialect]:
    if path is None:
        text = resources.files(__package__).joinpath("dialects.json").read_text()
    else:
        text = Path(path).read_text()
    raw = json.loads(text)
    return {name: Dialect(name=name, **spec) for name, spec in raw.items()}


_DIALECTS: dict[str, Dialect] | None = None


def get_dialect(name: str) -> Dialect:
    global _DIALECTS
    if _DIALECTS is None:
        _DIALECTS = load_dialects()
    try:
        return _DIALECTS[name]
    except KeyError:
        raise ValueError(f"unknown dialect {name!r}; known: {sorted(_DIALECTS)}") from None


@dataclass
class InsertResult:
    accepted: bool
    reason: str = ""


class Adapter:
    """Base adapter.  Subclasses implement :meth:`_send` for one statement.

    Every statement goes through :meth:`execute`, which times it; the
    accumulated ``sdbms_time`` is the engine side of the timing split.
    """

    def __init__(self, dialect: Dialect):
        self.dialect = dialect
        self.sdbms_time = 0.0
        self.statements = 0

    def _send(self, sql: str):
        raise NotImplementedError

    def execute(self, sql: str):
        t0 = time.perf_counter()
        try:
            return self._send(sql)
        finally:
            self.sdbms_time += time.perf_counter() - t0
            self.statements += 1

    def create_schema(self, tables: list[str]) -> list[str]:
        """Drop-if-exists then create every table; returns the statements sent."""
        sent = []
        for t in tables:
            for sql in self.dialect.render_create(t):
                self.execute(sql)
                sent.append(sql)
        return sent

    def insert(self, table: str, gid: int, g: Geometry) -> tuple[InsertResult, str]:
        sql = self.dialect.render_insert(table, gid, g)
        try:
            self.execute(sql)
        except TransportError:
            raise
        except EngineError as exc:
            return InsertResult(False, str(exc)), sql
        return InsertResult(True), sql

    def delete(self, table: str, gid: int) -> str:
        sql = self.dialect.render_delete(table, gid)
        self.execute(sql)
        return sql

    def count_query(self, sql: str) -> int:
        out = self.execute(sql)
        if isinstance(out, bool) or not isinstance(out, int):
            raise EngineError(ErrorKind.ENGINE, f"query did not return a single integer: {out!r}")
        return out

    def reset_timing(self) -> None:
        self.sdbms_time = 0.0
        self.statements = 0

    def close(self) -> None:
        pass
