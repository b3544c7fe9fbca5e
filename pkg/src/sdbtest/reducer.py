"""Shrinking discrepancies: ddmin over row pairs, then geometry-level shrinks.

The unit of reduction is a row pair (same table and id in both logs).
Dropping a row from one twin only would break the metamorphic relation, so
every step edits both logs together.
"""
from __future__ import annotations

import dataclasses
import json
import re
import shutil
from dataclasses import dataclass
from pathlib import Path

from .adapters import EngineError, TransportError, get_dialect
from .geometry import Geometry, LineString, Polygon, is_collection, make_collection
from .harness import Discrepancy, read_bundle, replay, twin_geometry, write_bundle
from .wkt import parse_wkt

_ROW = re.compile(r"^\s*(?:INSERT INTO|DELETE FROM)\s+([A-Za-z_]\w*)\b.*?(?:VALUES\s*\(|WHERE id = )(-?\d+)",
                  re.I)
_SCHEMA = re.compile(r"^\s*(?:DROP TABLE IF EXISTS|CREATE TABLE)\s+([A-Za-z_]\w*)", re.I)
_QUERY_TABLES = re.compile(r"FROM\s+([A-Za-z_]\w*).*?JOIN\s+([A-Za-z_]\w*)", re.I)
_WKT = re.compile(r"'([^']*)'")


class NotReproducing(ValueError):
    """The discrepancy does not show up when its logs are replayed."""


@dataclass
class Reduction:
    discrepancy: Discrepancy
    partial: bool = False
    tests: int = 0
    rows_before: int = 0
    rows_after: int = 0


def row_key(sql: str):
    m = _ROW.match(sql)
    return (m.group(1).lower(), int(m.group(2))) if m else None


def row_keys(log: list[str]) -> list:
    keys = []
    for sql in log:
        k = row_key(sql)
        if k is not None and k not in keys:
            keys.append(k)
    return keys


def query_tables(query: str) -> set[str]:
    m = _QUERY_TABLES.search(query)
    return {m.group(1).lower(), m.group(2).lower()} if m else set()


def restrict(log: list[str], keys, tables: set[str] | None = None) -> list[str]:
    """Statements of ``log`` touching only rows in ``keys`` (and schema of ``tables``)."""
    keys = set(keys)
    out = []
    for sql in log:
        k = row_key(sql)
        if k is not None:
            if k in keys:
                out.append(sql)
            continue
        m = _SCHEMA.match(sql)
        if m and tables is not None and m.group(1).lower() not in tables:
            continue
        out.append(sql)
    return out


class _Tester:
    def __init__(self, d: Discrepancy, factory, budget: int):
        self.d = d
        self.factory = factory
        self.budget = budget
        self.tests = 0

    def counts(self, log1, log2):
        if self.tests >= self.budget:
            raise _BudgetExhausted
        self.tests += 1
        probe = dataclasses.replace(self.d, statement_log_1=log1, statement_log_2=log2)
        try:
            return replay(probe, self.factory)
        except TransportError:
            raise
        except EngineError:
            return None

    def interesting(self, log1, log2) -> bool:
        c = self.counts(log1, log2)
        return c is not None and c[0] != c[1]


class _BudgetExhausted(Exception):
    pass


def ddmin(items: list, test) -> list:
    """Classic ddmin: returns a 1-minimal sublist for which ``test`` holds."""
    n = 2
    while len(items) >= 2:
        size = len(items)
        chunks = [items[i * size // n:(i + 1) * size // n] for i in range(n)]
        for c in chunks:
            if c and test(c):
                items, n = c, 2
                break
        else:
            for i in range(len(chunks)):
                comp = [x for j, c in enumerate(chunks) if j != i for x in c]
                if comp and test(comp):
                    items, n = comp, max(n - 1, 2)
                    break
            else:
                if n >= size:
                    break
                n = min(size, 2 * n)
    return items


def reduce(d: Discrepancy, factory, budget: int = 5000) -> Reduction:
    """Shrink ``d`` to a 1-minimal set of row pairs that still shows the mismatch."""
    tester = _Tester(d, factory, budget)
    if not tester.interesting(d.statement_log_1, d.statement_log_2):
        raise NotReproducing("discrepancy does not reproduce on this target")
    keys = row_keys(d.statement_log_1)
    for k in row_keys(d.statement_log_2):
        if k not in keys:
            keys.append(k)
    best = list(keys)
    partial = False

    def test(subset):
        nonlocal best
        ok = tester.interesting(restrict(d.statement_log_1, subset),
                                restrict(d.statement_log_2, subset))
        if ok and len(subset) < len(best):
            best = list(subset)
        return ok

    try:
        best = ddmin(list(keys), test)
    except (TransportError, _BudgetExhausted):
        partial = True
    tables = {t for t, _ in best} | query_tables(d.query)
    log1 = restrict(d.statement_log_1, best, tables)
    log2 = restrict(d.statement_log_2, best, tables)
    out = dataclasses.replace(d, statement_log_1=log1, statement_log_2=log2)
    try:
        c = tester.counts(log1, log2) if not partial else None
    except (TransportError, _BudgetExhausted):
        c, partial = None, True
    if c is not None:
        out = dataclasses.replace(out, count1=c[0], count2=c[1])
    return Reduction(out, partial, tester.tests, len(keys), len(best))


def is_one_minimal(d: Discrepancy, factory) -> bool:
    """True when removing any single row pair makes the mismatch disappear."""
    tester = _Tester(d, factory, budget=10 ** 9)
    keys = row_keys(d.statement_log_1)
    if not tester.interesting(d.statement_log_1, d.statement_log_2):
        return False
    for k in keys:
        rest = [x for x in keys if x != k]
        if tester.interesting(restrict(d.statement_log_1, rest), restrict(d.statement_log_2, rest)):
            return False
    return True


# -- geometry-level shrinking ----------------------------------------------------

def shrink_candidates(g: Geometry):
    """Strictly smaller geometries: fewer elements, vertices or rings."""
    if is_collection(g):
        elems = g.elements
        if len(elems) > 1:
            for i in range(len(elems)):
                yield make_collection(g.type, elems[:i] + elems[i + 1:])
        for i, e in enumerate(elems):
            for c in shrink_candidates(e):
                yield type(g)(elems[:i] + (c,) + elems[i + 1:])
    elif isinstance(g, LineString):
        if len(g.points) > 2:
            for i in range(len(g.points)):
                yield LineString(g.points[:i] + g.points[i + 1:])
    elif isinstance(g, Polygon):
        for i in range(1, len(g.rings)):
            yield Polygon(g.rings[:i] + g.rings[i + 1:])
        shell = g.rings[0]
        if len(shell) > 4:
            for i in range(1, len(shell) - 1):
                yield Polygon((shell[:i] + shell[i + 1:],) + g.rings[1:])


def _insert_index(log: list[str], key) -> int | None:
    for i, sql in enumerate(log):
        if row_key(sql) == key and sql.lstrip().upper().startswith("INSERT"):
            return i
    return None


def extract_geometry(sql: str) -> Geometry:
    m = _WKT.search(sql)
    if not m:
        raise ValueError(f"no WKT literal in {sql!r}")
    return parse_wkt(m.group(1))


def check_pair_invariant(d: Discrepancy) -> bool:
    """Every SDB2 insert is the affine image of the canonical SDB1 insert."""
    for key in row_keys(d.statement_log_1):
        i1, i2 = _insert_index(d.statement_log_1, key), _insert_index(d.statement_log_2, key)
        if (i1 is None) != (i2 is None):
            return False
        if i1 is None:
            continue
        g1 = extract_geometry(d.statement_log_1[i1])
        g2 = extract_geometry(d.statement_log_2[i2])
        if twin_geometry(d.matrix, g1) != g2:
            return False
    return True


def simplify_geometry(d: Discrepancy, factory, budget: int = 2000) -> Reduction:
    """Greedy per-row shrinks applied to both twins, kept only if the bug survives."""
    dialect = get_dialect(d.dialect)
    tester = _Tester(d, factory, budget)
    log1, log2 = list(d.statement_log_1), list(d.statement_log_2)
    partial = False
    try:
        progress = True
        while progress:
            progress = False
            for key in row_keys(log1):
                i1, i2 = _insert_index(log1, key), _insert_index(log2, key)
                if i1 is None or i2 is None:
                    continue
                g1 = extract_geometry(log1[i1])
                for c in shrink_candidates(g1):
                    try:
                        s1 = dialect.render_insert(key[0], key[1], c)
                        s2 = dialect.render_insert(key[0], key[1], twin_geometry(d.matrix, c))
                    except ValueError:
                        continue
                    n1, n2 = list(log1), list(log2)
                    n1[i1], n2[i2] = s1, s2
                    if tester.interesting(n1, n2):
                        log1, log2, progress = n1, n2, True
                        break
    except (TransportError, _BudgetExhausted):
        partial = True
    out = dataclasses.replace(d, statement_log_1=log1, statement_log_2=log2)
    if not partial:
        c = tester.counts(log1, log2) if tester.tests < budget else None
        if c is not None:
            out = dataclasses.replace(out, count1=c[0], count2=c[1])
    n = len(row_keys(log1))
    return Reduction(out, partial, tester.tests, n, n)


def reduce_bundle(path: str | Path, factory, budget: int = 5000, shrink: bool = True) -> Reduction:
    """Reduce the bundle at ``path`` in place; the original moves to ``original/``."""
    path = Path(path)
    d = read_bundle(path)
    red = reduce(d, factory, budget)
    if shrink and not red.partial:
        simp = simplify_geometry(red.discrepancy, factory, budget)
        red = Reduction(simp.discrepancy, simp.partial, red.tests + simp.tests,
                        red.rows_before, red.rows_after)
    archive = path / "original"
    if not archive.exists():
        archive.mkdir()
        for f in path.iterdir():
            if f.is_file():
                shutil.copy2(f, archive / f.name)
    write_bundle(red.discrepancy, path)
    meta = json.loads((path / "meta.json").read_text())
    meta.update({"reduced": True, "partial": red.partial, "rows_before": red.rows_before,
                 "rows_after": red.rows_after})
    (path / "meta.json").write_text(json.dumps(meta, indent=2) + "\n")
    return red
