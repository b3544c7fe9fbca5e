import dataclasses
import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sdbtest.adapters import get_dialect
from sdbtest.generator import GeneratorConfig
from sdbtest.harness import CampaignConfig, adapter_factory, read_bundle, replay, run_one, write_bundle
from sdbtest.reducer import (NotReproducing, check_pair_invariant, ddmin, extract_geometry,
                             is_one_minimal, query_tables, reduce, reduce_bundle, restrict,
                             row_key, row_keys, shrink_candidates, simplify_geometry)
from sdbtest.wkt import parse_wkt

FAULT = "Covers:coord_gt=50:constant=false"


@pytest.fixture(scope="module")
def found():
    gen = GeneratorConfig(geometry_count=50, coordinate_range=(0, 50))
    cfg = CampaignConfig(generator=gen, queries_per_run=100, runs=1, seed=0, faults=(FAULT,))
    r = run_one(cfg, 0)
    assert r.discrepancies
    return r.discrepancies[0]


def faulty():
    return adapter_factory("reference", [FAULT])


def test_ddmin_finds_pair():
    assert ddmin(list(range(20)), lambda s: 3 in s and 11 in s) == [3, 11]


@given(st.sets(st.integers(0, 29), min_size=1, max_size=5))
def test_ddmin_one_minimal(target):
    items = list(range(30))
    out = ddmin(items, lambda s: target <= set(s))
    assert set(out) == target


def test_log_helpers():
    log = ["DROP TABLE IF EXISTS t1;", "CREATE TABLE t1 (id INTEGER, g geometry);",
           "INSERT INTO t1 (id, g) VALUES (1, ST_GeomFromText('POINT(1 1)'));",
           "INSERT INTO t1 (id, g) VALUES (2, ST_GeomFromText('POINT(2 2)'));",
           "DELETE FROM t1 WHERE id = 2;",
           "DROP TABLE IF EXISTS t2;"]
    assert row_key(log[2]) == ("t1", 1) and row_key(log[4]) == ("t1", 2)
    assert row_key(log[0]) is None
    assert row_keys(log) == [("t1", 1), ("t1", 2)]
    assert restrict(log, [("t1", 2)], {"t1"}) == log[:2] + log[3:5]
    assert query_tables("SELECT COUNT(*) FROM t2 AS a1 JOIN t1 AS a2 ON x") == {"t1", "t2"}
    assert extract_geometry(log[3]) == parse_wkt("POINT(2 2)")


def test_shrink_candidates_are_smaller():
    g = parse_wkt("MULTILINESTRING((0 0,1 1,2 0),(5 5,6 6))")
    cands = list(shrink_candidates(g))
    assert parse_wkt("LINESTRING(5 5,6 6)") in [c.elements[0] for c in cands if len(c.elements) == 1]
    assert all(len(str(c)) < len(str(g)) for c in cands)
    assert list(shrink_candidates(parse_wkt("POINT(1 1)"))) == []


def test_reduce_is_one_minimal(found):
    red = reduce(found, faulty())
    assert not red.partial and red.rows_after <= red.rows_before
    d = red.discrepancy
    c1, c2 = replay(d, faulty())
    assert c1 != c2 and (c1, c2) == (d.count1, d.count2)
    assert is_one_minimal(d, faulty())
    assert check_pair_invariant(d)


def test_not_reproducing_without_fault(found):
    with pytest.raises(NotReproducing):
        reduce(found, adapter_factory("reference"))


def test_budget_gives_partial(found):
    red = reduce(found, faulty(), budget=3)
    assert red.partial and red.tests == 3


def test_simplify_keeps_pair_invariant(found):
    red = reduce(found, faulty())
    simp = simplify_geometry(red.discrepancy, faulty())
    assert check_pair_invariant(simp.discrepancy)
    c1, c2 = replay(simp.discrepancy, faulty())
    assert c1 != c2


def test_pair_invariant_detects_tampering(found):
    red = reduce(found, faulty()).discrepancy
    log2 = list(red.statement_log_2)
    i = next(k for k, s in enumerate(log2) if s.startswith("INSERT"))
    table, gid = row_key(log2[i])
    log2[i] = get_dialect("reference").render_insert(table, gid, parse_wkt("POINT(123 456)"))
    assert not check_pair_invariant(dataclasses.replace(red, statement_log_2=log2))


def test_reduce_bundle_archives(found, tmp_path):
    path = write_bundle(found, tmp_path / "bug")
    before = (path / "sdb1.sql").read_text()
    red = reduce_bundle(path, faulty())
    assert (path / "original" / "sdb1.sql").read_text() == before
    meta = json.loads((path / "meta.json").read_text())
    assert meta["reduced"] and meta["rows_after"] == red.rows_after
    d = read_bundle(path)
    assert replay(d, faulty()) == (d.count1, d.count2)
    assert is_one_minimal(d, faulty())
