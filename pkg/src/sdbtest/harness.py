"""Twin databases, template queries, count comparison and campaigns.

A campaign run generates SDB1, canonicalizes every geometry and maps it
through one shared affine matrix to get SDB2, loads both into two isolated
databases of the target engine, and sends the same template queries to
both.  Unequal counts are discrepancies; engine errors only cause skips.
"""
from __future__ import annotations

import dataclasses
import json
import logging
import random
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .adapters import Adapter, EngineError, FaultSpec, TransportError, get_dialect, make_adapter
from .affine import MappingMatrix, apply, generate_mapping_matrix
from .canonicalize import canonicalize
from .de9im import named_predicate
from .generator import GeneratorConfig, SpatialDatabase, generate
from .geometry import Geometry

log = logging.getLogger(__name__)

QUERY_TEMPLATE = "SELECT COUNT(*) FROM <table1> JOIN <table2> ON <TopoRlt>;"


@dataclass(frozen=True)
class QueryTemplate:
    text: str = QUERY_TEMPLATE

    def fill(self, table1: str, table2: str, predicate: str, dialect) -> str:
        """Render the template; a self-join is aliased so the SQL stays legal."""
        if table1 == table2:
            left, right = f"{table1} AS a1", f"{table2} AS a2"
            a, b = "a1", "a2"
        else:
            left, right, a, b = table1, table2, table1, table2
        cond = dialect.render_predicate(predicate, a, b)
        return (self.text.replace("<table1>", left).replace("<table2>", right)
                .replace("<TopoRlt>", cond))


@dataclass
class DatabasePair:
    sdb1: SpatialDatabase
    sdb2: SpatialDatabase
    matrix: MappingMatrix
    seed: int | None = None


def twin_geometry(matrix: MappingMatrix, g: Geometry) -> Geometry:
    """The SDB2 counterpart of an SDB1 geometry."""
    return apply(matrix, canonicalize(g))


def build_pair(gen_config: GeneratorConfig, rng: random.Random | None = None,
               matrix: MappingMatrix | None = None,
               entry_range: tuple[int, int] = (-5, 5),
               sdb1: SpatialDatabase | None = None) -> DatabasePair:
    rng = rng if rng is not None else random.Random(gen_config.seed)
    if sdb1 is None:
        sdb1 = generate(gen_config, rng)
    if matrix is None:
        matrix = generate_mapping_matrix(2, rng, entry_range)
    sdb2 = sdb1.map(lambda g: twin_geometry(matrix, g))
    return DatabasePair(sdb1, sdb2, matrix, gen_config.seed)


def instantiate_query(db: SpatialDatabase, dialect, rng: random.Random,
                      predicates: tuple[str, ...] | None = None,
                      template: QueryTemplate = QueryTemplate()) -> str:
    """Tables drawn uniformly with replacement, predicate uniformly from the list."""
    names = db.table_names
    if not names:
        raise ValueError("database has no tables")
    preds = tuple(predicates) if predicates else dialect.supported
    t1, t2 = rng.choice(names), rng.choice(names)
    return template.fill(t1, t2, rng.choice(preds), dialect)


# -- loading and validation ------------------------------------------------------

@dataclass
class LoadResult:
    log1: list[str] = field(default_factory=list)
    log2: list[str] = field(default_factory=list)
    rejected: int = 0
    divergent: int = 0
    accepted1: dict = field(default_factory=dict)     # table -> [geometry] as loaded in SDB1


def load_pair(pair: DatabasePair, a1: Adapter, a2: Adapter) -> LoadResult:
    """Create both schemas and insert every row pair.

    When only one twin of a row is rejected, the accepted one is deleted
    again (and the DELETE logged) so both databases keep matching rows.
    """
    res = LoadResult()
    names = pair.sdb1.table_names
    res.log1 += a1.create_schema(names)
    res.log2 += a2.create_schema(names)
    res.accepted1 = {n: [] for n in names}
    for (t, gid, g1), (_, _, g2) in zip(pair.sdb1.rows(), pair.sdb2.rows()):
        r1, s1 = a1.insert(t, gid, g1)
        r2, s2 = a2.insert(t, gid, g2)
        res.log1.append(s1)
        res.log2.append(s2)
        if r1.accepted and r2.accepted:
            res.accepted1[t].append(g1)
        elif r1.accepted or r2.accepted:
            res.divergent += 1
            side, adapter, logl = (1, a1, res.log1) if r1.accepted else (2, a2, res.log2)
            log.info("divergent insert %s/%s: rejected only in sdb%d (%s)", t, gid,
                     3 - side, (r2 if r1.accepted else r1).reason)
            logl.append(adapter.delete(t, gid))
        else:
            res.rejected += 1
    return res


@dataclass
class Verdict:
    status: str                      # consistent | discrepancy | skipped | divergent-error
    count1: int | None = None
    count2: int | None = None
    error: str = ""


def validate(a1: Adapter, a2: Adapter, query: str) -> Verdict:
    """Run ``query`` on both twins.  Transport errors propagate."""
    out, errs = [], []
    for a in (a1, a2):
        try:
            out.append(a.count_query(query))
            errs.append(None)
        except TransportError:
            raise
        except EngineError as exc:
            out.append(None)
            errs.append(str(exc))
    c1, c2 = out
    if errs[0] and errs[1]:
        return Verdict("skipped", error=errs[0])
    if errs[0] or errs[1]:
        log.warning("divergent error on %s: %s", query, errs[0] or errs[1])
        return Verdict("divergent-error", c1, c2, errs[0] or errs[1])
    return Verdict("consistent" if c1 == c2 else "discrepancy", c1, c2)


# -- discrepancies and bundles -------------------------------------------------

@dataclass
class Discrepancy:
    statement_log_1: list[str]
    statement_log_2: list[str]
    query: str
    count1: int
    count2: int
    seed: int | None
    matrix: MappingMatrix
    dialect: str
    timestamp: str = ""
    faults: tuple[str, ...] = ()
    run: int = 0

    def __post_init__(self):
        if not self.timestamp:
            self.timestamp = datetime.now(timezone.utc).isoformat(timespec="seconds")


BUNDLE_FILES = ("sdb1.sql", "sdb2.sql", "query.sql", "matrix.txt", "meta.json")


def write_bundle(d: Discrepancy, path: str | Path) -> Path:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    (path / "sdb1.sql").write_text("\n".join(d.statement_log_1) + "\n")
    (path / "sdb2.sql").write_text("\n".join(d.statement_log_2) + "\n")
    (path / "query.sql").write_text(d.query + "\n")
    (path / "matrix.txt").write_text(d.matrix.to_text())
    meta = {"seed": d.seed, "dialect": d.dialect, "count1": d.count1, "count2": d.count2,
            "timestamp": d.timestamp, "faults": list(d.faults), "run": d.run}
    (path / "meta.json").write_text(json.dumps(meta, indent=2) + "\n")
    return path


def read_bundle(path: str | Path) -> Discrepancy:
    path = Path(path)
    missing = [f for f in BUNDLE_FILES if not (path / f).is_file()]
    if missing:
        raise FileNotFoundError(f"incomplete bundle {path}: missing {', '.join(missing)}")
    meta = json.loads((path / "meta.json").read_text())

    def lines(name):
        return [s for s in (path / name).read_text().splitlines() if s.strip()]

    return Discrepancy(
        statement_log_1=lines("sdb1.sql"), statement_log_2=lines("sdb2.sql"),
        query=(path / "query.sql").read_text().strip(),
        count1=meta["count1"], count2=meta["count2"], seed=meta.get("seed"),
        matrix=MappingMatrix.from_text((path / "matrix.txt").read_text()),
        dialect=meta["dialect"], timestamp=meta.get("timestamp", ""),
        faults=tuple(meta.get("faults", ())), run=meta.get("run", 0))


def execute_log(adapter: Adapter, statements: list[str]) -> int:
    """Send a statement log; engine errors (rejected inserts) are tolerated.

    Returns the number of statements the engine refused.
    """
    refused = 0
    for sql in statements:
        try:
            adapter.execute(sql)
        except TransportError:
            raise
        except EngineError:
            refused += 1
    return refused


def replay(d: Discrepancy, factory) -> tuple[int, int]:
    """Re-execute both logs on fresh adapters from ``factory(side)`` and re-query."""
    a1, a2 = factory(1), factory(2)
    try:
        execute_log(a1, d.statement_log_1)
        execute_log(a2, d.statement_log_2)
        return a1.count_query(d.query), a2.count_query(d.query)
    finally:
        a1.close()
        a2.close()


def adapter_factory(dialect: str, faults=(), delay: float = 0.0, command: str | None = None,
                    prefix: str = "sdbtest"):
    specs = tuple(f if isinstance(f, FaultSpec) else FaultSpec.parse(f) for f in faults)
    # relations are a pure function of the geometry pair (faults apply afterwards),
    # so every reference adapter from this factory can share one cache
    shared: dict = {}

    def factory(side: int) -> Adapter:
        return make_adapter(dialect, namespace=f"{prefix}_{side}", faults=specs, delay=delay,
                            command=command, cache=shared)

    return factory


# -- campaigns -----------------------------------------------------------------

@dataclass
class CampaignConfig:
    generator: GeneratorConfig = field(default_factory=GeneratorConfig)
    queries_per_run: int = 100
    runs: int = 10
    dialect: str = "reference"
    predicates: tuple[str, ...] | None = None
    oracle_crosscheck: bool = False
    seed: int = 0
    workers: int = 1
    faults: tuple[str, ...] = ()
    delay: float = 0.0
    entry_range: tuple[int, int] = (-5, 5)
    command: str | None = None
    out_dir: str | None = None

    def __post_init__(self):
        if self.queries_per_run < 1 or self.runs < 1 or self.workers < 1:
            raise ValueError("queries_per_run, runs and workers must be positive")
        supported = get_dialect(self.dialect).supported
        if self.predicates is None:
            self.predicates = supported
        self.predicates = tuple(self.predicates)
        if not self.predicates:
            raise ValueError("predicate list is empty")
        bad = [p for p in self.predicates if p not in supported]
        if bad:
            raise ValueError(f"{self.dialect} does not support {bad}")
        for f in self.faults:
            FaultSpec.parse(f)

    def run_seed(self, run: int) -> int:
        return self.seed + run


@dataclass
class TimingSplit:
    sdbms_time: float
    total_time: float

    @property
    def ratio(self) -> float:
        return self.sdbms_time / self.total_time if self.total_time > 0 else 0.0


@dataclass
class RunResult:
    run: int
    seed: int
    verdicts: Counter = field(default_factory=Counter)
    discrepancies: list[Discrepancy] = field(default_factory=list)
    oracle_mismatches: list[str] = field(default_factory=list)
    rejected_rows: int = 0
    divergent_inserts: int = 0
    sdbms_time: float = 0.0
    total_time: float = 0.0
    statements: int = 0
    error: str = ""


def record_timing(run: RunResult) -> TimingSplit:
    return TimingSplit(run.sdbms_time, run.total_time)


def _oracle_count(query_tables, accepted, pred, first_is_left) -> int:
    t1, t2 = query_tables
    total = 0
    for g1 in accepted[t1]:
        for g2 in accepted[t2]:
            a, b = (g1, g2) if first_is_left else (g2, g1)
            total += named_predicate(pred, a, b)
    return total


def run_one(cfg: CampaignConfig, run: int) -> RunResult:
    seed = cfg.run_seed(run)
    res = RunResult(run, seed)
    t0 = time.perf_counter()
    factory = adapter_factory(cfg.dialect, cfg.faults, cfg.delay, cfg.command,
                              prefix=f"sdbtest_s{seed}")
    a1, a2 = factory(1), factory(2)
    try:
        rng = random.Random(seed)
        gen = dataclasses.replace(cfg.generator, seed=seed)
        pair = build_pair(gen, rng, entry_range=cfg.entry_range)
        loaded = load_pair(pair, a1, a2)
        res.rejected_rows, res.divergent_inserts = loaded.rejected, loaded.divergent
        dialect = a1.dialect
        for _ in range(cfg.queries_per_run):
            t1, t2 = rng.choice(pair.sdb1.table_names), rng.choice(pair.sdb1.table_names)
            pred = rng.choice(cfg.predicates)
            query = QueryTemplate().fill(t1, t2, pred, dialect)
            v = validate(a1, a2, query)
            res.verdicts[v.status] += 1
            if v.status == "discrepancy":
                res.discrepancies.append(Discrepancy(
                    list(loaded.log1), list(loaded.log2), query, v.count1, v.count2, seed,
                    pair.matrix, cfg.dialect, faults=tuple(cfg.faults), run=run))
            if cfg.oracle_crosscheck and v.count1 is not None:
                expected = _oracle_count((t1, t2), loaded.accepted1, pred, True)
                if expected != v.count1:
                    res.oracle_mismatches.append(f"{query} engine={v.count1} oracle={expected}")
    except TransportError as exc:
        res.error = str(exc)
    finally:
        res.sdbms_time = a1.sdbms_time + a2.sdbms_time
        res.statements = a1.statements + a2.statements
        a1.close()
        a2.close()
        res.total_time = time.perf_counter() - t0
    return res


@dataclass
class CampaignReport:
    config: CampaignConfig
    runs: list[RunResult] = field(default_factory=list)
    bundles: list[Path] = field(default_factory=list)
    interrupted: bool = False

    @property
    def discrepancies(self) -> list[Discrepancy]:
        return [d for r in self.runs for d in r.discrepancies]

    @property
    def verdicts(self) -> Counter:
        total = Counter()
        for r in self.runs:
            total.update(r.verdicts)
        return total

    @property
    def errors(self) -> list[str]:
        return [f"run {r.run}: {r.error}" for r in self.runs if r.error]

    @property
    def partial(self) -> bool:
        return bool(self.errors) or self.interrupted

    def summary(self) -> dict:
        v = self.verdicts
        return {
            "status": "error" if self.partial else ("bugs" if self.discrepancies else "ok"),
            "target": self.config.dialect, "seed": self.config.seed, "runs": len(self.runs),
            "verdicts": sum(v.values()), "discrepancies": len(self.discrepancies),
            "skipped": v["skipped"], "divergent_errors": v["divergent-error"],
            "oracle_mismatches": sum(len(r.oracle_mismatches) for r in self.runs),
            "sdbms_time": round(sum(r.sdbms_time for r in self.runs), 6),
            "total_time": round(sum(r.total_time for r in self.runs), 6),
        }


def run_campaign(cfg: CampaignConfig, on_run=None) -> CampaignReport:
    """Run ``cfg.runs`` independent runs; Ctrl-C keeps the finished ones."""
    report = CampaignReport(cfg)
    indices = list(range(cfg.runs))
    try:
        if cfg.workers > 1 and cfg.runs > 1:
            with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
                for r in pool.map(run_one, [cfg] * len(indices), indices):
                    report.runs.append(r)
                    if on_run:
                        on_run(r)
        else:
            for i in indices:
                r = run_one(cfg, i)
                report.runs.append(r)
                if on_run:
                    on_run(r)
                if r.error:
                    break
    except KeyboardInterrupt:
        report.interrupted = True
    if cfg.out_dir:
        out = Path(cfg.out_dir)
        for r in report.runs:
            for k, d in enumerate(r.discrepancies):
                report.bundles.append(write_bundle(d, out / f"seed{r.seed}-q{k:03d}"))
        out.mkdir(parents=True, exist_ok=True)
        runs = [{"run": r.run, "seed": r.seed, "verdicts": dict(r.verdicts),
                 "discrepancies": len(r.discrepancies), "sdbms_time": r.sdbms_time,
                 "total_time": r.total_time, "statements": r.statements, "error": r.error,
                 "oracle_mismatches": r.oracle_mismatches}
                for r in report.runs]
        (out / "report.json").write_text(json.dumps({"summary": report.summary(), "runs": runs},
                                                    indent=2) + "\n")
    return report


@dataclass
class TimingRow:
    n: int
    reps: int
    sdbms_time: float
    total_time: float

    @property
    def ratio(self) -> float:
        return self.sdbms_time / self.total_time if self.total_time > 0 else 0.0


def timing_sweep(cfg: CampaignConfig, ns=(1, 10, 50, 100), reps: int = 10) -> list[TimingRow]:
    """Mean engine time and total time per run for each geometry count N."""
    rows = []
    for n in ns:
        gen = dataclasses.replace(cfg.generator, geometry_count=n)
        splits = []
        for rep in range(reps):
            one = dataclasses.replace(cfg, generator=gen, runs=1, workers=1, out_dir=None,
                                      seed=cfg.seed + rep)
            r = run_one(one, 0)
            if r.error:
                raise TransportError(r.error)
            splits.append(record_timing(r))
        rows.append(TimingRow(n, reps, sum(s.sdbms_time for s in splits) / reps,
                              sum(s.total_time for s in splits) / reps))
    return rows
