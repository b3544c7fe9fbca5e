"""Command line entry point: ``sdbtest run|replay|reduce|timing``.

Exit codes: 0 no discrepancy, 1 discrepancies found, 2 operational failure.
The last line printed is always ``SUMMARY key=value ...``.
"""
from __future__ import annotations

import argparse
import logging
import sys

from .adapters import EngineError
from .config import ConfigError, campaign_from, load_config
from .harness import adapter_factory, read_bundle, replay, run_campaign, timing_sweep
from .reducer import NotReproducing, reduce_bundle

EXIT_OK, EXIT_BUGS, EXIT_FAIL = 0, 1, 2


def _summary(**fields) -> str:
    return "SUMMARY " + " ".join(f"{k}={v}" for k, v in fields.items())


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--target", help="dialect / engine: reference, postgis, mysql, duckdb")
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--queries", type=int, help="queries per run")
    p.add_argument("--runs", type=int)
    p.add_argument("--n", type=int, help="geometries per database")
    p.add_argument("--m", type=int, help="tables per database")
    p.add_argument("--fault", action="append", help="reference-engine fault, e.g. "
                   "Covers:coord_gt=50:constant=false (repeatable)")
    p.add_argument("--out", help="report directory")
    p.add_argument("--delay", type=float, help="seconds of artificial delay per statement")
    p.add_argument("--command", dest="client_command", help="client command for real engines")


def _overrides(args) -> dict:
    keys = ("target", "seed", "workers", "queries", "runs", "n", "m", "out", "delay",
            "client_command")
    out = {k: getattr(args, k, None) for k in keys}
    if getattr(args, "fault", None):
        out["fault"] = tuple(args.fault)
    return out


def cmd_run(args) -> int:
    cfg = campaign_from(load_config(args.config, _overrides(args)))
    print(f"target={cfg.dialect} seed={cfg.seed} runs={cfg.runs} queries={cfg.queries_per_run} "
          f"n={cfg.generator.geometry_count} m={cfg.generator.table_count}", flush=True)

    def progress(r):
        v = dict(r.verdicts)
        print(f"run {r.run} seed={r.seed} verdicts={sum(v.values())} "
              f"discrepancies={len(r.discrepancies)} skipped={v.get('skipped', 0)} "
              f"sdbms_time={r.sdbms_time:.3f} total_time={r.total_time:.3f}"
              + (f" error={r.error}" if r.error else ""), flush=True)

    report = run_campaign(cfg, on_run=progress)
    for b in report.bundles:
        print(f"bundle {b}")
    s = report.summary()
    print(_summary(**s, out=cfg.out_dir))
    if s["status"] == "error":
        return EXIT_FAIL
    return EXIT_BUGS if report.discrepancies else EXIT_OK


def _bundle_factory(args, d):
    target = args.target or d.dialect
    if args.no_faults:
        faults = ()
    elif args.fault:
        faults = tuple(args.fault)
    else:
        faults = d.faults if target == d.dialect else ()
    return target, faults, adapter_factory(target, faults, command=args.client_command)


def cmd_replay(args) -> int:
    d = read_bundle(args.bundle)
    target, faults, factory = _bundle_factory(args, d)
    c1, c2 = replay(d, factory)
    same = (c1, c2) == (d.count1, d.count2)
    print(f"count1={c1} count2={c2} recorded=({d.count1},{d.count2}) reproduced={same}")
    print(_summary(status="bugs" if c1 != c2 else "ok", target=target,
                   faults=";".join(faults) or "none", count1=c1, count2=c2, reproduced=same))
    return EXIT_BUGS if c1 != c2 else EXIT_OK


def cmd_reduce(args) -> int:
    d = read_bundle(args.bundle)
    target, faults, factory = _bundle_factory(args, d)
    red = reduce_bundle(args.bundle, factory, budget=args.budget, shrink=not args.no_shrink)
    r = red.discrepancy
    print(f"rows {red.rows_before} -> {red.rows_after} in {red.tests} replays"
          + (" (partial)" if red.partial else ""))
    print(_summary(status="partial" if red.partial else "reduced", target=target,
                   rows_before=red.rows_before, rows_after=red.rows_after,
                   count1=r.count1, count2=r.count2, tests=red.tests))
    return EXIT_FAIL if red.partial else EXIT_OK


def cmd_timing(args) -> int:
    values = load_config(args.config, _overrides(args))
    if args.ns:
        values["timing_ns"] = tuple(int(x) for x in args.ns.split(","))
    if args.reps:
        values["timing_reps"] = args.reps
    values["out"] = None
    cfg = campaign_from(values)
    rows = timing_sweep(cfg, values["timing_ns"], values["timing_reps"])
    print(f"{'N':>5} {'reps':>5} {'sdbms_time':>12} {'total_time':>12} {'ratio':>7}")
    for r in rows:
        print(f"{r.n:>5} {r.reps:>5} {r.sdbms_time:>12.4f} {r.total_time:>12.4f} {r.ratio:>7.3f}")
    monotone = all(a.total_time < b.total_time for a, b in zip(rows, rows[1:]))
    print(_summary(status="ok", target=cfg.dialect,
                   ns=",".join(str(r.n) for r in rows),
                   ratios=",".join(f"{r.ratio:.3f}" for r in rows),
                   total_times=",".join(f"{r.total_time:.4f}" for r in rows),
                   monotone=monotone))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sdbtest", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a testing campaign")
    _add_common(p)
    p.set_defaults(func=cmd_run)

    for name, func, helptext in (("replay", cmd_replay, "re-execute a bundle"),
                                 ("reduce", cmd_reduce, "minimize a bundle in place")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("bundle")
        p.add_argument("--target")
        p.add_argument("--fault", action="append")
        p.add_argument("--no-faults", action="store_true",
                       help="ignore the faults recorded in the bundle")
        p.add_argument("--command", dest="client_command")
        if name == "reduce":
            p.add_argument("--budget", type=int, default=5000, help="max replays")
            p.add_argument("--no-shrink", action="store_true", help="skip geometry shrinking")
        p.set_defaults(func=func)

    p = sub.add_parser("timing", help="N sweep of the engine/total time split")
    _add_common(p)
    p.add_argument("--ns", help="comma-separated geometry counts (default 1,10,50,100)")
    p.add_argument("--reps", type=int, help="repetitions per N (default 10)")
    p.set_defaults(func=cmd_timing)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except NotReproducing as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(_summary(status="error", reason="not-reproducing"))
    except (ConfigError, FileNotFoundError, EngineError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(_summary(status="error", reason=type(exc).__name__))
    except KeyboardInterrupt:
        print(_summary(status="error", reason="interrupted"))
    return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
