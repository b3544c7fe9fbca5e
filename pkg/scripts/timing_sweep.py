"""Full-size N sweep of engine time vs total time (reference engine, CSV to stdout)."""
import argparse
import csv
import sys

from sdbtest.harness import CampaignConfig, timing_sweep


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ns", default="1,10,50,100")
    ap.add_argument("--reps", type=int, default=10)
    ap.add_argument("--queries", type=int, default=100)
    ap.add_argument("--delay", type=float, default=0.0, help="seconds per statement")
    args = ap.parse_args()
    cfg = CampaignConfig(queries_per_run=args.queries, delay=args.delay)
    rows = timing_sweep(cfg, ns=tuple(int(x) for x in args.ns.split(",")), reps=args.reps)
    out = csv.writer(sys.stdout)
    out.writerow(["n", "reps", "sdbms_time", "total_time", "ratio"])
    for r in rows:
        out.writerow([r.n, r.reps, f"{r.sdbms_time:.4f}", f"{r.total_time:.4f}", f"{r.ratio:.4f}"])


if __name__ == "__main__":
    main()
