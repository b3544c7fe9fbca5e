"""Pre-screen seeds for the coordinate-threshold fault experiment.

A seed qualifies when its twin database has at least one coordinate above
the threshold: SDB1 coordinates stay inside [0, THRESHOLD] by construction,
so without such a coordinate the fault can never fire on either side.  The
screen looks only at this precondition; whether a discrepancy is actually
found is reported afterwards, for information.

    python3 scripts/screen_fault_seeds.py --count 10
"""
from __future__ import annotations

import argparse
import dataclasses
import random

from sdbtest.generator import GeneratorConfig
from sdbtest.geometry import iter_points
from sdbtest.harness import CampaignConfig, build_pair, run_one

THRESHOLD = 50
FAULT = f"Covers:coord_gt={THRESHOLD}:constant=false"


def campaign(seed: int, queries: int = 100, n: int = 50) -> CampaignConfig:
    gen = GeneratorConfig(geometry_count=n, table_count=2, coordinate_range=(0, THRESHOLD))
    return CampaignConfig(generator=gen, queries_per_run=queries, runs=1, seed=seed,
                          faults=(FAULT,))


def qualifies(cfg: CampaignConfig) -> bool:
    # mirrors the rng consumption of run_one
    seed = cfg.run_seed(0)
    rng = random.Random(seed)
    pair = build_pair(dataclasses.replace(cfg.generator, seed=seed), rng,
                      entry_range=cfg.entry_range)
    return any(max(p) > THRESHOLD for g in pair.sdb2.geometries() for p in iter_points(g))


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--count", type=int, default=10)
    ap.add_argument("--start", type=int, default=0)
    ap.add_argument("--no-run", action="store_true", help="skip the informational run")
    args = ap.parse_args()
    chosen, seed = [], args.start
    while len(chosen) < args.count:
        if qualifies(campaign(seed)):
            chosen.append(seed)
        seed += 1
    print("qualifying seeds:", chosen)
    if not args.no_run:
        for s in chosen:
            r = run_one(campaign(s), 0)
            print(f"seed {s}: discrepancies={len(r.discrepancies)} verdicts={dict(r.verdicts)}")


if __name__ == "__main__":
    main()
