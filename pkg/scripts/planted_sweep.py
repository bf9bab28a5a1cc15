"""Random planted instances: how often the condition holds and how orbits end.

    python scripts/planted_sweep.py --instances 200 --seed 1 [--csv out.csv]

For every instance that passes the sampled condition check, the orbit started
in the planted piece of the first set is solved and its Fejer and
distance-to-set behaviour measured against the planted point.
"""

import argparse
import collections
import csv
import sys
import time

import numpy as np

from pucs.instances import random_planted
from pucs.solver import SolverConfig, solve
from pucs.ucs import dist_ucs
from pucs.verify import check_condition


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--instances", type=int, default=200)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--samples", type=int, default=200, help="condition samples per piece")
    parser.add_argument("--loose", action="store_true", help="plant the common point deep inside the pieces")
    parser.add_argument("--csv", help="write one row per accepted instance")
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    cfg = SolverConfig()
    rows = []
    statuses = collections.Counter()
    tried = 0
    t0 = time.perf_counter()
    while len(rows) < args.instances:
        tried += 1
        inst = random_planted(rng, tight=not args.loose)
        if not check_condition(inst.problem, args.samples, seed=tried).holds:
            continue
        p, r = inst.problem, inst.planted[0]
        rep = solve(p, cfg)
        orbit = rep.orbits[r]
        statuses[orbit.status.value] += 1
        path = orbit.path()
        d = np.linalg.norm(path - inst.point, axis=1)
        rows.append(
            {
                "dim": p.dimension,
                "m": p.m,
                "pieces": "x".join(map(str, p.piece_counts())),
                "status": orbit.status.value,
                "sweeps": orbit.sweeps_used,
                "pruned": len(rep.pruned),
                "max_fejer_increase": float(np.max(np.diff(d), initial=0.0)),
                "max_final_dist": max(dist_ucs(s, orbit.current) for s in p.sets),
            }
        )
    elapsed = time.perf_counter() - t0

    sweeps = np.array([row["sweeps"] for row in rows])
    print(f"{len(rows)} accepted of {tried} generated ({elapsed:.1f}s)")
    print("planted-orbit status:", dict(statuses))
    print("sweeps: median %d, 90%% %d, max %d" % (np.median(sweeps), np.percentile(sweeps, 90), sweeps.max()))
    print("largest Fejer increase: %.3g" % max(row["max_fejer_increase"] for row in rows))
    print("largest final set distance: %.3g" % max(row["max_final_dist"] for row in rows))
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)
    return 0


if __name__ == "__main__":
    sys.exit(main())
