"""Solve the two-union ball example and cross-check it against the oracles.

    python scripts/run_example51.py [--trace trace.csv]
"""

import argparse
import sys

from pucs import reports
from pucs.instances import example51
from pucs.solver import solve
from pucs.verify import audit_pruning, check_condition, enumerate_feasible_combos


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trace", help="write the per-step trace CSV here")
    args = parser.parse_args()

    problem = example51()
    report = solve(problem)
    print(reports.summary_text(problem, report), end="")

    cond = check_condition(problem, samples_per_piece=1000, seed=0)
    print(f"\ncondition holds={cond.holds} (min margin {cond.min_margin:.4g})")
    print("theta:", {f"{i},{j}": t for (i, j), t in sorted(cond.theta.items())})

    combos = enumerate_feasible_combos(problem)
    print("feasible combos:", [c.combo for c in combos if c.feasible])
    audit = audit_pruning(report.pruned, combos)
    for r, ok in audit.start_piece_feasible.items():
        print(f"pruned orbit {r}: start piece {'meets' if ok else 'misses'} the feasible set")

    if args.trace:
        with open(args.trace, "w", newline="") as fh:
            reports.write_trace(problem, report, fh)
    return 0 if report.converged else 2


if __name__ == "__main__":
    sys.exit(main())
