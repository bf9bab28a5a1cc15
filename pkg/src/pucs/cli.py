"""Command-line driver.

Examples
--------
    pucs solve problems/example51.ucs --report out.json --trace trace.csv
    pucs verify problems/example51.ucs --combos --condition

Exit codes: ``solve`` returns 0 when at least one orbit converged, 2 when
none did and 1 on input errors; ``verify`` returns 0 on a clean run (its
findings live in the report) and 1 on input, budget or sampling errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import reports
from .errors import PucsError
from .problem_file import load_problem_file
from .solver import SolverConfig, solve
from .verify import OracleConfig, audit_pruning, check_condition, enumerate_feasible_combos

log = logging.getLogger("pucs")


def create_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pucs", description="Feasibility seeking for unions of convex sets")
    parser.add_argument("-v", "--verbose", action="store_true", help="log at INFO level")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run the pruned cyclic projection algorithm")
    p.add_argument("problem", type=Path)
    p.add_argument("--eps", type=float, default=1e-8, help="sweep residual threshold (default: 1e-8)")
    p.add_argument("--feas-tol", type=float, default=1e-6, help="set-distance threshold (default: 1e-6)")
    p.add_argument("--max-sweeps", type=int, default=10000, help="sweep budget per orbit (default: 10000)")
    p.add_argument("--tie-tol", type=float, default=1e-9, help="nearest-piece tie tolerance (default: 1e-9)")
    p.add_argument("--stall-window", type=int, default=50, help="sweeps without progress before stalling (default: 50)")
    p.add_argument("--trace", type=Path, help="write one CSV row per projection step")
    p.add_argument("--report", type=Path, help="write the JSON report")
    p.add_argument("--seed", type=int, default=0, help="recorded in the report; the solver is deterministic")

    v = sub.add_parser("verify", help="run the brute-force oracles")
    v.add_argument("problem", type=Path)
    v.add_argument("--combos", action="store_true", help="enumerate piece combinations")
    v.add_argument("--condition", action="store_true", help="sample the nearest-piece uniqueness condition")
    v.add_argument("--samples", type=int, default=1000, help="samples per piece (default: 1000)")
    v.add_argument("--margin-tol", type=float, default=1e-6, help="minimum distance margin (default: 1e-6)")
    v.add_argument("--seed", type=int, default=0, help="root seed for sampling (default: 0)")
    v.add_argument("--report", type=Path, help="write the JSON report")
    return parser


def _load(path: Path):
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise PucsError(f"cannot read {path}: {exc.strerror or exc}") from exc
    return load_problem_file(text)


def run_solve(args) -> int:
    pf = _load(args.problem)
    config = SolverConfig(
        eps_residual=args.eps,
        max_sweeps=args.max_sweeps,
        tie_tol=args.tie_tol,
        stall_window=args.stall_window,
        feasibility_tol=args.feas_tol,
    )
    report = solve(pf.problem, config, pf.initial_points)
    if args.trace:
        with open(args.trace, "w", newline="", encoding="utf-8") as fh:
            rows = reports.write_trace(pf.problem, report, fh)
        log.info("wrote %d trace rows to %s", rows, args.trace)
    if args.report:
        data = reports.solve_report_dict(pf.problem, report, seed=args.seed)
        data["file_warnings"] = pf.warnings
        args.report.write_text(reports.dumps(data), encoding="utf-8")
    for w in pf.warnings:
        print(f"warning: {w}")
    print(reports.summary_text(pf.problem, report), end="")
    return 0 if report.converged else 2


def run_verify(args) -> int:
    pf = _load(args.problem)
    do_combos = args.combos or not args.condition
    do_condition = args.condition or not args.combos
    data = {"problem": str(args.problem), "seed": args.seed, "file_warnings": pf.warnings}
    if do_combos:
        combos = enumerate_feasible_combos(pf.problem, OracleConfig())
        feasible = [c for c in combos if c.feasible]
        data["combos"] = {
            "count": len(combos),
            "feasible_count": len(feasible),
            "reports": [reports.combo_dict(c) for c in combos],
            "note": reports.COMBO_NOTE,
        }
        print(f"combos: {len(combos)} tested, {len(feasible)} feasible")
        for c in feasible:
            print(f"  {c.combo} witness ({', '.join(f'{v:.9g}' for v in c.witness)})")
        solved = solve(pf.problem, overrides=pf.initial_points)
        audit = audit_pruning(solved.pruned, combos)
        data["pruning_audit"] = {
            "pruned": list(audit.pruned),
            "start_piece_in_feasible_combo": {str(r): ok for r, ok in audit.start_piece_feasible.items()},
        }
    if do_condition:
        cond = check_condition(pf.problem, args.samples, args.margin_tol, args.seed)
        data["condition"] = reports.condition_dict(cond)
        print(f"condition: holds={str(cond.holds).lower()} min_margin={cond.min_margin:.6g}")
        for (i, j), t in sorted(cond.theta.items()):
            print(f"  theta({i},{j}) = {t}")
    if args.report:
        args.report.write_text(reports.dumps(data), encoding="utf-8")
    return 0


def main(argv=None) -> int:
    parser = create_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "solve":
            return run_solve(args)
        return run_verify(args)
    except (PucsError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
