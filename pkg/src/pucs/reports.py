"""Trace CSV and JSON reports for solve and verify runs."""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from .problem_file import fmt_float
from .solver import Problem, SolveReport
from .ucs import dist_ucs
from .verify import ComboReport, ConditionReport

PRUNING_NOTE = (
    "pruned lists the orbits whose first sweep ended in a piece of the first set "
    "other than their start piece; retained lists the others"
)
COMBO_NOTE = (
    "combo feasibility is a numerical heuristic: cyclic projections on the chosen "
    "pieces with a finite sweep budget, not a certificate"
)
CONDITION_NOTE = "sampled evidence only; holds=true does not prove the condition"


def trace_header(problem: Problem) -> list:
    n, m = problem.dimension, problem.m
    return (
        ["orbit", "sweep", "k", "i", "tau"]
        + [f"x{d}" for d in range(1, n + 1)]
        + ["step"]
        + [f"dist_C{i}" for i in range(1, m + 1)]
    )


def trace_rows(problem: Problem, report: SolveReport):
    """One row per projection step, ordered by orbit then ``k``."""
    for r, orbit in report.orbits.items():
        for st in orbit.steps:
            yield (
                [str(r), str(st.sweep), str(st.k), str(st.set_index), str(st.tau)]
                + [fmt_float(v) for v in st.point]
                + [fmt_float(st.length)]
                + [fmt_float(dist_ucs(s, st.point)) for s in problem.sets]
            )


def write_trace(problem: Problem, report: SolveReport, fh) -> int:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(trace_header(problem))
    count = 0
    for row in trace_rows(problem, report):
        writer.writerow(row)
        count += 1
    return count


def _num(v):
    if v is None:
        return None
    v = float(v)
    return v if math.isfinite(v) else None


def _vec(x):
    return [float(v) for v in np.asarray(x)]


def solve_report_dict(problem: Problem, report: SolveReport, seed: int | None = None) -> dict:
    cfg = report.config
    orbits = []
    for r, o in report.orbits.items():
        first_tau = o.tau_history[problem.m][1] if len(o.tau_history) > problem.m else None
        orbits.append(
            {
                "r": r,
                "status": o.status.value,
                "start": _vec(o.start),
                "final": _vec(o.current),
                "k": o.k,
                "tau_after_first_sweep": first_tau,
                "sweeps": o.sweeps_used,
                "first_sweep_residual": _num(o.first_sweep_residual),
                "last_sweep_residual": _num(o.last_sweep_residual),
                "tie_violations": o.tie_violations,
                "final_set_distances": [_num(dist_ucs(s, o.current)) for s in problem.sets],
                "residual_trace": [_num(v) for v in o.residual_trace],
                "tau_history": [[k, t] for k, t in o.tau_history],
            }
        )
    return {
        "problem": {
            "dimension": problem.dimension,
            "m": problem.m,
            "pieces_per_set": list(problem.piece_counts()),
            "set_names": [s.name for s in problem.sets],
        },
        "config": {
            "eps_residual": cfg.eps_residual,
            "feasibility_tol": cfg.feasibility_tol,
            "max_sweeps": cfg.max_sweeps,
            "tie_tol": cfg.tie_tol,
            "stall_window": cfg.stall_window,
            "seed": seed,
        },
        "pruned": list(report.pruned),
        "retained": list(report.retained),
        "all_pruned": report.all_pruned,
        "converged": list(report.converged),
        "stalled": list(report.stalled),
        "exhausted": list(report.exhausted),
        "solutions": [{"r": r, "point": _vec(x)} for r, x in report.solutions],
        "orbits": orbits,
        "warnings": list(report.warnings),
        "notes": [PRUNING_NOTE],
    }


def combo_dict(c: ComboReport) -> dict:
    return {
        "combo": list(c.combo),
        "feasible": c.feasible,
        "witness": None if c.witness is None else _vec(c.witness),
        "final_gap": _num(c.final_gap),
        "residual": _num(c.residual),
        "sweeps_used": c.sweeps_used,
    }


def condition_dict(c: ConditionReport) -> dict:
    return {
        "holds": c.holds,
        "min_margin": _num(c.min_margin),
        "margin_tol": c.margin_tol,
        "samples_used": c.samples_used,
        "seed": c.seed,
        "theta": [{"i": i, "j": j, "theta": t} for (i, j), t in sorted(c.theta.items())],
        "margins": [{"i": i, "j": j, "min_margin": _num(v)} for (i, j), v in sorted(c.margins.items())],
        "note": CONDITION_NOTE,
    }


def dumps(data: dict) -> str:
    return json.dumps(data, indent=2, allow_nan=False) + "\n"


def summary_text(problem: Problem, report: SolveReport) -> str:
    out = io.StringIO()
    out.write(f"m={problem.m} sets, pieces per set {list(problem.piece_counts())}, dimension {problem.dimension}\n")
    out.write(f"pruned:    {sorted(report.pruned)}\n")
    out.write(f"retained:  {sorted(report.retained)}\n")
    for r, o in report.orbits.items():
        coords = ", ".join(f"{v:.9g}" for v in o.current)
        line = f"  orbit {r}: {o.status.value:<18} sweeps={o.sweeps_used:<6}"
        if o.status.value != "pruned":
            line += f" residual={o.last_sweep_residual:.3g}"
        out.write(f"{line} at ({coords})\n")
    for w in report.warnings:
        out.write(f"warning: {w}\n")
    return out.getvalue()
