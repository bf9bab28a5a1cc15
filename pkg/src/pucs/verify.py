"""Independent checks for desk-scale problems.

Nothing here calls the solver's projection-selection code.  Distances are
recomputed from their own closed forms in :func:`reference_distances`, so
these functions can serve as oracles for :mod:`pucs.ucs` and
:mod:`pucs.solver`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .convex import Ball, Box, ConvexPiece, Halfspace, Hyperplane, PointLike, as_point
from .errors import BudgetError, InstanceError, UnsupportedSamplingError
from .solver import Problem
from .ucs import DEFAULT_TIE_TOL, UcsSet


def reference_distances(piece: ConvexPiece, X: np.ndarray) -> np.ndarray:
    """Distance from each row of ``X`` to ``piece``, without forming projections."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != piece.dim:
        raise InstanceError(f"dimension mismatch: expected {piece.dim}, got {X.shape[1]}")
    if isinstance(piece, Ball):
        return np.maximum(np.linalg.norm(X - np.asarray(piece.center), axis=1) - piece.radius, 0.0)
    if isinstance(piece, Box):
        lo, hi = np.asarray(piece.lower), np.asarray(piece.upper)
        out = np.maximum(np.maximum(lo - X, X - hi), 0.0)
        return np.linalg.norm(out, axis=1)
    a = np.asarray(piece.normal)
    signed = (X @ a - piece.offset) / np.linalg.norm(a)
    if isinstance(piece, Halfspace):
        return np.maximum(signed, 0.0)
    if isinstance(piece, Hyperplane):
        return np.abs(signed)
    raise TypeError(f"unknown piece type {type(piece).__name__}")


def _distance_table(ucs: UcsSet, X: np.ndarray) -> np.ndarray:
    return np.column_stack([reference_distances(p, X) for p in ucs.pieces])


@dataclass(frozen=True)
class BruteForceProjection:
    piece_index: int  # smallest index among the minimizers
    distance: float
    tied: tuple  # every 1-based index within tie_tol of the minimum
    distances: tuple

    @property
    def is_tie(self) -> bool:
        return len(self.tied) > 1


def brute_force_ucs_projection(
    ucs: UcsSet, x: PointLike, tie_tol: float = DEFAULT_TIE_TOL
) -> BruteForceProjection:
    """Evaluate the distance to every piece and take the argmin."""
    x = as_point(x, ucs.dim)
    d = _distance_table(ucs, x[None, :])[0]
    best = float(d.min())
    order = sorted(range(len(d)), key=lambda j: (d[j], j))
    tied = tuple(j + 1 for j in order if d[j] - best <= tie_tol)
    return BruteForceProjection(order[0] + 1, best, tied, tuple(float(v) for v in d))


@dataclass(frozen=True)
class OracleConfig:
    eps_residual: float = 1e-8
    feasibility_tol: float = 1e-6
    max_sweeps: int = 5000
    combo_budget: int = 10**6


@dataclass(frozen=True)
class ComboReport:
    """Result of cyclic projections on one choice of piece per set.

    ``feasible`` is a numerical verdict (small residual and small distances
    after a bounded number of sweeps), not a certificate of nonemptiness.
    """

    combo: tuple
    feasible: bool
    witness: np.ndarray | None
    final_gap: float  # largest distance from the final point to a chosen piece
    sweeps_used: int
    residual: float


def _cyclic_projections(pieces, start, cfg: OracleConfig):
    x = np.array(start, dtype=np.float64)
    residual = math.inf
    sweeps = 0
    for sweeps in range(1, cfg.max_sweeps + 1):
        sweep_start = x
        residual = 0.0
        for p in pieces[1:] + pieces[:1]:
            y = p.project(x)
            residual = max(residual, float(np.linalg.norm(y - x)))
            x = y
        if residual <= cfg.eps_residual:
            break
        # settled into a cycle with nonzero steps: the pieces do not meet
        if float(np.linalg.norm(x - sweep_start)) <= 1e-3 * cfg.eps_residual:
            break
    return x, residual, sweeps


def enumerate_feasible_combos(problem: Problem, config: OracleConfig | None = None) -> list:
    """Test every choice of one piece per set for a common point.

    Each combination runs plain cyclic projections on its convex pieces,
    starting from the witness of the piece chosen in the first set.

    Raises
    ------
    BudgetError
        If the number of combinations exceeds ``config.combo_budget``.
    """
    cfg = config or OracleConfig()
    counts = problem.piece_counts()
    total = math.prod(counts)
    if total > cfg.combo_budget:
        raise BudgetError(f"{total} combinations exceed the budget of {cfg.combo_budget}")
    reports = []
    for combo in itertools.product(*(range(1, c + 1) for c in counts)):
        pieces = [s.piece(j) for s, j in zip(problem.sets, combo)]
        x, residual, sweeps = _cyclic_projections(pieces, pieces[0].witness(), cfg)
        dists = [float(reference_distances(p, x[None, :])[0]) for p in pieces]
        final_gap = max(dists)
        ok = residual <= cfg.eps_residual and final_gap <= cfg.feasibility_tol
        reports.append(ComboReport(combo, ok, x if ok else None, final_gap, sweeps, residual))
    return reports


@dataclass
class ConditionReport:
    """Sampled evidence for the nearest-piece uniqueness condition.

    ``theta[(i, j)]`` is the piece of set ``i + 1`` (set ``m + 1`` being set
    1) nearest to the samples of piece ``j`` of set ``i``, or
    ``"non-constant"``.  ``holds`` means no sample contradicted the
    condition; it is evidence only, never a proof.
    """

    theta: dict
    min_margin: float
    margins: dict
    samples_used: int
    holds: bool
    seed: int
    margin_tol: float


def _nearest_and_margin(table: np.ndarray):
    if table.shape[1] == 1:
        return np.zeros(len(table), dtype=int), np.full(len(table), math.inf)
    part = np.sort(table, axis=1)
    return np.argmin(table, axis=1), part[:, 1] - part[:, 0]


def _refine_switch(ucs: UcsSet, a: np.ndarray, b: np.ndarray, iters: int = 80) -> float:
    """Bisect the segment ``[a, b]`` on which the nearest piece changes; return the
    smallest margin seen, which tends to 0 at the switching point."""
    lo, hi = 0.0, 1.0
    ja = _nearest_and_margin(_distance_table(ucs, a[None, :]))[0][0]
    best = math.inf
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        x = a + mid * (b - a)
        j, marg = _nearest_and_margin(_distance_table(ucs, x[None, :]))
        best = min(best, float(marg[0]))
        if j[0] == ja:
            lo = mid
        else:
            hi = mid
    return best


def check_condition(
    problem: Problem,
    samples_per_piece: int = 1000,
    margin_tol: float = 1e-6,
    seed: int = 0,
) -> ConditionReport:
    """Sample every piece of every set and record its nearest piece in the next set.

    Each piece is probed at its witness point plus ``samples_per_piece - 1``
    uniform samples drawn from a stream seeded by ``(seed, i, j)``.  If the
    nearest piece changes between samples, the switching point is located by
    bisection and its near-zero margin recorded.
    """
    if samples_per_piece < 1:
        raise ValueError("samples_per_piece must be at least 1")
    for i, s in enumerate(problem.sets, start=1):
        for j, p in enumerate(s.pieces, start=1):
            if not p.bounded:
                raise UnsupportedSamplingError(
                    f"piece {j} of set {i} ({p.shape}) is unbounded and cannot be sampled"
                )
    theta = {}
    margins = {}
    used = 0
    m = problem.m
    for i in range(1, m + 1):
        nxt = problem.set(i + 1)
        for j, piece in enumerate(problem.set(i).pieces, start=1):
            rng = np.random.default_rng(np.random.SeedSequence([seed, i, j]))
            X = piece.witness()[None, :]
            if samples_per_piece > 1:
                X = np.vstack([X, piece.sample(rng, samples_per_piece - 1)])
            used += len(X)
            nearest, marg = _nearest_and_margin(_distance_table(nxt, X))
            low = float(marg.min())
            if np.all(nearest == nearest[0]):
                theta[(i, j)] = int(nearest[0]) + 1
            else:
                theta[(i, j)] = "non-constant"
                k = int(np.flatnonzero(nearest != nearest[0])[0])
                low = min(low, _refine_switch(nxt, X[0], X[k]))
            margins[(i, j)] = low
    min_margin = min(margins.values())
    holds = all(t != "non-constant" for t in theta.values()) and min_margin > margin_tol
    return ConditionReport(theta, min_margin, margins, used, holds, seed, margin_tol)


@dataclass
class SegmentReport:
    """Walk of a segment through the nearest-piece map of a union.

    ``consistent`` is False exactly when no tie was seen but the selected
    piece still changed; that outcome contradicts the theory and signals a
    bug.
    """

    pieces: list  # selected piece per walk point
    tie_points: list = field(default_factory=list)  # parameters t in [0, 1] where a tie was seen
    no_ties: bool = True
    constant_piece: bool = True

    @property
    def consistent(self) -> bool:
        return not (self.no_ties and not self.constant_piece)


def check_singleton_projection_property(
    ucs: UcsSet,
    segment: tuple,
    steps: int,
    tie_tol: float = DEFAULT_TIE_TOL,
    refine_iters: int = 100,
) -> SegmentReport:
    """Walk ``steps`` equally spaced points from ``segment[0]`` to ``segment[1]``.

    At each point the brute-force nearest piece and tie status are recorded.
    Between consecutive points whose nearest piece differs, the change is
    located by bisection.  Distances are continuous, so the switch point must
    be a tie; it is counted as one if the margin there is within ``tie_tol``.
    A change that bisection cannot attribute to a tie leaves ``no_ties`` true
    and ``constant_piece`` false.
    """
    if steps < 2:
        raise ValueError("steps must be at least 2")
    a = as_point(segment[0], ucs.dim)
    b = as_point(segment[1], ucs.dim)
    report = SegmentReport(pieces=[])
    prev_t = None
    prev_piece = None
    prev_tie = False
    for t in np.linspace(0.0, 1.0, steps):
        bf = brute_force_ucs_projection(ucs, a + t * (b - a), tie_tol)
        if bf.is_tie:
            report.no_ties = False
            report.tie_points.append(float(t))
        if prev_piece is not None and bf.piece_index != prev_piece:
            report.constant_piece = False
            if not (bf.is_tie or prev_tie):
                t_switch, tied = _bisect_switch(ucs, a, b, prev_t, float(t), prev_piece, tie_tol, refine_iters)
                if tied:
                    report.no_ties = False
                    report.tie_points.append(t_switch)
        report.pieces.append(bf.piece_index)
        prev_t, prev_piece, prev_tie = float(t), bf.piece_index, bf.is_tie
    return report


def _bisect_switch(ucs, a, b, t_lo, t_hi, piece_lo, tie_tol, iters):
    for _ in range(iters):
        mid = 0.5 * (t_lo + t_hi)
        if mid <= t_lo or mid >= t_hi:
            break
        bf = brute_force_ucs_projection(ucs, a + mid * (b - a), tie_tol)
        if bf.is_tie:
            return mid, True
        if bf.piece_index == piece_lo:
            t_lo = mid
        else:
            t_hi = mid
    for t in (t_lo, t_hi):
        if brute_force_ucs_projection(ucs, a + t * (b - a), tie_tol).is_tie:
            return t, True
    return t_hi, False


@dataclass
class PruneAudit:
    """For each pruned orbit, whether its start piece is part of a feasible combination."""

    pruned: tuple
    start_piece_feasible: dict  # r -> bool

    @property
    def pruned_feasible(self) -> tuple:
        return tuple(r for r, ok in self.start_piece_feasible.items() if ok)


def audit_pruning(pruned, combos) -> PruneAudit:
    feasible_starts = {c.combo[0] for c in combos if c.feasible}
    return PruneAudit(tuple(sorted(pruned)), {r: r in feasible_starts for r in sorted(pruned)})
