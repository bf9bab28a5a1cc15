"""Cyclic projections onto unions of convex sets with orbit pruning.

One orbit is started in every piece of the first set.  After a first sweep
(one projection onto each set, ending back on the first set) the orbits that
came back to a different piece than they started in are pruned.  Each
remaining orbit is then swept cyclically until it is classified.

Conventions
-----------
* Set and piece indices are 1-based, as are orbit labels ``r``.
* The iteration counter ``k`` is global per orbit: it starts at 1 and is
  never reset.  Restarting at ``k = 1`` after the first sweep would select
  the same sets, because ``control_index(m + 1, m) == 1``.
* The first sweep is sweep 0; later sweeps are numbered from 1.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .convex import DEFAULT_CONTAINMENT_TOL, PointLike, as_point, dist_piece
from .errors import InstanceError, ValidationError
from .ucs import DEFAULT_TIE_TOL, UcsSet, dist_ucs, project_ucs


@dataclass(frozen=True)
class Problem:
    """Find a point common to every union in ``sets``."""

    dimension: int
    sets: tuple

    def __post_init__(self):
        if not isinstance(self.dimension, (int, np.integer)) or self.dimension < 1:
            raise ValidationError(f"dimension must be a positive integer, got {self.dimension!r}")
        sets = tuple(self.sets)
        if not sets:
            raise ValidationError("a problem needs at least one set")
        for s in sets:
            if not isinstance(s, UcsSet):
                raise ValidationError(f"{s!r} is not a UcsSet")
            if s.dim != self.dimension:
                raise InstanceError(
                    f"set {s.name!r} has dimension {s.dim}, problem has {self.dimension}"
                )
        object.__setattr__(self, "dimension", int(self.dimension))
        object.__setattr__(self, "sets", sets)

    @property
    def m(self) -> int:
        return len(self.sets)

    def set(self, i: int) -> UcsSet:
        """Set ``C_i`` for ``1 <= i <= m + 1``; index ``m + 1`` is the copy of ``C_1``."""
        if not 1 <= i <= self.m + 1:
            raise IndexError(f"set index {i} out of range 1..{self.m + 1}")
        return self.sets[(i - 1) % self.m]

    def piece_counts(self) -> tuple:
        return tuple(len(s) for s in self.sets)


@dataclass(frozen=True)
class SolverConfig:
    eps_residual: float = 1e-8
    max_sweeps: int = 10000
    tie_tol: float = DEFAULT_TIE_TOL
    stall_window: int = 50
    feasibility_tol: float = 1e-6

    def __post_init__(self):
        for name in ("eps_residual", "tie_tol", "feasibility_tol"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ValidationError(f"{name} must be a positive finite number, got {v!r}")
        if int(self.max_sweeps) != self.max_sweeps or self.max_sweeps < 1:
            raise ValidationError(f"max_sweeps must be a positive integer, got {self.max_sweeps!r}")
        if int(self.stall_window) != self.stall_window or self.stall_window < 2:
            raise ValidationError(f"stall_window must be an integer >= 2, got {self.stall_window!r}")


class Status(str, enum.Enum):
    ACTIVE = "active"
    PRUNED = "pruned"
    CONVERGED = "converged"
    STALLED = "inconsistent-stall"
    EXHAUSTED = "exhausted"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Step:
    """One projection ``y^(k-1) -> y^k`` of an orbit."""

    k: int
    sweep: int
    set_index: int
    tau: int
    point: np.ndarray
    length: float
    tie: bool


@dataclass
class OrbitState:
    r: int
    current: np.ndarray
    k: int = 1
    tau_history: list = field(default_factory=list)
    last_sweep_residual: float = math.nan
    status: Status = Status.ACTIVE
    tie_violations: int = 0
    sweep: int = 0
    first_sweep_residual: float = math.nan
    residual_trace: list = field(default_factory=list)
    steps: list = field(default_factory=list)
    start: np.ndarray | None = None

    @property
    def tau(self) -> int:
        return self.tau_history[-1][1]

    @property
    def sweeps_used(self) -> int:
        """Number of sweeps after the first one."""
        return len(self.residual_trace)

    def path(self) -> np.ndarray:
        """All iterates ``y^1, y^2, ...`` as rows."""
        return np.vstack([self.start] + [s.point for s in self.steps])


@dataclass
class SolveReport:
    orbits: dict  # r -> OrbitState, ascending r
    pruned: tuple
    retained: tuple
    config: SolverConfig
    all_pruned: bool = False
    warnings: list = field(default_factory=list)

    @property
    def solutions(self) -> list:
        return [(r, o.current) for r, o in self.orbits.items() if o.status is Status.CONVERGED]

    def with_status(self, status: Status) -> tuple:
        return tuple(r for r, o in self.orbits.items() if o.status is status)

    @property
    def converged(self) -> tuple:
        return self.with_status(Status.CONVERGED)

    @property
    def stalled(self) -> tuple:
        return self.with_status(Status.STALLED)

    @property
    def exhausted(self) -> tuple:
        return self.with_status(Status.EXHAUSTED)

    @property
    def sweep_counts(self) -> dict:
        return {r: o.sweeps_used for r, o in self.orbits.items()}

    @property
    def residual_traces(self) -> dict:
        return {r: list(o.residual_trace) for r, o in self.orbits.items()}


def control_index(k: int, m: int) -> int:
    """Set visited at iteration ``k`` of a cycle through ``m`` sets."""
    if k < 1 or m < 1:
        raise ValueError("k and m must be positive")
    return (k - 1) % m + 1


def initialize(
    problem: Problem,
    overrides: Mapping[int, PointLike] | Iterable[tuple] | None = None,
    containment_tol: float = DEFAULT_CONTAINMENT_TOL,
) -> list:
    """One fresh orbit per piece of the first set.

    Orbit ``r`` starts at the witness point of piece ``r`` (ball center, box
    midpoint, ...) unless ``overrides`` supplies a start point, which must lie
    in that piece.
    """
    first = problem.set(1)
    chosen = {}
    if overrides:
        items = overrides.items() if isinstance(overrides, Mapping) else overrides
        for r, pt in items:
            r = int(r)
            if not 1 <= r <= len(first):
                raise ValidationError(f"override for orbit {r}: no such piece in {first.name!r}")
            pt = as_point(pt, problem.dimension)
            d = dist_piece(first.piece(r), pt)
            if d > containment_tol:
                raise ValidationError(
                    f"override for orbit {r} lies outside piece {r} of {first.name!r} (distance {d:g})"
                )
            chosen[r] = pt
    orbits = []
    for r in range(1, len(first) + 1):
        y = np.array(chosen[r] if r in chosen else first.piece(r).witness(), dtype=np.float64)
        orbits.append(OrbitState(r=r, current=y, tau_history=[(1, r)], start=y.copy()))
    return orbits


def sweep_step(problem: Problem, orbit: OrbitState, tie_tol: float = DEFAULT_TIE_TOL) -> OrbitState:
    """Advance ``orbit`` by one projection, onto the set chosen for ``k + 1``."""
    if orbit.status is not Status.ACTIVE:
        raise ValueError(f"orbit {orbit.r} is {orbit.status}, not active")
    i = control_index(orbit.k + 1, problem.m)
    proj = project_ucs(problem.set(i), orbit.current, tie_tol)
    diff = orbit.current - proj.point
    length = math.sqrt(float(diff @ diff))
    orbit.k += 1
    orbit.current = proj.point
    orbit.tau_history.append((orbit.k, proj.piece_index))
    if proj.is_tie:
        orbit.tie_violations += 1
    orbit.steps.append(Step(orbit.k, orbit.sweep, i, proj.piece_index, proj.point, length, proj.is_tie))
    return orbit


def _sweep(problem: Problem, orbit: OrbitState, tie_tol: float) -> float:
    residual = 0.0
    for _ in range(problem.m):
        sweep_step(problem, orbit, tie_tol)
        residual = max(residual, orbit.steps[-1].length)
    return residual


def first_sweep(problem: Problem, orbits: Sequence[OrbitState], config: SolverConfig | None = None):
    """Run one sweep per orbit and prune.

    Returns ``(orbits, R)`` where ``R`` holds the orbits whose sweep ended in
    a piece of the first set other than the one they started in.  Those
    orbits are marked pruned.
    """
    config = config or SolverConfig()
    pruned = set()
    for orbit in orbits:
        if orbit.k != 1 or orbit.status is not Status.ACTIVE:
            raise ValueError(f"orbit {orbit.r} is not freshly initialized")
        orbit.sweep = 0
        res = _sweep(problem, orbit, config.tie_tol)
        orbit.first_sweep_residual = res
        orbit.last_sweep_residual = res
        if orbit.tau != orbit.r:
            orbit.status = Status.PRUNED
            pruned.add(orbit.r)
    return orbits, pruned


def is_feasible(problem: Problem, x: np.ndarray, tol: float) -> bool:
    return all(dist_ucs(s, x) <= tol for s in problem.sets)


def _run_orbit(problem: Problem, orbit: OrbitState, config: SolverConfig) -> None:
    trace = orbit.residual_trace
    window = config.stall_window
    while orbit.status is Status.ACTIVE:
        orbit.sweep += 1
        res = _sweep(problem, orbit, config.tie_tol)
        trace.append(res)
        orbit.last_sweep_residual = res
        if res <= config.eps_residual and is_feasible(problem, orbit.current, config.feasibility_tol):
            orbit.status = Status.CONVERGED
        elif (
            len(trace) > window
            and trace[-1 - window] - res <= config.eps_residual
            and not is_feasible(problem, orbit.current, config.feasibility_tol)
        ):
            orbit.status = Status.STALLED
        elif len(trace) >= config.max_sweeps:
            orbit.status = Status.EXHAUSTED


def iterate(problem: Problem, orbits: Sequence[OrbitState], config: SolverConfig | None = None) -> SolveReport:
    """Sweep every non-pruned orbit until it converges, stalls or runs out of sweeps.

    An orbit converges when its largest step over a sweep is at most
    ``eps_residual`` and its point is within ``feasibility_tol`` of every
    set.  It stalls when the sweep residual has not dropped by more than
    ``eps_residual`` over the last ``stall_window`` sweeps while still
    infeasible.  Converged orbits give distance-to-set guarantees only;
    the final iterate is reported as the solution candidate.
    """
    config = config or SolverConfig()
    by_r = {o.r: o for o in sorted(orbits, key=lambda o: o.r)}
    for orbit in by_r.values():
        if orbit.status is Status.ACTIVE:
            _run_orbit(problem, orbit, config)
    pruned = tuple(r for r, o in by_r.items() if o.status is Status.PRUNED)
    retained = tuple(r for r in by_r if r not in pruned)
    report = SolveReport(orbits=by_r, pruned=pruned, retained=retained, config=config)
    report.all_pruned = not retained
    if report.all_pruned:
        report.warnings.append(
            "every orbit was pruned after the first sweep; the problem is infeasible "
            "or the nearest-piece uniqueness condition fails"
        )
    for r, o in by_r.items():
        if o.tie_violations:
            report.warnings.append(
                f"orbit {r}: {o.tie_violations} projection(s) had a tied nearest piece "
                f"(within tie_tol={config.tie_tol:g}); convergence guarantees do not apply"
            )
    return report


def solve(
    problem: Problem,
    config: SolverConfig | None = None,
    overrides: Mapping[int, PointLike] | Iterable[tuple] | None = None,
) -> SolveReport:
    """Initialize, run the first sweep with pruning, then iterate."""
    config = config or SolverConfig()
    orbits = initialize(problem, overrides)
    orbits, _ = first_sweep(problem, orbits, config)
    return iterate(problem, orbits, config)
