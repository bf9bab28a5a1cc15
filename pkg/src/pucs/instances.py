"""Ready-made problems: the two-union ball example and random planted instances."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .convex import Ball, Box
from .solver import Problem
from .ucs import UcsSet


def example51() -> Problem:
    """Four unit balls over two unit balls in the plane.

    The first set has balls at (0,1), (100,2), (200,2), (-100,2); the second
    at (0,-1) and (100,-2).  Only the first pair intersects, at (0,0).
    """
    base1 = np.array([0.0, 1.0])
    c1 = UcsSet(
        "C1",
        tuple(
            Ball(tuple(base1 + shift), 1.0)
            for shift in [(0.0, 0.0), (100.0, 1.0), (200.0, 1.0), (-100.0, 1.0)]
        ),
    )
    base2 = np.array([0.0, -1.0])
    c2 = UcsSet("C2", tuple(Ball(tuple(base2 + shift), 1.0) for shift in [(0.0, 0.0), (100.0, -1.0)]))
    return Problem(2, (c1, c2))


def symmetric_counterexample() -> Problem:
    """A unit ball at the origin that is equidistant from two balls of the next set."""
    c1 = UcsSet("C1", (Ball((0.0, 0.0), 1.0),))
    c2 = UcsSet("C2", (Ball((0.0, 5.0), 1.0), Ball((0.0, -5.0), 1.0)))
    return Problem(2, (c1, c2))


@dataclass(frozen=True)
class PlantedInstance:
    problem: Problem
    point: np.ndarray  # common point of the planted pieces
    planted: tuple  # 1-based planted piece index per set


def _piece_around(rng, z, inner, outer, kind, tight=False):
    # tight: z sits close to the boundary, so the planted pieces meet in a small region
    dim = z.shape[0]
    if kind == "ball":
        radius = rng.uniform(inner, outer)
        offset = rng.standard_normal(dim)
        lo, hi = (0.9, 0.999) if tight else (0.0, 0.8)
        offset *= rng.uniform(lo * radius, hi * radius) / np.linalg.norm(offset)
        return Ball(tuple(z + offset), radius)
    below = rng.uniform(0.2 * inner, outer, size=dim)
    above = rng.uniform(0.2 * inner, outer, size=dim)
    if tight:
        near = rng.random(dim) < 0.5
        below = np.where(near, rng.uniform(1e-3, 0.1, size=dim), below)
        above = np.where(near, above, rng.uniform(1e-3, 0.1, size=dim))
    return Box(tuple(z - below), tuple(z + above))


def random_planted(
    rng: np.random.Generator,
    dim: int | None = None,
    m: int | None = None,
    spread: float = 40.0,
    tight: bool = True,
) -> PlantedInstance:
    """A random feasible problem of balls and boxes sharing a planted point.

    In each set one piece contains the planted point strictly inside (near
    its boundary when ``tight``, so the iterates need several sweeps); the
    other pieces are placed at random within ``spread`` of it and kept apart
    from each other.  Nearest-piece uniqueness is not guaranteed; callers
    screen candidates with :func:`pucs.verify.check_condition`.
    """
    dim = int(rng.integers(2, 6)) if dim is None else dim
    m = int(rng.choice([2, 3, 4])) if m is None else m
    z = rng.uniform(-10.0, 10.0, size=dim)
    sets = []
    planted = []
    for i in range(m):
        count = int(rng.integers(1, 5))
        slot = int(rng.integers(0, count))
        centers = [z]
        while len(centers) < count:
            c = z + rng.uniform(-spread, spread, size=dim)
            if all(np.linalg.norm(c - other) > 20.0 for other in centers):
                centers.append(c)
        others = centers[1:]
        pieces = []
        for j in range(count):
            kind = "ball" if rng.random() < 0.5 else "box"
            if j == slot:
                pieces.append(_piece_around(rng, z, 1.0, 3.0, kind, tight))
            else:
                pieces.append(_piece_around(rng, others.pop(), 1.0, 3.0, kind))
        sets.append(UcsSet(f"C{i + 1}", tuple(pieces)))
        planted.append(slot + 1)
    return PlantedInstance(Problem(dim, tuple(sets)), z, tuple(planted))
