"""Unions of pairwise-disjoint convex pieces and nearest-piece projection."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .convex import Ball, Box, ConvexPiece, PointLike, as_point, dist_piece
from .errors import InstanceError, ValidationError

DEFAULT_TIE_TOL = 1e-9


@dataclass(frozen=True)
class UcsSet:
    """A named union of convex pieces, all of one dimension.

    Pieces are addressed with 1-based indices in every public result.
    Disjointness is not enforced here; see :func:`check_disjoint`.
    """

    name: str
    pieces: tuple

    def __post_init__(self):
        pieces = tuple(self.pieces)
        if not pieces:
            raise ValidationError(f"set {self.name!r} has no pieces")
        for p in pieces:
            if not isinstance(p, ConvexPiece):
                raise ValidationError(f"set {self.name!r}: {p!r} is not a convex piece")
        dims = {p.dim for p in pieces}
        if len(dims) != 1:
            raise InstanceError(f"set {self.name!r} mixes dimensions {sorted(dims)}")
        object.__setattr__(self, "pieces", pieces)

    @property
    def dim(self) -> int:
        return self.pieces[0].dim

    def __len__(self):
        return len(self.pieces)

    def piece(self, index: int) -> ConvexPiece:
        """Piece by 1-based index."""
        if not 1 <= index <= len(self.pieces):
            raise IndexError(f"piece index {index} out of range 1..{len(self.pieces)}")
        return self.pieces[index - 1]


@dataclass(frozen=True)
class UcsProjection:
    point: np.ndarray
    piece_index: int
    nearest_distance: float
    margin: float  # second-smallest piece distance minus the smallest; inf for one piece
    is_tie: bool


def project_ucs(ucs: UcsSet, x: PointLike, tie_tol: float = DEFAULT_TIE_TOL) -> UcsProjection:
    """Project ``x`` onto the nearest piece of ``ucs``.

    The true projection onto a union can be set-valued.  One representative is
    returned: the projection onto the lowest-indexed piece attaining the
    minimum distance.  ``is_tie`` flags a second piece within ``tie_tol`` of
    that minimum.
    """
    if tie_tol < 0:
        raise ValueError("tie_tol must be nonnegative")
    x = as_point(x, ucs.dim)
    best = -1
    best_d = math.inf
    best_p = None
    second_d = math.inf
    for idx, piece in enumerate(ucs.pieces):
        p = piece.project(x)
        diff = x - p
        d = math.sqrt(float(diff @ diff))
        if d < best_d:
            second_d = best_d
            best, best_d, best_p = idx, d, p
        elif d < second_d:
            second_d = d
    margin = second_d - best_d
    return UcsProjection(
        point=best_p,
        piece_index=best + 1,
        nearest_distance=best_d,
        margin=margin,
        is_tie=margin <= tie_tol,
    )


def dist_ucs(ucs: UcsSet, x: PointLike) -> float:
    """Distance from ``x`` to the union (minimum over pieces)."""
    x = as_point(x, ucs.dim)
    return min(dist_piece(p, x) for p in ucs.pieces)


def gap(a: ConvexPiece, b: ConvexPiece, max_iters: int = 10000, tol: float = 1e-12) -> float:
    """Distance between two pieces.

    Exact for ball/ball and box/box pairs.  Any other pair is estimated by
    alternating projections between ``a`` and ``b``; see :func:`gap_is_exact`.
    """
    if a.dim != b.dim:
        raise InstanceError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if isinstance(a, Ball) and isinstance(b, Ball):
        d = float(np.linalg.norm(a._c - b._c)) - a.radius - b.radius
        return max(d, 0.0)
    if isinstance(a, Box) and isinstance(b, Box):
        sep = np.maximum(np.maximum(a._lo - b._hi, b._lo - a._hi), 0.0)
        return float(np.linalg.norm(sep))
    x = a.witness()
    y = b.project(x)
    for _ in range(max_iters):
        x_new = a.project(y)
        y_new = b.project(x_new)
        moved = max(float(np.linalg.norm(x_new - x)), float(np.linalg.norm(y_new - y)))
        x, y = x_new, y_new
        if moved < tol:
            break
    return float(np.linalg.norm(x - y))


def gap_is_exact(a: ConvexPiece, b: ConvexPiece) -> bool:
    return (isinstance(a, Ball) and isinstance(b, Ball)) or (isinstance(a, Box) and isinstance(b, Box))


@dataclass(frozen=True)
class DisjointViolation:
    pair: tuple  # 1-based (s, t), s < t
    gap: float
    approximate: bool


def check_disjoint(
    ucs: UcsSet, max_iters: int = 10000, tol: float = 1e-12, approx_tol: float = 1e-9
) -> list:
    """Pairs of pieces of ``ucs`` whose gap is not strictly positive.

    Touching pieces (gap exactly 0) count as violations.  For pairs other
    than ball/ball and box/box the gap is numerical: a gap at or below
    ``approx_tol`` is reported and marked ``approximate``.
    """
    out = []
    n = len(ucs.pieces)
    for s in range(n):
        for t in range(s + 1, n):
            a, b = ucs.pieces[s], ucs.pieces[t]
            g = gap(a, b, max_iters, tol)
            exact = gap_is_exact(a, b)
            if g <= (0.0 if exact else approx_tol):
                out.append(DisjointViolation((s + 1, t + 1), g, not exact))
    return out


def single(piece: ConvexPiece, name: str = "") -> UcsSet:
    """Wrap one piece as a union."""
    return UcsSet(name, (piece,))


def union(name: str, pieces: Sequence[ConvexPiece]) -> UcsSet:
    return UcsSet(name, tuple(pieces))
