"""Elementary closed convex sets with closed-form orthogonal projections.

Every piece is an immutable dataclass holding its parameters as tuples of
floats (so pieces compare and hash by value); a read-only numpy copy of
each parameter is cached for the arithmetic.  Points are 1-d float64 arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import InstanceError, UnsupportedSamplingError, ValidationError

DEFAULT_CONTAINMENT_TOL = 1e-9

PointLike = Union[Sequence[float], np.ndarray]


def as_point(x: PointLike, dim: int | None = None) -> np.ndarray:
    """Convert ``x`` to a finite 1-d float64 array, optionally checking its length."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise InstanceError(f"a point must be 1-d, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise InstanceError(f"dimension mismatch: expected {dim}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise InstanceError("point has non-finite coordinates")
    return arr


def _coords(values, name: str) -> tuple:
    try:
        arr = np.asarray(values, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{name}: not a numeric vector") from exc
    if arr.ndim != 1 or arr.shape[0] == 0:
        raise ValidationError(f"{name}: expected a non-empty 1-d vector")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name}: non-finite coordinate")
    return tuple(float(v) for v in arr)


def _scalar(value, name: str) -> float:
    try:
        v = float(value)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{name}: not a number") from exc
    if not math.isfinite(v):
        raise ValidationError(f"{name}: non-finite value")
    return v


def _frozen_array(values: tuple) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class ConvexPiece:
    """Base class; use one of :class:`Ball`, :class:`Box`, :class:`Halfspace`, :class:`Hyperplane`."""

    shape = "abstract"
    bounded = False

    @property
    def dim(self) -> int:
        raise NotImplementedError

    def project(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def witness(self) -> np.ndarray:
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
        raise UnsupportedSamplingError(f"cannot sample uniformly from an unbounded {self.shape}")

    def _check(self, x) -> np.ndarray:
        return as_point(x, self.dim)


@dataclass(frozen=True)
class Ball(ConvexPiece):
    """Closed ball ``{x : ||x - center|| <= radius}``."""

    center: tuple
    radius: float
    _c: np.ndarray = field(init=False, repr=False, compare=False)

    shape = "ball"
    bounded = True

    def __post_init__(self):
        object.__setattr__(self, "center", _coords(self.center, "ball center"))
        r = _scalar(self.radius, "ball radius")
        if r <= 0:
            raise ValidationError(f"ball radius must be positive, got {r}")
        object.__setattr__(self, "radius", r)
        object.__setattr__(self, "_c", _frozen_array(self.center))

    @property
    def dim(self) -> int:
        return len(self.center)

    def project(self, x):
        d = x - self._c
        norm = math.sqrt(float(d @ d))
        if norm <= self.radius:
            return x.copy()
        return self._c + d * (self.radius / norm)

    def witness(self):
        return self._c.copy()

    def sample(self, rng, size=None):
        n = self.dim
        count = 1 if size is None else size
        g = rng.standard_normal((count, n))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        u = rng.random(count) ** (1.0 / n)
        pts = self._c + g * (self.radius * u)[:, None]
        return pts[0] if size is None else pts


@dataclass(frozen=True)
class Box(ConvexPiece):
    """Axis-aligned box ``{x : lower <= x <= upper}``."""

    lower: tuple
    upper: tuple
    _lo: np.ndarray = field(init=False, repr=False, compare=False)
    _hi: np.ndarray = field(init=False, repr=False, compare=False)

    shape = "box"
    bounded = True

    def __post_init__(self):
        lo = _coords(self.lower, "box lower")
        hi = _coords(self.upper, "box upper")
        if len(lo) != len(hi):
            raise ValidationError("box lower and upper have different lengths")
        if any(a > b for a, b in zip(lo, hi)):
            raise ValidationError("box lower must not exceed upper")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        object.__setattr__(self, "_lo", _frozen_array(lo))
        object.__setattr__(self, "_hi", _frozen_array(hi))

    @property
    def dim(self) -> int:
        return len(self.lower)

    def project(self, x):
        return np.minimum(np.maximum(x, self._lo), self._hi)

    def witness(self):
        return 0.5 * (self._lo + self._hi)

    def sample(self, rng, size=None):
        shape = (self.dim,) if size is None else (size, self.dim)
        return rng.uniform(self._lo, self._hi, size=shape)


@dataclass(frozen=True)
class _AffinePiece(ConvexPiece):
    normal: tuple
    offset: float
    _a: np.ndarray = field(init=False, repr=False, compare=False)
    _aa: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        a = _coords(self.normal, f"{self.shape} normal")
        aa = math.fsum(v * v for v in a)
        if not aa > 0:
            raise ValidationError(f"{self.shape} normal must be nonzero")
        object.__setattr__(self, "normal", a)
        object.__setattr__(self, "offset", _scalar(self.offset, f"{self.shape} offset"))
        object.__setattr__(self, "_a", _frozen_array(a))
        object.__setattr__(self, "_aa", aa)

    @property
    def dim(self) -> int:
        return len(self.normal)

    def witness(self):
        return (self.offset / self._aa) * self._a


@dataclass(frozen=True)
class Halfspace(_AffinePiece):
    """Closed halfspace ``{x : <normal, x> <= offset}``."""

    shape = "halfspace"

    def project(self, x):
        excess = float(self._a @ x) - self.offset
        if excess <= 0:
            return x.copy()
        return x - (excess / self._aa) * self._a


@dataclass(frozen=True)
class Hyperplane(_AffinePiece):
    """Hyperplane ``{x : <normal, x> = offset}``."""

    shape = "hyperplane"

    def project(self, x):
        excess = float(self._a @ x) - self.offset
        if excess == 0:
            return x.copy()
        return x - (excess / self._aa) * self._a


def project_piece(piece: ConvexPiece, x: PointLike) -> np.ndarray:
    """Nearest point of ``piece`` to ``x``; returns a copy of ``x`` when it is inside."""
    return piece.project(piece._check(x))


def dist_piece(piece: ConvexPiece, x: PointLike) -> float:
    """Euclidean distance from ``x`` to ``piece``, computed as ``||x - project_piece(piece, x)||``."""
    x = piece._check(x)
    d = x - piece.project(x)
    return math.sqrt(float(d @ d))


def contains(piece: ConvexPiece, x: PointLike, tol: float = DEFAULT_CONTAINMENT_TOL) -> bool:
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    return dist_piece(piece, x) <= tol


def witness_point(piece: ConvexPiece) -> np.ndarray:
    """A deterministic point of the piece: ball center, box midpoint, or the
    foot of the normal through the origin for halfspaces and hyperplanes."""
    return piece.witness()


def sample_in_piece(piece: ConvexPiece, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Uniform sample(s) from a bounded piece.

    Balls use a normalized Gaussian direction scaled by ``radius * U**(1/n)``;
    boxes are sampled componentwise.  Returns shape ``(n,)`` or ``(size, n)``.

    Raises
    ------
    UnsupportedSamplingError
        For halfspaces and hyperplanes.
    """
    return piece.sample(rng, size)
