import numpy as np
import pytest
from hypothesis import strategies as st

from pucs.convex import Ball, Box, Halfspace, Hyperplane
from pucs.instances import example51
from pucs.ucs import UcsSet

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def ex51():
    return example51()


coord = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)


@st.composite
def vectors(draw, dim, elements=coord):
    return np.array(draw(st.lists(elements, min_size=dim, max_size=dim)))


@st.composite
def pieces(draw, dim=None, bounded=False):
    dim = dim or draw(st.integers(1, 5))
    kinds = ["ball", "box"] if bounded else ["ball", "box", "halfspace", "hyperplane"]
    kind = draw(st.sampled_from(kinds))
    if kind == "ball":
        return Ball(tuple(draw(vectors(dim))), draw(st.floats(0.1, 5)))
    if kind == "box":
        lo = draw(vectors(dim))
        widths = draw(vectors(dim, st.floats(0, 5)))
        return Box(tuple(lo), tuple(lo + widths))
    normal = draw(vectors(dim).filter(lambda a: np.linalg.norm(a) > 0.1))
    offset = draw(coord)
    return (Halfspace if kind == "halfspace" else Hyperplane)(tuple(normal), offset)


@st.composite
def ucs_sets(draw, dim=None, max_pieces=4):
    dim = dim or draw(st.integers(1, 4))
    n = draw(st.integers(1, max_pieces))
    return UcsSet("S", tuple(draw(pieces(dim)) for _ in range(n)))


def random_piece(rng, dim, bounded=False):
    kind = rng.choice(["ball", "box"] if bounded else ["ball", "box", "halfspace", "hyperplane"])
    if kind == "ball":
        return Ball(tuple(rng.uniform(-10, 10, dim)), rng.uniform(0.1, 5))
    if kind == "box":
        lo = rng.uniform(-10, 10, dim)
        return Box(tuple(lo), tuple(lo + rng.uniform(0, 5, dim)))
    # normals of norm >= 0.5 keep every piece within desk-scale reach of the origin
    a = rng.standard_normal(dim)
    a *= rng.uniform(0.5, 2.0) / np.linalg.norm(a)
    cls = Halfspace if kind == "halfspace" else Hyperplane
    return cls(tuple(a), rng.uniform(-5, 5))


def point_in(piece, rng):
    """A point of ``piece``: uniform for bounded pieces, a projected random point otherwise."""
    if piece.bounded:
        return piece.sample(rng)
    return piece.project(rng.uniform(-20, 20, piece.dim))
