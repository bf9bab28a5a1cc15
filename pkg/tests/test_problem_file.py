from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pucs.convex import Ball
from pucs.errors import ProblemParseError, ValidationError
from pucs.instances import example51
from pucs.problem_file import fmt_float, load_problem_file, parse_problem, serialize_problem
from pucs.solver import Problem
from pucs.ucs import UcsSet

from conftest import pieces

PROBLEMS = Path(__file__).resolve().parent.parent / "problems"


def test_example51_file():
    p = parse_problem((PROBLEMS / "example51.ucs").read_text())
    assert p.m == 2 and p.piece_counts() == (4, 2)
    assert p == example51()


def test_initial_points_and_warnings():
    text = """
dimension: 2
sets:
  - name: A
    pieces:
      - {shape: ball, center: [0, 0], radius: 1}
      - {shape: ball, center: [1, 0], radius: 1}
initial_points:
  - {r: 2, coords: [1.5, 0]}
"""
    pf = load_problem_file(text)
    assert pf.initial_points == {2: (1.5, 0.0)}
    assert len(pf.warnings) == 1 and "pieces 1 and 2" in pf.warnings[0]


@pytest.mark.parametrize(
    "text, line, fragment",
    [
        ("dimension: 2\nsets:\n  - pieces:\n      - {shape: ball, center: [0, 0], radius: -1}\n", 4, "radius"),
        ("dimension: 2\nsets:\n  - pieces:\n      - {shape: ball, center: [0, 0, 1], radius: 1}\n", 4, "dimension mismatch"),
        ("dimension: 2\nsets:\n  - pieces:\n      - {shape: cone, center: [0, 0]}\n", 4, "unknown shape"),
        ("dimension: 2\nsets: [\n", 3, "syntax error"),
        ("dimension: two\nsets: []\n", 1, "integer"),
        ("dimension: 2\nsets:\n  - pieces: []\n", 3, "at least one piece"),
        ("dimension: 2\n", 1, "missing key 'sets'"),
        ("dimension: 2\nsets:\n  - pieces:\n      - {shape: box, lower: [0, 0], upper: [1, x]}\n", 4, "number"),
        ("dimension: 1\nsets:\n  - pieces:\n      - {shape: ball, center: [0], radius: 1, color: red}\n", 4, "unknown key"),
        ("dimension: 1\nsets:\n  - pieces:\n      - {shape: ball, center: [0], radius: 1}\ninitial_points:\n  - {r: 3, coords: [0]}\n", 6, "r=3"),
        ("", 1, "empty"),
    ],
)
def test_parse_errors_carry_line(text, line, fragment):
    with pytest.raises(ProblemParseError) as err:
        parse_problem(text)
    assert err.value.line == line
    assert fragment in str(err.value)
    assert isinstance(err.value, ValidationError)


def test_fmt_float_stays_a_float():
    assert fmt_float(1.0) == "1.0"
    assert fmt_float(1e20) == "1.0e+20"
    assert fmt_float(-0.0) == "-0.0"
    assert float(fmt_float(0.1)) == 0.1


def test_example_round_trip_text_is_stable():
    text = serialize_problem(example51())
    assert serialize_problem(parse_problem(text)) == text


@st.composite
def problems(draw):
    dim = draw(st.integers(1, 4))
    m = draw(st.integers(1, 3))
    sets = []
    for i in range(m):
        n = draw(st.integers(1, 3))
        name = draw(st.text(min_size=0, max_size=8))
        sets.append(UcsSet(name, tuple(draw(pieces(dim)) for _ in range(n))))
    return Problem(dim, tuple(sets))


@settings(max_examples=150, deadline=None)
@given(problems())
def test_round_trip(problem):
    assert parse_problem(serialize_problem(problem)) == problem


def test_round_trip_initial_points():
    p = example51()
    text = serialize_problem(p, {1: np.array([0.1, 1.0 / 3.0])})
    pf = load_problem_file(text)
    assert pf.problem == p
    assert pf.initial_points == {1: (0.1, 1.0 / 3.0)}


def test_round_trip_preserves_awkward_floats():
    p = Problem(1, (UcsSet("x", (Ball((1e-300,), 5e-324 + 0.1),)),))
    assert parse_problem(serialize_problem(p)) == p
