import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pucs import reports
from pucs.convex import Ball, Box, Halfspace, Hyperplane, dist_piece
from pucs.errors import BudgetError, InstanceError, UnsupportedSamplingError
from pucs.instances import random_planted, symmetric_counterexample
from pucs.solver import Problem, Status, solve
from pucs.ucs import UcsSet, dist_ucs, single
from pucs.verify import (
    OracleConfig,
    audit_pruning,
    brute_force_ucs_projection,
    check_condition,
    check_singleton_projection_property,
    enumerate_feasible_combos,
    reference_distances,
)

from conftest import pieces

EX51_THETA = {(1, 1): 1, (1, 2): 2, (1, 3): 2, (1, 4): 1, (2, 1): 1, (2, 2): 2}


@settings(max_examples=200, deadline=None)
@given(pieces(), st.integers(0, 2**32 - 1))
def test_reference_distance_agrees_with_projection_path(piece, seed):
    X = np.random.default_rng(seed).uniform(-20, 20, (5, piece.dim))
    ref = reference_distances(piece, X)
    for x, d in zip(X, ref):
        assert d == pytest.approx(dist_piece(piece, x), abs=1e-12)


def test_reference_distance_dimension_check():
    with pytest.raises(InstanceError):
        reference_distances(Ball((0, 0), 1), np.zeros((2, 3)))


def test_brute_force_examples(ex51):
    c1, c2 = ex51.sets
    bf = brute_force_ucs_projection(c2, (50, 0))
    assert bf.piece_index == 1 and bf.distance == pytest.approx(math.sqrt(2501) - 1, abs=1e-12)
    assert not bf.is_tie
    tie = brute_force_ucs_projection(c1, (150, 2))
    assert tie.tied == (2, 3) and tie.distance == 49.0
    one = brute_force_ucs_projection(single(Box((0, 0), (1, 1))), (3, 0.5))
    assert (one.piece_index, one.distance, one.tied) == (1, 2.0, (1,))


def test_enumerate_example51(ex51):
    combos = enumerate_feasible_combos(ex51)
    assert len(combos) == 8
    feasible = [c for c in combos if c.feasible]
    assert [c.combo for c in feasible] == [(1, 1)]
    np.testing.assert_allclose(feasible[0].witness, (0, 0), atol=1e-6)
    # the closest infeasible pairing is the (100,2)/(100,-2) balls
    gaps = {c.combo: c.final_gap for c in combos}
    assert gaps[(2, 2)] == pytest.approx(2.0, abs=1e-9)
    assert min(g for k, g in gaps.items() if k != (1, 1)) >= 2.0 - 1e-9


def test_enumerate_tangent_and_disjoint_pairs():
    tangent = Problem(2, (single(Ball((0, 1), 1)), single(Ball((0, -1), 1))))
    (c,) = enumerate_feasible_combos(tangent)
    assert c.feasible
    np.testing.assert_allclose(c.witness, (0, 0), atol=1e-9)
    apart = Problem(2, (single(Ball((0, 0), 1)), single(Ball((5, 0), 1))))
    (c,) = enumerate_feasible_combos(apart)
    assert not c.feasible and c.witness is None
    assert c.final_gap == pytest.approx(3.0, abs=1e-9)


def test_enumerate_budget():
    big = UcsSet("B", tuple(Ball((10.0 * k, 0), 1) for k in range(10)))
    p = Problem(2, (big, big, big))
    with pytest.raises(BudgetError):
        enumerate_feasible_combos(p, OracleConfig(combo_budget=999))


def test_condition_example51(ex51):
    rep = check_condition(ex51, samples_per_piece=1000, margin_tol=1e-6, seed=0)
    assert rep.holds
    assert rep.theta == EX51_THETA
    assert rep.samples_used == 6 * 1000
    assert rep.min_margin > 50


def test_condition_symmetric_counterexample():
    rep = check_condition(symmetric_counterexample(), 1000, 1e-6, seed=0)
    assert not rep.holds
    assert rep.theta[(1, 1)] == "non-constant"
    assert rep.min_margin <= 1e-3


def test_condition_single_piece_is_vacuous():
    rep = check_condition(Problem(2, (single(Ball((0, 0), 1)),)), 10)
    assert rep.holds and rep.theta == {(1, 1): 1} and rep.min_margin == math.inf


def test_condition_rejects_unbounded():
    p = Problem(2, (single(Halfspace((1, 0), 0)), single(Ball((0, 0), 1))))
    with pytest.raises(UnsupportedSamplingError):
        check_condition(p, 10)


def test_condition_deterministic_per_seed(ex51):
    a = reports.dumps(reports.condition_dict(check_condition(ex51, 200, seed=3)))
    b = reports.dumps(reports.condition_dict(check_condition(ex51, 200, seed=3)))
    c = reports.dumps(reports.condition_dict(check_condition(ex51, 200, seed=4)))
    assert a == b and a != c


def test_segment_examples(ex51):
    c1, c2 = ex51.sets
    rep = check_singleton_projection_property(c2, ((-10, 0), (10, 0)), 101)
    assert rep.no_ties and rep.constant_piece and set(rep.pieces) == {1}
    rep = check_singleton_projection_property(c1, ((90, -5), (210, -5)), 121)
    assert not rep.no_ties
    assert 0.5 in rep.tie_points  # x1 = 150
    assert rep.consistent
    rep = check_singleton_projection_property(single(Hyperplane((1, 1), 0)), ((-3, 5), (4, 4)), 7)
    assert rep.no_ties and rep.constant_piece


def test_segment_switch_between_grid_points_counts_as_tie():
    # the bisector x1 = 0.5 falls strictly between the two walk points
    u = UcsSet("U", (Ball((-5, 0), 1), Ball((6, 0), 1)))
    rep = check_singleton_projection_property(u, ((0, 0), (1, 0)), 2)
    assert not rep.constant_piece
    assert not rep.no_ties and rep.consistent
    assert rep.tie_points[0] == pytest.approx(0.5, abs=1e-9)


def test_segment_rejects_bad_steps():
    with pytest.raises(ValueError):
        check_singleton_projection_property(single(Ball((0,), 1)), ((0,), (1,)), 1)


def test_cross_validation_against_combos():
    """Where the condition holds, every feasible start piece yields a converged orbit."""
    rng = np.random.default_rng(99)
    done = 0
    while done < 20:
        inst = random_planted(rng)
        if not check_condition(inst.problem, 200, seed=done).holds:
            continue
        done += 1
        combos = enumerate_feasible_combos(inst.problem)
        assert inst.planted in {c.combo for c in combos if c.feasible}
        rep = solve(inst.problem)
        for r in {c.combo[0] for c in combos if c.feasible}:
            o = rep.orbits[r]
            assert o.status is Status.CONVERGED
            assert all(dist_ucs(s, o.current) <= 1e-6 for s in inst.problem.sets)
        audit = audit_pruning(rep.pruned, combos)
        assert audit.pruned_feasible == ()


def test_audit_pruning_example51(ex51):
    audit = audit_pruning(solve(ex51).pruned, enumerate_feasible_combos(ex51))
    assert audit.pruned == (3, 4)
    assert audit.start_piece_feasible == {3: False, 4: False}
