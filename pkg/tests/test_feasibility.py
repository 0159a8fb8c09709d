from fractions import Fraction

from tropgw.feasibility import (
    classify_strict,
    cone_meets_cone,
    feasible_strict,
    positive_combinations,
)


def test_interval_cases():
    conds = positive_combinations([[1], [-1]])
    assert classify_strict(conds, [1, -3]) == "feasible"    # 1 < s < 3
    assert classify_strict(conds, [3, -1]) == "infeasible"  # 3 < s < 1
    assert classify_strict(conds, [1, -1]) == "boundary"    # s = 1 only


def test_open_simplex():
    assert feasible_strict([[1, 0], [0, 1], [-1, -1]], [0, 0, -1])
    assert not feasible_strict([[1, 0], [-1, 0]], [0, 0])


def test_no_conditions_means_feasible():
    assert positive_combinations([[1, 0], [0, 1]]) == []
    assert feasible_strict([[1, 0], [0, 1]], [100, 100])


def test_zero_rows_become_direct_conditions():
    conds = positive_combinations([[0], [1]])
    assert classify_strict(conds, [1, 0]) == "infeasible"
    assert classify_strict(conds, [-1, 5]) == "feasible"


def test_cone_meeting():
    assert cone_meets_cone([(1, 0)], [(1, 1), (1, -1)])
    assert not cone_meets_cone([(1, 0)], [(-1, 1), (-1, -1)])
    # 3d: positive axis against the rest of a cross-polytope fan
    assert not cone_meets_cone(
        [(1, 0, 0)],
        [(-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)])
    # shared ray on the boundary counts as meeting
    assert cone_meets_cone([(1, 0, 0), (0, 1, 0)], [(1, 0, 0), (0, 0, 1)])


def test_rational_rhs():
    conds = positive_combinations([[2], [-3]])
    assert classify_strict(conds, [Fraction(1, 2), Fraction(-9, 10)]) == "feasible"
