"""The internal exact simplex against hand LPs, scipy, and a cycling classic."""

from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import linprog

from dsdmt import _simplex


def test_simple_hand_lp():
    # min -x - y  s.t. x + y <= 2, x <= 1  ->  -2 at (1, 1) or (0, 2)
    value, x = _simplex.solve_min([-1, -1], [[1, 1], [1, 0]], [2, 1])
    assert value == -2
    assert sum(x) == 2


def test_equality_via_pair_of_inequalities():
    # min x + y  s.t. x + y >= 3 (as -x - y <= -3)  ->  3
    value, _ = _simplex.solve_min([1, 1], [[-1, -1]], [-3])
    assert value == 3


def test_exact_fractions():
    value, x = _simplex.solve_min(
        [Fraction(1, 3), Fraction(1, 7)], [[-1, 0], [0, -1]], [Fraction(-1, 2), -2]
    )
    assert value == Fraction(1, 6) + Fraction(2, 7)
    assert x == [Fraction(1, 2), Fraction(2)]


def test_infeasible():
    with pytest.raises(_simplex.Infeasible):
        _simplex.solve_min([1], [[1], [-1]], [1, -2])  # x <= 1 and x >= 2


def test_unbounded():
    with pytest.raises(_simplex.Unbounded):
        _simplex.solve_min([-1], [[-1]], [0])


def test_no_constraints():
    value, x = _simplex.solve_min([2, 3], [], [])
    assert value == 0 and x == [0, 0]


def test_beales_cycling_example():
    # classic degenerate LP on which naive pivoting cycles; Bland must finish
    value, _ = _simplex.solve_min(
        [Fraction(-3, 4), 150, Fraction(-1, 50), 6],
        [
            [Fraction(1, 4), -60, Fraction(-1, 25), 9],
            [Fraction(1, 2), -90, Fraction(-1, 50), 3],
            [0, 0, 1, 0],
        ],
        [0, 0, 1],
    )
    assert value == Fraction(-1, 20)


def test_redundant_equality_rows_survive_phase1():
    # x = 1 stated twice (two >= rows), plus x <= 1: redundancy after phase 1
    value, x = _simplex.solve_min([1], [[-1], [-1], [1]], [-1, -1, 1])
    assert value == 1 and x == [1]


def test_against_scipy_randomized():
    rng = np.random.default_rng(20240817)
    agreed = 0
    for trial in range(350):
        n = int(rng.integers(1, 6))
        m = int(rng.integers(1, 7))
        c = rng.integers(-5, 6, size=n)
        a = rng.integers(-4, 5, size=(m, n))
        b = rng.integers(-3, 8, size=m)
        ref = linprog(c, A_ub=a, b_ub=b, bounds=[(0, None)] * n, method="highs")
        try:
            value, x = _simplex.solve_min(c.tolist(), a.tolist(), b.tolist())
            status = "optimal"
        except _simplex.Infeasible:
            status = "infeasible"
        except _simplex.Unbounded:
            status = "unbounded"
        if ref.status == 0:
            assert status == "optimal", trial
            assert abs(float(value) - ref.fun) < 1e-7, (trial, value, ref.fun)
            xs = np.array([float(v) for v in x])
            assert np.all(a @ xs <= b + 1e-9), trial
            agreed += 1
        elif status == "infeasible":
            assert ref.status == 2, (trial, ref.status)
        else:
            # optimal-here/unbounded-here cases scipy may flag 2, 3 or 4;
            # it must at least not claim a finite optimum
            assert ref.status != 0, (trial, status, ref.status)
    assert agreed > 100  # the comparison actually exercised real optima
