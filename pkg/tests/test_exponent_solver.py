"""Exponent-program construction plus the LP and greedy routes.

The (2,2,2) beta coefficients follow m - n + l - j, giving (1, 0); with
those the LP reproduces d(0) = 3, which pins the convention exactly (any
other offset breaks the closed-form equality swept in the acceptance run).
"""

import itertools
from fractions import Fraction

import pytest

from dsdmt.dmt_core import dmt_at, dmt_curve
from dsdmt.exponent_solver import (
    CaseId,
    ReducedObjective,
    ReductionInvariantError,
    build_program,
    classify_case,
    dmt_via_greedy,
    dmt_via_lp,
    greedy_reduce,
    minimize_threshold,
    solve_lp,
)


class TestClassifyCase:
    def test_examples(self):
        assert classify_case(3, 3, 2) is CaseId.A
        assert classify_case(4, 2, 3) is CaseId.B
        assert classify_case(2, 2, 5) is CaseId.C

    def test_boundaries(self):
        assert classify_case(3, 2, 2) is CaseId.A  # n = l
        assert classify_case(3, 2, 3) is CaseId.B  # l = m
        assert classify_case(2, 2, 3) is CaseId.C  # n = m

    def test_requires_reciprocity_applied(self):
        with pytest.raises(ValueError):
            classify_case(2, 3, 2)

    def test_exactly_one_case_everywhere(self):
        for m in range(1, 7):
            for n in range(1, m + 1):
                for l in range(1, 7):
                    case = classify_case(m, n, l)
                    matches = [n >= l, n < l <= m, n <= m < l]
                    assert sum(matches) == 1
                    assert matches[("A", "B", "C").index(case.name)]


class TestBuildProgram:
    def test_2_2_2(self):
        p = build_program(2, 2, 2, 0)
        assert p.case is CaseId.A
        assert p.alpha_coeffs == (2, 1)
        assert p.beta_coeffs == (1, 0)
        assert p.plus_pairs == frozenset({(0, 1)})
        assert p.couple_range == 2

    def test_3_1_2_case_b(self):
        p = build_program(3, 1, 2, 0)
        assert p.case is CaseId.B
        assert p.alpha_coeffs == (1,)
        assert p.beta_coeffs == (3, 2)  # l + m - n - j for j = 1, 2
        assert p.plus_pairs == frozenset({(0, 1)})
        assert p.couple_range == 1

    def test_4_1_3_second_branch(self):
        # j = 3 >= n + 2 switches to the l + m + 1 - 2j slope
        p = build_program(4, 1, 3, 0)
        assert p.beta_coeffs == (5, 4, 2)

    def test_case_c_swaps_l_and_m(self):
        p = build_program(2, 2, 5, 0)
        q = build_program(5, 2, 2, 0)
        assert p.case is CaseId.C and q.case is CaseId.A
        assert p.beta_coeffs == q.beta_coeffs
        assert p.alpha_coeffs == q.alpha_coeffs

    def test_alpha_dim_is_min(self):
        for m in range(1, 6):
            for n in range(1, m + 1):
                for l in range(1, 6):
                    assert build_program(m, n, l, 0).alpha_dim == min(m, n, l)

    def test_full_multiplexing_gives_zero(self):
        p = build_program(3, 2, 4, 2)
        assert solve_lp(p).value == 0
        assert minimize_threshold(greedy_reduce(p), 2) == 0


class TestSolveLp:
    def test_2_2_2_values(self):
        assert solve_lp(build_program(2, 2, 2, 0)).value == 3
        assert solve_lp(build_program(2, 2, 2, 2)).value == 0
        assert solve_lp(build_program(2, 2, 2, Fraction(1, 2))).value == 2

    def test_negative_r_rejected(self):
        with pytest.raises(ValueError):
            solve_lp(build_program(2, 2, 2, -1))

    def test_vertex_is_feasible(self):
        for m, n, l, r in [(2, 2, 2, 0), (4, 2, 3, 1), (2, 2, 5, Fraction(3, 2)), (5, 5, 5, 2)]:
            p = build_program(m, n, l, Fraction(r))
            sol = solve_lp(p)
            a, b = sol.alpha, sol.beta
            assert all(x <= y for x, y in zip(a, a[1:]))
            assert all(x <= y for x, y in zip(b, b[1:]))
            assert all(b[i] >= 0 for i in range(len(b)))
            assert all(a[i] >= b[i] for i in range(p.couple_range))
            assert sum(max(1 - x, 0) for x in a) <= p.r
            # vertex reproduces the optimal objective
            value = sum(c * x for c, x in zip(p.alpha_coeffs, a))
            value += sum(c * x for c, x in zip(p.beta_coeffs, b))
            value += sum(max(a[i] - b[j], 0) for i, j in p.plus_pairs)
            assert value == sol.value


class TestGreedyReduce:
    def test_2_2_2(self):
        # beta_2 has coefficient 0 and may not pass alpha_1; reduced (2, 1)
        assert greedy_reduce(build_program(2, 2, 2, 0)).coeffs == (2, 1)

    def test_1_1_1(self):
        assert greedy_reduce(build_program(1, 1, 1, 0)).coeffs == (1,)

    def test_4_2_3_case_b(self):
        ro = greedy_reduce(build_program(4, 2, 3, 0))
        assert ro.coeffs == (4, 2)
        # threshold minimization reproduces the closed-form points
        curve = dmt_curve((4, 2, 3))
        for k, d in curve.points:
            assert minimize_threshold(ro, k) == d

    def test_5_5_5(self):
        assert greedy_reduce(build_program(5, 5, 5, 0)).coeffs == (7, 5, 4, 2, 1)

    def test_coefficients_non_increasing_everywhere(self):
        for m in range(1, 7):
            for n in range(1, m + 1):
                for l in range(1, 7):
                    coeffs = greedy_reduce(build_program(m, n, l, 0)).coeffs
                    assert all(a >= b for a, b in zip(coeffs, coeffs[1:]))
                    assert all(c >= 0 for c in coeffs)

    def test_invariant_violation_raises(self):
        with pytest.raises(ReductionInvariantError):
            ReducedObjective((1, 2))
        with pytest.raises(ReductionInvariantError):
            ReducedObjective((2, -1))


class TestMinimizeThreshold:
    def test_2_2_2_at_zero(self):
        assert minimize_threshold(ReducedObjective((2, 1)), 0) == 3

    def test_full_rate_zero(self):
        assert minimize_threshold(ReducedObjective((5, 3, 2)), 3) == 0

    def test_single_coefficient_half(self):
        assert minimize_threshold(ReducedObjective((7,)), Fraction(1, 2)) == Fraction(7, 2)

    def test_domain_errors(self):
        ro = ReducedObjective((2, 1))
        with pytest.raises(ValueError):
            minimize_threshold(ro, -Fraction(1, 2))
        with pytest.raises(ValueError):
            minimize_threshold(ro, Fraction(5, 2))

    def test_matches_brute_force_grid(self):
        # independent oracle: dense grid search over feasible alphas
        ro = ReducedObjective((4, 2, 1))
        steps = 40
        for r in (Fraction(0), Fraction(1, 2), Fraction(5, 4), Fraction(2), Fraction(3)):
            best = None
            grid = [Fraction(i, steps) for i in range(steps + 1)]
            for alpha in itertools.product(grid, repeat=3):
                if any(a < b for a, b in zip(alpha[1:], alpha)):
                    continue
                if sum(max(1 - a, 0) for a in alpha) > r:
                    continue
                val = sum(c * a for c, a in zip(ro.coeffs, alpha))
                best = val if best is None else min(best, val)
            assert minimize_threshold(ro, r) == best


class TestDmtViaLp:
    def test_role_order_irrelevant(self):
        for perm in itertools.permutations((2, 3, 4)):
            assert dmt_via_lp(*perm, 1) == 2

    def test_1_1_1(self):
        assert dmt_via_lp(1, 1, 1, 0) == 1

    def test_5_5_1(self):
        assert dmt_via_lp(5, 5, 1, 0) == 5

    def test_r_out_of_range(self):
        with pytest.raises(ValueError):
            dmt_via_lp(2, 2, 2, 3)
        with pytest.raises(ValueError):
            dmt_via_lp(2, 2, 2, Fraction(-1, 4))


class TestRouteAgreement:
    """Quick oracle sweep at small dims; the <=5 sweep is in acceptance."""

    def test_all_routes_agree_dims_3(self):
        for m, n, l in itertools.product(range(1, 4), repeat=3):
            curve = dmt_curve((m, n, l))
            r = Fraction(0)
            while r <= min(m, n, l):
                expected = dmt_at(curve, r)
                assert dmt_via_lp(m, n, l, r) == expected, (m, n, l, r)
                assert dmt_via_greedy(m, n, l, r) == expected, (m, n, l, r)
                r += Fraction(1, 4)

    def test_piecewise_linearity_between_knots(self):
        for m, n, l in [(3, 2, 4), (2, 2, 2), (4, 4, 3)]:
            for k in range(min(m, n, l)):
                v0 = dmt_via_lp(m, n, l, k)
                v1 = dmt_via_lp(m, n, l, k + 1)
                for num in (1, 2, 3):
                    r = k + Fraction(num, 4)
                    expected = v0 + (v1 - v0) * Fraction(num, 4)
                    assert dmt_via_lp(m, n, l, r) == expected
