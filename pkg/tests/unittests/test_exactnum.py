"""
Unit tests for the exact arithmetic layer (arith.exactnum).

Suites:
- Test Suite 1: IntPolynomial arithmetic and root counting
- Test Suite 2: Root isolation (isolate_roots, refine)
- Test Suite 3: Sign determination and comparison (sign_at, compare)
- Test Suite 4: NumberField arithmetic
"""
from __future__ import annotations

from fractions import Fraction

import pytest

from arith.exactnum import (
    AlgebraicNumber,
    IntPolynomial,
    NumberField,
    compare,
    compare_rational,
    count_roots,
    isolate_roots,
    refine,
    sign_at,
    vanishes_at,
)
from config.settings import Settings, use_settings

X_SQUARED_MINUS_X_MINUS_1 = IntPolynomial([-1, -1, 1])
TRIBONACCI_POLY = IntPolynomial([-1, -1, -1, 1])

# ============================================================================
# Test Suite 1: IntPolynomial
# ============================================================================


class TestIntPolynomial:
    """Tests for integer polynomial arithmetic."""

    def test_product_and_difference(self) -> None:
        x_minus_1 = IntPolynomial([-1, 1])
        x_plus_1 = IntPolynomial([1, 1])

        assert x_minus_1 * x_plus_1 == IntPolynomial([-1, 0, 1])
        assert IntPolynomial.monomial(2) - 1 == IntPolynomial([-1, 0, 1])
        assert (x_minus_1 - x_minus_1).is_zero

    def test_trailing_zeros_are_dropped(self) -> None:
        p = IntPolynomial([3, 0, 0])

        assert p.degree == 0
        assert p.leading == 3

    def test_evaluation_is_exact(self) -> None:
        assert X_SQUARED_MINUS_X_MINUS_1(Fraction(3, 2)) == Fraction(-1, 4)
        assert TRIBONACCI_POLY(2) == 1

    def test_linear_through_rational(self) -> None:
        p = IntPolynomial.linear_through(Fraction(7, 4))

        assert p == IntPolynomial([-7, 4])
        assert p(Fraction(7, 4)) == 0

    def test_from_fractions_clears_denominators(self) -> None:
        p = IntPolynomial.from_fractions([Fraction(-1, 2), Fraction(1, 3)])

        assert p == IntPolynomial([-3, 2])

    def test_count_roots_half_open(self) -> None:
        """
        Test Sturm counts on (lo, hi].

        Setup:
            - (x - 1)(x - 2)(x - 3)
        Action:
            - Count on (1, 3] and (0, 10]
        Expected:
            - 2 (the root at 1 is excluded) and 3
        """
        p = IntPolynomial([-1, 1]) * IntPolynomial([-2, 1]) * IntPolynomial([-3, 1])

        assert count_roots(p, Fraction(1), Fraction(3)) == 2
        assert count_roots(p, Fraction(0), Fraction(10)) == 3


# ============================================================================
# Test Suite 2: Root isolation
# ============================================================================


class TestIsolateRoots:
    """Tests for isolate_roots and refine."""

    def test_golden_ratio_isolated(self) -> None:
        roots = isolate_roots(X_SQUARED_MINUS_X_MINUS_1, 1, 2)

        assert len(roots) == 1
        assert refine(roots[0], Fraction(1, 10**6)).enclosure().contains(Fraction("1.6180339"))

    def test_linear_root_is_exact(self) -> None:
        roots = isolate_roots(IntPolynomial([-2, 1]), 1, 3)

        assert len(roots) == 1
        assert roots[0].is_rational
        assert roots[0].rational_value == 2

    def test_no_real_roots(self) -> None:
        assert isolate_roots(IntPolynomial([1, 0, 1]), -10, 10) == []

    def test_distinct_rational_factors(self) -> None:
        """
        Test that a product of distinct rational linear factors gives back exactly those roots.

        Setup:
            - (2x - 1)(x - 3)(x + 2)
        Action:
            - Isolate on [-5, 5]
        Expected:
            - Three degenerate roots -2, 1/2, 3 in ascending order
        """
        p = IntPolynomial([-1, 2]) * IntPolynomial([-3, 1]) * IntPolynomial([2, 1])

        roots = isolate_roots(p, -5, 5)

        assert [r.rational_value for r in roots] == [Fraction(-2), Fraction(1, 2), Fraction(3)]

    def test_repeated_factor_counted_once(self) -> None:
        p = X_SQUARED_MINUS_X_MINUS_1 * X_SQUARED_MINUS_X_MINUS_1

        assert len(isolate_roots(p, 0, 2)) == 1

    def test_refine_keeps_the_root(self, tribonacci: AlgebraicNumber) -> None:
        narrow = refine(tribonacci, Fraction(1, 2**40))

        assert narrow.hi - narrow.lo <= Fraction(1, 2**40)
        assert TRIBONACCI_POLY(narrow.lo) * TRIBONACCI_POLY(narrow.hi) <= 0

    def test_refine_rejects_nonpositive_width(self, golden: AlgebraicNumber) -> None:
        with pytest.raises(ValueError) as exc_info:
            refine(golden, 0)

        assert "width must be positive" in str(exc_info.value)

    def test_isolating_interval_must_hold_one_root(self) -> None:
        with pytest.raises(ValueError) as exc_info:
            AlgebraicNumber(IntPolynomial([-2, 0, 1]), -3, 3)

        assert "expected exactly one" in str(exc_info.value)


# ============================================================================
# Test Suite 3: Signs and comparisons
# ============================================================================


class TestSignAt:
    """Tests for exact sign determination."""

    def test_shared_root_is_zero(self, tribonacci: AlgebraicNumber) -> None:
        assert sign_at(TRIBONACCI_POLY, tribonacci) == 0

    def test_positive_at_tribonacci(self, tribonacci: AlgebraicNumber) -> None:
        assert sign_at(X_SQUARED_MINUS_X_MINUS_1, tribonacci) == 1

    def test_negative_at_tribonacci(self, tribonacci: AlgebraicNumber) -> None:
        assert sign_at(IntPolynomial([-2, 1]), tribonacci) == -1

    def test_zero_detected_through_products(self, golden: AlgebraicNumber) -> None:
        """
        Test that sign_at decides zeros through the gcd, not by magnitude.

        Setup:
            - (x² - x - 1)(x - 3) vanishes at φ; (x² - 2)(x - 3) does not
        Action:
            - sign_at at the golden ratio
        Expected:
            - 0 for the first, -1 for the second ((φ² - 2) > 0, φ - 3 < 0)
        """
        vanishing = X_SQUARED_MINUS_X_MINUS_1 * IntPolynomial([-3, 1])
        other = IntPolynomial([-2, 0, 1]) * IntPolynomial([-3, 1])

        assert vanishes_at(vanishing, golden)
        assert sign_at(vanishing, golden) == 0
        assert sign_at(other, golden) == -1

    def test_rational_base(self) -> None:
        assert sign_at(IntPolynomial([-3, 2]), AlgebraicNumber.from_rational(Fraction(3, 2))) == 0


class TestCompare:
    """Tests for compare and compare_rational."""

    def test_golden_below_tribonacci(self, golden: AlgebraicNumber, tribonacci: AlgebraicNumber) -> None:
        assert compare(golden, tribonacci) == -1
        assert compare(tribonacci, golden) == 1

    def test_same_object(self, golden: AlgebraicNumber) -> None:
        assert compare(golden, golden) == 0

    def test_same_number_different_polynomials(self, golden: AlgebraicNumber) -> None:
        other = AlgebraicNumber(X_SQUARED_MINUS_X_MINUS_1 * IntPolynomial([-5, 1]), 1, 2)

        assert compare(golden, other) == 0

    def test_against_rationals(self, tribonacci: AlgebraicNumber) -> None:
        assert compare_rational(tribonacci, 2) == -1
        assert compare_rational(tribonacci, Fraction(9, 5)) == 1


# ============================================================================
# Test Suite 4: NumberField
# ============================================================================


class TestNumberField:
    """Tests for arithmetic in Q(q)."""

    def test_defining_relation_is_zero(self, golden: AlgebraicNumber) -> None:
        field = NumberField(golden)
        one = field.constant(1)
        q = field.times_x(one)
        q_squared = field.times_x(q)

        # q² reduces to q + 1
        assert q_squared == (Fraction(1), Fraction(1))
        assert field.sign(field.add_constant(q, Fraction(-3, 2))) == 1

    def test_exact_zero_remainder(self, golden: AlgebraicNumber) -> None:
        """
        Test the greedy remainder of 1 in base φ: φ - 1 then φ(φ - 1) - 1 = 0.

        Setup:
            - NumberField of the golden ratio
        Action:
            - Multiply and subtract as the greedy recursion does
        Expected:
            - sign 0 after two steps
        """
        field = NumberField(golden)
        r = field.add_constant(field.times_x(field.constant(1)), -1)
        r = field.add_constant(field.times_x(r), -1)

        assert field.sign(r) == 0

    def test_rational_field(self) -> None:
        field = NumberField(AlgebraicNumber.from_rational(Fraction(3, 2)))

        assert field.degree == 1
        assert field.sign(field.add_constant(field.times_x(field.constant(1)), Fraction(-3, 2))) == 0

    def test_first_enclosure_follows_settings(self, golden: AlgebraicNumber) -> None:
        """
        Test that the starting precision of a field comes from the settings.

        Setup:
            - field_precision_bits = 8, golden ratio isolated in [1, 2]
        Action:
            - NumberField(golden), enclosure of the element q
        Expected:
            - width exactly 2^-8; an explicit initial_bits wins over the settings
        """
        use_settings(Settings(jobs=1, field_precision_bits=8))

        field = NumberField(golden)
        lo, hi = field.enclosure(field.times_x(field.constant(1)))

        assert hi - lo == Fraction(1, 2**8)
        assert lo < Fraction("1.6180339887") < hi

        lo, hi = NumberField(golden, initial_bits=20).enclosure((Fraction(0), Fraction(1)))

        assert hi - lo == Fraction(1, 2**20)

    def test_coarse_start_still_decides_signs(self, golden: AlgebraicNumber) -> None:
        use_settings(Settings(jobs=1, field_precision_bits=1))
        field = NumberField(golden)

        # q - 1.618 > 0 needs refinement well below 2^-1
        assert field.sign(field.add_constant(field.times_x(field.constant(1)), Fraction("-1.618"))) == 1
