"""
Unit tests for D(q) and the derived global quantities (analysis.dimension).

Suites:
- Test Suite 1: Region classification and closed forms
- Test Suite 2: Sandwich region
- Test Suite 3: Separation condition and plateau derivative
- Test Suite 4: σ(N), block counts, variation and continuity
"""
from __future__ import annotations

import math
from fractions import Fraction

import pytest

from analysis.dimension import (
    DimensionEstimate,
    certify_separation,
    continuity_gap,
    dimension,
    hatU_block_count,
    log_ratio,
    plateau_derivative,
    sigma_lower_bound,
    variation_bound,
)
from analysis.kl import KLConstant
from arith.errors import DepthExceeded, ToleranceNotReached
from arith.exactnum import AlgebraicNumber
from arith.intervals import Enclosure
from symbolic.models import Alphabet
from symbolic.sft import hat_u_prefixes

# ln φ / ln q at the tribonacci base
TRIBONACCI_DIMENSION = math.log((1 + math.sqrt(5)) / 2) / math.log(1.839286755214161)


def _encloses(enclosure: Enclosure, value: float, slack: float = 1e-9) -> bool:
    """Containment up to float rounding of the reference value."""
    return float(enclosure.lo) - slack <= value <= float(enclosure.hi) + slack


# ============================================================================
# Test Suite 1: Region classification and closed forms
# ============================================================================


class TestClosedForms:
    """Tests for the closed-form and zero regions."""

    @pytest.mark.parametrize("q, expected", [(4, Fraction(1, 2)), (8, Fraction(1, 3)), (16, Fraction(1, 4)), (2, 1)])
    def test_powers_of_two_are_exact(self, binary: Alphabet, q: int, expected: Fraction) -> None:
        estimate = dimension(q, binary)

        assert estimate.enclosure == Enclosure.exact(expected)
        assert estimate.label == "closed_form"

    def test_closed_form_irrational_ratio(self, ternary: Alphabet) -> None:
        estimate = dimension(4, ternary)

        assert estimate.enclosure.contains(math.log(3) / math.log(4))
        assert estimate.enclosure.width < Fraction(1, 10**30)

    def test_below_kl_is_zero(self, binary: Alphabet) -> None:
        estimate = dimension(Fraction(3, 2), binary)

        assert estimate.enclosure == Enclosure.exact(0)
        assert estimate.label == "zero"

    def test_golden_is_zero(self, golden: AlgebraicNumber, binary: Alphabet) -> None:
        assert dimension(golden, binary).enclosure == Enclosure.exact(0)

    def test_base_must_exceed_one(self, binary: Alphabet) -> None:
        with pytest.raises(ValueError) as exc_info:
            dimension(1, binary)

        assert "must be > 1" in str(exc_info.value)

    def test_tolerance_must_be_positive(self, binary: Alphabet) -> None:
        with pytest.raises(ValueError):
            dimension(4, binary, tol=0)

    def test_log_ratio(self) -> None:
        assert log_ratio(27, 9) == Enclosure.exact(Fraction(3, 2))
        assert log_ratio(1, 5) == Enclosure.exact(0)
        assert log_ratio(3, 2).contains(math.log(3) / math.log(2))

        with pytest.raises(ValueError):
            log_ratio(2, 1)


# ============================================================================
# Test Suite 2: Sandwich region
# ============================================================================


class TestSandwichRegion:
    """Tests for the entropy-based enclosure."""

    def test_tribonacci(self, tribonacci: AlgebraicNumber, binary: Alphabet) -> None:
        """
        Test D at the tribonacci base, where U′ is the shift without 000 and 111.

        Setup:
            - q ≈ 1.8393, M = 1, tol 0.01
        Action:
            - dimension
        Expected:
            - Enclosure of width <= 0.01 containing ln φ / ln q ≈ 0.78968, separation certified
        """
        estimate = dimension(tribonacci, binary, tol=Fraction(1, 100))

        assert _encloses(estimate.enclosure, TRIBONACCI_DIMENSION)
        assert estimate.enclosure.width <= Fraction(1, 100)
        assert estimate.label == "sandwich"
        assert estimate.certified_dimension_formula

    def test_tolerance_not_reached_carries_estimate(self, tribonacci: AlgebraicNumber, binary: Alphabet) -> None:
        with pytest.raises(ToleranceNotReached) as exc_info:
            dimension(tribonacci, binary, tol=Fraction(1, 10**20), max_window=8)

        best = exc_info.value.best
        assert isinstance(best, DimensionEstimate)
        assert best.depth == 8
        assert _encloses(best.enclosure, TRIBONACCI_DIMENSION)

    def test_inside_kl_enclosure_is_ambiguous(self, binary: Alphabet) -> None:
        kl = KLConstant(M=1, enclosure=Enclosure(lo="1.78", hi="1.80"), certificate_depth=5)

        estimate = dimension(Fraction("1.79"), binary, kl=kl)

        assert estimate.ambiguous
        assert estimate.label == "ambiguous"
        assert estimate.enclosure.lo == 0
        assert estimate.enclosure.hi <= 1

    def test_estimate_must_lie_in_unit_interval(self) -> None:
        with pytest.raises(ValueError):
            DimensionEstimate(enclosure=Enclosure(lo=0, hi=2), method="sandwich")


# ============================================================================
# Test Suite 3: Separation condition and plateau derivative
# ============================================================================


class TestSeparation:
    """Tests for certify_separation."""

    def test_tribonacci(self, tribonacci: AlgebraicNumber, binary: Alphabet) -> None:
        assert certify_separation(tribonacci, binary, 8) is True

    def test_ternary_base_two(self, ternary: Alphabet) -> None:
        assert certify_separation(2, ternary, 4) is True

    def test_golden_threshold(self, golden: AlgebraicNumber, binary: Alphabet) -> None:
        """
        Test the exact threshold at the golden ratio.

        Setup:
            - α = (10)^∞, so N = 2 and the condition is q^{n-2}(q - 1) > 1
        Action:
            - certify_separation for n = 3 and n = 4
        Expected:
            - n = 3 gives q(q - 1) = 1, not strictly greater; n = 4 holds
        """
        assert certify_separation(golden, binary, 3) is False
        assert certify_separation(golden, binary, 4) is True

    def test_all_max_alpha(self, binary: Alphabet, small_settings) -> None:
        with pytest.raises(DepthExceeded):
            certify_separation(2, binary, 4)


class TestPlateauDerivative:
    """Tests for plateau_derivative against finite differences."""

    @pytest.mark.parametrize("q", [3, 4, 5])
    def test_matches_finite_difference(self, q: int) -> None:
        h = math.log(2)
        eps = 1e-5
        expected = (h / math.log(q + eps) - h / math.log(q - eps)) / (2 * eps)

        derivative = plateau_derivative(q, Fraction(h))

        assert abs(float(derivative.mid) - expected) < 1e-3
        assert derivative.hi < 0

    def test_zero_entropy(self) -> None:
        assert plateau_derivative(3, 0) == Enclosure.exact(0)

    def test_negative_entropy_rejected(self) -> None:
        with pytest.raises(ValueError):
            plateau_derivative(3, -1)


# ============================================================================
# Test Suite 4: Global quantities
# ============================================================================


class TestGlobalQuantities:
    """Tests for σ(N), hatU_block_count, variation_bound and continuity_gap."""

    def test_sigma_two_is_half(self) -> None:
        bound = sigma_lower_bound(1, 2)

        assert bound.sigma == Enclosure.exact(Fraction(1, 2))
        assert bound.separation_constant.lo > 0

    def test_sigma_ten(self) -> None:
        sigma = sigma_lower_bound(1, 10).sigma

        assert Fraction("0.9997") <= sigma.lo <= sigma.hi <= Fraction("0.9998")

    def test_sigma_increases_with_n(self) -> None:
        values = [sigma_lower_bound(1, n).sigma for n in range(2, 8)]

        for smaller, larger in zip(values, values[1:]):
            assert smaller.hi < larger.lo

    @pytest.mark.parametrize("M, N", [(1, 1), (0, 3)])
    def test_sigma_invalid(self, M: int, N: int) -> None:
        with pytest.raises(ValueError):
            sigma_lower_bound(M, N)

    @pytest.mark.parametrize("M, N, n, expected", [(1, 2, 3, 2), (1, 2, 2, 1), (2, 2, 4, 49)])
    def test_hat_u_block_count(self, M: int, N: int, n: int, expected: int) -> None:
        assert hatU_block_count(M, N, n) == expected
        assert hatU_block_count(M, N, n) == len(list(hat_u_prefixes(M, N, n)))

    def test_variation_bound(self) -> None:
        bound = variation_bound(1)

        assert Fraction("1.38") < bound.lo <= bound.hi < Fraction("1.40")

    def test_continuity_gap_covers_true_difference(self, tribonacci: AlgebraicNumber, binary: Alphabet) -> None:
        # D(2) = 1 and D(tribonacci) ≈ 0.78968
        gap = continuity_gap(tribonacci, 2, binary, n=4)

        assert gap >= 1 - TRIBONACCI_DIMENSION
