"""
Unit tests for rational enclosures (arith.intervals).
"""
from __future__ import annotations

import math
from fractions import Fraction

import pytest
from pydantic import ValidationError

from arith.intervals import Enclosure, as_fraction, format_decimal, format_fraction, ln_enclosure

# ============================================================================
# Test Suite 1: Construction and queries
# ============================================================================


class TestEnclosureModel:
    """Tests for Enclosure construction, validation and queries."""

    def test_endpoints_become_fractions(self) -> None:
        enc = Enclosure(lo="1/3", hi=1)

        assert enc.lo == Fraction(1, 3)
        assert enc.hi == Fraction(1)
        assert enc.width == Fraction(2, 3)
        assert enc.mid == Fraction(2, 3)

    def test_reversed_endpoints_rejected(self) -> None:
        with pytest.raises(ValidationError) as exc_info:
            Enclosure(lo=2, hi=1)

        assert "exceeds upper end" in str(exc_info.value)

    def test_exact_and_hull(self) -> None:
        hull = Enclosure.hull(Enclosure.exact(1), Enclosure(lo="1/2", hi="3/4"), Enclosure.exact(2))

        assert Enclosure.exact("1/2").is_exact
        assert hull == Enclosure(lo="1/2", hi=2)

    def test_contains_and_overlaps(self) -> None:
        enc = Enclosure(lo=0, hi=1)

        assert enc.contains(0.5)
        assert not enc.contains("3/2")
        assert enc.overlaps(Enclosure(lo=1, hi=2))
        assert not enc.overlaps(Enclosure(lo="5/4", hi=2))

    def test_json_serializes_fractions(self) -> None:
        assert Enclosure(lo="1/3", hi=2).model_dump_json() == '{"lo":"1/3","hi":"2"}'

    def test_str(self) -> None:
        assert str(Enclosure.exact("1/2")) == "1/2"
        assert str(Enclosure(lo=1, hi=2)) == "[1, 2]"


# ============================================================================
# Test Suite 2: Arithmetic and rounding
# ============================================================================


class TestEnclosureArithmetic:
    """Tests for interval arithmetic."""

    def test_add_and_subtract(self) -> None:
        a = Enclosure(lo=1, hi=2)
        b = Enclosure(lo=0, hi=1)

        assert a + b == Enclosure(lo=1, hi=3)
        assert a - b == Enclosure(lo=0, hi=2)
        assert 3 - a == Enclosure(lo=1, hi=2)

    def test_multiply_with_mixed_signs(self) -> None:
        assert Enclosure(lo=-1, hi=2) * Enclosure(lo=3, hi=4) == Enclosure(lo=-4, hi=8)

    def test_even_power_straddling_zero(self) -> None:
        assert Enclosure(lo=-2, hi=3) ** 2 == Enclosure(lo=0, hi=9)
        assert Enclosure(lo=-2, hi=-1) ** 3 == Enclosure(lo=-8, hi=-1)

    def test_division_by_zero_enclosure(self) -> None:
        with pytest.raises(ZeroDivisionError):
            Enclosure(lo=1, hi=2) / Enclosure(lo=-1, hi=1)

    def test_rounded_is_outward(self) -> None:
        """
        Test outward rounding onto the grid 2^-4.

        Setup:
            - [1/3, 2/3]
        Action:
            - rounded(4)
        Expected:
            - [5/16, 11/16], which still contains the original
        """
        rounded = Enclosure(lo="1/3", hi="2/3").rounded(4)

        assert rounded == Enclosure(lo="5/16", hi="11/16")

    def test_dyadic_endpoints_untouched(self) -> None:
        enc = Enclosure(lo="1/4", hi="3/8")

        assert enc.rounded(4) == enc

    def test_clamp(self) -> None:
        assert Enclosure(lo="-1/2", hi="3/2").clamp(0, 1) == Enclosure(lo=0, hi=1)
        assert Enclosure(lo=2, hi=3).clamp(0, 1) == Enclosure.exact(1)


# ============================================================================
# Test Suite 3: Logarithms and formatting
# ============================================================================


class TestLogarithms:
    """Tests for ln_enclosure."""

    def test_ln_two(self) -> None:
        enc = ln_enclosure(2)

        assert enc.contains(Fraction("0.6931471805599453094"))
        assert enc.width <= Fraction(1, 2**200)

    def test_ln_one_is_exact_zero(self) -> None:
        assert ln_enclosure(1) == Enclosure.exact(0)

    def test_ln_over_interval(self) -> None:
        enc = Enclosure(lo=2, hi=4).ln()

        assert enc.contains(math.log(3))
        assert enc.lo <= Fraction("0.6931471805599453")
        assert enc.hi >= Fraction("1.3862943611198906")

    def test_ln_of_nonpositive(self) -> None:
        with pytest.raises(ValueError) as exc_info:
            ln_enclosure(Enclosure(lo=0, hi=1))

        assert "ln undefined" in str(exc_info.value)


class TestFormatting:
    """Tests for the deterministic text forms."""

    def test_format_decimal(self) -> None:
        assert format_decimal(Fraction(1, 2), 4) == "0.5"
        assert format_decimal(Fraction(-1, 3), 3) == "-0.333"
        assert format_decimal(Fraction(5), 2) == "5"
        assert format_decimal(Fraction(2, 3), 2) == "0.67"

    def test_format_fraction(self) -> None:
        assert format_fraction(Fraction(4, 625)) == "4/625"
        assert format_fraction(Fraction(6, 3)) == "2"

    def test_as_fraction_rejects_bool(self) -> None:
        with pytest.raises(TypeError):
            as_fraction(True)

    def test_as_fraction_is_exact_for_floats(self) -> None:
        assert as_fraction(0.5) == Fraction(1, 2)
        assert as_fraction("0.1") == Fraction(1, 10)
