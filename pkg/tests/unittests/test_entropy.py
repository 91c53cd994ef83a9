"""
Unit tests for Perron roots and entropy refinement (symbolic.entropy).
"""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

from analysis.kl import kl_constant
from arith.errors import EmptyGraph, ToleranceNotReached
from arith.exactnum import AlgebraicNumber
from symbolic.entropy import (
    EntropyBounds,
    default_schedule,
    entropy_of,
    perron_bounds,
    refine_entropy,
    sandwich,
)
from symbolic.models import Alphabet
from symbolic.sft import EdgeGraph, build_graph_automaton, build_graph_naive, build_spec

GOLDEN_RATIO = (1 + math.sqrt(5)) / 2
LN_GOLDEN = math.log(GOLDEN_RATIO)
# float reference values may sit a rounding error above a tight exact bound
SLACK = 1e-12

# ============================================================================
# Test Suite 1: Perron bounds
# ============================================================================


class TestPerronBounds:
    """Tests for certified spectral radius enclosures."""

    def test_no_three_equal_digits_is_golden(self, tribonacci: AlgebraicNumber, binary: Alphabet) -> None:
        """
        Test the Perron root of the shift without 000 and 111.

        Setup:
            - Naive graph of the window-3 closed spec at the tribonacci base
        Action:
            - perron_bounds with tol 1e-10
        Expected:
            - Enclosure contains φ ≈ 1.6180339887 and is narrower than 1e-8
        """
        g = build_graph_naive(build_spec(tribonacci, binary, 3, "closed_V"))

        bounds = perron_bounds(g, tol=1e-10)

        lo, hi = bounds.enclosure.lo, bounds.enclosure.hi
        # φ is the positive root of x² - x - 1
        assert lo * lo - lo - 1 <= 0 <= hi * hi - hi - 1
        assert bounds.enclosure.width <= Fraction(1, 10**8)
        assert bounds.irreducible

    def test_naive_and_automaton_agree(self, tribonacci: AlgebraicNumber, binary: Alphabet) -> None:
        spec = build_spec(tribonacci, binary, 5, "strict_U")

        naive = perron_bounds(build_graph_naive(spec)).enclosure
        automaton = perron_bounds(build_graph_automaton(spec)).enclosure

        assert naive.overlaps(automaton)

    def test_acyclic_graph_has_zero_root(self, golden: AlgebraicNumber, binary: Alphabet) -> None:
        g = build_graph_automaton(build_spec(golden, binary, 2, "strict_U"))

        assert perron_bounds(g).enclosure.is_exact
        assert perron_bounds(g).enclosure.lo == 0

    def test_empty_graph(self, binary: Alphabet) -> None:
        with pytest.raises(EmptyGraph):
            perron_bounds(EdgeGraph([], [], binary, "naive"))

    def test_periodic_component(self, binary: Alphabet) -> None:
        # a 2-cycle: spectral radius 1
        g = EdgeGraph([(0,), (1,)], [(0, 1, 1), (1, 0, 0)], binary, "naive")

        assert perron_bounds(g).enclosure.contains(1)


# ============================================================================
# Test Suite 2: Entropy
# ============================================================================


class TestEntropy:
    """Tests for entropy_of, sandwich and refine_entropy."""

    @pytest.mark.parametrize("M", [1, 2, 3])
    def test_full_shift(self, rational_base, M: int) -> None:
        alphabet = Alphabet(M=M)
        spec = build_spec(rational_base(M + 1), alphabet, 4, "closed_V")

        h = entropy_of(spec)

        assert h.width < Fraction(1, 10**9)
        assert abs(float(h.mid) - math.log(M + 1)) < 1e-9

    def test_empty_language_has_zero_entropy(self, golden: AlgebraicNumber, binary: Alphabet) -> None:
        assert entropy_of(build_spec(golden, binary, 2, "strict_U")).lo == 0

    def test_sandwich_orders_bounds(self, tribonacci: AlgebraicNumber, binary: Alphabet) -> None:
        lower, upper = sandwich(tribonacci, binary, 8)

        assert lower.lo <= upper.hi
        assert lower.lo <= LN_GOLDEN <= upper.hi + SLACK

    def test_refine_reaches_tolerance(self, tribonacci: AlgebraicNumber, binary: Alphabet) -> None:
        result = refine_entropy(tribonacci, binary, Fraction(1, 100))

        assert result.width <= Fraction(1, 100)
        assert result.lower <= LN_GOLDEN <= result.upper + SLACK
        assert result.depth == result.history[-1].depth
        assert result.depth in default_schedule()

    def test_history_matches_schedule(self, tribonacci: AlgebraicNumber, binary: Alphabet) -> None:
        with pytest.raises(ToleranceNotReached) as exc_info:
            refine_entropy(tribonacci, binary, Fraction(1, 10**30), schedule=[4, 8])

        best = exc_info.value.best
        assert isinstance(best, EntropyBounds)
        assert [step.depth for step in best.history] == [4, 8]
        assert best.depth == 8
        assert best.lower <= best.history[-1].upper

    def test_default_schedule(self) -> None:
        assert default_schedule(64) == [4, 8, 16, 32, 64]
        assert default_schedule(3) == []

    def test_bits_conversion(self, two: AlgebraicNumber, binary: Alphabet) -> None:
        h = entropy_of(build_spec(two, binary, 4, "closed_V"))
        bounds = EntropyBounds(lower=h.lo, upper=h.hi, depth=4, source="sandwich")

        assert abs(float(bounds.to_bits().mid) - 1.0) < 1e-9
        assert bounds.to_json()["unit"] == "nats"

    @pytest.mark.slow
    @pytest.mark.parametrize("seed", range(10))
    def test_refinement_is_monotone(self, binary: Alphabet, seed: int) -> None:
        """
        Test the running bounds of refine_entropy between q′(1) and 2.

        Setup:
            - A seeded random dyadic base in (kl.hi, 2), schedule 4, 8, 16, 32
        Action:
            - refine_entropy with an unreachable tolerance
        Expected:
            - Lower bounds never decrease, upper bounds never increase,
              and each step lies inside its own raw sandwich
        """
        kl = kl_constant(1)
        rng = np.random.default_rng(seed)
        q = AlgebraicNumber.from_rational(kl.hi + (2 - kl.hi) * Fraction(int(rng.integers(1, 2**16)), 2**16))

        try:
            result = refine_entropy(q, binary, Fraction(1, 10**30), schedule=[4, 8, 16, 32])
        except ToleranceNotReached as e:
            result = e.best

        history = result.history
        assert [step.depth for step in history] == [4, 8, 16, 32][: len(history)]
        for before, after in zip(history, history[1:]):
            assert after.lower >= before.lower
            assert after.upper <= before.upper
        for step in history:
            assert step.raw_lower <= step.lower <= step.upper <= step.raw_upper
        assert (result.lower, result.upper) == (history[-1].lower, history[-1].upper)
