"""
Shared pytest fixtures for unit tests.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

import pytest

from arith.exactnum import AlgebraicNumber
from arith.parsing import named_base
from config.settings import Settings, use_settings
from symbolic.models import Alphabet, PeriodicSeq


@pytest.fixture(autouse=True)
def reset_settings() -> Iterator[None]:
    """Fixture running every test inline (jobs=1) and dropping any settings it installed."""
    use_settings(Settings(jobs=1))
    yield
    use_settings(None)


@pytest.fixture
def small_settings() -> Iterator[Settings]:
    """Fixture installing small depth caps for tests that exercise the limits."""
    settings = Settings(digit_depth=32, comparison_depth=64, max_window=64, jobs=1)
    use_settings(settings)
    yield settings
    use_settings(None)


@pytest.fixture
def binary() -> Alphabet:
    """Fixture providing the digit set {0, 1}."""
    return Alphabet(M=1)


@pytest.fixture
def ternary() -> Alphabet:
    """Fixture providing the digit set {0, 1, 2}."""
    return Alphabet(M=2)


@pytest.fixture
def golden() -> AlgebraicNumber:
    """Fixture providing the golden ratio, root of x² - x - 1 in [1, 2]."""
    return named_base("golden")


@pytest.fixture
def tribonacci() -> AlgebraicNumber:
    """Fixture providing the tribonacci number ≈ 1.8393, root of x³ - x² - x - 1 in [1, 2]."""
    return named_base("tribonacci")


@pytest.fixture
def two() -> AlgebraicNumber:
    """Fixture providing the base 2 as a degenerate algebraic number."""
    return AlgebraicNumber.from_rational(2)


@pytest.fixture
def rational_base():
    """Fixture building degenerate algebraic numbers from fractions."""

    def build(value: int | str | Fraction) -> AlgebraicNumber:
        return AlgebraicNumber.from_rational(Fraction(value))

    return build


@lru_cache(maxsize=4)
def _periodic_sequences(M: int, max_length: int) -> tuple[PeriodicSeq, ...]:
    alphabet = Alphabet(M=M)
    found: set[PeriodicSeq] = set()
    for total in range(1, max_length + 1):
        for word in itertools.product(alphabet.digits, repeat=total):
            for cut in range(total + 1):
                found.add(PeriodicSeq(preperiod=word[:cut], period=word[cut:], alphabet=alphabet))
    return tuple(sorted(found, key=lambda c: (c.preperiod, c.period)))


@pytest.fixture
def periodic_corpus():
    """Fixture listing every eventually periodic sequence with |preperiod| + |period| <= max_length."""
    return _periodic_sequences
