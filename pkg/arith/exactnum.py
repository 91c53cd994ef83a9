"""
Exact arithmetic substrate.

Bases are real algebraic numbers given by an integer polynomial and an
isolating rational interval. Every digit decision and every lexicographic
comparison elsewhere reduces to `sign_at`, which is exact: a polynomial gcd
decides the zero case, interval refinement decides the rest.

sympy supplies the polynomial algebra (Sturm sequences, gcd, square-free
part, rational roots, exact division); the bisection and sign bookkeeping
live here.
"""
from __future__ import annotations

import logging
import math
from fractions import Fraction
from functools import cmp_to_key, lru_cache
from typing import Iterable, Optional, Sequence

import sympy
from sympy import Poly

from arith.intervals import Enclosure, RationalLike, as_fraction
from config.settings import get_settings

logger = logging.getLogger(__name__)

X = sympy.Symbol("x")
_DISPLAY_WIDTH = Fraction(1, 2**60)


def _sign(value: Fraction | int) -> int:
    return (value > 0) - (value < 0)


def _sympy_to_fraction(c) -> Fraction:
    rational = sympy.Rational(c)
    return Fraction(int(rational.p), int(rational.q))


# ============================================================================
# INTEGER POLYNOMIALS
# ============================================================================


class IntPolynomial:
    """Integer polynomial, coefficients lowest degree first."""

    __slots__ = ("coefficients",)

    def __init__(self, coefficients: Iterable[int]):
        coeffs = [int(c) for c in coefficients]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        self.coefficients: tuple[int, ...] = tuple(coeffs)

    @classmethod
    def monomial(cls, degree: int, coefficient: int = 1) -> IntPolynomial:
        return cls([0] * degree + [coefficient])

    @classmethod
    def linear_through(cls, value: Fraction) -> IntPolynomial:
        """den·x − num, the primitive polynomial vanishing at a rational."""
        return cls([-value.numerator, value.denominator])

    @classmethod
    def from_sympy(cls, poly: Poly, primitive: bool = False) -> IntPolynomial:
        """Convert a sympy Poly; with primitive=True rational coefficients are cleared."""
        if primitive:
            _, poly = poly.clear_denoms(convert=True)
            poly = poly.primitive()[1]
        coeffs = [_sympy_to_fraction(c) for c in reversed(poly.all_coeffs())]
        if any(c.denominator != 1 for c in coeffs):
            raise ValueError("polynomial has non-integer coefficients")
        return cls(int(c) for c in coeffs)

    @classmethod
    def from_fractions(cls, coefficients: Sequence[Fraction]) -> IntPolynomial:
        """Scale rational coefficients to a primitive integer polynomial with the same roots."""
        common = math.lcm(*(c.denominator for c in coefficients))
        return cls(int(c * common) for c in coefficients)

    def to_sympy(self) -> Poly:
        return _to_sympy(self.coefficients)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1 if self.coefficients else -1

    @property
    def is_zero(self) -> bool:
        return not self.coefficients

    @property
    def leading(self) -> int:
        return self.coefficients[-1] if self.coefficients else 0

    def __call__(self, x: Fraction | int) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def _combine(self, other: IntPolynomial | int, sign: int) -> IntPolynomial:
        o = other if isinstance(other, IntPolynomial) else IntPolynomial([other])
        size = max(len(self.coefficients), len(o.coefficients))
        a = self.coefficients + (0,) * (size - len(self.coefficients))
        b = o.coefficients + (0,) * (size - len(o.coefficients))
        return IntPolynomial(x + sign * y for x, y in zip(a, b))

    def __add__(self, other: IntPolynomial | int) -> IntPolynomial:
        return self._combine(other, 1)

    __radd__ = __add__

    def __sub__(self, other: IntPolynomial | int) -> IntPolynomial:
        return self._combine(other, -1)

    def __rsub__(self, other: IntPolynomial | int) -> IntPolynomial:
        return IntPolynomial([other]) - self if isinstance(other, int) else other - self

    def __mul__(self, other: IntPolynomial | int) -> IntPolynomial:
        if isinstance(other, int):
            return IntPolynomial(c * other for c in self.coefficients)
        return IntPolynomial.from_sympy(self.to_sympy() * other.to_sympy())

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        return isinstance(other, IntPolynomial) and self.coefficients == other.coefficients

    def __hash__(self) -> int:
        return hash(self.coefficients)

    def __repr__(self):
        return f"IntPolynomial({self.to_sympy().as_expr()})"


@lru_cache(maxsize=4096)
def _to_sympy(coefficients: tuple[int, ...]) -> Poly:
    if not coefficients:
        return Poly(0, X, domain="ZZ")
    return Poly(list(reversed(coefficients)), X, domain="ZZ")


@lru_cache(maxsize=4096)
def _sturm_chain(coefficients: tuple[int, ...]) -> tuple[tuple[Fraction, ...], ...]:
    """Sturm sequence as Fraction coefficient tuples (highest degree first)."""
    chain = _to_sympy(coefficients).sturm()
    return tuple(tuple(_sympy_to_fraction(c) for c in member.all_coeffs()) for member in chain)


def _horner_high_first(coeffs: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in coeffs:
        acc = acc * x + c
    return acc


def _sign_variations(chain: tuple[tuple[Fraction, ...], ...], x: Fraction) -> int:
    signs = [s for s in (_sign(_horner_high_first(member, x)) for member in chain) if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(p: IntPolynomial, lo: Fraction, hi: Fraction) -> int:
    """Number of distinct real roots of p in the half-open interval (lo, hi]."""
    if p.degree < 1:
        return 0
    chain = _sturm_chain(p.coefficients)
    return _sign_variations(chain, lo) - _sign_variations(chain, hi)


def interval_eval(p: Sequence[Fraction | int], lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    """Enclosure of p over [lo, hi], coefficients lowest degree first."""
    if lo > 0:
        low = high = Fraction(0)
        power_lo = power_hi = Fraction(1)
        for c in p:
            if c >= 0:
                low += c * power_lo
                high += c * power_hi
            else:
                low += c * power_hi
                high += c * power_lo
            power_lo *= lo
            power_hi *= hi
        return low, high
    acc_lo = acc_hi = Fraction(0)
    for c in reversed(p):
        products = (acc_lo * lo, acc_lo * hi, acc_hi * lo, acc_hi * hi)
        acc_lo, acc_hi = min(products) + c, max(products) + c
    return acc_lo, acc_hi


# ============================================================================
# ALGEBRAIC NUMBERS
# ============================================================================


class AlgebraicNumber:
    """
    Real algebraic number: the unique root of `defining` in [lo, hi].

    Rational values are degenerate instances with lo == hi and a linear
    defining polynomial, so one code path serves both.
    """

    __slots__ = ("defining", "lo", "hi")

    def __init__(self, defining: IntPolynomial, lo: RationalLike, hi: RationalLike, validate: bool = True):
        self.defining = defining
        self.lo = as_fraction(lo)
        self.hi = as_fraction(hi)
        if validate:
            self._validate()

    def _validate(self) -> None:
        if self.defining.degree < 1:
            raise ValueError("defining polynomial must have degree >= 1")
        if self.lo > self.hi:
            raise ValueError(f"isolating interval [{self.lo}, {self.hi}] is reversed")
        if self.lo == self.hi:
            if self.defining(self.lo) != 0:
                raise ValueError(f"{self.lo} is not a root of {self.defining}")
            return
        at_lo = self.defining(self.lo)
        roots = count_roots(self.defining, self.lo, self.hi) + (1 if at_lo == 0 else 0)
        if roots != 1:
            raise ValueError(f"{self.defining} has {roots} roots in [{self.lo}, {self.hi}], expected exactly one")

    @classmethod
    def from_rational(cls, value: RationalLike) -> AlgebraicNumber:
        x = as_fraction(value)
        return cls(IntPolynomial.linear_through(x), x, x, validate=False)

    @property
    def is_rational(self) -> bool:
        return self.lo == self.hi

    @property
    def rational_value(self) -> Fraction | None:
        return self.lo if self.is_rational else None

    def enclosure(self) -> Enclosure:
        return Enclosure(lo=self.lo, hi=self.hi)

    def refine(self, width: RationalLike) -> AlgebraicNumber:
        return refine(self, width)

    def __float__(self) -> float:
        return float((self.lo + self.hi) / 2)

    def __repr__(self):
        if self.is_rational:
            return f"AlgebraicNumber({self.lo})"
        return f"AlgebraicNumber(root of {self.defining.to_sympy().as_expr()} in [{self.lo}, {self.hi}])"

    def __str__(self):
        if self.is_rational:
            value = self.lo
            return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
        return f"{float(refine(self, _DISPLAY_WIDTH)):.15g}"


def _bisect(q: AlgebraicNumber) -> AlgebraicNumber:
    f = q.defining
    mid = (q.lo + q.hi) / 2
    at_mid = _sign(f(mid))
    if at_mid == 0:
        return AlgebraicNumber.from_rational(mid)
    if _sign(f(q.lo)) == at_mid:
        return AlgebraicNumber(f, mid, q.hi, validate=False)
    return AlgebraicNumber(f, q.lo, mid, validate=False)


def refine(q: AlgebraicNumber, width: RationalLike) -> AlgebraicNumber:
    """Same root, isolating interval no wider than `width` (bisection with exact signs)."""
    target = as_fraction(width)
    if target <= 0:
        raise ValueError("width must be positive")
    while q.hi - q.lo > target:
        q = _bisect(q)
    return q


def isolate_roots(p: IntPolynomial, lo: RationalLike, hi: RationalLike) -> list[AlgebraicNumber]:
    """
    Distinct real roots of p in [lo, hi], ascending.

    Rational roots come back as degenerate instances. The remaining factor has
    only irrational roots, so bisection midpoints are never roots and every
    isolating interval has a strict sign change.
    """
    a, b = as_fraction(lo), as_fraction(hi)
    if p.is_zero:
        raise ValueError("cannot isolate roots of the zero polynomial")
    if a >= b:
        raise ValueError(f"empty range [{a}, {b}]")
    if p.degree < 1:
        return []

    square_free = p.to_sympy().sqf_part()
    rational_roots = [_sympy_to_fraction(r) for r in square_free.ground_roots()]
    rest = square_free
    for r in rational_roots:
        rest = rest.exquo(IntPolynomial.linear_through(r).to_sympy())

    roots = [AlgebraicNumber.from_rational(r) for r in rational_roots if a <= r <= b]
    if rest.degree() >= 1:
        irrational = IntPolynomial.from_sympy(rest, primitive=True)
        stack = [(a, b)]
        while stack:
            left, right = stack.pop()
            n = count_roots(irrational, left, right)
            if n == 0:
                continue
            if n == 1:
                roots.append(AlgebraicNumber(irrational, left, right, validate=False))
                continue
            mid = (left + right) / 2
            stack.extend([(mid, right), (left, mid)])

    roots.sort(key=cmp_to_key(compare))
    logger.debug(f"isolate_roots: {len(roots)} roots of {p} in [{a}, {b}]")
    return roots


def vanishes_at(p: IntPolynomial, q: AlgebraicNumber) -> bool:
    """p(q) == 0, decided by a gcd with q.defining."""
    if p.is_zero:
        return True
    if q.is_rational:
        return p(q.lo) == 0
    common = IntPolynomial.from_sympy(p.to_sympy().gcd(q.defining.to_sympy()), primitive=True)
    return common.degree >= 1 and count_roots(common, q.lo, q.hi) >= 1


def sign_at(p: IntPolynomial, q: AlgebraicNumber) -> int:
    """Exact sign of p(q)."""
    if p.is_zero:
        return 0
    if q.is_rational:
        return _sign(p(q.lo))
    if vanishes_at(p, q):
        return 0
    coeffs = p.coefficients
    while True:
        low, high = interval_eval(coeffs, q.lo, q.hi)
        if low > 0:
            return 1
        if high < 0:
            return -1
        q = _bisect(q)
        if q.is_rational:
            return _sign(p(q.lo))


def compare(a: AlgebraicNumber, b: AlgebraicNumber) -> int:
    """Exact order of two algebraic numbers."""
    if a is b:
        return 0
    if b.is_rational:
        return sign_at(IntPolynomial.linear_through(b.lo), a) if not a.is_rational else _sign(a.lo - b.lo)
    if a.is_rational:
        return -sign_at(IntPolynomial.linear_through(a.lo), b)
    if a.hi < b.lo:
        return -1
    if b.hi < a.lo:
        return 1
    common = IntPolynomial.from_sympy(a.defining.to_sympy().gcd(b.defining.to_sympy()), primitive=True)
    overlap_lo, overlap_hi = max(a.lo, b.lo), min(a.hi, b.hi)
    if common.degree >= 1:
        inside = count_roots(common, overlap_lo, overlap_hi) + (1 if common(overlap_lo) == 0 else 0)
        if inside >= 1:
            return 0
    while a.hi >= b.lo and b.hi >= a.lo:
        a, b = _bisect(a), _bisect(b)
        if a.is_rational or b.is_rational:
            return compare(a, b)
    return -1 if a.hi < b.lo else 1


def compare_rational(a: AlgebraicNumber, value: RationalLike) -> int:
    return compare(a, AlgebraicNumber.from_rational(as_fraction(value)))


# ============================================================================
# ARITHMETIC IN Q[x]/(defining)
# ============================================================================

FieldElement = tuple[Fraction, ...]


class NumberField:
    """
    Elements are polynomials in q of degree < deg(q.defining), stored as
    Fraction coefficient tuples. Signs are read from a cached enclosure of q
    by interval evaluation; an ambiguous enclosure triggers the exact gcd zero
    test and further refinement. The first enclosure has width
    2^-field_precision_bits unless `initial_bits` is given.
    """

    def __init__(self, q: AlgebraicNumber, initial_bits: Optional[int] = None):
        self.base = q
        bits = initial_bits or get_settings().field_precision_bits
        self._q = q if q.is_rational else refine(q, Fraction(1, 1 << bits))
        if self._q.hi <= 0:
            raise ValueError("NumberField requires a positive base")
        f = IntPolynomial.linear_through(self._q.lo) if self._q.is_rational else self._q.defining
        self.degree = f.degree
        self._reduction = tuple(Fraction(-c, f.leading) for c in f.coefficients[:-1])

    def constant(self, value: RationalLike) -> FieldElement:
        return (as_fraction(value),) + (Fraction(0),) * (self.degree - 1)

    def times_x(self, e: FieldElement) -> FieldElement:
        top = e[-1]
        shifted = (Fraction(0),) + e[:-1]
        if top == 0:
            return shifted
        return tuple(s + top * r for s, r in zip(shifted, self._reduction))

    def add_constant(self, e: FieldElement, value: int | Fraction) -> FieldElement:
        return (e[0] + value,) + e[1:]

    def enclosure(self, e: FieldElement) -> tuple[Fraction, Fraction]:
        return interval_eval(e, self._q.lo, self._q.hi)

    def _decide(self, e: FieldElement) -> int | None:
        low, high = interval_eval(e, self._q.lo, self._q.hi)
        if low > 0:
            return 1
        if high < 0:
            return -1
        return 0 if self._q.is_rational else None

    def sign(self, e: FieldElement) -> int:
        if not any(e):
            return 0
        decided = self._decide(e)
        if decided is not None:
            return decided
        if vanishes_at(IntPolynomial.from_fractions(e), self._q):
            return 0
        width = self._q.hi - self._q.lo
        while decided is None:
            width = width * width if width < 1 else width / 2
            self._q = refine(self._q, width)
            decided = self._decide(e)
        return decided
