"""
Rational enclosures with outward rounding.

An Enclosure is a closed interval [lo, hi] with exact rational endpoints.
Arithmetic is exact; `rounded()` coarsens endpoints outward onto the dyadic
grid 2^-bits so long computations keep bounded denominators. Logarithms go
through mpmath's interval context, whose results are rigorous, and come back
as exact rationals.
"""
from __future__ import annotations

import math
import threading
from contextlib import contextmanager
from fractions import Fraction
from typing import Iterator, Union

from mpmath import iv
from pydantic import BaseModel, ConfigDict, field_serializer, field_validator, model_validator

RationalLike = Union[int, Fraction, str]

_IV_LOCK = threading.Lock()


def as_fraction(value: RationalLike | float) -> Fraction:
    """Exact conversion; floats are taken at their binary value."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, (int, float, str)):
        return Fraction(value)
    raise TypeError(f"Cannot convert {type(value).__name__} to Fraction")


def round_down(x: Fraction, bits: int) -> Fraction:
    scale = 1 << bits
    if scale % x.denominator == 0:
        return x
    return Fraction(math.floor(x * scale), scale)


def round_up(x: Fraction, bits: int) -> Fraction:
    scale = 1 << bits
    if scale % x.denominator == 0:
        return x
    return Fraction(math.ceil(x * scale), scale)


def format_fraction(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def format_decimal(x: Fraction, places: int) -> str:
    """Decimal rendering with `places` digits, trailing zeros stripped (deterministic)."""
    scaled = round(x * 10**places)
    sign = "-" if scaled < 0 else ""
    digits = str(abs(scaled)).rjust(places + 1, "0")
    whole, frac = digits[:-places], digits[-places:].rstrip("0")
    return f"{sign}{whole}.{frac}" if frac else f"{sign}{whole}"


class Enclosure(BaseModel):
    """Certified interval [lo, hi] with rational endpoints."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    lo: Fraction
    hi: Fraction

    @field_validator("lo", "hi", mode="before")
    @classmethod
    def validate_endpoint(cls, v: RationalLike) -> Fraction:
        return as_fraction(v)

    @model_validator(mode="after")
    def validate_order(self):
        if self.lo > self.hi:
            raise ValueError(f"Enclosure lower end {self.lo} exceeds upper end {self.hi}")
        return self

    @field_serializer("lo", "hi", when_used="json")
    def serialize_endpoint(self, v: Fraction) -> str:
        return format_fraction(v)

    # ------------------------------------------------------------------
    # constructors / queries
    # ------------------------------------------------------------------

    @classmethod
    def exact(cls, value: RationalLike) -> Enclosure:
        x = as_fraction(value)
        return cls(lo=x, hi=x)

    @classmethod
    def hull(cls, *items: Enclosure) -> Enclosure:
        return cls(lo=min(e.lo for e in items), hi=max(e.hi for e in items))

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    def contains(self, x: RationalLike | float) -> bool:
        value = as_fraction(x)
        return self.lo <= value <= self.hi

    def overlaps(self, other: Enclosure) -> bool:
        return not (self.hi < other.lo or other.hi < self.lo)

    def rounded(self, bits: int) -> Enclosure:
        return Enclosure(lo=round_down(self.lo, bits), hi=round_up(self.hi, bits))

    def clamp(self, lo: RationalLike, hi: RationalLike) -> Enclosure:
        floor, ceiling = as_fraction(lo), as_fraction(hi)
        return Enclosure(lo=min(max(self.lo, floor), ceiling), hi=max(min(self.hi, ceiling), floor))

    # ------------------------------------------------------------------
    # arithmetic
    # ------------------------------------------------------------------

    @staticmethod
    def _lift(other: Enclosure | RationalLike) -> Enclosure:
        return other if isinstance(other, Enclosure) else Enclosure.exact(other)

    def __add__(self, other: Enclosure | RationalLike) -> Enclosure:
        o = self._lift(other)
        return Enclosure(lo=self.lo + o.lo, hi=self.hi + o.hi)

    __radd__ = __add__

    def __neg__(self) -> Enclosure:
        return Enclosure(lo=-self.hi, hi=-self.lo)

    def __sub__(self, other: Enclosure | RationalLike) -> Enclosure:
        o = self._lift(other)
        return Enclosure(lo=self.lo - o.hi, hi=self.hi - o.lo)

    def __rsub__(self, other: Enclosure | RationalLike) -> Enclosure:
        return self._lift(other) - self

    def __mul__(self, other: Enclosure | RationalLike) -> Enclosure:
        o = self._lift(other)
        products = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Enclosure(lo=min(products), hi=max(products))

    __rmul__ = __mul__

    def reciprocal(self) -> Enclosure:
        if self.lo <= 0 <= self.hi:
            raise ZeroDivisionError(f"Enclosure {self} contains zero")
        return Enclosure(lo=1 / self.hi, hi=1 / self.lo)

    def __truediv__(self, other: Enclosure | RationalLike) -> Enclosure:
        return self * self._lift(other).reciprocal()

    def __rtruediv__(self, other: Enclosure | RationalLike) -> Enclosure:
        return self._lift(other) * self.reciprocal()

    def __pow__(self, exponent: int) -> Enclosure:
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("only nonnegative integer powers are supported")
        if exponent == 0:
            return Enclosure.exact(1)
        a, b = self.lo**exponent, self.hi**exponent
        if exponent % 2 == 0 and self.lo < 0 < self.hi:
            return Enclosure(lo=0, hi=max(a, b))
        return Enclosure(lo=min(a, b), hi=max(a, b))

    def ln(self, bits: int = 256) -> Enclosure:
        return ln_enclosure(self, bits)

    def __str__(self):
        if self.is_exact:
            return format_fraction(self.lo)
        return f"[{float(self.lo):.12g}, {float(self.hi):.12g}]"


# ============================================================================
# LOGARITHMS VIA mpmath.iv
# ============================================================================


@contextmanager
def _iv_precision(bits: int) -> Iterator[None]:
    with _IV_LOCK:
        previous = iv.prec
        iv.prec = bits
        try:
            yield
        finally:
            iv.prec = previous


def _raw_to_fraction(raw: tuple) -> Fraction:
    sign, man, exp, _ = raw
    value = Fraction(man) * (Fraction(2) ** exp)
    return -value if sign else value


def _iv_of(x: Fraction):
    return iv.mpf(x.numerator) / iv.mpf(x.denominator)


def _to_enclosure(value) -> Enclosure:
    a, b = value._mpi_
    return Enclosure(lo=_raw_to_fraction(a), hi=_raw_to_fraction(b))


def ln_enclosure(x: Enclosure | RationalLike, bits: int = 256) -> Enclosure:
    """Outward enclosure of ln over a positive enclosure (ln is increasing)."""
    enc = x if isinstance(x, Enclosure) else Enclosure.exact(x)
    if enc.lo <= 0:
        raise ValueError(f"ln undefined on {enc}")
    with _iv_precision(bits + 16):
        low = iv.log(_iv_of(enc.lo))
        high = low if enc.is_exact else iv.log(_iv_of(enc.hi))
        result = Enclosure(lo=_to_enclosure(low).lo, hi=_to_enclosure(high).hi)
    if enc.lo == enc.hi == 1:
        return Enclosure.exact(0)
    return result.rounded(bits)
