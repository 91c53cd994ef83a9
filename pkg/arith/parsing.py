"""
Text formats for bases and grids.

Accepted base specs:
    golden, tribonacci                    named algebraic bases
    1.8, 2, 1e-3                          decimal literals (exact)
    7/4                                   rationals
    poly:[-1,-1,1];interval:[1,2]         integer polynomial (c0 first) + isolating interval
"""
from __future__ import annotations

import json
import logging
import re
from fractions import Fraction

from arith.errors import BaseSpecError
from arith.exactnum import AlgebraicNumber, IntPolynomial, isolate_roots

logger = logging.getLogger(__name__)

NAMED_BASES: dict[str, tuple[list[int], tuple[int, int]]] = {
    "golden": ([-1, -1, 1], (1, 2)),
    "tribonacci": ([-1, -1, -1, 1], (1, 2)),
}

_POLY_SPEC = re.compile(r"^poly:(\[[^\]]*\]);interval:(\[[^\]]*\])$")


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as e:
        raise BaseSpecError(f"Not a rational number: {text!r}") from e


def named_base(name: str) -> AlgebraicNumber:
    coefficients, (lo, hi) = NAMED_BASES[name]
    return AlgebraicNumber(IntPolynomial(coefficients), lo, hi)


def _parse_poly_spec(poly_text: str, interval_text: str) -> AlgebraicNumber:
    try:
        coefficients = json.loads(poly_text)
        bounds = [parse_rational(str(v)) for v in json.loads(interval_text)]
    except json.JSONDecodeError as e:
        raise BaseSpecError(f"Malformed polynomial spec: {e}") from e
    if not all(isinstance(c, int) for c in coefficients):
        raise BaseSpecError("Polynomial coefficients must be integers")
    if len(bounds) != 2:
        raise BaseSpecError("Interval must have exactly two endpoints")
    p = IntPolynomial(coefficients)
    if p.degree < 1:
        raise BaseSpecError("Polynomial must have degree >= 1")
    lo, hi = bounds
    if lo >= hi:
        raise BaseSpecError(f"Empty interval [{lo}, {hi}]")
    roots = isolate_roots(p, lo, hi)
    if len(roots) != 1:
        raise BaseSpecError(f"Expected exactly one root in [{lo}, {hi}], found {len(roots)}")
    return roots[0]


def parse_base(text: str) -> AlgebraicNumber:
    """Parse a base spec into an exact AlgebraicNumber (rationals are degenerate instances)."""
    spec = text.strip()
    if spec.lower() in NAMED_BASES:
        return named_base(spec.lower())
    match = _POLY_SPEC.match(spec.replace(" ", ""))
    if match:
        return _parse_poly_spec(match.group(1), match.group(2))
    return AlgebraicNumber.from_rational(parse_rational(spec))


def parse_grid(text: str) -> list[Fraction]:
    """`lo:hi:step` as exact decimals, both endpoints included."""
    parts = text.split(":")
    if len(parts) != 3:
        raise BaseSpecError(f"Grid must look like lo:hi:step, got {text!r}")
    lo, hi, step = (parse_rational(p) for p in parts)
    if step <= 0:
        raise BaseSpecError("Grid step must be positive")
    if lo > hi:
        raise BaseSpecError(f"Grid is reversed: {lo} > {hi}")
    count = int((hi - lo) / step)
    points = [lo + i * step for i in range(count + 1)]
    logger.debug(f"Grid {text!r} -> {len(points)} points")
    return points
