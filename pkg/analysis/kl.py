"""
Critical base q′(M): the smallest base in which 1 has a unique expansion.

β(q′) is the generalized Thue-Morse sequence λ(M) and greedy expansions are
strictly increasing in q, so the sign of β(q) - λ(M) (first differing digit)
locates q against q′ exactly. Bisection over dyadic rationals keeps every
endpoint rational; λ(M) is aperiodic, so each comparison terminates.
"""
from __future__ import annotations

import logging
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from pydantic import BaseModel, ConfigDict, model_validator

from arith.errors import CertificateDepthExceeded
from arith.exactnum import AlgebraicNumber
from arith.intervals import Enclosure, RationalLike, as_fraction
from config.settings import get_settings
from symbolic.expansion import greedy_sequence, kl_sequence
from symbolic.models import Alphabet

logger = logging.getLogger(__name__)


class KLConstant(BaseModel):
    model_config = ConfigDict(frozen=True)

    M: int
    enclosure: Enclosure
    certificate_depth: int

    @model_validator(mode="after")
    def validate_range(self):
        if not (1 < self.enclosure.lo <= self.enclosure.hi < self.M + 1):
            raise ValueError(f"enclosure {self.enclosure} outside (1, {self.M + 1})")
        return self

    @property
    def lo(self) -> Fraction:
        return self.enclosure.lo

    @property
    def hi(self) -> Fraction:
        return self.enclosure.hi

    def __str__(self):
        bounds = f"[{float(self.lo):.10f}, {float(self.hi):.10f}]"
        return f"q'({self.M}) ∈ {bounds} (certificate depth {self.certificate_depth})"


def _against_thue_morse(q: Fraction, alphabet: Alphabet, cap: int) -> tuple[int, int]:
    """(sign of β(q) - λ(M), index of the first differing digit)."""
    beta = greedy_sequence(AlgebraicNumber.from_rational(q), alphabet, 1)
    reference = kl_sequence(alphabet.M, cap)
    for i, expected in enumerate(reference, start=1):
        digit = beta.digit(i)
        if digit != expected:
            return (1 if digit > expected else -1), i
    raise CertificateDepthExceeded(cap)


def thue_morse_agreement(kl: KLConstant, cap: Optional[int] = None) -> int:
    """Number of leading digits of λ(M) shared by β at both enclosure endpoints."""
    cap = cap or get_settings().comparison_depth
    alphabet = Alphabet(M=kl.M)
    return min(_against_thue_morse(kl.lo, alphabet, cap)[1], _against_thue_morse(kl.hi, alphabet, cap)[1]) - 1


@lru_cache(maxsize=32)
def _bisect_kl(M: int, width: Fraction, cap: int) -> KLConstant:
    alphabet = Alphabet(M=M)
    lo, hi = Fraction(1), Fraction(M + 1)
    depth_lo = depth_hi = 0
    # 1 and M+1 are not valid endpoints, so both sides must move at least once
    while hi - lo > width or not (depth_lo and depth_hi):
        mid = (lo + hi) / 2
        side, depth = _against_thue_morse(mid, alphabet, cap)
        if side > 0:
            hi, depth_hi = mid, depth
        else:
            lo, depth_lo = mid, depth
    kl = KLConstant(M=M, enclosure=Enclosure(lo=lo, hi=hi), certificate_depth=max(depth_lo, depth_hi))
    logger.info(f"✅ {kl}")
    return kl


def kl_constant(M: int, width: Optional[RationalLike | float] = None) -> KLConstant:
    """Certified enclosure of q′(M) no wider than `width`."""
    if M < 1:
        raise ValueError("M must be a positive integer")
    settings = get_settings()
    target = as_fraction(width if width is not None else settings.kl_width)
    if target <= 0:
        raise ValueError("width must be positive")
    return _bisect_kl(M, target, settings.comparison_depth)
