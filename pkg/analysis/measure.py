"""
Measure-theoretic side of the staircase: how often greedy expansions of 1
contain zero blocks.

- interval_triple / check_ratio_bound: the bases sharing a greedy prefix form
  an interval [q1, q2); those whose next t digits vanish form [q1, q3).
- measure_lower_bound and its Monte Carlo companion.
- divergent_schedule: block lengths n_k > log_s(n_1 + ... + n_k) with Σ s^-n_k = ∞.
- zero_run_experiment: long zero runs in β(q) for random q.
"""
from __future__ import annotations

import logging
import math
from fractions import Fraction
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, field_serializer, model_validator

from analysis.workers import parallel_map
from arith.errors import ConsistencyAlarm, DegenerateBoundary, NotAdmissible, RangeError, UndecidedAtDepth
from arith.exactnum import AlgebraicNumber, IntPolynomial, compare, compare_rational, isolate_roots, refine
from arith.intervals import Enclosure, RationalLike, as_fraction, format_fraction
from config.settings import get_settings
from symbolic.expansion import greedy_expansion, is_greedy_admissible
from symbolic.models import Alphabet, Word

logger = logging.getLogger(__name__)

_SAMPLE_BITS = 64
_LOWEST_BASE = 1 + Fraction(1, 2**10)


# ============================================================================
# INTERVAL TRIPLES
# ============================================================================


class IntervalTriple(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    prefix: Word
    t: int
    q1: AlgebraicNumber
    q3: AlgebraicNumber
    q2: AlgebraicNumber
    boundary: bool = False

    def __str__(self):
        return f"{self.prefix} (t={self.t}): q1={self.q1}, q3={self.q3}, q2={self.q2}"


class RatioCheck(BaseModel):
    model_config = ConfigDict(frozen=True)

    ratio: Enclosure
    bound: Enclosure
    holds: bool


def _largest_root(p: IntPolynomial, top: int, what: str) -> AlgebraicNumber:
    roots = isolate_roots(p, 1, top)
    if not roots:
        raise NotAdmissible(f"{what} has no root in [1, {top}]")
    return roots[-1]


def interval_triple(M: int, prefix: Word | str | tuple[int, ...], t: int) -> IntervalTriple:
    """
    With P(x) = Σ η_i x^{n-i}:
        q1: x^n - P(x)                            (prefix is all of β)
        q3: x^{n+t} - x^t P(x) - 1                 (prefix, t-1 zeros, then 1)
        q2: x^{n+1} - x^n - (x - 1) P(x) - M       (prefix followed by M^∞)
    """
    alphabet = Alphabet(M=M)
    word = prefix if isinstance(prefix, Word) else Word.of(prefix, alphabet)
    if t < 1:
        raise ValueError("t must be a positive integer")
    if not is_greedy_admissible(word):
        raise NotAdmissible(f"{word} is not a greedy prefix")
    n = len(word)
    P = IntPolynomial(reversed(word.digits))
    x = IntPolynomial.monomial
    q1 = _largest_root(x(n) - P, M + 1, "q1 polynomial")
    q3 = _largest_root(x(n + t) - x(t) * P - 1, M + 1, "q3 polynomial")
    q2 = _largest_root(x(n + 1) - x(n) - IntPolynomial([-1, 1]) * P - M, M + 1, "q2 polynomial")
    if compare(q1, q3) > 0 or compare(q3, q2) > 0:
        raise ConsistencyAlarm(f"interval endpoints out of order for {word}, t={t}")
    boundary = compare_rational(q1, 1) == 0
    return IntervalTriple(prefix=word, t=t, q1=q1, q3=q3, q2=q2, boundary=boundary)


def _ratio_and_bound(tr: IntervalTriple, width: Fraction) -> tuple[Enclosure, Enclosure]:
    M = tr.prefix.alphabet.M
    e1, e2, e3 = (refine(q, width).enclosure() for q in (tr.q1, tr.q2, tr.q3))
    ratio = (e3 - e1) / (e2 - e1)
    bound = (e1 - 1) ** 3 / (e2 ** (tr.t + 2) * M**2)
    return ratio, bound


def check_ratio_bound(tr: IntervalTriple, max_rounds: int = 12) -> RatioCheck:
    """(q3 - q1) / (q2 - q1) >= (q1 - 1)^3 / (M^2 q2^{t+2}); a refutation is an internal error."""
    if tr.boundary:
        raise DegenerateBoundary(f"q1 = 1 for prefix {tr.prefix}")
    bits = get_settings().denominator_bits
    width = Fraction(1, 2**32)
    for _ in range(max_rounds):
        # q2 - q1 must be bounded away from 0 before dividing
        e1, e2 = refine(tr.q1, width).enclosure(), refine(tr.q2, width).enclosure()
        if e2.lo > e1.hi:
            ratio, bound = _ratio_and_bound(tr, width)
            if ratio.lo >= bound.hi:
                return RatioCheck(ratio=ratio.rounded(bits), bound=bound.rounded(bits), holds=True)
            if ratio.hi < bound.lo:
                raise ConsistencyAlarm(f"ratio bound refuted for {tr}: {ratio} < {bound}")
        width = width * width
    raise UndecidedAtDepth(max_rounds, "ratio bound")


# ============================================================================
# MEASURE OF ZERO BLOCKS
# ============================================================================


def _check_range(M: int, p: Fraction, r: Fraction) -> None:
    if not (1 < p < r <= M + 1):
        raise RangeError(f"need 1 < p < r <= M+1, got p={p}, r={r}, M={M}")


def measure_lower_bound(M: int, p: RationalLike | float, r: RationalLike | float, t: int) -> Enclosure:
    """Lebesgue measure of {q in [p, r): β_{n+1} = ... = β_{n+t} = 0} is at least (p-1)^3 (r-p) / (M^2 r^{t+2})."""
    low, high = as_fraction(p), as_fraction(r)
    _check_range(M, low, high)
    if t < 1:
        raise ValueError("t must be a positive integer")
    return Enclosure.exact((low - 1) ** 3 / (M**2 * high ** (t + 2)) * (high - low))


class MeasureEstimate(BaseModel):
    model_config = ConfigDict(frozen=True)

    samples: int
    hits: int
    estimate: float
    stderr: float
    bound: Enclosure
    consistent: bool

    def __str__(self):
        status = "✅" if self.consistent else "⚠️"
        return f"{status} measure ≈ {self.estimate:.6f} ± {self.stderr:.6f} vs bound {float(self.bound.lo):.6f}"


def _sample_bases(p: Fraction, r: Fraction, samples: int, seed: int) -> list[Fraction]:
    """Uniform rationals p + (r - p) k / 2^64 from a seeded generator."""
    rng = np.random.default_rng(seed)
    halves = rng.integers(0, 2**32, size=(samples, 2), dtype=np.uint64)
    scale = 2**_SAMPLE_BITS
    return [p + (r - p) * Fraction((int(hi) << 32) | int(lo), scale) for hi, lo in halves]


def _zero_block(task: tuple[int, Fraction, int, int]) -> bool:
    M, q, n, t = task
    digits = greedy_expansion(AlgebraicNumber.from_rational(q), Alphabet(M=M), n + t).digits
    return not any(digits[n:])


def estimate_zero_block_measure(
    M: int,
    p: RationalLike | float,
    r: RationalLike | float,
    n: int,
    t: int,
    samples: int,
    seed: Optional[int] = None,
) -> MeasureEstimate:
    """Monte Carlo estimate of the zero-block measure, checked one-sidedly at 3σ against the lower bound."""
    low, high = as_fraction(p), as_fraction(r)
    bound = measure_lower_bound(M, low, high, t)
    if n < 0 or samples < 1:
        raise ValueError("need n >= 0 and samples >= 1")
    bases = _sample_bases(low, high, samples, seed if seed is not None else get_settings().seed)
    hits = sum(parallel_map(_zero_block, [(M, q, n, t) for q in bases]))
    length = float(high - low)
    fraction = hits / samples
    estimate = fraction * length
    stderr = math.sqrt(fraction * (1 - fraction) / samples) * length
    result = MeasureEstimate(
        samples=samples,
        hits=hits,
        estimate=estimate,
        stderr=stderr,
        bound=bound,
        consistent=estimate + 3 * stderr >= float(bound.lo),
    )
    logger.info(str(result))
    return result


# ============================================================================
# DIVERGENT SCHEDULE
# ============================================================================


class DivergentSchedule(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    s: Fraction
    terms: tuple[int, ...]
    partial_sums: tuple[float, ...]

    @model_validator(mode="after")
    def validate_terms(self):
        if self.s <= 1:
            raise ValueError("s must exceed 1")
        if any(n < 1 for n in self.terms) or len(self.partial_sums) != len(self.terms):
            raise ValueError("terms must be positive with one partial sum each")
        return self

    @field_serializer("s", when_used="json")
    def serialize_s(self, v: Fraction) -> str:
        return format_fraction(v)


def divergent_schedule(s: RationalLike | float, count: int) -> DivergentSchedule:
    """n_k = least integer with s^{n_k} > n_1 + ... + n_k (equivalently n_k > log_s S_k)."""
    base = as_fraction(s)
    if base <= 1:
        raise ValueError("s must exceed 1")
    if count < 1:
        raise ValueError("count must be >= 1")
    terms: list[int] = []
    sums: list[float] = []
    running, series = 0, 0.0
    for _ in range(count):
        n = 1
        while base**n <= running + n:
            n += 1
        terms.append(n)
        running += n
        series += float(base) ** -n
        sums.append(series)
    return DivergentSchedule(s=base, terms=tuple(terms), partial_sums=tuple(sums))


# ============================================================================
# ZERO RUNS
# ============================================================================


class ZeroRunSample(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    q: Fraction
    deepest: int

    @field_serializer("q", when_used="json")
    def serialize_q(self, v: Fraction) -> str:
        return format_fraction(v)


class ZeroRunReport(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    M: int
    r: Fraction
    depth: int
    seed: int
    rows: tuple[ZeroRunSample, ...]

    @field_serializer("r", when_used="json")
    def serialize_r(self, v: Fraction) -> str:
        return format_fraction(v)

    @property
    def samples(self) -> int:
        return len(self.rows)

    @property
    def successes(self) -> int:
        return sum(1 for row in self.rows if row.deepest > 0)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.successes, self.samples) if self.rows else Fraction(0)

    def to_json(self) -> dict:
        return {**self.model_dump(mode="json"), "fraction": float(self.fraction)}

    def __str__(self):
        return f"{self.successes}/{self.samples} bases with a long zero run by depth {self.depth}"


def deepest_zero_run(digits: tuple[int, ...], r: Fraction) -> int:
    """Largest m such that β1..βm ends with z zeros, r^z > m (0 if none)."""
    deepest, run = 0, 0
    for m, d in enumerate(digits, start=1):
        run = run + 1 if d == 0 else 0
        if run and r**run > m:
            deepest = m
    return deepest


def _zero_run_sample(task: tuple[int, Fraction, Fraction, int]) -> ZeroRunSample:
    M, r, q, depth = task
    digits = greedy_expansion(AlgebraicNumber.from_rational(q), Alphabet(M=M), depth).digits
    return ZeroRunSample(q=q, deepest=deepest_zero_run(digits, r))


def zero_run_experiment(
    M: int,
    r: RationalLike | float,
    samples: int,
    depth: int,
    seed: Optional[int] = None,
) -> ZeroRunReport:
    """Sample q uniformly in (1 + 2^-10, r) and look for prefixes ending with more than log_r m zeros."""
    cap = as_fraction(r)
    _check_range(M, _LOWEST_BASE, cap)
    if samples < 1 or depth < 1:
        raise ValueError("samples and depth must be >= 1")
    seed = seed if seed is not None else get_settings().seed
    bases = _sample_bases(_LOWEST_BASE, cap, samples, seed)
    rows = parallel_map(_zero_run_sample, [(M, cap, q, depth) for q in bases])
    report = ZeroRunReport(M=M, r=cap, depth=depth, seed=seed, rows=tuple(rows))
    logger.info(f"✅ {report}")
    return report
