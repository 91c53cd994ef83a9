"""
Digit-level machinery for expansions of 1 in a base q.

    greedy:        r0 = 1, b_i = min(M, floor(q r)),    r <- q r - b_i
    quasi-greedy:  r0 = 1, a_i = min(M, ceil(q r) - 1), r <- q r - a_i

Remainders are exact elements of Q(q) (NumberField), so a finite greedy
expansion is detected when the remainder is exactly zero and an eventually
periodic one when a remainder repeats.
"""
from __future__ import annotations

import logging
import math
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from arith.errors import BaseOutOfRange, UndecidedAtDepth
from arith.exactnum import AlgebraicNumber, IntPolynomial, NumberField, compare_rational, refine, sign_at
from arith.intervals import Enclosure, RationalLike, as_fraction
from config.settings import get_settings
from symbolic.models import Alphabet, DigitStream, Order, PeriodicSeq, SequenceLike, Verdict, Word

logger = logging.getLogger(__name__)


# ============================================================================
# BASE CHECKS
# ============================================================================


def check_base(q: AlgebraicNumber, alphabet: Alphabet) -> None:
    """1 < q <= M+1, the range where expansions of 1 exist."""
    if compare_rational(q, 1) <= 0:
        raise BaseOutOfRange(f"base {q} must be > 1")
    if compare_rational(q, alphabet.M + 1) > 0:
        raise BaseOutOfRange(f"base {q} exceeds M+1 = {alphabet.M + 1}: 1 has no expansion")


# ============================================================================
# DIGIT RECURSIONS
# ============================================================================


class _Recursion:
    """
    Stateful greedy / quasi-greedy recursion with exact finiteness and cycle detection.

    Remainders are remembered for the first `track` digits only; past that
    (or once the recursion is handed out as a stream) no cycle is looked for.
    """

    def __init__(self, q: AlgebraicNumber, alphabet: Alphabet, quasi: bool, track: int = 0):
        self.field = NumberField(q)
        self.M = alphabet.M
        self.quasi = quasi
        self.remainder = self.field.constant(1)
        self.digits: list[int] = []
        self.finite_at: Optional[int] = None
        self.cycle: Optional[tuple[int, int]] = None
        self._track = track
        self._seen: Optional[dict] = {self.remainder: 0} if track > 0 else None

    def _next_digit(self, t) -> tuple[int, int]:
        """Largest admissible digit for q·r = t and the sign of t - digit."""
        sign = self.field.sign
        low, _ = self.field.enclosure(t)
        k = min(self.M, max(0, math.floor(low)))
        s = sign(self.field.add_constant(t, -k))
        floor_ok = (lambda v: v > 0) if self.quasi else (lambda v: v >= 0)
        while not floor_ok(s) and k > 0:
            k -= 1
            s = sign(self.field.add_constant(t, -k))
        while k < self.M:
            s_next = sign(self.field.add_constant(t, -(k + 1)))
            if not floor_ok(s_next):
                break
            k, s = k + 1, s_next
        return k, s

    def step(self) -> int:
        if self.finite_at is not None:
            self.digits.append(0)
            return 0
        t = self.field.times_x(self.remainder)
        digit, s = self._next_digit(t)
        self.digits.append(digit)
        if s == 0:
            self.finite_at = len(self.digits)
            self.remainder = self.field.constant(0)
            return digit
        self.remainder = self.field.add_constant(t, -digit)
        if self._seen is not None:
            previous = self._seen.get(self.remainder)
            if previous is not None:
                self.cycle = (previous, len(self.digits))
                self._seen = None
            elif len(self.digits) < self._track:
                self._seen[self.remainder] = len(self.digits)
            else:
                self._seen = None
        return digit

    @property
    def remembered(self) -> int:
        return 0 if self._seen is None else len(self._seen)

    def run(self, depth: int) -> None:
        while len(self.digits) < depth and self.finite_at is None and self.cycle is None:
            self.step()

    def as_periodic(self, alphabet: Alphabet) -> Optional[PeriodicSeq]:
        if self.finite_at is not None:
            return PeriodicSeq(preperiod=tuple(self.digits[: self.finite_at]), period=(), alphabet=alphabet)
        if self.cycle is not None:
            start, end = self.cycle
            return PeriodicSeq(
                preperiod=tuple(self.digits[:start]), period=tuple(self.digits[start:end]), alphabet=alphabet
            )
        return None

    def as_stream(self, alphabet: Alphabet) -> DigitStream:
        self._seen = None
        return DigitStream(self.step, alphabet, known=tuple(self.digits))


def greedy_expansion(q: AlgebraicNumber, alphabet: Alphabet, depth: int) -> Word:
    """First `depth` digits of the greedy expansion β(q) of 1."""
    check_base(q, alphabet)
    recursion = _Recursion(q, alphabet, quasi=False)
    while len(recursion.digits) < depth:
        recursion.step()
    return Word(digits=tuple(recursion.digits[:depth]), alphabet=alphabet)


@lru_cache(maxsize=256)
def greedy_sequence(q: AlgebraicNumber, alphabet: Alphabet, depth: Optional[int] = None) -> PeriodicSeq | DigitStream:
    """β(q): periodic when finite or cyclic within the working depth, else a lazy stream."""
    check_base(q, alphabet)
    working = depth or get_settings().digit_depth
    recursion = _Recursion(q, alphabet, quasi=False, track=working)
    recursion.run(working)
    periodic = recursion.as_periodic(alphabet)
    if periodic is not None:
        logger.debug(f"beta({q}) = {periodic.display()}")
        return periodic
    return recursion.as_stream(alphabet)


@lru_cache(maxsize=256)
def quasi_greedy_expansion(
    q: AlgebraicNumber, alphabet: Alphabet, depth: Optional[int] = None
) -> PeriodicSeq | DigitStream:
    """
    α(q). A finite greedy expansion b1..bm 0^∞ gives α = (b1..b_{m-1}(b_m - 1))^∞;
    otherwise the quasi-greedy recursion runs, switching to a periodic result
    if its remainder orbit closes within the working depth.
    """
    check_base(q, alphabet)
    working = depth or get_settings().digit_depth
    beta = greedy_sequence(q, alphabet, depth)
    if isinstance(beta, PeriodicSeq) and beta.is_eventually_zero:
        block = beta.preperiod[:-1] + (beta.preperiod[-1] - 1,)
        return PeriodicSeq(preperiod=(), period=block, alphabet=alphabet)
    recursion = _Recursion(q, alphabet, quasi=True, track=working)
    recursion.run(working)
    periodic = recursion.as_periodic(alphabet)
    if periodic is not None:
        return periodic
    return recursion.as_stream(alphabet)


def beta_is_finite(q: AlgebraicNumber, alphabet: Alphabet) -> Optional[int]:
    """Index m of the last nonzero digit when β(q) is finite within the working depth."""
    beta = greedy_sequence(q, alphabet)
    if isinstance(beta, PeriodicSeq) and beta.is_eventually_zero:
        return len(beta.preperiod)
    return None


# ============================================================================
# SEQUENCE OPERATIONS
# ============================================================================


def reflect(w: SequenceLike) -> SequenceLike:
    return w.reflect()


def lex_compare(a: SequenceLike, b: SequenceLike, depth: Optional[int] = None) -> Order:
    """
    First-difference comparison. Two periodic sequences are compared exactly
    (they agree forever once they agree on max preperiod + lcm of periods
    digits); otherwise digits 1..depth are compared, finite words limiting the
    range, and equality through `depth` involving a stream is UNDECIDED.
    """
    if isinstance(a, PeriodicSeq) and isinstance(b, PeriodicSeq):
        limit = max(len(a.preperiod), len(b.preperiod)) + math.lcm(len(a.cycle), len(b.cycle))
        exact = True
    else:
        limit = depth or get_settings().comparison_depth
        exact = False
        for s in (a, b):
            if isinstance(s, Word) and len(s) < limit:
                limit, exact = len(s), True
    for i in range(1, limit + 1):
        da, db = a.digit(i), b.digit(i)
        if da != db:
            return Order.LESS if da < db else Order.GREATER
    if exact or not any(isinstance(s, DigitStream) for s in (a, b)):
        return Order.EQUAL
    return Order.UNDECIDED


def is_greedy_admissible(w: Word) -> bool:
    """w1 >= 1 and every suffix w_{k+1..n} <= w_{1..n-k} (finite Parry condition)."""
    digits = w.digits
    if not digits:
        raise ValueError("word must be nonempty")
    if digits[0] < 1:
        return False
    n = len(digits)
    return all(digits[k:] <= digits[: n - k] for k in range(1, n))


# ============================================================================
# π_q VALUES
# ============================================================================


class PiValue:
    """π_q(c) = numerator(q) / denominator(q) with integer polynomials and denominator(q) > 0."""

    __slots__ = ("numerator", "denominator", "base")

    def __init__(self, numerator: IntPolynomial, denominator: IntPolynomial, base: AlgebraicNumber):
        self.numerator = numerator
        self.denominator = denominator
        self.base = base

    def compare_rational(self, value: RationalLike) -> int:
        s = as_fraction(value)
        return sign_at(self.numerator * s.denominator - self.denominator * s.numerator, self.base)

    def compare(self, other: PiValue) -> int:
        cross = self.numerator * other.denominator - other.numerator * self.denominator
        return sign_at(cross, self.base)

    def enclosure(self, width: RationalLike = Fraction(1, 2**40)) -> Enclosure:
        q = refine(self.base, width).enclosure()
        num = _poly_enclosure(self.numerator, q)
        den = _poly_enclosure(self.denominator, q)
        return num / den

    def __repr__(self):
        return f"PiValue({self.numerator} / {self.denominator})"


def _poly_enclosure(p: IntPolynomial, q: Enclosure) -> Enclosure:
    acc = Enclosure.exact(0)
    for c in reversed(p.coefficients):
        acc = acc * q + c
    return acc


def _digits_poly(digits: tuple[int, ...]) -> IntPolynomial:
    """Σ d_i x^{len-i}."""
    return IntPolynomial(reversed(digits))


def eval_pi(q: AlgebraicNumber, c: PeriodicSeq) -> PiValue:
    """Exact Σ c_i q^{-i} for an eventually periodic c."""
    if compare_rational(q, 1) <= 0:
        raise BaseOutOfRange(f"π_q needs q > 1, got {q}")
    p = len(c.preperiod)
    head = _digits_poly(c.preperiod)
    if c.is_eventually_zero:
        return PiValue(head, IntPolynomial.monomial(p), q)
    L = len(c.period)
    x_l_minus_1 = IntPolynomial.monomial(L) - 1
    numerator = head * x_l_minus_1 + _digits_poly(c.period)
    denominator = IntPolynomial.monomial(p) * x_l_minus_1
    return PiValue(numerator, denominator, q)


# ============================================================================
# UNIQUENESS
# ============================================================================


def _require(order: Order, depth: int, what: str) -> Order:
    if order is Order.UNDECIDED:
        raise UndecidedAtDepth(depth, what)
    return order


def is_unique_expansion(
    q: AlgebraicNumber, alphabet: Alphabet, c: PeriodicSeq, depth: Optional[int] = None
) -> bool:
    """
    Uniqueness criterion against α(q): σ^k c < α(q) whenever c1..ck != M^k and
    reflect(σ^k c) < α(q) whenever c1..ck != 0^k. The shift orbit of c is finite,
    so k <= |preperiod| + 2|period| covers every active pair.
    """
    check_base(q, alphabet)
    depth = depth or get_settings().comparison_depth
    alpha = quasi_greedy_expansion(q, alphabet)
    M = alphabet.M
    all_max = all_zero = True
    for k in range(1, len(c.preperiod) + 2 * len(c.cycle) + 1):
        ck = c.digit(k)
        all_max &= ck == M
        all_zero &= ck == 0
        tail = c.shift(k)
        if not all_max and _require(lex_compare(tail, alpha, depth), depth, "uniqueness test") is not Order.LESS:
            return False
        if not all_zero:
            order = _require(lex_compare(tail.reflect(), alpha, depth), depth, "uniqueness test")
            if order is not Order.LESS:
                return False
    return True


def expansion_oracle_unique(q: AlgebraicNumber, alphabet: Alphabet, c: PeriodicSeq) -> bool:
    """
    Independent oracle by digit-interval branching: digit e is admissible at
    remainder y iff 0 <= q·y - e <= M/(q-1). x = π_q(c) has a unique expansion
    iff every remainder on c's path admits only c's own digit; the remainders
    are π_q(σ^k c), finitely many.
    """
    if compare_rational(q, 1) <= 0:
        raise BaseOutOfRange(f"base {q} must be > 1")
    M = alphabet.M
    x = IntPolynomial([0, 1])
    x_minus_1 = IntPolynomial([-1, 1])
    for k in range(c.orbit_size):
        y = eval_pi(q, c.shift(k))
        own = c.digit(k + 1)
        for e in alphabet.digits:
            if e == own:
                continue
            scaled = x * y.numerator - y.denominator * e
            if sign_at(scaled, q) < 0:
                continue
            if sign_at(y.denominator * M - scaled * x_minus_1, q) >= 0:
                logger.debug(f"second expansion of pi({c}) branches at {k + 1} with digit {e}")
                return False
    return True


def _shifted_order(c: SequenceLike, k: int, reflected: bool, depth: int) -> Order:
    """Compare σ^k c (optionally reflected) with c digit by digit."""
    M = c.alphabet.M
    for i in range(1, depth + 1):
        d = c.digit(k + i)
        if reflected:
            d = M - d
        ref = c.digit(i)
        if d != ref:
            return Order.LESS if d < ref else Order.GREATER
    return Order.UNDECIDED


def univoque_condition(c: SequenceLike, depth: int, comparison_depth: Optional[int] = None) -> Verdict:
    """
    c is the unique expansion of 1 in its base iff for every k >= 1:
    σ^k c < c when c_k < M, and reflect(σ^k c) < c when c_k > 0.
    Periodic c is decided exactly; otherwise shifts 1..depth are checked.
    """
    M = c.alphabet.M
    window = comparison_depth or get_settings().comparison_depth
    if isinstance(c, PeriodicSeq):
        for k in range(1, c.orbit_size + 1):
            ck, tail = c.digit(k), c.shift(k)
            if ck < M and lex_compare(tail, c) is not Order.LESS:
                return Verdict.refuted_at(k)
            if ck > 0 and lex_compare(tail.reflect(), c) is not Order.LESS:
                return Verdict.refuted_at(k)
        return Verdict.verified_to(depth, exact=True)
    for k in range(1, depth + 1):
        ck = c.digit(k)
        checks = ([False] if ck < M else []) + ([True] if ck > 0 else [])
        for reflected in checks:
            order = _require(_shifted_order(c, k, reflected, window), window, f"shift {k}")
            if order is not Order.LESS:
                return Verdict.refuted_at(k)
    return Verdict.verified_to(depth)


def in_univoque_U(q: AlgebraicNumber, alphabet: Alphabet, depth: int) -> Verdict:
    """Is 1 uniquely expandable in base q (checked through shift `depth`)?"""
    check_base(q, alphabet)
    return univoque_condition(greedy_sequence(q, alphabet), depth)


def in_U_closure(q: AlgebraicNumber, alphabet: Alphabet, depth: int) -> Verdict:
    """Closure test reflect(α) < σ^k α <= α for k = 0..depth (exact for periodic α)."""
    check_base(q, alphabet)
    alpha = quasi_greedy_expansion(q, alphabet)
    window = get_settings().comparison_depth
    if isinstance(alpha, PeriodicSeq):
        reflected = alpha.reflect()
        for k in range(alpha.orbit_size):
            tail = alpha.shift(k)
            if lex_compare(reflected, tail) is not Order.LESS or lex_compare(tail, alpha) is Order.GREATER:
                return Verdict.refuted_at(k)
        return Verdict.verified_to(depth, exact=True)
    for k in range(depth + 1):
        # reflect(α) < σ^k α  <=>  reflect(σ^k α) < α
        lower = _require(_shifted_order(alpha, k, True, window), window, f"closure test at shift {k}")
        if lower is not Order.LESS:
            return Verdict.refuted_at(k)
        upper = _shifted_order(alpha, k, False, window)
        if upper is Order.GREATER:
            return Verdict.refuted_at(k)
    return Verdict.verified_to(depth)


def satisfies_closure_prefix(alpha: SequenceLike, n: int) -> bool:
    """
    Finite-depth closure inequalities at n: for 0 <= k < n,
    reflect(α1..α_{n-k}) < α_{k+1}..α_n <= α1..α_{n-k}.
    """
    M = alpha.alphabet.M
    prefix = alpha.prefix(n)
    for k in range(n):
        tail = prefix[k:]
        head = prefix[: n - k]
        if not (tuple(M - d for d in head) < tail <= head):
            return False
    return True


# ============================================================================
# THUE-MORSE
# ============================================================================


def thue_morse(n: int) -> tuple[int, ...]:
    """t_0 .. t_{n-1}, t_i = parity of the binary digit sum of i."""
    return tuple(i.bit_count() % 2 for i in range(n))


def kl_sequence(M: int, n: int) -> tuple[int, ...]:
    """
    First n digits λ_1..λ_n of the expansion of 1 in the critical base q′(M):
    λ_i = m + t_i - t_{i-1} for M = 2m, λ_i = m - 1 + t_i for M = 2m - 1.
    """
    t = thue_morse(n + 1)
    if M % 2 == 0:
        m = M // 2
        return tuple(m + t[i] - t[i - 1] for i in range(1, n + 1))
    m = (M + 1) // 2
    return tuple(m - 1 + t[i] for i in range(1, n + 1))
