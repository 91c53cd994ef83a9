"""
Hausdorff dimension D(q) of the univoque set in base q.

Regions are classified before any entropy work:

    q >= M+1          D = ln(M+1) / ln q                 (closed form)
    q <= q′ (certified) D = 0
    q inside the KL enclosure  conservative [0, h_hi / ln q]
    otherwise         D = h(U′_q) / ln q from the entropy sandwich
"""
from __future__ import annotations

import logging
from fractions import Fraction
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, model_validator
from sympy import perfect_power

from analysis.kl import KLConstant, kl_constant
from arith.errors import DepthExceeded, ToleranceNotReached
from arith.exactnum import AlgebraicNumber, IntPolynomial, compare_rational, refine, sign_at
from arith.intervals import Enclosure, RationalLike, as_fraction, ln_enclosure
from config.settings import get_settings
from symbolic.entropy import EntropyBounds, default_schedule, entropy_of, refine_entropy, sandwich
from symbolic.expansion import greedy_sequence, quasi_greedy_expansion
from symbolic.models import Alphabet
from symbolic.sft import build_spec, find_separating_depth

logger = logging.getLogger(__name__)

Method = Literal["closed_form_above", "zero_below_kl", "sandwich"]

_LABELS = {"closed_form_above": "closed_form", "zero_below_kl": "zero", "sandwich": "sandwich"}

_BASE_WIDTH = Fraction(1, 2**64)


class DimensionEstimate(BaseModel):
    model_config = ConfigDict(frozen=True)

    enclosure: Enclosure
    method: Method
    depth: int = 0
    certified_dimension_formula: bool = False
    ambiguous: bool = False

    @model_validator(mode="after")
    def validate_unit_interval(self):
        if not (0 <= self.enclosure.lo <= self.enclosure.hi <= 1):
            raise ValueError(f"dimension enclosure {self.enclosure} outside [0, 1]")
        return self

    @property
    def label(self) -> str:
        """Short method name used in CSV/JSON output."""
        if self.ambiguous:
            return "ambiguous"
        return _LABELS[self.method]

    def __str__(self):
        flag = " (ambiguous near q')" if self.ambiguous else ""
        return f"D ∈ {self.enclosure} via {self.method} at n={self.depth}{flag}"


# ============================================================================
# HELPERS
# ============================================================================


def as_base(q: AlgebraicNumber | RationalLike | float) -> AlgebraicNumber:
    if isinstance(q, AlgebraicNumber):
        return q
    return AlgebraicNumber.from_rational(as_fraction(q))


def base_enclosure(q: AlgebraicNumber) -> Enclosure:
    return refine(q, _BASE_WIDTH).enclosure()


def ln_base(q: AlgebraicNumber) -> Enclosure:
    return ln_enclosure(base_enclosure(q), get_settings().ln_precision_bits)


def _power_of(n: int) -> tuple[int, int]:
    found = perfect_power(n)
    return (int(found[0]), int(found[1])) if found else (n, 1)


def log_ratio(a: RationalLike, b: RationalLike) -> Enclosure:
    """ln a / ln b; exact when a and b are integer powers of a common base."""
    x, y = as_fraction(a), as_fraction(b)
    if x <= 0 or y <= 0 or y == 1:
        raise ValueError(f"log ratio undefined for {x}, {y}")
    if x == 1:
        return Enclosure.exact(0)
    if x.denominator == 1 and y.denominator == 1 and x > 1 and y > 1:
        (base_x, exp_x), (base_y, exp_y) = _power_of(x.numerator), _power_of(y.numerator)
        if base_x == base_y:
            return Enclosure.exact(Fraction(exp_x, exp_y))
    settings = get_settings()
    ratio = ln_enclosure(x, settings.ln_precision_bits) / ln_enclosure(y, settings.ln_precision_bits)
    return ratio.rounded(settings.denominator_bits)


def _closed_form(q: AlgebraicNumber, alphabet: Alphabet) -> Enclosure:
    if q.is_rational:
        return log_ratio(alphabet.size, q.lo)
    settings = get_settings()
    return (ln_enclosure(alphabet.size, settings.ln_precision_bits) / ln_base(q)).rounded(settings.denominator_bits)


def _from_entropy(h: Enclosure, q: AlgebraicNumber) -> Enclosure:
    return (h / ln_base(q)).rounded(get_settings().denominator_bits).clamp(0, 1)


# ============================================================================
# DIMENSION
# ============================================================================


def dimension(
    q: AlgebraicNumber | RationalLike | float,
    alphabet: Alphabet,
    tol: Optional[RationalLike | float] = None,
    max_window: Optional[int] = None,
    kl: Optional[KLConstant] = None,
) -> DimensionEstimate:
    """Certified enclosure of D(q) no wider than `tol` (sandwich region), or the exact closed forms."""
    base = as_base(q)
    if compare_rational(base, 1) <= 0:
        raise ValueError(f"base {base} must be > 1")
    settings = get_settings()
    target = as_fraction(tol if tol is not None else settings.default_tol)
    if target <= 0:
        raise ValueError("tolerance must be positive")

    if compare_rational(base, alphabet.size) >= 0:
        return DimensionEstimate(enclosure=_closed_form(base, alphabet), method="closed_form_above")

    kl = kl or kl_constant(alphabet.M)
    if compare_rational(base, kl.lo) <= 0:
        logger.debug(f"q={base} <= q' lower end {float(kl.lo):.8f}: D = 0")
        return DimensionEstimate(enclosure=Enclosure.exact(0), method="zero_below_kl")

    schedule = default_schedule(max_window)
    if compare_rational(base, kl.hi) <= 0:
        first = schedule[0] if schedule else 4
        _, upper = sandwich(base, alphabet, first)
        logger.warning(f"⚠️ q={base} lies inside the KL enclosure, returning a conservative bound")
        return DimensionEstimate(
            enclosure=_from_entropy(Enclosure(lo=0, hi=upper.hi), base),
            method="sandwich",
            depth=first,
            ambiguous=True,
        )

    ln_q = ln_base(base)
    entropy_tol = target * ln_q.lo / 2
    try:
        h = refine_entropy(base, alphabet, entropy_tol, schedule)
    except ToleranceNotReached as e:
        best: EntropyBounds = e.best
        partial = _sandwich_estimate(base, alphabet, best)
        logger.warning(f"⚠️ dimension at q={base} stopped with {partial.enclosure}")
        raise ToleranceNotReached(partial, target) from e
    estimate = _sandwich_estimate(base, alphabet, h)
    logger.info(f"✅ q={base}: {estimate}")
    return estimate


def _sandwich_estimate(q: AlgebraicNumber, alphabet: Alphabet, h: EntropyBounds) -> DimensionEstimate:
    try:
        certified = certify_separation(q, alphabet, h.depth) if h.depth else False
    except DepthExceeded:
        certified = False
    return DimensionEstimate(
        enclosure=_from_entropy(h.enclosure, q),
        method="sandwich",
        depth=h.depth,
        certified_dimension_formula=certified,
    )


def certify_separation(
    q: AlgebraicNumber | RationalLike | float,
    alphabet: Alphabet,
    n: int,
    family: Literal["alpha", "beta"] = "alpha",
) -> bool:
    """
    Separation condition q^{n-N}(q-1) > M, N the first index whose digit of
    α(q) (β(q) for the W family) is below M. Decided by an exact polynomial sign.
    """
    base = as_base(q)
    depth = get_settings().digit_depth
    digits = quasi_greedy_expansion(base, alphabet) if family == "alpha" else greedy_sequence(base, alphabet)
    M = alphabet.M
    first = next((i for i in range(1, depth + 1) if digits.digit(i) < M), None)
    if first is None:
        raise DepthExceeded(depth, "search for a digit below M")
    x_minus_1 = IntPolynomial([-1, 1])
    if n >= first:
        condition = IntPolynomial.monomial(n - first) * x_minus_1 - M
    else:
        condition = x_minus_1 - IntPolynomial.monomial(first - n, M)
    holds = sign_at(condition, base) > 0
    logger.debug(f"separation at q={base}, n={n}, N={first}: {holds}")
    return holds


def plateau_derivative(
    q: AlgebraicNumber | RationalLike | float, h: Enclosure | RationalLike | float
) -> Enclosure:
    """D′(q) = -h / (q ln² q) on a plateau of constant entropy h (nats)."""
    base = as_base(q)
    if compare_rational(base, 1) <= 0:
        raise ValueError(f"base {base} must be > 1")
    entropy = h if isinstance(h, Enclosure) else Enclosure.exact(as_fraction(h))
    if entropy.lo < 0:
        raise ValueError("entropy must be nonnegative")
    if entropy.hi == 0:
        return Enclosure.exact(0)
    ln_q = ln_base(base)
    return (-(entropy / (base_enclosure(base) * ln_q**2))).rounded(get_settings().denominator_bits)


# ============================================================================
# GLOBAL QUANTITIES
# ============================================================================


class SigmaBound(BaseModel):
    model_config = ConfigDict(frozen=True)

    M: int
    N: int
    sigma: Enclosure
    separation_constant: Enclosure

    @model_validator(mode="after")
    def validate_sigma(self):
        if not (0 < self.sigma.lo and self.sigma.hi < 1):
            raise ValueError(f"sigma {self.sigma} outside (0, 1)")
        return self

    def __str__(self):
        return f"σ({self.N}) ∈ {self.sigma}, c ∈ {self.separation_constant}"


def separation_constant(M: int, N: int, kl: KLConstant) -> Enclosure:
    """c = (q′ - 1)² / (M (M+1)^{2N})."""
    return (kl.enclosure - 1) ** 2 / (M * (M + 1) ** (2 * N))


def sigma_lower_bound(M: int, N: int, kl: Optional[KLConstant] = None) -> SigmaBound:
    """σ(N) = ln((M+1)^N - 2) / (N ln(M+1)), a lower bound for the dimension of the univoque bases."""
    if M < 1:
        raise ValueError("M must be a positive integer")
    if N < 2 or (M + 1) ** N <= 3:
        raise ValueError(f"sigma needs N >= 2 and (M+1)^N > 3, got M={M}, N={N}")
    sigma = log_ratio((M + 1) ** N - 2, M + 1) / N
    kl = kl or kl_constant(M)
    return SigmaBound(M=M, N=N, sigma=sigma, separation_constant=separation_constant(M, N, kl))


def hatU_block_count(M: int, N: int, n: int) -> int:
    """((M+1)^N - 2)^(n-2): length-nN prefixes of the explicit subset behind σ(N)."""
    if n < 2:
        raise ValueError("n must be >= 2")
    return ((M + 1) ** N - 2) ** (n - 2)


def variation_bound(M: int, kl: Optional[KLConstant] = None) -> Enclosure:
    """Upper bound 2 ln(M+1) / ln q′ - 1 on the total variation of D over [q′, M+1]."""
    kl = kl or kl_constant(M)
    settings = get_settings()
    ratio = ln_enclosure(M + 1, settings.ln_precision_bits) / ln_enclosure(kl.enclosure, settings.ln_precision_bits)
    return (ratio * 2 - 1).rounded(settings.denominator_bits)


def continuity_gap(
    q: AlgebraicNumber | RationalLike | float,
    p: AlgebraicNumber | RationalLike | float,
    alphabet: Alphabet,
    n: Optional[int] = None,
) -> Fraction:
    """
    For q < p at a separating depth n: |D(p) - D(q)| <= h(W(q, n)) / ln q - h(U(q, n)) / ln p.
    Returns the certified right-hand side.
    """
    low, high = as_base(q), as_base(p)
    depth = n or find_separating_depth(low, high, alphabet, get_settings().digit_depth)
    upper = entropy_of(build_spec(low, alphabet, depth, "closed_W"))
    lower = entropy_of(build_spec(low, alphabet, depth, "strict_U"))
    gap = upper.hi / ln_base(low).lo - lower.lo / ln_base(high).hi
    logger.debug(f"continuity gap between {low} and {high} at n={depth}: {float(gap):.6f}")
    return gap
