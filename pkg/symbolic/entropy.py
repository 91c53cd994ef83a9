"""
Certified topological entropy of the window-n subshifts.

A float power iteration (numpy) proposes a Perron vector for every
cycle-carrying component; the enclosure itself comes from the exact
Collatz-Wielandt ratios of that vector:

    min_i (Av)_i / v_i  <=  λ(A)  <=  max_i (Av)_i / v_i      (v > 0, A irreducible)

so floating point never enters the trust path.
"""
from __future__ import annotations

import logging
from fractions import Fraction
from typing import Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, field_serializer, model_validator

from arith.errors import ConsistencyAlarm, EmptyGraph, ToleranceNotReached
from arith.exactnum import AlgebraicNumber
from arith.intervals import Enclosure, RationalLike, as_fraction, format_fraction, ln_enclosure, round_down, round_up
from config.settings import get_settings
from symbolic.models import Alphabet
from symbolic.sft import EdgeGraph, ForbiddenSpec, build_graph_automaton, build_spec

logger = logging.getLogger(__name__)

_EXACT_REFINEMENTS = 24


class PerronBounds(BaseModel):
    model_config = ConfigDict(frozen=True)

    enclosure: Enclosure
    component_count: int
    irreducible: bool

    @model_validator(mode="after")
    def validate_nonnegative(self):
        if self.enclosure.lo < 0:
            raise ValueError("Perron root enclosure must be nonnegative")
        return self

    def __str__(self):
        return f"λ ∈ {self.enclosure} ({self.component_count} components)"


class DepthStep(BaseModel):
    """Running bounds after one window depth, next to the raw sandwich at that depth."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    depth: int
    lower: Fraction
    upper: Fraction
    raw_lower: Fraction
    raw_upper: Fraction

    @field_serializer("lower", "upper", "raw_lower", "raw_upper", when_used="json")
    def serialize_bound(self, v: Fraction) -> str:
        return format_fraction(v)


class EntropyBounds(BaseModel):
    """Certified entropy enclosure in nats."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    lower: Fraction
    upper: Fraction
    depth: int
    source: Literal["sandwich", "closed_form", "zero"]
    history: tuple[DepthStep, ...] = ()

    @model_validator(mode="after")
    def validate_bounds(self):
        if self.lower < 0:
            raise ValueError("entropy lower bound must be nonnegative")
        if self.lower > self.upper:
            raise ValueError(f"entropy bounds reversed: {self.lower} > {self.upper}")
        return self

    @field_serializer("lower", "upper", when_used="json")
    def serialize_bound(self, v: Fraction) -> str:
        return format_fraction(v)

    @property
    def enclosure(self) -> Enclosure:
        return Enclosure(lo=self.lower, hi=self.upper)

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    def to_json(self) -> dict:
        return {
            "lo": format_fraction(self.lower),
            "hi": format_fraction(self.upper),
            "depth": self.depth,
            "unit": "nats",
        }

    def to_bits(self) -> Enclosure:
        """Same bounds in bits (divide by ln 2, outward)."""
        return (self.enclosure / ln_enclosure(2, get_settings().ln_precision_bits)).rounded(
            get_settings().denominator_bits
        )

    def __str__(self):
        return f"h ∈ [{float(self.lower):.9f}, {float(self.upper):.9f}] nats (n={self.depth}, {self.source})"


# ============================================================================
# PERRON ROOTS
# ============================================================================


def _float_perron_vector(src: np.ndarray, dst: np.ndarray, size: int, iterations: int, tol: float) -> np.ndarray:
    """Power iteration on A + I (primitive even for periodic components)."""
    v = np.ones(size)
    for _ in range(iterations):
        w = v + np.bincount(src, weights=v[dst], minlength=size)
        ratios = w / v
        v = w / w.max()
        if ratios.max() - ratios.min() < tol:
            break
    return np.maximum(v, np.finfo(float).tiny)


def _collatz_wielandt(edges: Sequence[tuple[int, int]], v: list[Fraction]) -> tuple[Fraction, Fraction, list[Fraction]]:
    """Exact (min, max) of (Av)_i / v_i and the vector Av."""
    av = [Fraction(0)] * len(v)
    for s, d in edges:
        av[s] += v[d]
    ratios = [a / x for a, x in zip(av, v)]
    return min(ratios), max(ratios), av


def _component_bounds(local_edges: list[tuple[int, int]], size: int, tol: Fraction) -> Enclosure:
    settings = get_settings()
    bits = settings.denominator_bits
    src = np.fromiter((s for s, _ in local_edges), dtype=np.int64, count=len(local_edges))
    dst = np.fromiter((d for _, d in local_edges), dtype=np.int64, count=len(local_edges))
    guess = _float_perron_vector(src, dst, size, settings.perron_iterations, float(tol) / 4)

    v = [Fraction(float(x)) for x in guess]
    lo, hi, av = _collatz_wielandt(local_edges, v)
    for _ in range(_EXACT_REFINEMENTS):
        if hi - lo <= tol:
            break
        # one exact step of (A + I), rounded onto the dyadic grid
        top = max(a + x for a, x in zip(av, v))
        v = [max(round_down((a + x) / top, bits), Fraction(1, 1 << bits)) for a, x in zip(av, v)]
        new_lo, new_hi, av = _collatz_wielandt(local_edges, v)
        lo, hi = max(lo, new_lo), min(hi, new_hi)
    # a component with a cycle has λ >= 1
    return Enclosure(lo=max(round_down(lo, bits), Fraction(1)), hi=max(round_up(hi, bits), Fraction(1)))


def perron_bounds(g: EdgeGraph, tol: Optional[RationalLike | float] = None) -> PerronBounds:
    """Enclosure of the spectral radius of g's adjacency matrix: max over cycle-carrying components."""
    if not g.vertex_count:
        raise EmptyGraph("Perron bounds of a graph without vertices")
    target = as_fraction(tol if tol is not None else get_settings().perron_tol)
    components = g.nontrivial_components
    irreducible = len(g.components) == 1 and bool(components)
    if not components:
        return PerronBounds(enclosure=Enclosure.exact(0), component_count=len(g.components), irreducible=False)

    best: Optional[Enclosure] = None
    for comp in components:
        local = {v: i for i, v in enumerate(sorted(comp))}
        local_edges = [(local[s], local[d]) for s, d, _ in g.edges if s in local and d in local]
        bounds = _component_bounds(local_edges, len(local), target)
        best = bounds if best is None else Enclosure(lo=max(best.lo, bounds.lo), hi=max(best.hi, bounds.hi))
    logger.debug(f"perron bounds over {len(components)} components: {best}")
    return PerronBounds(enclosure=best, component_count=len(g.components), irreducible=irreducible)


# ============================================================================
# ENTROPY
# ============================================================================


def entropy_of(spec: ForbiddenSpec, tol: Optional[RationalLike | float] = None) -> Enclosure:
    """ln of the Perron enclosure of the automaton realization; 0 for an empty language."""
    g = build_graph_automaton(spec)
    if not g.has_biinfinite_walk:
        return Enclosure.exact(0)
    bounds = perron_bounds(g, tol)
    h = ln_enclosure(bounds.enclosure, get_settings().ln_precision_bits)
    return Enclosure(lo=max(h.lo, Fraction(0)), hi=max(h.hi, Fraction(0)))


def sandwich(q: AlgebraicNumber, alphabet: Alphabet, n: int) -> tuple[Enclosure, Enclosure]:
    """Lower bound from strict_U(q, n); upper from the smaller of closed_V(q, n) and closed_W(q, n)."""
    lower = entropy_of(build_spec(q, alphabet, n, "strict_U"))
    upper_v = entropy_of(build_spec(q, alphabet, n, "closed_V"))
    upper_w = entropy_of(build_spec(q, alphabet, n, "closed_W"))
    upper = Enclosure(lo=min(upper_v.lo, upper_w.lo), hi=min(upper_v.hi, upper_w.hi))
    return lower, upper


def default_schedule(cap: Optional[int] = None) -> list[int]:
    cap = cap or get_settings().max_window
    schedule, n = [], 4
    while n <= cap:
        schedule.append(n)
        n *= 2
    return schedule


def refine_entropy(
    q: AlgebraicNumber,
    alphabet: Alphabet,
    tol: RationalLike | float,
    schedule: Optional[Sequence[int]] = None,
) -> EntropyBounds:
    """
    Run the sandwich along the schedule, keeping the running max of lower and
    min of upper bounds, until the gap is at most `tol`.
    """
    target = as_fraction(tol)
    settings = get_settings()
    depths = list(schedule) if schedule is not None else default_schedule()
    best_lo = Fraction(0)
    best_hi = ln_enclosure(alphabet.size, settings.ln_precision_bits).hi
    history: list[DepthStep] = []
    depth = 0
    for n in depths:
        lower, upper = sandwich(q, alphabet, n)
        best_lo, best_hi = max(best_lo, lower.lo), min(best_hi, upper.hi)
        if best_lo > best_hi:
            raise ConsistencyAlarm(f"entropy sandwich crossed at n={n}: {best_lo} > {best_hi}")
        depth = n
        history.append(DepthStep(depth=n, lower=best_lo, upper=best_hi, raw_lower=lower.lo, raw_upper=upper.hi))
        logger.debug(f"n={n}: h ∈ [{float(best_lo):.9f}, {float(best_hi):.9f}]")
        if best_hi - best_lo <= target:
            logger.info(f"✅ entropy of q={q} within {float(target):.3g} at n={n}")
            return EntropyBounds(lower=best_lo, upper=best_hi, depth=n, source="sandwich", history=tuple(history))
    best = EntropyBounds(lower=best_lo, upper=best_hi, depth=depth, source="sandwich", history=tuple(history))
    logger.warning(f"⚠️ entropy of q={q} stopped at n={depth} with gap {float(best.width):.3g}")
    raise ToleranceNotReached(best, target)
