"""
Staircase sweeps of D(q) over a grid of bases, with CSV/JSON export.

Rows are independent: each runs in its own worker, errors are recorded
per row, and output order follows the grid.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
from fractions import Fraction
from typing import Iterable, Literal, Optional, Sequence

from pydantic import BaseModel, ConfigDict, field_serializer

from analysis.dimension import DimensionEstimate, as_base, dimension, variation_bound
from analysis.kl import KLConstant, kl_constant
from analysis.workers import parallel_map
from arith.errors import CertificateDepthExceeded, DepthExceeded, ToleranceNotReached, UndecidedAtDepth
from arith.exactnum import AlgebraicNumber, compare_rational
from arith.intervals import Enclosure, RationalLike, as_fraction, format_decimal, format_fraction
from config.settings import get_settings
from symbolic.models import Alphabet

logger = logging.getLogger(__name__)

CSV_COLUMNS = ("q", "D_lo", "D_hi", "depth", "method", "certified", "error")

FailureCause = Literal["tolerance", "undecided", "input", "failure"]


class SweepRow(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    q: str
    D_lo: Optional[Fraction] = None
    D_hi: Optional[Fraction] = None
    depth: int = 0
    method: str = ""
    certified: bool = False
    error: Optional[str] = None
    cause: Optional[FailureCause] = None

    @field_serializer("D_lo", "D_hi", when_used="json")
    def serialize_bound(self, v: Optional[Fraction]) -> Optional[str]:
        return None if v is None else format_fraction(v)

    @property
    def enclosure(self) -> Optional[Enclosure]:
        if self.D_lo is None or self.D_hi is None:
            return None
        return Enclosure(lo=self.D_lo, hi=self.D_hi)

    @classmethod
    def from_estimate(
        cls,
        q: str,
        estimate: DimensionEstimate,
        error: Optional[str] = None,
        cause: Optional[FailureCause] = None,
    ) -> SweepRow:
        return cls(
            q=q,
            D_lo=estimate.enclosure.lo,
            D_hi=estimate.enclosure.hi,
            depth=estimate.depth,
            method=estimate.label,
            certified=estimate.certified_dimension_formula,
            error=error,
            cause=cause,
        )


class SweepSummary(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    observed_variation: Fraction
    variation_bound: Enclosure
    within_bound: bool

    def __str__(self):
        status = "✅" if self.within_bound else "⚠️"
        return f"{status} variation {float(self.observed_variation):.6f} (bound {float(self.variation_bound.hi):.6f})"


def format_base(q: AlgebraicNumber | Fraction, places: Optional[int] = None) -> str:
    """Exact decimals for terminating rationals, p/q for the others, 15 digits for irrational bases."""
    places = places or get_settings().decimal_places
    if isinstance(q, AlgebraicNumber):
        if not q.is_rational:
            return str(q)
        q = q.lo
    if (q * 10**places).denominator == 1:
        return format_decimal(q, places)
    return format_fraction(q)


def _outward(x: Fraction, places: int, up: bool) -> str:
    scale = 10**places
    scaled = math.ceil(x * scale) if up else math.floor(x * scale)
    return format_decimal(Fraction(scaled, scale), places)


# ============================================================================
# SWEEP
# ============================================================================


def _sweep_row(task: tuple[int, AlgebraicNumber | Fraction, Fraction, Optional[KLConstant]]) -> SweepRow:
    M, q, tol, kl = task
    label = format_base(q)
    try:
        estimate = dimension(q, Alphabet(M=M), tol, kl=kl)
    except ToleranceNotReached as e:
        logger.warning(f"⚠️ q={label}: {e}")
        return SweepRow.from_estimate(label, e.best, error="tolerance not reached", cause="tolerance")
    except (UndecidedAtDepth, DepthExceeded, CertificateDepthExceeded) as e:
        logger.error(f"❌ q={label}: {e}")
        return SweepRow(q=label, error=str(e), cause="undecided")
    except ValueError as e:
        logger.error(f"❌ q={label}: {e}")
        return SweepRow(q=label, error=str(e), cause="input")
    except (RuntimeError, LookupError) as e:
        logger.error(f"❌ q={label}: {e}")
        return SweepRow(q=label, error=str(e), cause="failure")
    logger.info(f"✅ q={label}: D ∈ [{float(estimate.enclosure.lo):.6f}, {float(estimate.enclosure.hi):.6f}]")
    return SweepRow.from_estimate(label, estimate)


def _below_top(q: AlgebraicNumber | Fraction, alphabet: Alphabet) -> bool:
    base = as_base(q)
    return compare_rational(base, 1) > 0 and compare_rational(base, alphabet.size) < 0


def staircase_sweep(
    M: int,
    grid: Iterable[AlgebraicNumber | RationalLike | float],
    tol: Optional[RationalLike | float] = None,
    jobs: Optional[int] = None,
) -> list[SweepRow]:
    """One DimensionEstimate per grid point, in grid order."""
    alphabet = Alphabet(M=M)
    points = [q if isinstance(q, AlgebraicNumber) else as_fraction(q) for q in grid]
    target = as_fraction(tol if tol is not None else get_settings().default_tol)
    # kl is shared read-only by every row below M+1
    needs_kl = any(_below_top(q, alphabet) for q in points)
    kl = kl_constant(M) if needs_kl else None
    rows = parallel_map(_sweep_row, [(M, q, target, kl) for q in points], jobs)
    failed = sum(1 for r in rows if r.error)
    logger.info(f"sweep over {len(rows)} bases done, {failed} rows with errors")
    return rows


def total_failure_cause(rows: Sequence[SweepRow]) -> Optional[FailureCause]:
    """None when at least one row succeeded, else the cause that decides the exit code."""
    if not rows or any(r.cause is None for r in rows):
        return None
    causes = {r.cause for r in rows}
    if causes == {"tolerance"}:
        return "tolerance"
    if causes <= {"tolerance", "undecided"}:
        return "undecided"
    if causes == {"input"}:
        return "input"
    return "failure"


def sweep_variation(rows: Sequence[SweepRow]) -> Fraction:
    """Certified lower estimate of the total variation: Σ max(0, |Δ mid| - (w_i + w_{i+1}) / 2)."""
    enclosures = [r.enclosure for r in rows if r.enclosure is not None]
    total = Fraction(0)
    for left, right in zip(enclosures, enclosures[1:]):
        total += max(Fraction(0), abs(right.mid - left.mid) - (left.width + right.width) / 2)
    return total


def summarize_sweep(M: int, rows: Sequence[SweepRow], kl: Optional[KLConstant] = None) -> SweepSummary:
    observed = sweep_variation(rows)
    bound = variation_bound(M, kl)
    summary = SweepSummary(observed_variation=observed, variation_bound=bound, within_bound=observed <= bound.hi)
    logger.info(str(summary))
    return summary


# ============================================================================
# EXPORT
# ============================================================================


def row_record(row: SweepRow, places: int) -> dict[str, str]:
    return {
        "q": row.q,
        "D_lo": "" if row.D_lo is None else _outward(row.D_lo, places, up=False),
        "D_hi": "" if row.D_hi is None else _outward(row.D_hi, places, up=True),
        "depth": str(row.depth),
        "method": row.method,
        "certified": str(row.certified).lower(),
        "error": row.error or "",
    }


def rows_to_csv(rows: Sequence[SweepRow], places: Optional[int] = None) -> str:
    places = places or get_settings().decimal_places
    buf = io.StringIO(newline="")
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row_record(row, places))
    return buf.getvalue()


def rows_to_json(rows: Sequence[SweepRow], places: Optional[int] = None) -> str:
    places = places or get_settings().decimal_places
    return json.dumps([row_record(row, places) for row in rows], indent=2, ensure_ascii=False)
