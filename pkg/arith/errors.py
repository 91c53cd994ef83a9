"""
Error types shared by all layers.

Everything derives from a standard exception so callers can keep catching
ValueError / RuntimeError; the subclasses only exist where the CLI maps them
to distinct exit codes.
"""
from __future__ import annotations

from typing import Any


# ============================================================================
# BAD INPUT (exit code 2)
# ============================================================================


class BaseSpecError(ValueError):
    """Unparseable or invalid base specification."""


class BaseOutOfRange(ValueError):
    """Base outside the range an operation is defined on."""


class NotAdmissible(ValueError):
    """Word is not a greedy-admissible prefix."""


class RangeError(ValueError):
    """Parameters violate an ordering precondition (e.g. 1 < p < r <= M+1)."""


class DegenerateBoundary(ValueError):
    """Interval triple whose left endpoint is the boundary base 1."""


class EmptyGraph(ValueError):
    """Perron bounds requested for a graph without vertices."""


# ============================================================================
# DEPTH LIMITS (exit code 3)
# ============================================================================


class UndecidedAtDepth(RuntimeError):
    def __init__(self, depth: int, what: str = "comparison"):
        super().__init__(f"{what} undecided through depth {depth}")
        self.depth = depth


class DepthExceeded(RuntimeError):
    def __init__(self, depth: int, what: str = "digit search"):
        super().__init__(f"{what} exceeded depth {depth}")
        self.depth = depth


class CertificateDepthExceeded(RuntimeError):
    def __init__(self, depth: int):
        super().__init__(f"certificate needs more than {depth} digits")
        self.depth = depth


class CapExceeded(RuntimeError):
    def __init__(self, required: int, cap: int, what: str = "enumeration"):
        super().__init__(f"{what} needs {required} items, cap is {cap}")
        self.required = required
        self.cap = cap


class NotFound(LookupError):
    def __init__(self, cap: int):
        super().__init__(f"no separating depth up to {cap}")
        self.cap = cap


# ============================================================================
# PARTIAL RESULTS (exit code 4) AND INTERNAL ALARMS
# ============================================================================


class ToleranceNotReached(RuntimeError):
    """Refinement stopped at its cap; `best` holds sound best-so-far bounds."""

    def __init__(self, best: Any, tol: Any):
        super().__init__(f"tolerance {tol} not reached, best bounds: {best}")
        self.best = best
        self.tol = tol


class ConsistencyAlarm(AssertionError):
    """A theorem-backed inequality failed: this is an implementation bug."""
