"""
Digit containers: alphabets, finite words, eventually periodic sequences and
lazily computed digit streams, plus the small verdict/order types the
expansion layer returns.
"""
from __future__ import annotations

import itertools
import threading
from enum import IntEnum
from typing import Callable, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class Alphabet(BaseModel):
    """Digit set {0, ..., M}."""

    model_config = ConfigDict(frozen=True)

    M: int = Field(examples=[1, 2])

    @field_validator("M")
    @classmethod
    def validate_m(cls, v: int) -> int:
        if v < 1:
            raise ValueError("M must be a positive integer")
        return v

    @property
    def size(self) -> int:
        return self.M + 1

    @property
    def digits(self) -> range:
        return range(self.M + 1)

    def __str__(self):
        return f"{{0..{self.M}}}"


def _render(digits: tuple[int, ...], alphabet: Alphabet) -> str:
    if alphabet.M <= 9:
        return "".join(str(d) for d in digits)
    return ",".join(str(d) for d in digits)


class Word(BaseModel):
    model_config = ConfigDict(frozen=True)

    digits: tuple[int, ...]
    alphabet: Alphabet

    @model_validator(mode="after")
    def validate_digits(self):
        if any(d < 0 or d > self.alphabet.M for d in self.digits):
            raise ValueError(f"digits {self.digits} outside alphabet {self.alphabet}")
        return self

    @classmethod
    def of(cls, digits: str | tuple[int, ...] | list[int], alphabet: Alphabet) -> Word:
        if isinstance(digits, str):
            digits = tuple(int(ch) for ch in digits)
        return cls(digits=tuple(digits), alphabet=alphabet)

    def __len__(self) -> int:
        return len(self.digits)

    def digit(self, i: int) -> int:
        return self.digits[i - 1]

    def prefix(self, n: int) -> tuple[int, ...]:
        return self.digits[:n]

    def reflect(self) -> Word:
        return Word(digits=tuple(self.alphabet.M - d for d in self.digits), alphabet=self.alphabet)

    def __str__(self):
        return _render(self.digits, self.alphabet)


def _minimal_period(period: tuple[int, ...]) -> tuple[int, ...]:
    size = len(period)
    for d in range(1, size + 1):
        if size % d == 0 and period[:d] * (size // d) == period:
            return period[:d]
    return period


class PeriodicSeq(BaseModel):
    """
    Eventually periodic sequence preperiod·period^∞ in canonical form
    (minimal period, minimal preperiod). An eventually zero sequence has an
    empty period and no trailing zeros in its preperiod.
    """

    model_config = ConfigDict(frozen=True)

    preperiod: tuple[int, ...] = ()
    period: tuple[int, ...] = ()
    alphabet: Alphabet

    @model_validator(mode="before")
    @classmethod
    def canonicalize(cls, data: dict) -> dict:
        pre = tuple(data.get("preperiod", ()))
        period = tuple(data.get("period", ()))
        if not any(period):
            period = ()
            while pre and pre[-1] == 0:
                pre = pre[:-1]
        else:
            period = _minimal_period(period)
            while pre and pre[-1] == period[-1]:
                pre, period = pre[:-1], (period[-1],) + period[:-1]
        return {**data, "preperiod": pre, "period": period}

    @model_validator(mode="after")
    def validate_digits(self):
        if any(d < 0 or d > self.alphabet.M for d in self.preperiod + self.period):
            raise ValueError(f"digits outside alphabet {self.alphabet}")
        return self

    @classmethod
    def of(cls, preperiod: str | tuple[int, ...], period: str | tuple[int, ...], alphabet: Alphabet) -> PeriodicSeq:
        if isinstance(preperiod, str):
            preperiod = tuple(int(ch) for ch in preperiod)
        if isinstance(period, str):
            period = tuple(int(ch) for ch in period)
        return cls(preperiod=tuple(preperiod), period=tuple(period), alphabet=alphabet)

    @property
    def cycle(self) -> tuple[int, ...]:
        """Period with the eventually-zero case made explicit as (0,)."""
        return self.period or (0,)

    @property
    def is_eventually_zero(self) -> bool:
        return not self.period

    @property
    def orbit_size(self) -> int:
        """Number of distinct shifts σ^k, k >= 0."""
        return len(self.preperiod) + len(self.cycle)

    def digit(self, i: int) -> int:
        p = len(self.preperiod)
        if i <= p:
            return self.preperiod[i - 1]
        cycle = self.cycle
        return cycle[(i - p - 1) % len(cycle)]

    def prefix(self, n: int) -> tuple[int, ...]:
        return tuple(self.digit(i) for i in range(1, n + 1))

    def shift(self, k: int) -> PeriodicSeq:
        p = len(self.preperiod)
        if k <= p:
            return PeriodicSeq(preperiod=self.preperiod[k:], period=self.period, alphabet=self.alphabet)
        cycle = self.cycle
        r = (k - p) % len(cycle)
        return PeriodicSeq(preperiod=(), period=cycle[r:] + cycle[:r], alphabet=self.alphabet)

    def reflect(self) -> PeriodicSeq:
        M = self.alphabet.M
        return PeriodicSeq(
            preperiod=tuple(M - d for d in self.preperiod),
            period=tuple(M - d for d in self.cycle),
            alphabet=self.alphabet,
        )

    def to_json(self) -> dict:
        return {"preperiod": list(self.preperiod), "period": list(self.period)}

    def display(self) -> str:
        """Human form used by the CLI, e.g. 11(0)^inf or (10)^inf."""
        return f"{_render(self.preperiod, self.alphabet)}({_render(self.cycle, self.alphabet)})^inf"

    def __str__(self):
        return f"{_render(self.preperiod, self.alphabet)}({_render(self.cycle, self.alphabet)})"


class DigitStream:
    """
    Digits produced on demand by a deterministic generator. Computed digits
    are memoized under a lock, so concurrent readers see identical values.
    """

    def __init__(self, produce: Callable[[], int], alphabet: Alphabet, known: tuple[int, ...] = ()):
        self._produce = produce
        self._digits: list[int] = list(known)
        self._lock = threading.Lock()
        self.alphabet = alphabet

    def _extend_to(self, n: int) -> None:
        with self._lock:
            while len(self._digits) < n:
                self._digits.append(self._produce())

    def digit(self, i: int) -> int:
        if i > len(self._digits):
            self._extend_to(i)
        return self._digits[i - 1]

    def prefix(self, n: int) -> tuple[int, ...]:
        if n > len(self._digits):
            self._extend_to(n)
        return tuple(self._digits[:n])

    def reflect(self) -> DigitStream:
        M = self.alphabet.M
        position = itertools.count(1)
        return DigitStream(lambda: M - self.digit(next(position)), self.alphabet)

    def __str__(self):
        return f"{_render(self.prefix(16), self.alphabet)}..."


SequenceLike = Union[Word, PeriodicSeq, DigitStream]


class Order(IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1
    UNDECIDED = 2


class Verdict(BaseModel):
    """Outcome of a depth-limited test: exact refutations, proofs, or verification to a depth."""

    model_config = ConfigDict(frozen=True)

    status: Literal["verified", "refuted"]
    depth: int
    exact: bool = Field(default=False, description="True when the verdict holds for all depths")

    @classmethod
    def verified_to(cls, depth: int, exact: bool = False) -> Verdict:
        return cls(status="verified", depth=depth, exact=exact)

    @classmethod
    def refuted_at(cls, k: int) -> Verdict:
        return cls(status="refuted", depth=k, exact=True)

    @property
    def verified(self) -> bool:
        return self.status == "verified"

    def __str__(self):
        if self.status == "refuted":
            return f"refuted_at({self.depth})"
        return "proved" if self.exact else f"verified_to({self.depth})"


def parse_sequence(text: str, alphabet: Alphabet) -> PeriodicSeq:
    """`110(10)` -> preperiod 110, period 10; a bare word means trailing zeros."""
    body = text.strip().removesuffix("^inf")
    if "(" in body:
        if not body.endswith(")"):
            raise ValueError(f"Malformed periodic sequence: {text!r}")
        pre, period = body[:-1].split("(", 1)
    else:
        pre, period = body, ""
    try:
        return PeriodicSeq.of(pre, period, alphabet)
    except ValueError as e:
        raise ValueError(f"Invalid sequence {text!r}: {e}") from e


def format_sequence(seq: SequenceLike, n: int = 16) -> str:
    """Display form: u(v)^inf for periodic sequences, the first n digits and ... for streams."""
    if isinstance(seq, PeriodicSeq):
        return seq.display()
    if isinstance(seq, Word):
        return str(seq)
    return f"{_render(seq.prefix(n), seq.alphabet)}..."
