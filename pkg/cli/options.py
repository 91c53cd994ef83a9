"""
Validated run configuration shared by every subcommand.
"""
from __future__ import annotations

import argparse
import logging
from fractions import Fraction
from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from arith.intervals import as_fraction
from arith.parsing import parse_rational
from config.settings import Settings, override_settings

logger = logging.getLogger(__name__)

_GLOBAL_FIELDS = {"command", "M", "base", "tol", "depth", "format", "seed", "jobs", "precision", "log_level"}


class RunConfig(BaseModel):
    """Everything a command needs, validated before dispatch."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    command: str
    M: int = Field(default=1, description="largest digit")
    base: Optional[str] = Field(default=None, examples=["golden", "tribonacci", "1.8", "7/4"])
    tol: Optional[Fraction] = None
    depth: Optional[int] = None
    format: Literal["csv", "json"] = "csv"
    seed: Optional[int] = None
    jobs: Optional[int] = None
    precision: Optional[int] = None
    log_level: Optional[str] = None
    options: dict[str, Any] = Field(default_factory=dict, description="command-specific options")

    @field_validator("M")
    @classmethod
    def validate_m(cls, v: int) -> int:
        if v < 1:
            raise ValueError("M must be a positive integer")
        return v

    @field_validator("tol", mode="before")
    @classmethod
    def validate_tol(cls, v: Any) -> Optional[Fraction]:
        if v is None:
            return None
        value = parse_rational(v) if isinstance(v, str) else as_fraction(v)
        if value <= 0:
            raise ValueError("tolerance must be positive")
        return value

    @field_validator("depth", "jobs", "precision")
    @classmethod
    def validate_positive(cls, v: Optional[int]) -> Optional[int]:
        if v is not None and v <= 0:
            raise ValueError("value must be a positive integer")
        return v

    @classmethod
    def from_namespace(cls, ns: argparse.Namespace) -> RunConfig:
        values = vars(ns)
        extra = {k: v for k, v in values.items() if k not in _GLOBAL_FIELDS and k != "handler"}
        return cls(**{k: v for k, v in values.items() if k in _GLOBAL_FIELDS}, options=extra)

    def option(self, name: str, default: Any = None) -> Any:
        value = self.options.get(name)
        return default if value is None else value

    def apply(self) -> Settings:
        """Install the CLI overrides on top of the environment settings."""
        changes = {
            "digit_depth": self.depth,
            "seed": self.seed,
            "jobs": self.jobs,
            "decimal_places": self.precision,
            "log_level": self.log_level,
        }
        changes = {k: v for k, v in changes.items() if v is not None}
        settings = override_settings(**changes)
        if self.log_level:
            logging.getLogger().setLevel(settings.log_level)
        logger.debug(f"run config: {self.command} M={self.M} base={self.base} overrides={changes}")
        return settings
