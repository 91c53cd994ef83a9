import logging
import os
from functools import lru_cache
from typing import Any, Optional

from dotenv import load_dotenv
from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

load_dotenv()

logger = logging.getLogger(__name__)


class Settings(BaseSettings):
    """Runtime knobs shared by the library and the CLI (env prefix UNIVOQUE_)."""

    model_config = SettingsConfigDict(env_prefix="UNIVOQUE_", env_file=".env", extra="ignore")

    # digits / comparisons
    digit_depth: int = Field(default=256, description="working depth for beta/alpha digit recursions")
    comparison_depth: int = Field(default=512, description="depth cap for lexicographic comparisons")
    field_precision_bits: int = Field(default=64, description="number field signs start from a 2^-bits enclosure")

    # subshift construction
    max_window: int = Field(default=4096, description="largest window n tried by the refinement driver")
    naive_vertex_cap: int = Field(default=2**16, description="max vertices of the naive de Bruijn graph")
    enumeration_cap: int = Field(default=2**20, description="max words enumerated by brute-force oracles")

    # Perron roots
    perron_iterations: int = Field(default=10_000)
    perron_tol: float = Field(default=1e-12, examples=[1e-8, 1e-12])
    denominator_bits: int = Field(default=256, description="outward rounding grid 2^-bits for enclosures")
    ln_precision_bits: int = Field(default=256)

    # dimension layer
    kl_width: float = Field(default=2.0**-24)
    default_tol: float = Field(default=0.01)

    # runtime
    jobs: int = Field(default_factory=lambda: os.cpu_count() or 1, description="worker processes for sweeps")
    seed: int = Field(default=12345)
    log_level: str = Field(default="INFO", examples=["DEBUG", "INFO", "WARNING"])
    decimal_places: int = Field(default=12, description="digits printed for CSV/JSON decimals")

    @field_validator(
        "digit_depth",
        "comparison_depth",
        "field_precision_bits",
        "max_window",
        "naive_vertex_cap",
        "enumeration_cap",
        "perron_iterations",
        "denominator_bits",
        "ln_precision_bits",
        "jobs",
        "decimal_places",
    )
    @classmethod
    def validate_positive_int(cls, v: int) -> int:
        if v <= 0:
            raise ValueError("value must be a positive integer")
        return v

    @field_validator("perron_tol", "kl_width", "default_tol")
    @classmethod
    def validate_positive_tol(cls, v: float) -> float:
        if not v > 0:
            raise ValueError("tolerance must be positive")
        return v

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        level = v.upper()
        level_names = logging.getLevelNamesMapping() if hasattr(logging, "getLevelNamesMapping") else logging._nameToLevel
        if level not in level_names:
            raise ValueError(f"Unknown log level: {v}")
        return level


_active: Optional[Settings] = None


@lru_cache(maxsize=1)
def _load_settings() -> Settings:
    settings = Settings()
    logger.debug(f"Settings loaded: {settings.model_dump()}")
    return settings


def get_settings() -> Settings:
    return _active or _load_settings()


def use_settings(settings: Optional[Settings]) -> None:
    """Install `settings` process-wide; None falls back to the environment."""
    global _active
    _active = settings


def override_settings(**changes: Any) -> Settings:
    """Current settings with `changes` applied (validated), installed process-wide."""
    settings = Settings(**{**get_settings().model_dump(), **changes})
    use_settings(settings)
    logger.debug(f"Settings overridden: {changes}")
    return settings
