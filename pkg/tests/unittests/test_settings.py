"""
Unit tests for runtime settings (config.settings).
"""
from __future__ import annotations

import os

import pytest
from pydantic import ValidationError

from config.settings import Settings, get_settings, override_settings, use_settings


class TestSettings:
    """Tests for Settings validation and the process-wide override helpers."""

    def test_environment_prefix(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv("UNIVOQUE_DIGIT_DEPTH", "64")
        monkeypatch.setenv("UNIVOQUE_KL_WIDTH", "1e-6")

        settings = Settings()

        assert settings.digit_depth == 64
        assert settings.kl_width == pytest.approx(1e-6)

    def test_jobs_default_to_cpu_count(self, monkeypatch: pytest.MonkeyPatch) -> None:
        """
        Test that sweeps use every available CPU unless told otherwise.

        Setup:
            - UNIVOQUE_JOBS unset, os.cpu_count patched to 6
        Action:
            - Settings()
        Expected:
            - jobs == 6, and 1 when the CPU count is unknown
        """
        monkeypatch.delenv("UNIVOQUE_JOBS", raising=False)
        monkeypatch.setattr(os, "cpu_count", lambda: 6)

        assert Settings().jobs == 6

        monkeypatch.setattr(os, "cpu_count", lambda: None)

        assert Settings().jobs == 1

    def test_jobs_from_environment(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv("UNIVOQUE_JOBS", "3")

        assert Settings().jobs == 3

    @pytest.mark.parametrize("field", ["digit_depth", "max_window", "jobs", "decimal_places"])
    def test_positive_integers_required(self, field: str) -> None:
        with pytest.raises(ValidationError) as exc_info:
            Settings(**{field: 0})

        assert "positive integer" in str(exc_info.value)

    def test_tolerances_must_be_positive(self) -> None:
        with pytest.raises(ValidationError):
            Settings(default_tol=0)

    def test_log_level_normalized(self) -> None:
        assert Settings(log_level="debug").log_level == "DEBUG"

        with pytest.raises(ValidationError) as exc_info:
            Settings(log_level="chatty")

        assert "Unknown log level" in str(exc_info.value)

    def test_override_keeps_other_fields(self) -> None:
        """
        Test that override_settings changes only the named fields.

        Setup:
            - Settings with digit_depth=32 installed
        Action:
            - override_settings(seed=7)
        Expected:
            - seed is 7, digit_depth is still 32, and get_settings returns the new object
        """
        use_settings(Settings(digit_depth=32))

        settings = override_settings(seed=7)

        assert settings.seed == 7
        assert settings.digit_depth == 32
        assert get_settings() is settings

    def test_override_is_validated(self) -> None:
        with pytest.raises(ValidationError):
            override_settings(jobs=-1)

    def test_use_none_restores_environment(self) -> None:
        use_settings(Settings(seed=7))

        use_settings(None)

        assert get_settings().seed == Settings().seed
