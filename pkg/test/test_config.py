"""Tests for environment-driven settings."""

import pytest
from pydantic import ValidationError

from app.config import get_settings, reset_settings


class TestSettings:
    def test_defaults(self):
        settings = get_settings()
        assert settings.atom_limit == 24
        assert settings.leaf_limit == 4096
        assert settings.mc_workers == 1
        assert settings.default_budget == 100
        assert (settings.fixtures_dir / "beach_kb.json").exists()

    def test_cached_until_reset(self, monkeypatch):
        first = get_settings()
        monkeypatch.setenv("GOFR_CREDAL_LEAF_LIMIT", "10")
        assert get_settings() is first
        reset_settings()
        assert get_settings().leaf_limit == 10

    def test_reload(self, monkeypatch):
        get_settings()
        monkeypatch.setenv("GOFR_CREDAL_MC_WORKERS", "3")
        assert get_settings(reload=True).mc_workers == 3

    def test_rejects_nonpositive_limits(self, monkeypatch):
        monkeypatch.setenv("GOFR_CREDAL_ATOM_LIMIT", "0")
        reset_settings()
        with pytest.raises(ValidationError):
            get_settings()
