"""Application configuration

Settings are read from the environment with the GOFR_CREDAL_ prefix, e.g.
GOFR_CREDAL_LOG_LEVEL=DEBUG or GOFR_CREDAL_LEAF_LIMIT=10000.
"""

from pathlib import Path
from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

# Project-specific prefix
_ENV_PREFIX = "GOFR_CREDAL_"

# Project root for the default fixtures directory
_PROJECT_ROOT = Path(__file__).parent.parent


class Settings(BaseSettings):
    """Runtime settings for solvers, Monte Carlo and logging."""

    model_config = SettingsConfigDict(env_prefix=_ENV_PREFIX, extra="ignore")

    # Logging
    log_level: str = "INFO"
    log_file: Optional[str] = None
    log_json: bool = False

    # Solver caps
    atom_limit: int = Field(default=24, ge=1)
    leaf_limit: int = Field(default=4096, ge=1)

    # Monte Carlo
    mc_chunk_size: int = Field(default=100_000, ge=1)
    mc_workers: int = Field(default=1, ge=1)

    # CLI defaults
    default_budget: int = Field(default=100, ge=1)
    fixtures_dir: Path = _PROJECT_ROOT / "fixtures"


_settings: Optional[Settings] = None


def get_settings(reload: bool = False) -> Settings:
    """Get or create the cached settings instance."""
    global _settings
    if _settings is None or reload:
        _settings = Settings()
    return _settings


def reset_settings() -> None:
    """Drop the cached settings so the next call re-reads the environment."""
    global _settings
    _settings = None


__all__ = [
    "Settings",
    "get_settings",
    "reset_settings",
]
