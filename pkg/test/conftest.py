"""Pytest configuration and fixtures."""

import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

# Add project root to sys.path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from app.config import reset_settings  # noqa: E402 - needs the sys.path entry above
from app.math_engine.loaders import (  # noqa: E402
    load_database,
    load_kb,
    load_pool,
    load_problem,
)

FIXTURES = Path(__file__).parent.parent / "fixtures"

# Property tests run under the autouse settings reset below
settings.register_profile("credal", suppress_health_check=[HealthCheck.function_scoped_fixture])
settings.load_profile("credal")


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    """Every test starts from default settings, whatever the environment says."""
    for name in ("ATOM_LIMIT", "LEAF_LIMIT", "MC_CHUNK_SIZE", "MC_WORKERS", "DEFAULT_BUDGET"):
        monkeypatch.delenv(f"GOFR_CREDAL_{name}", raising=False)
    reset_settings()
    yield
    reset_settings()


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def beach_kb():
    return load_kb(FIXTURES / "beach_kb.json")


@pytest.fixture(scope="session")
def beach_problem():
    return load_problem(FIXTURES / "beach_problem.json")


@pytest.fixture(scope="session")
def beach_pool():
    return load_pool(FIXTURES / "beach_pool.json")


@pytest.fixture(scope="session")
def conditions_problem():
    return load_problem(FIXTURES / "conditions_problem.json")


@pytest.fixture(scope="session")
def conditions_pool():
    return load_pool(FIXTURES / "conditions_pool.json")


@pytest.fixture(scope="session")
def train_db():
    return load_database(FIXTURES / "train_db.json")


@pytest.fixture(scope="session")
def train_problem():
    return load_problem(FIXTURES / "train_problem.json")
