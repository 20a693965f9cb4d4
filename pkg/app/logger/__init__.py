"""Logger module for gofr-credal

Usage:
    from app.logger import session_logger as logger

    logger.info("Rung evaluated", rung=2, admissible=["Don't go"])

Level, log file and JSON output come from GOFR_CREDAL_LOG_LEVEL,
GOFR_CREDAL_LOG_FILE and GOFR_CREDAL_LOG_JSON.
"""

import logging

from app.config import get_settings
from app.logger.base import Logger
from app.logger.structured_logger import StructuredLogger

_settings = get_settings()

# Map string level to logging constant
LOG_LEVEL = getattr(logging, _settings.log_level.upper(), logging.INFO)

# Shared logger instance
session_logger: StructuredLogger = StructuredLogger(
    level=LOG_LEVEL,
    log_file=_settings.log_file,
    json_format=_settings.log_json,
)

__all__ = [
    "Logger",
    "StructuredLogger",
    "session_logger",
]
