"""Error handling utilities for GOFR-CREDAL."""

from app.errors.mapper import (
    EXIT_CHECKS_FAILED,
    EXIT_INCONSISTENT,
    EXIT_INPUT,
    EXIT_INTERNAL,
    EXIT_LIMIT,
    EXIT_OK,
    ErrorResponse,
    get_exit_code_for_error,
    get_recovery_strategy,
    map_exception_to_response,
)

__all__ = [
    "EXIT_CHECKS_FAILED",
    "EXIT_INCONSISTENT",
    "EXIT_INPUT",
    "EXIT_INTERNAL",
    "EXIT_LIMIT",
    "EXIT_OK",
    "ErrorResponse",
    "get_exit_code_for_error",
    "get_recovery_strategy",
    "map_exception_to_response",
]
