"""Error response mapping for the command-line interface.

Converts structured CredalError exceptions into standardized error responses
with machine-readable error codes, recovery strategies and stable exit codes.
"""

from dataclasses import dataclass
from typing import Any, Dict, Optional

from pydantic import ValidationError as PydanticValidationError

from app.exceptions import (
    AtomLimitExceededError,
    CredalError,
    InconsistentBeliefError,
    InfeasibleError,
    InvalidInputError,
    LeafLimitExceededError,
)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INCONSISTENT = 2
EXIT_LIMIT = 3
EXIT_INTERNAL = 4
EXIT_CHECKS_FAILED = 5


@dataclass
class ErrorResponse:
    """Structured error response for CLI consumers."""

    error_code: str
    message: str
    details: Optional[Dict[str, Any]] = None
    recovery_strategy: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "status": "error",
            "error_code": self.error_code,
            "message": self.message,
            "details": self.details,
            "recovery_strategy": self.recovery_strategy,
        }


# Recovery strategy templates for common error types
RECOVERY_STRATEGIES: Dict[str, str] = {
    "INVALID_INPUT": "Check the input parameters and their ranges.",
    "INPUT_FILE": "Fix the file at the reported location; files are UTF-8 JSON as documented in docs/file_formats.md.",
    "FORMULA_SYNTAX": "Use !, &, |, -> and parentheses; quote atom names that contain spaces or symbols.",
    "INVALID_TABLE": "Every table needs one nonnegative cell per value combination, summing to exactly 1.",
    "CONDITION_NOT_DETERMINED": "Add the condition sentences to the pool or use the condition-first layout.",
    "NOT_A_REFINEMENT": "Each attribute set of the scheme must be contained in some table of the database.",
    "INCONSISTENT_PREMISES": "Two statements on the same sentence have disjoint intervals; revise one of them.",
    "INFEASIBLE_CREDAL": "The belief state admits no probability distribution; revise the bounds.",
    "INCONSISTENT_DATABASE": "Tables disagree on the marginal of a shared attribute.",
    "INFEASIBLE": "The linear system has no solution.",
    "ATOM_LIMIT_EXCEEDED": "Raise GOFR_CREDAL_ATOM_LIMIT or split the sentences.",
    "LEAF_LIMIT_EXCEEDED": "Raise GOFR_CREDAL_LEAF_LIMIT or add fewer sentences.",
}


def get_recovery_strategy(error_code: str) -> str:
    """Get recovery strategy for an error code."""
    return RECOVERY_STRATEGIES.get(
        error_code, "Review the error message, adjust the input, and try again."
    )


def map_exception_to_response(error: Exception) -> ErrorResponse:
    """Convert an exception to a structured ErrorResponse.

    Args:
        error: The exception to convert

    Returns:
        ErrorResponse with structured error information
    """
    if isinstance(error, CredalError):
        return ErrorResponse(
            error_code=error.code,
            message=error.message,
            details=error.details if error.details else None,
            recovery_strategy=get_recovery_strategy(error.code),
        )

    # Handle Pydantic validation errors
    if isinstance(error, PydanticValidationError):
        errors = error.errors(include_url=False)
        return ErrorResponse(
            error_code="PYDANTIC_VALIDATION_ERROR",
            message=f"Validation failed: {len(errors)} error(s)",
            details={"errors": errors},
            recovery_strategy="Check the error details and provide valid input according to the schema.",
        )

    if isinstance(error, OSError):
        return ErrorResponse(
            error_code="IO_ERROR",
            message=str(error),
            details={"exception_type": type(error).__name__},
            recovery_strategy="Check that the path exists and is readable.",
        )

    # Generic exceptions - wrap with minimal structure
    return ErrorResponse(
        error_code="INTERNAL_ERROR",
        message=str(error),
        details={"exception_type": type(error).__name__},
        recovery_strategy="An unexpected error occurred. Please report this issue if it persists.",
    )


def get_exit_code_for_error(error: Exception) -> int:
    """Determine the process exit code for an error."""
    if isinstance(error, (InconsistentBeliefError, InfeasibleError)):
        return EXIT_INCONSISTENT
    if isinstance(error, (LeafLimitExceededError, AtomLimitExceededError)):
        return EXIT_LIMIT
    if isinstance(error, (InvalidInputError, OSError)):
        return EXIT_INPUT
    if isinstance(error, PydanticValidationError):
        return EXIT_INPUT
    return EXIT_INTERNAL
