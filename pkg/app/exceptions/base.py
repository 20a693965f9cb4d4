"""Project-specific exception classes for GOFR-CREDAL.

Every error carries a machine-readable code, a human-readable message and an
optional details dict so the CLI and the error mapper can report it without
string matching.
"""

from typing import Any, Dict, Optional


class CredalError(Exception):
    """Base for all gofr-credal errors."""

    default_code = "CREDAL_ERROR"

    def __init__(
        self,
        message: str,
        details: Optional[Dict[str, Any]] = None,
        code: Optional[str] = None,
    ):
        super().__init__(message)
        self.code = code or self.default_code
        self.message = message
        self.details = details or {}

    def __str__(self) -> str:
        if not self.details:
            return self.message
        extra = ", ".join(f"{k}={v}" for k, v in self.details.items())
        return f"{self.message} ({extra})"


# ---------------------------------------------------------------------------
# Input errors: the request itself is wrong
# ---------------------------------------------------------------------------


class InvalidInputError(CredalError):
    """Raised when input parameters are invalid (wrong type, shape, or value)."""

    default_code = "INVALID_INPUT"


class FormulaSyntaxError(InvalidInputError):
    """Raised when a formula string cannot be parsed."""

    default_code = "FORMULA_SYNTAX"


class InputFileError(InvalidInputError):
    """Raised when an input file is unreadable, not JSON, or off-schema."""

    default_code = "INPUT_FILE"


class MalformedSystemError(InvalidInputError):
    default_code = "MALFORMED_SYSTEM"


class UnboundAtomError(InvalidInputError):
    default_code = "UNBOUND_ATOM"


class ShapeMismatchError(InvalidInputError):
    default_code = "SHAPE_MISMATCH"


class SentenceMismatchError(InvalidInputError):
    default_code = "SENTENCE_MISMATCH"


class DegenerateConditionsError(InvalidInputError):
    default_code = "DEGENERATE_CONDITIONS"


class DuplicateSentenceError(InvalidInputError):
    default_code = "DUPLICATE_SENTENCE"


class ConditionNotDeterminedError(InvalidInputError):
    """A decision condition is neither true nor false in some world class."""

    default_code = "CONDITION_NOT_DETERMINED"


class EmptyAdmissibleError(InvalidInputError):
    default_code = "EMPTY_ADMISSIBLE"


class InconsistentInputsError(InvalidInputError):
    default_code = "INCONSISTENT_INPUTS"


class DegenerateSegmentError(InvalidInputError):
    default_code = "DEGENERATE_SEGMENT"


class PointNotInSetError(InvalidInputError):
    default_code = "POINT_NOT_IN_SET"


class UnsupportedDimensionError(InvalidInputError):
    default_code = "UNSUPPORTED_DIMENSION"


class NotASubsetError(InvalidInputError):
    default_code = "NOT_A_SUBSET"


class NotARefinementError(InvalidInputError):
    default_code = "NOT_A_REFINEMENT"


class AmbiguousProjectionError(InvalidInputError):
    default_code = "AMBIGUOUS_PROJECTION"


class UncoveredConditionError(InvalidInputError):
    default_code = "UNCOVERED_CONDITION"


class InvalidTableError(InvalidInputError):
    default_code = "INVALID_TABLE"


# ---------------------------------------------------------------------------
# Computation errors: the solver could not produce an answer
# ---------------------------------------------------------------------------


class ComputationError(CredalError):
    """Raised when a computation fails (infeasible program, size caps, etc.)."""

    default_code = "COMPUTATION_ERROR"


class InfeasibleError(ComputationError):
    default_code = "INFEASIBLE"


class UnboundedError(ComputationError):
    default_code = "UNBOUNDED"


class AtomLimitExceededError(ComputationError):
    default_code = "ATOM_LIMIT_EXCEEDED"


class LeafLimitExceededError(ComputationError):
    default_code = "LEAF_LIMIT_EXCEEDED"


# ---------------------------------------------------------------------------
# Belief-state errors: the knowledge is contradictory
# ---------------------------------------------------------------------------


class InconsistentBeliefError(CredalError):
    """The premises, credal set or database admit no probability distribution."""

    default_code = "INCONSISTENT_BELIEF"


class InconsistentPremisesError(InconsistentBeliefError):
    default_code = "INCONSISTENT_PREMISES"


class InfeasibleCredalError(InconsistentBeliefError):
    default_code = "INFEASIBLE_CREDAL"


class InconsistentDatabaseError(InconsistentBeliefError):
    default_code = "INCONSISTENT_DATABASE"
