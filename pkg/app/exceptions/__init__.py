"""Custom exceptions for GOFR-CREDAL.

All exceptions carry a code, a message and a details dict so callers can
recover without parsing strings.
"""

from app.exceptions.base import (
    AmbiguousProjectionError,
    AtomLimitExceededError,
    ComputationError,
    ConditionNotDeterminedError,
    CredalError,
    DegenerateConditionsError,
    DegenerateSegmentError,
    DuplicateSentenceError,
    EmptyAdmissibleError,
    FormulaSyntaxError,
    InconsistentBeliefError,
    InconsistentDatabaseError,
    InconsistentInputsError,
    InconsistentPremisesError,
    InfeasibleCredalError,
    InfeasibleError,
    InputFileError,
    InvalidInputError,
    InvalidTableError,
    LeafLimitExceededError,
    MalformedSystemError,
    NotARefinementError,
    NotASubsetError,
    PointNotInSetError,
    SentenceMismatchError,
    ShapeMismatchError,
    UnboundAtomError,
    UnboundedError,
    UncoveredConditionError,
    UnsupportedDimensionError,
)

__all__ = [
    "CredalError",
    # Input errors
    "InvalidInputError",
    "FormulaSyntaxError",
    "InputFileError",
    "MalformedSystemError",
    "UnboundAtomError",
    "ShapeMismatchError",
    "SentenceMismatchError",
    "DegenerateConditionsError",
    "DuplicateSentenceError",
    "ConditionNotDeterminedError",
    "EmptyAdmissibleError",
    "InconsistentInputsError",
    "DegenerateSegmentError",
    "PointNotInSetError",
    "UnsupportedDimensionError",
    "NotASubsetError",
    "NotARefinementError",
    "AmbiguousProjectionError",
    "UncoveredConditionError",
    "InvalidTableError",
    # Computation errors
    "ComputationError",
    "InfeasibleError",
    "UnboundedError",
    "AtomLimitExceededError",
    "LeafLimitExceededError",
    # Belief-state errors
    "InconsistentBeliefError",
    "InconsistentPremisesError",
    "InfeasibleCredalError",
    "InconsistentDatabaseError",
]
