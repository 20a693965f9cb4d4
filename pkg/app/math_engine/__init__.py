"""Math engine for interval-probability reasoning.

Exact rational kernel, propositional logic, interval deduction, possible
worlds, E-admissibility, maximum entropy and probabilistic databases.
Command wrappers live in ``app.math_engine.capabilities``.
"""

from app.math_engine.base import Capability, CommandDefinition, CommandResult, OutputRecord

__all__ = [
    "Capability",
    "CommandDefinition",
    "CommandResult",
    "OutputRecord",
]
