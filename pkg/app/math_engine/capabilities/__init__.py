"""Command capabilities.

Each module wraps one area of the engine as CLI commands.
"""

from app.math_engine.capabilities.decision import DecisionCapability
from app.math_engine.capabilities.deduction import DeductionCapability
from app.math_engine.capabilities.maxent import MaxentCapability
from app.math_engine.capabilities.reproduce import ReproduceCapability

__all__ = [
    "DecisionCapability",
    "DeductionCapability",
    "MaxentCapability",
    "ReproduceCapability",
]
