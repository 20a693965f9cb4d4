"""Deduction capability: anytime interval deduction over a knowledge-base file."""

from __future__ import annotations

from typing import Any, Dict, List, Optional

from app.config import get_settings
from app.exceptions import InvalidInputError
from app.logger import session_logger as logger
from app.logger.decorators import log_execution_time
from app.math_engine.base import Capability, Collector, CommandDefinition, CommandResult, OutputRecord
from app.math_engine.deduction import KnowledgeBase, anytime_deduce
from app.math_engine.kernel import format_rational
from app.math_engine.loaders import load_kb
from app.math_engine.logic import parse_formula


def resolve_budget(arguments: Dict[str, Any]) -> int:
    """The ``budget`` argument, or the configured default."""
    budget: Optional[int] = arguments.get("budget")
    if budget is None:
        return get_settings().default_budget
    if budget < 1:
        raise InvalidInputError("Budget must be at least 1", {"budget": budget})
    return budget


class DeductionCapability(Capability):
    """Interval deduction with the four propagation rules."""

    @property
    def name(self) -> str:
        return "deduction"

    @property
    def description(self) -> str:
        return "Anytime interval deduction from probability-labeled sentences"

    def get_commands(self) -> List[CommandDefinition]:
        return [
            CommandDefinition(
                name="deduce",
                description=(
                    "Apply up to --budget rule instances to a knowledge base and print "
                    "the target interval after each step."
                ),
                options={
                    "kb": {"type": "path", "positional": True, "help": "Knowledge-base JSON file"},
                    "target": {
                        "type": "string",
                        "help": "Target formula (default: the file's target)",
                    },
                },
                handler_name="handle_deduce",
            )
        ]

    @log_execution_time
    def handle_deduce(self, arguments: Dict[str, Any], out: Collector) -> CommandResult:
        kb = load_kb(arguments["kb"])
        if arguments.get("target"):
            kb = KnowledgeBase(kb.statements, parse_formula(arguments["target"]))
        budget = resolve_budget(arguments)

        trace = anytime_deduce(kb, budget)
        for step in trace.steps:
            out(OutputRecord("step", step.render(), step.to_dict()))

        final = trace.final_interval
        logger.debug("Deduce command finished", steps=len(trace.steps))
        out(
            OutputRecord(
                "final",
                f"final target={kb.target} interval={final}",
                {
                    "target": str(kb.target),
                    "lower": format_rational(final.lower),
                    "upper": format_rational(final.upper),
                    "steps": len(trace.steps),
                },
            )
        )
        return out.result({"steps": len(trace.steps), "interval": str(final)})
