"""Reproduction capability: PASS/FAIL for every worked example in the fixtures."""

from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, List

from app.errors import EXIT_CHECKS_FAILED
from app.logger.decorators import log_execution_time
from app.math_engine.base import Capability, Collector, CommandDefinition, CommandResult, OutputRecord
from app.math_engine.reproduce import WorkedExamples


class ReproduceCapability(Capability):
    @property
    def name(self) -> str:
        return "reproduce"

    @property
    def description(self) -> str:
        return "Recompute the worked examples from the shipped fixtures"

    def get_commands(self) -> List[CommandDefinition]:
        return [
            CommandDefinition(
                name="reproduce-paper",
                description="Run every worked-example check; exit 0 iff all pass.",
                options={
                    "fixtures": {"type": "path", "help": "Fixtures directory"},
                    "samples": {
                        "type": "integer",
                        "default": 1_000_000,
                        "help": "Monte Carlo samples per mode",
                    },
                    "check": {"type": "string", "help": "Comma-separated subset of checks"},
                },
                handler_name="handle_reproduce",
            )
        ]

    @log_execution_time
    def handle_reproduce(self, arguments: Dict[str, Any], out: Collector) -> CommandResult:
        fixtures = arguments.get("fixtures")
        seed = arguments.get("seed")
        examples = WorkedExamples(
            Path(fixtures) if fixtures else None,
            samples=int(arguments.get("samples") or 1_000_000),
            seed=7 if seed is None else seed,
        )
        only = [c.strip() for c in (arguments.get("check") or "").split(",") if c.strip()]

        passed = failed = 0
        for result in examples.run(only or None):
            out(OutputRecord("check", result.render(), result.to_dict()))
            if result.passed:
                passed += 1
            else:
                failed += 1

        summary = {"passed": passed, "failed": failed}
        out(OutputRecord("summary", f"{passed} passed, {failed} failed", summary))
        return out.result(summary, exit_code=EXIT_CHECKS_FAILED if failed else 0)
