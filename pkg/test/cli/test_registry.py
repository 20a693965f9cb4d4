"""Tests for the command registry."""

from fractions import Fraction
from typing import Any, Dict, List

import pytest

from app.commands import CommandRegistry, initialize_registry
from app.exceptions import InvalidInputError
from app.math_engine.base import (
    Capability,
    Collector,
    CommandDefinition,
    CommandResult,
    OutputRecord,
)
from app.math_engine.capabilities import MaxentCapability


class EchoCapability(Capability):
    @property
    def name(self) -> str:
        return "echo"

    @property
    def description(self) -> str:
        return "Echo arguments back"

    def get_commands(self) -> List[CommandDefinition]:
        return [CommandDefinition("echo", "Echo", {"word": {"type": "string"}}, "handle_echo")]

    def handle_echo(self, arguments: Dict[str, Any], out: Collector) -> CommandResult:
        out(OutputRecord("echo", arguments["word"], {"word": arguments["word"]}))
        return out.result({"echoed": True})


class ShadowCapability(EchoCapability):
    @property
    def name(self) -> str:
        return "shadow"


class TestCommandRegistry:
    def test_initialize_is_idempotent(self):
        first = initialize_registry()
        second = initialize_registry()
        assert first is second
        assert len(second.get_definitions()) == len(set(second.get_command_names()))

    def test_command_names(self):
        names = set(initialize_registry().get_command_names())
        assert names == {"deduce", "decide", "maxent.ecc", "maxent.sweep", "maxent.mc", "reproduce-paper"}

    def test_capabilities(self):
        registry = initialize_registry()
        assert set(registry.list_capabilities()) == {"deduction", "decision", "maxent", "reproduce"}
        assert isinstance(registry.get_capability("maxent"), MaxentCapability)
        assert registry.get_capability("forecast") is None

    def test_duplicate_capability(self):
        registry = CommandRegistry()
        registry.register_capability(EchoCapability())
        with pytest.raises(InvalidInputError):
            registry.register_capability(EchoCapability())

    def test_duplicate_command(self):
        registry = CommandRegistry()
        registry.register_capability(EchoCapability())
        with pytest.raises(InvalidInputError) as exc:
            registry.register_capability(ShadowCapability())
        assert "echo" in exc.value.message
        assert registry.get_capability("shadow") is None

    def test_unknown_command(self):
        registry = CommandRegistry()
        with pytest.raises(InvalidInputError):
            registry.handle_command("echo", {})

    def test_routes_and_collects(self):
        registry = CommandRegistry()
        registry.register_capability(EchoCapability())
        seen: List[OutputRecord] = []
        result = registry.handle_command("echo", {"word": "hello"}, seen.append)
        assert isinstance(result, CommandResult)
        assert [r.text for r in result.records] == ["hello"]
        assert seen == result.records
        assert result.to_dict()["summary"] == {"echoed": True}
        assert result.exit_code == 0

    def test_capability_rejects_foreign_command(self):
        with pytest.raises(InvalidInputError):
            EchoCapability().handle("deduce", {})

    def test_real_command_without_sink(self):
        result = initialize_registry().handle_command("maxent.ecc", {"a": Fraction(9, 10), "b": Fraction(1, 10)})
        assert result.summary["ecc_squared"] == "16/25"
