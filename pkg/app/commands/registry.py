"""Command Registry for the CLI.

Central registry that collects commands from all capabilities and routes
invocations to the capability that declared them.
"""

from __future__ import annotations

from typing import Any, Dict, List, Optional

from app.exceptions import InvalidInputError
from app.logger import session_logger as logger
from app.math_engine.base import Capability, CommandDefinition, CommandResult, Emit


class CommandRegistry:
    """Registry for CLI commands from capabilities.

    Collects command definitions from capability modules and provides:
    - Definitions for building the argument parser
    - Routing of command calls to the appropriate capability handler
    """

    def __init__(self):
        self._capabilities: Dict[str, Capability] = {}
        self._command_to_capability: Dict[str, str] = {}
        self._commands: Dict[str, CommandDefinition] = {}
        logger.debug("CommandRegistry initialized")

    def register_capability(self, capability: Capability) -> None:
        """Register a capability and its commands.

        Raises:
            InvalidInputError: If the capability or one of its command names is taken
        """
        cap_name = capability.name
        if cap_name in self._capabilities:
            raise InvalidInputError(f"Capability '{cap_name}' already registered")

        commands = capability.get_commands()
        for definition in commands:
            if definition.name in self._commands:
                existing = self._command_to_capability[definition.name]
                raise InvalidInputError(
                    f"Command '{definition.name}' already registered by capability '{existing}'"
                )

        self._capabilities[cap_name] = capability
        for definition in commands:
            self._commands[definition.name] = definition
            self._command_to_capability[definition.name] = cap_name

        logger.debug(
            "Capability registered",
            capability=cap_name,
            commands=[c.name for c in commands],
        )

    def get_definitions(self) -> List[CommandDefinition]:
        return list(self._commands.values())

    def get_command_names(self) -> List[str]:
        return list(self._commands.keys())

    def has_command(self, command: str) -> bool:
        return command in self._commands

    def handle_command(
        self, command: str, arguments: Dict[str, Any], emit: Optional[Emit] = None
    ) -> CommandResult:
        """Route a command to its capability.

        Raises:
            InvalidInputError: If the command is not registered
        """
        if command not in self._commands:
            raise InvalidInputError(f"Unknown command: '{command}'", {"known": self.get_command_names()})

        cap_name = self._command_to_capability[command]
        logger.debug("Routing command", command=command, capability=cap_name)
        return self._capabilities[cap_name].handle(command, arguments, emit)

    def list_capabilities(self) -> Dict[str, str]:
        return {name: cap.description for name, cap in self._capabilities.items()}

    def get_capability(self, name: str) -> Optional[Capability]:
        return self._capabilities.get(name)


# Global registry instance
_registry: Optional[CommandRegistry] = None


def get_registry() -> CommandRegistry:
    """Get or create the global command registry."""
    global _registry
    if _registry is None:
        _registry = CommandRegistry()
    return _registry


def initialize_registry() -> CommandRegistry:
    """Return the global registry with every capability registered.

    Safe to call more than once.
    """
    from app.math_engine.capabilities import (
        DecisionCapability,
        DeductionCapability,
        MaxentCapability,
        ReproduceCapability,
    )

    registry = get_registry()
    if registry.list_capabilities():
        return registry

    registry.register_capability(DeductionCapability())
    registry.register_capability(DecisionCapability())
    registry.register_capability(MaxentCapability())
    registry.register_capability(ReproduceCapability())

    logger.debug(
        "Registry initialized",
        capabilities=list(registry.list_capabilities().keys()),
        commands=registry.get_command_names(),
    )
    return registry
