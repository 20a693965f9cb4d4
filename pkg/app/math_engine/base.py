"""Base classes for command capabilities.

A capability groups related commands (deduction, decision, maxent analysis,
reproduction checks). Each command declares its options as a small schema
that the CLI turns into argparse arguments, and handles a dict of parsed
arguments, streaming output records as they are produced.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

from app.exceptions import InvalidInputError


@dataclass
class OutputRecord:
    """One unit of command output: a text line and its JSON form."""

    kind: str
    text: str
    data: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"kind": self.kind, **self.data}


Emit = Callable[[OutputRecord], None]


@dataclass
class CommandResult:
    """Everything a command emitted, plus its exit status."""

    records: List[OutputRecord] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)
    exit_code: int = 0

    def to_dict(self) -> dict:
        return {
            "records": [r.to_dict() for r in self.records],
            "summary": self.summary,
            "exit_code": self.exit_code,
        }


@dataclass
class CommandDefinition:
    """A command provided by a capability.

    ``name`` may be dotted (``maxent.ecc``) to nest subcommands. Each entry of
    ``options`` maps an argument name to ``{"type", "help", "default",
    "choices", "positional", "required"}``; types are ``string``,
    ``integer``, ``rational``, ``path`` and ``flag``.
    """

    name: str
    description: str
    options: Dict[str, Dict[str, Any]]
    handler_name: str


class Collector:
    """Forward records to an optional sink while keeping them for the result."""

    def __init__(self, emit: Optional[Emit] = None):
        self._emit = emit
        self.records: List[OutputRecord] = []

    def __call__(self, record: OutputRecord) -> None:
        self.records.append(record)
        if self._emit is not None:
            self._emit(record)

    def result(self, summary: Optional[Dict[str, Any]] = None, exit_code: int = 0) -> CommandResult:
        return CommandResult(self.records, summary or {}, exit_code)


class Capability(ABC):
    """Base class for all command capabilities.

    Each capability should:
    1. Inherit from this class
    2. Implement get_commands() to declare its commands
    3. Implement a handler method for each command
    """

    @property
    @abstractmethod
    def name(self) -> str:
        """Unique name for this capability (e.g., 'deduction', 'maxent')."""

    @property
    @abstractmethod
    def description(self) -> str:
        """Human-readable description of this capability."""

    @abstractmethod
    def get_commands(self) -> List[CommandDefinition]:
        """Return the commands this capability provides."""

    def handle(
        self, command: str, arguments: Dict[str, Any], emit: Optional[Emit] = None
    ) -> CommandResult:
        """Route a command to its handler.

        Raises:
            InvalidInputError: If the command is not provided by this capability
        """
        for definition in self.get_commands():
            if definition.name == command:
                handler = getattr(self, definition.handler_name)
                return handler(arguments, Collector(emit))
        raise InvalidInputError(f"Unknown command: {command}", {"capability": self.name})
