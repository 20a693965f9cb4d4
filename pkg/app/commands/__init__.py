"""Command routing for the CLI."""

from app.commands.registry import CommandRegistry, get_registry, initialize_registry

__all__ = ["CommandRegistry", "get_registry", "initialize_registry"]
