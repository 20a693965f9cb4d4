"""Command-line entry point.

    python -m app.main_cli deduce fixtures/beach_kb.json --budget 10
    python -m app.main_cli decide fixtures/train_problem.json --backend pdb --db fixtures/train_db.json
    python -m app.main_cli maxent ecc --pattern conjunction --a 0.9 --b 0.1
    python -m app.main_cli reproduce-paper

Exit codes: 0 success, 1 input/I-O/parse errors, 2 inconsistent belief
state, 3 atom or leaf cap exceeded, 4 internal error, 5 failed checks.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Any, Callable, Dict, List, NoReturn, Optional, TextIO

from app.commands import CommandRegistry, initialize_registry
from app.errors import EXIT_INPUT, get_exit_code_for_error, map_exception_to_response
from app.exceptions import CredalError
from app.logger import session_logger as logger
from app.math_engine.base import CommandDefinition, OutputRecord
from app.math_engine.kernel import parse_rational

FORMATS = ("text", "jsonl")


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with the input-error status."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _rational(text: str) -> Any:
    try:
        return parse_rational(text)
    except CredalError as e:
        raise argparse.ArgumentTypeError(e.message) from None


_TYPES: Dict[str, Callable[[str], Any]] = {
    "string": str,
    "path": str,
    "integer": int,
    "rational": _rational,
}


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--budget", type=int, default=default, help="Maximum refinement steps")
    parser.add_argument(
        "--deadline-ms", type=int, default=default, help="Wall-clock limit in milliseconds"
    )
    parser.add_argument("--seed", type=int, default=default, help="Random seed")
    parser.add_argument(
        "--trace",
        action="store_true",
        default=argparse.SUPPRESS if suppress else False,
        help="Print provenance and detail lines",
    )
    parser.add_argument(
        "--format",
        choices=FORMATS,
        default=argparse.SUPPRESS if suppress else "text",
        help="Output format (default: text)",
    )
    parser.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        default=default,
        help="Override GOFR_CREDAL_LOG_LEVEL",
    )


def _add_options(parser: argparse.ArgumentParser, definition: CommandDefinition) -> None:
    for name, spec in definition.options.items():
        kind = spec.get("type", "string")
        help_text = spec.get("help")
        if spec.get("positional"):
            parser.add_argument(name, type=_TYPES[kind], help=help_text)
            continue
        flag = "--" + name.replace("_", "-")
        if kind == "flag":
            parser.add_argument(flag, dest=name, action="store_true", help=help_text)
            continue
        parser.add_argument(
            flag,
            dest=name,
            type=_TYPES[kind],
            choices=spec.get("choices"),
            default=spec.get("default"),
            required=bool(spec.get("required")),
            help=help_text,
        )


def build_parser(registry: CommandRegistry) -> argparse.ArgumentParser:
    """One subcommand per registered command; dotted names nest."""
    common = _Parser(add_help=False)
    _global_flags(common, suppress=True)

    parser = _Parser(
        prog="gofr-credal",
        description="Anytime decision making with interval probabilities",
    )
    _global_flags(parser, suppress=False)
    top = parser.add_subparsers(dest="_group", required=True, metavar="COMMAND")

    groups: Dict[str, Any] = {}
    for definition in registry.get_definitions():
        head, _, leaf = definition.name.partition(".")
        if leaf:
            if head not in groups:
                group = top.add_parser(head, help=f"{head} subcommands")
                groups[head] = group.add_subparsers(dest="_leaf", required=True, metavar="SUBCOMMAND")
            sub = groups[head].add_parser(
                leaf, parents=[common], help=definition.description, description=definition.description
            )
        else:
            sub = top.add_parser(
                head, parents=[common], help=definition.description, description=definition.description
            )
        _add_options(sub, definition)
        sub.set_defaults(_command=definition.name)
    return parser


def _printer(fmt: str, stream: TextIO) -> Callable[[OutputRecord], None]:
    def emit(record: OutputRecord) -> None:
        if fmt == "jsonl":
            stream.write(json.dumps(record.to_dict(), default=str) + "\n")
        else:
            stream.write(record.text + "\n")
        stream.flush()

    return emit


def _report_error(error: Exception, fmt: str, code: int) -> None:
    response = map_exception_to_response(error)
    if fmt == "jsonl":
        sys.stderr.write(json.dumps({**response.to_dict(), "exit_code": code}, default=str) + "\n")
        return
    lines = [f"error [{response.error_code}]: {response.message}"]
    if response.details:
        lines += [f"  {key}: {value}" for key, value in response.details.items()]
    if response.recovery_strategy:
        lines.append(f"  hint: {response.recovery_strategy}")
    sys.stderr.write("\n".join(lines) + "\n")


def main(argv: Optional[List[str]] = None) -> int:
    registry = initialize_registry()
    parser = build_parser(registry)
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_INPUT

    arguments = {k: v for k, v in vars(args).items() if not k.startswith("_")}
    fmt = arguments.pop("format", None) or "text"
    level = arguments.pop("log_level", None)
    if level:
        logger.set_level(getattr(logging, level))

    command = args._command
    try:
        result = registry.handle_command(command, arguments, _printer(fmt, sys.stdout))
    except Exception as e:
        code = get_exit_code_for_error(e)
        logger.error(
            "Command failed",
            command=command,
            error_type=type(e).__name__,
            exit_code=code,
        )
        _report_error(e, fmt, code)
        return code
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
