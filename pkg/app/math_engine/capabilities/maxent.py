"""Maxent capability: eccentricity of point estimates on two-premise solution sets."""

from __future__ import annotations

import csv
import io
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from app.exceptions import InvalidInputError
from app.logger import session_logger as logger
from app.logger.decorators import log_execution_time
from app.math_engine.base import Capability, Collector, CommandDefinition, CommandResult, OutputRecord
from app.math_engine.kernel import format_rational, parse_rational
from app.math_engine.maxent import (
    MODE_MAXENT,
    MODE_UNIFORM,
    SegmentSet,
    Vector,
    centroid,
    conjunction_segment,
    ecc_sweep,
    eccentricity_report,
    expected_ecc_mc,
    maxent_conjunction,
    modus_ponens_segment,
)

PATTERNS = ("conjunction", "modus_ponens")
MC_MODES = {"maxent": MODE_MAXENT, "uniform": MODE_UNIFORM}
CSV_HEADER = ("a", "b", "ecc")


def _need(arguments: Dict[str, Any], key: str, pattern: str) -> Any:
    value = arguments.get(key)
    if value is None:
        raise InvalidInputError(f"Pattern {pattern} needs --{key}", {"pattern": pattern})
    return value


def segment_and_point(arguments: Dict[str, Any]) -> Tuple[SegmentSet, Vector, str]:
    """Solution segment for the pattern and the point to measure, with its label."""
    pattern = arguments.get("pattern") or "conjunction"
    if pattern not in PATTERNS:
        raise InvalidInputError("Unknown pattern", {"pattern": pattern, "patterns": list(PATTERNS)})
    if pattern == "conjunction":
        a, b = _need(arguments, "a", pattern), _need(arguments, "b", pattern)
        seg = conjunction_segment(a, b)
        maxent_point = maxent_conjunction(a, b)
    else:
        seg = modus_ponens_segment(_need(arguments, "x", pattern), _need(arguments, "y", pattern))
        # The maxent point of the modus ponens segment is its midpoint
        maxent_point = centroid(seg)

    choice = (arguments.get("point") or "maxent").strip()
    if choice == "maxent":
        return seg, maxent_point, "maxent"
    if choice == "centroid":
        return seg, centroid(seg), "centroid"
    point = tuple(parse_rational(part) for part in choice.split(","))
    return seg, point, "given"


def write_csv_atomic(path: Path, rows: List[Tuple[Any, ...]]) -> None:
    """Write ``rows`` to a temporary file beside ``path``, then rename over it."""
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerows(rows)
        os.replace(tmp_name, path)
    except BaseException:
        Path(tmp_name).unlink(missing_ok=True)
        raise


class MaxentCapability(Capability):
    """Eccentricity reports, grid sweeps and Monte Carlo averages."""

    @property
    def name(self) -> str:
        return "maxent"

    @property
    def description(self) -> str:
        return "Eccentricity of maximum-entropy and other point estimates"

    def get_commands(self) -> List[CommandDefinition]:
        return [
            CommandDefinition(
                name="maxent.ecc",
                description="Exact ecc^2 and decimal ecc of a point on a solution segment.",
                options={
                    "pattern": {
                        "type": "string",
                        "choices": list(PATTERNS),
                        "default": "conjunction",
                        "help": "Inference pattern",
                    },
                    "a": {"type": "rational", "help": "p(A) (conjunction)"},
                    "b": {"type": "rational", "help": "p(B) (conjunction)"},
                    "x": {"type": "rational", "help": "p(P) (modus ponens)"},
                    "y": {"type": "rational", "help": "p(P -> Q) (modus ponens)"},
                    "point": {
                        "type": "string",
                        "default": "maxent",
                        "help": "maxent, centroid, or four comma-separated probabilities",
                    },
                },
                handler_name="handle_ecc",
            ),
            CommandDefinition(
                name="maxent.sweep",
                description="CSV of ecc(maxent) for conjunction over the grid k/(steps+1).",
                options={
                    "steps": {"type": "integer", "default": 9, "help": "Grid points per axis"},
                    "output": {"type": "path", "help": "CSV file (default: stdout)"},
                },
                handler_name="handle_sweep",
            ),
            CommandDefinition(
                name="maxent.mc",
                description="Monte Carlo mean eccentricity with p(A), p(B) uniform.",
                options={
                    "mode": {
                        "type": "string",
                        "choices": list(MC_MODES),
                        "default": "maxent",
                        "help": "Point estimate to measure",
                    },
                    "samples": {"type": "integer", "default": 1_000_000, "help": "Sample count"},
                    "workers": {"type": "integer", "help": "Worker threads"},
                },
                handler_name="handle_mc",
            ),
        ]

    @log_execution_time
    def handle_ecc(self, arguments: Dict[str, Any], out: Collector) -> CommandResult:
        seg, point, label = segment_and_point(arguments)
        report = eccentricity_report(point, seg)
        data = {
            "pattern": arguments.get("pattern") or "conjunction",
            "point_kind": label,
            "point": [format_rational(c) for c in report.point],
            "centroid": [format_rational(c) for c in report.centroid],
            "ecc_squared": format_rational(report.ecc_squared),
            "ecc": report.ecc,
        }
        out(
            OutputRecord(
                "ecc",
                f"point={label} ecc^2={format_rational(report.ecc_squared)} ecc={report.ecc:.12g}",
                data,
            )
        )
        return out.result(data)

    @log_execution_time
    def handle_sweep(self, arguments: Dict[str, Any], out: Collector) -> CommandResult:
        steps = int(arguments.get("steps") or 9)
        rows = [(format_rational(a), format_rational(b), f"{e:.12g}") for a, b, e in ecc_sweep(steps)]
        output: Optional[str] = arguments.get("output")
        if output:
            write_csv_atomic(Path(output), [CSV_HEADER, *rows])
            logger.info("Sweep written", path=output, rows=len(rows))
            out(
                OutputRecord(
                    "sweep", f"wrote {len(rows)} rows to {output}", {"path": output, "rows": len(rows)}
                )
            )
        else:
            buffer = io.StringIO()
            csv.writer(buffer, lineterminator="\n").writerows([CSV_HEADER, *rows])
            out(OutputRecord("csv", buffer.getvalue().rstrip("\n"), {"rows": len(rows)}))
        return out.result({"rows": len(rows)})

    @log_execution_time
    def handle_mc(self, arguments: Dict[str, Any], out: Collector) -> CommandResult:
        mode = arguments.get("mode") or "maxent"
        if mode not in MC_MODES:
            raise InvalidInputError("Unknown mode", {"mode": mode, "modes": list(MC_MODES)})
        samples = int(arguments.get("samples") or 1_000_000)
        estimate = expected_ecc_mc(
            MC_MODES[mode], samples, seed=arguments.get("seed"), workers=arguments.get("workers")
        )
        data = {
            "mode": mode,
            "mean": estimate.mean,
            "samples": estimate.samples,
            "std_error": estimate.std_error,
            "seed": estimate.seed,
        }
        out(
            OutputRecord(
                "estimate",
                f"mode={mode} mean={estimate.mean:.6f} std_error={estimate.std_error:.2e} "
                f"samples={estimate.samples}",
                data,
            )
        )
        return out.result(data)
