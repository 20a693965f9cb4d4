"""Decision capability: anytime E-admissibility with three belief backends."""

from __future__ import annotations

from itertools import islice
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

from app.exceptions import InputFileError, InvalidInputError
from app.logger import session_logger as logger
from app.logger.decorators import log_execution_time
from app.math_engine.anytime import Deadline
from app.math_engine.base import Capability, Collector, CommandDefinition, CommandResult, OutputRecord
from app.math_engine.capabilities.deduction import resolve_budget
from app.math_engine.decide import (
    AdmissibleSet,
    Backend,
    DecisionStep,
    Fallback,
    anytime_decide_fh,
    anytime_decide_nilsson,
    fallback_choose,
    step_intervals,
)
from app.math_engine.loaders import ProblemFile, load_database, load_kb, load_pool, load_problem
from app.math_engine.pdb import anytime_decide_pdb
from app.math_engine.worlds import ConditionFirst, Layout, TargetFirst, format_matrix


def parse_order(text: Optional[str]) -> Optional[Tuple[int, ...]]:
    """``"2,0,1"`` -> (2, 0, 1); blank means no override."""
    if text is None or not text.strip():
        return None
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise InvalidInputError("Order must be comma-separated integers", {"order": text}) from None


def _require(arguments: Dict[str, Any], key: str, backend: Backend) -> Any:
    value = arguments.get(key)
    if value is None:
        raise InvalidInputError(
            f"Backend {backend.value} needs --{key}", {"backend": backend.value}
        )
    return value


class DecisionCapability(Capability):
    """Anytime decision making over F-H deduction, semantic trees or databases."""

    @property
    def name(self) -> str:
        return "decision"

    @property
    def description(self) -> str:
        return "E-admissible action sets refined step by step"

    def get_commands(self) -> List[CommandDefinition]:
        return [
            CommandDefinition(
                name="decide",
                description=(
                    "Print the E-admissible action set after every refinement step of the "
                    "chosen backend."
                ),
                options={
                    "problem": {
                        "type": "path",
                        "positional": True,
                        "help": "Decision problem JSON file",
                    },
                    "backend": {
                        "type": "string",
                        "choices": [b.value for b in Backend],
                        "default": Backend.FH.value,
                        "help": "Belief backend",
                    },
                    "kb": {"type": "path", "help": "Knowledge base (fh backend)"},
                    "pool": {"type": "path", "help": "Sentence pool (nilsson backend)"},
                    "db": {"type": "path", "help": "Probabilistic database (pdb backend)"},
                    "fallback": {
                        "type": "string",
                        "choices": [f.value for f in Fallback],
                        "help": "Pick one action from the final set",
                    },
                    "order": {
                        "type": "string",
                        "help": "Pool sentence order as 0-based indices, e.g. 2,0,1",
                    },
                    "layout": {
                        "type": "string",
                        "choices": ["target", "conditions"],
                        "default": "target",
                        "help": "Semantic tree layout (nilsson backend)",
                    },
                    "matrix": {
                        "type": "flag",
                        "help": "With --trace, print the world matrix at each step",
                    },
                },
                handler_name="handle_decide",
            )
        ]

    def _steps(
        self, problem_file: ProblemFile, backend: Backend, arguments: Dict[str, Any]
    ) -> Iterator[DecisionStep]:
        problem = problem_file.problem
        budget = resolve_budget(arguments)
        deadline = Deadline(arguments.get("deadline_ms"))

        if backend is Backend.FH:
            kb = load_kb(_require(arguments, "kb", backend))
            return anytime_decide_fh(
                problem, kb.statements, problem_file.condition_sentences, budget, deadline
            )

        if backend is Backend.NILSSON:
            pool = load_pool(_require(arguments, "pool", backend))
            conditions = problem_file.condition_formulas
            layout: Layout
            if arguments.get("layout") == "conditions":
                layout = ConditionFirst(conditions)
            else:
                if pool.target is None:
                    raise InputFileError("Target-first layout needs a pool target")
                layout = TargetFirst(pool.target)
            order = parse_order(arguments.get("order")) or pool.order
            steps = anytime_decide_nilsson(problem, pool.pairs, layout, conditions, order, deadline)
            # Step 0 is the empty tree; the budget counts added sentences
            return islice(steps, budget + 1)

        db = load_database(_require(arguments, "db", backend))
        if problem_file.condition_tuples is None:
            raise InputFileError("Problem file lacks condition tuples for the pdb backend")
        return islice(anytime_decide_pdb(problem, db, problem_file.condition_tuples, deadline), budget)

    def _details(self, step: DecisionStep, matrix: bool) -> Sequence[OutputRecord]:
        records = [
            OutputRecord(
                "detail",
                f"  provenance: {step.admissible.provenance}",
                {"step": step.index, "provenance": step.admissible.provenance},
            )
        ]
        if step.credal is not None:
            system = step.credal.system
            records.append(
                OutputRecord(
                    "detail",
                    f"  credal: {system.variable_count} unknowns, "
                    f"{len(system.constraints)} constraints",
                    {
                        "step": step.index,
                        "unknowns": system.variable_count,
                        "constraints": len(system.constraints),
                    },
                )
            )
        if matrix and step.tree is not None:
            grid = format_matrix(step.tree)
            records.append(
                OutputRecord(
                    "matrix",
                    "\n".join("  " + line for line in grid.splitlines()),
                    {
                        "step": step.index,
                        "sentences": [str(s) for s in step.tree.sentences],
                        "columns": [list(map(int, leaf.labels)) for leaf in step.tree.leaves],
                    },
                )
            )
        return records

    @log_execution_time
    def handle_decide(self, arguments: Dict[str, Any], out: Collector) -> CommandResult:
        problem_file = load_problem(arguments["problem"])
        problem = problem_file.problem
        backend = Backend(arguments.get("backend") or Backend.FH.value)
        trace = bool(arguments.get("trace"))

        last: Optional[DecisionStep] = None
        for step in self._steps(problem_file, backend, arguments):
            out(OutputRecord("step", step.render(), step.to_dict()))
            if trace:
                for record in self._details(step, bool(arguments.get("matrix"))):
                    out(record)
            last = step

        if last is None:
            # Deadline expired before the first step
            actions = problem.actions
            intervals = None
        else:
            actions = last.admissible.actions
            intervals = step_intervals(problem, last)

        data: Dict[str, Any] = {"backend": backend.value, "admissible": list(actions)}
        text = f"final backend={backend.value} admissible={','.join(actions)}"
        criterion = arguments.get("fallback")
        if criterion:
            choice = fallback_choose(
                problem,
                last.admissible if last is not None else AdmissibleSet(actions),
                Fallback(criterion),
                seed=arguments.get("seed"),
                intervals=intervals,
            )
            data.update(fallback=criterion, choice=choice)
            text += f" fallback={criterion} choice={choice}"
        out(OutputRecord("final", text, data))
        logger.info("Decide command finished", backend=backend.value, admissible=list(actions))
        return out.result(data)
