"""JSON input files: knowledge bases, decision problems, sentence pools, databases.

Numbers may be JSON numbers or strings (``"0.65"``, ``"13/20"``); JSON
numbers are read as Decimals so no float rounding happens on the way in.
Formulas use the ``parse_formula`` syntax.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from pathlib import Path
from typing import Annotated, Any, Dict, List, Optional, Tuple, Type, TypeVar, Union

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, ValidationError, field_validator

from app.exceptions import (
    CredalError,
    FormulaSyntaxError,
    InputFileError,
    InvalidTableError,
)
from app.logger import session_logger as logger
from app.math_engine.decide import DecisionProblem
from app.math_engine.deduction import KnowledgeBase, ProbStatement
from app.math_engine.kernel import Interval, parse_rational
from app.math_engine.logic import Formula, parse_formula
from app.math_engine.pdb import AttributeSpec, ConditionTuples, Database, ProbTable, ValueTuple

PathLike = Union[str, Path]
ModelT = TypeVar("ModelT", bound=BaseModel)


def _rational(value: Any) -> Fraction:
    try:
        return parse_rational(value)
    except CredalError as e:
        raise ValueError(e.message) from None


def _formula_text(value: str) -> str:
    try:
        parse_formula(value)
    except FormulaSyntaxError as e:
        column = e.details.get("column")
        raise ValueError(f"{e.message} (column {column})") from None
    return value


RationalField = Annotated[Fraction, BeforeValidator(_rational)]


class _FileModel(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, extra="forbid")


class StatementModel(_FileModel):
    sentence: str
    lower: RationalField
    upper: RationalField

    @field_validator("sentence")
    @classmethod
    def _check_sentence(cls, v: str) -> str:
        return _formula_text(v)

    def to_statement(self) -> ProbStatement:
        return ProbStatement(parse_formula(self.sentence), Interval(self.lower, self.upper))


class KnowledgeBaseModel(_FileModel):
    statements: List[StatementModel] = Field(default_factory=list)
    target: str

    @field_validator("target")
    @classmethod
    def _check_target(cls, v: str) -> str:
        return _formula_text(v)


class PoolModel(_FileModel):
    target: Optional[str] = None
    sentences: List[StatementModel] = Field(min_length=1)
    order: Optional[List[int]] = None

    @field_validator("target")
    @classmethod
    def _check_target(cls, v: Optional[str]) -> Optional[str]:
        return _formula_text(v) if v is not None else None


class ConditionTuplesModel(_FileModel):
    attributes: List[str] = Field(min_length=1)
    tuples: Dict[str, List[List[str]]]


class ProblemModel(_FileModel):
    actions: List[str]
    conditions: List[str]
    utility: List[List[RationalField]]
    condition_sentences: Optional[Dict[str, str]] = None
    condition_tuples: Optional[ConditionTuplesModel] = None

    @field_validator("condition_sentences")
    @classmethod
    def _check_sentences(cls, v: Optional[Dict[str, str]]) -> Optional[Dict[str, str]]:
        if v is not None:
            for text in v.values():
                _formula_text(text)
        return v


class AttributeModel(_FileModel):
    name: str
    values: List[str]


class TableModel(_FileModel):
    attributes: List[str] = Field(min_length=1)
    cells: List[List[Union[str, int, Decimal]]]


class DatabaseModel(_FileModel):
    attributes: List[AttributeModel] = Field(min_length=1)
    tables: List[TableModel] = Field(min_length=1)


@dataclass(frozen=True)
class ProblemFile:
    """A decision problem plus the per-backend condition mappings it ships with."""

    problem: DecisionProblem
    condition_sentences: Tuple[Optional[Formula], ...]
    condition_tuples: Optional[ConditionTuples] = None

    @property
    def condition_formulas(self) -> Tuple[Formula, ...]:
        """Every condition sentence; raises when one is missing."""
        missing = [
            name
            for name, f in zip(self.problem.conditions, self.condition_sentences)
            if f is None
        ]
        if missing:
            raise InputFileError(
                "Problem file lacks condition sentences", {"conditions": missing}
            )
        return tuple(f for f in self.condition_sentences if f is not None)


@dataclass(frozen=True)
class SentencePool:
    statements: Tuple[ProbStatement, ...]
    target: Optional[Formula] = None
    order: Optional[Tuple[int, ...]] = None

    @property
    def pairs(self) -> List[Tuple[Formula, Interval]]:
        return [(s.sentence, s.bounds) for s in self.statements]


def read_json(path: PathLike) -> Any:
    """Parse a UTF-8 JSON file; JSON numbers come back as int or Decimal."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InputFileError(
            f"Cannot read input file: {e.strerror or e}", {"path": str(path)}
        ) from e
    except UnicodeDecodeError as e:
        raise InputFileError("Input file is not UTF-8", {"path": str(path)}) from e
    try:
        return json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as e:
        raise InputFileError(
            f"Malformed JSON: {e.msg}",
            {"path": str(path), "line": e.lineno, "column": e.colno},
        ) from e


def _validate(model: Type[ModelT], data: Any, path: PathLike) -> ModelT:
    try:
        return model.model_validate(data)
    except ValidationError as e:
        errors = [
            {
                "location": ".".join(str(part) for part in err["loc"]) or "<root>",
                "message": err["msg"],
            }
            for err in e.errors(include_url=False)
        ]
        first = errors[0]
        raise InputFileError(
            f"Invalid {model.__name__.replace('Model', '')} file at "
            f"{first['location']}: {first['message']}",
            {"path": str(path), "errors": errors},
        ) from None


def load_kb(path: PathLike) -> KnowledgeBase:
    model = _validate(KnowledgeBaseModel, read_json(path), path)
    kb = KnowledgeBase(
        tuple(s.to_statement() for s in model.statements), parse_formula(model.target)
    )
    logger.debug("Knowledge base loaded", path=str(path), statements=len(kb.statements))
    return kb


def load_pool(path: PathLike) -> SentencePool:
    model = _validate(PoolModel, read_json(path), path)
    target = parse_formula(model.target) if model.target is not None else None
    order = tuple(model.order) if model.order is not None else None
    if order is not None and (
        len(set(order)) != len(order) or any(not 0 <= k < len(model.sentences) for k in order)
    ):
        raise InputFileError(
            "Pool order must list distinct sentence indices",
            {"path": str(path), "order": list(order), "sentences": len(model.sentences)},
        )
    return SentencePool(tuple(s.to_statement() for s in model.sentences), target, order)


def load_problem(path: PathLike) -> ProblemFile:
    model = _validate(ProblemModel, read_json(path), path)
    problem = DecisionProblem.build(model.actions, model.conditions, model.utility)

    sentences: List[Optional[Formula]] = [None] * problem.n
    if model.condition_sentences is not None:
        unknown = sorted(set(model.condition_sentences) - set(problem.conditions))
        if unknown:
            raise InputFileError(
                "Condition sentences name unknown conditions",
                {"path": str(path), "unknown": unknown},
            )
        for j, name in enumerate(problem.conditions):
            text = model.condition_sentences.get(name)
            sentences[j] = parse_formula(text) if text is not None else None

    tuples: Optional[ConditionTuples] = None
    if model.condition_tuples is not None:
        groups = model.condition_tuples.tuples
        if set(groups) != set(problem.conditions):
            raise InputFileError(
                "Condition tuples must list every condition exactly",
                {
                    "path": str(path),
                    "missing": sorted(set(problem.conditions) - set(groups)),
                    "unknown": sorted(set(groups) - set(problem.conditions)),
                },
            )
        tuples = ConditionTuples(
            tuple(model.condition_tuples.attributes),
            tuple(
                frozenset(tuple(v) for v in groups[name]) for name in problem.conditions
            ),
        )
    return ProblemFile(problem, tuple(sentences), tuples)


def _table(model: TableModel, specs: Dict[str, AttributeSpec], index: int) -> ProbTable:
    unknown = [a for a in model.attributes if a not in specs]
    if unknown:
        raise InvalidTableError(
            "Table uses an undeclared attribute", {"table": index, "attributes": unknown}
        )
    width = len(model.attributes)
    cells: Dict[ValueTuple, Fraction] = {}
    for row in model.cells:
        if len(row) != width + 1:
            raise InvalidTableError(
                "Cell rows need one value per attribute plus a probability",
                {"table": index, "row": [str(v) for v in row]},
            )
        key = tuple(str(v) for v in row[:width])
        if key in cells:
            raise InvalidTableError("Duplicate table cell", {"table": index, "cell": list(key)})
        cells[key] = parse_rational(row[width])
    return ProbTable(tuple(specs[a] for a in model.attributes), cells)


def load_database(path: PathLike) -> Database:
    model = _validate(DatabaseModel, read_json(path), path)
    specs = {a.name: AttributeSpec(a.name, tuple(a.values)) for a in model.attributes}
    if len(specs) != len(model.attributes):
        raise InvalidTableError("Attribute names must be distinct", {"path": str(path)})
    tables = tuple(_table(t, specs, i) for i, t in enumerate(model.tables))
    db = Database(tuple(specs.values()), tables)
    logger.debug(
        "Database loaded",
        path=str(path),
        attributes=len(db.specs),
        tables=len(db.tables),
    )
    return db


__all__ = [
    "ProblemFile",
    "SentencePool",
    "load_database",
    "load_kb",
    "load_pool",
    "load_problem",
    "read_json",
]
