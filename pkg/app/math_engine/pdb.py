"""Probabilistic databases: joint tables over attribute sets, schemes, projection, extension.

A database constrains the joint distribution over all of its attributes only
through its tables' marginals. The set of joint distributions matching every
table is the database's extension; it is the solution set of one equality row
per table cell plus normalization.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from app.exceptions import (
    AmbiguousProjectionError,
    InconsistentDatabaseError,
    InvalidInputError,
    InvalidTableError,
    NotARefinementError,
    NotASubsetError,
    UncoveredConditionError,
)
from app.logger import session_logger as logger
from app.math_engine.anytime import NO_DEADLINE, Deadline
from app.math_engine.decide import (
    Backend,
    CredalDescription,
    DecisionProblem,
    DecisionStep,
    admissible_set,
    condition_intervals,
)
from app.math_engine.kernel import (
    ONE,
    ZERO,
    LinearConstraint,
    LinearSystem,
    eq,
    format_rational,
    parse_rational,
)

ValueTuple = Tuple[str, ...]


@dataclass(frozen=True)
class AttributeSpec:
    name: str
    values: Tuple[str, ...]

    def __post_init__(self) -> None:
        values = tuple(self.values)
        object.__setattr__(self, "values", values)
        if not self.name:
            raise InvalidInputError("Attribute names must be nonempty")
        if len(values) < 2:
            raise InvalidInputError(
                "An attribute needs at least two values", {"attribute": self.name}
            )
        if len(set(values)) != len(values):
            raise InvalidInputError(
                "Attribute values must be unique", {"attribute": self.name, "values": list(values)}
            )


@dataclass(frozen=True)
class ProbTable:
    """Joint distribution over ``specs``; one cell per value combination."""

    specs: Tuple[AttributeSpec, ...]
    cells: Mapping[ValueTuple, Fraction] = field(hash=False)

    def __post_init__(self) -> None:
        specs = tuple(self.specs)
        object.__setattr__(self, "specs", specs)
        names = [s.name for s in specs]
        if not specs or len(set(names)) != len(names):
            raise InvalidTableError("Table attributes must be nonempty and distinct", {"attributes": names})
        expected = list(itertools.product(*(s.values for s in specs)))
        cells = {tuple(k): parse_rational(v) for k, v in self.cells.items()}
        expected_set = set(expected)
        missing = [k for k in expected if k not in cells]
        extra = [k for k in cells if k not in expected_set]
        if missing or extra:
            raise InvalidTableError(
                "Table cells must cover the attribute cross product exactly",
                {"attributes": names, "missing": missing[:5], "unexpected": extra[:5]},
            )
        if any(v < 0 for v in cells.values()):
            raise InvalidTableError("Table cells must be nonnegative", {"attributes": names})
        total = sum(cells.values(), ZERO)
        if total != ONE:
            raise InvalidTableError(
                "Table cells must sum to 1", {"attributes": names, "sum": format_rational(total)}
            )
        # Cross-product order
        object.__setattr__(self, "cells", {k: cells[k] for k in expected})

    @property
    def attributes(self) -> Tuple[str, ...]:
        return tuple(s.name for s in self.specs)

    @property
    def attribute_set(self) -> FrozenSet[str]:
        return frozenset(self.attributes)

    def probability(self, values: ValueTuple) -> Fraction:
        return self.cells[tuple(values)]

    def __str__(self) -> str:
        return "p(" + ", ".join(self.attributes) + ")"


@dataclass(frozen=True, eq=False)
class Scheme:
    """Collection of attribute sets; equality ignores order and repeats."""

    sets: Tuple[FrozenSet[str], ...]

    def __post_init__(self) -> None:
        unique: List[FrozenSet[str]] = []
        for s in self.sets:
            fs = frozenset(s)
            if not fs:
                raise InvalidInputError("Scheme elements must be nonempty")
            if fs not in unique:
                unique.append(fs)
        object.__setattr__(self, "sets", tuple(unique))

    @classmethod
    def of(cls, sets: Iterable[Iterable[str]]) -> "Scheme":
        return cls(tuple(frozenset(s) for s in sets))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Scheme):
            return NotImplemented
        return set(self.sets) == set(other.sets)

    def __hash__(self) -> int:
        return hash(frozenset(self.sets))

    def __iter__(self) -> Iterator[FrozenSet[str]]:
        return iter(self.sets)

    def __len__(self) -> int:
        return len(self.sets)

    @property
    def attributes(self) -> FrozenSet[str]:
        return frozenset().union(*self.sets)

    def __str__(self) -> str:
        inner = ", ".join("{" + ", ".join(sorted(s)) + "}" for s in self.sets)
        return "{" + inner + "}"


def project_table(table: ProbTable, onto: Iterable[str]) -> ProbTable:
    """Marginal of ``table`` on ``onto`` (kept in the table's attribute order)."""
    wanted = frozenset(onto)
    if not wanted or not wanted <= table.attribute_set:
        raise NotASubsetError(
            "Projection target must be a nonempty subset of the table's attributes",
            {"table": list(table.attributes), "onto": sorted(wanted)},
        )
    positions = [i for i, name in enumerate(table.attributes) if name in wanted]
    specs = tuple(table.specs[i] for i in positions)
    cells: Dict[ValueTuple, Fraction] = {
        key: ZERO for key in itertools.product(*(s.values for s in specs))
    }
    for key, value in table.cells.items():
        cells[tuple(key[i] for i in positions)] += value
    return ProbTable(specs, cells)


@dataclass(frozen=True)
class Database:
    specs: Tuple[AttributeSpec, ...]
    tables: Tuple[ProbTable, ...]

    def __post_init__(self) -> None:
        specs = tuple(self.specs)
        tables = tuple(self.tables)
        object.__setattr__(self, "specs", specs)
        object.__setattr__(self, "tables", tables)
        by_name = {s.name: s for s in specs}
        if len(by_name) != len(specs):
            raise InvalidTableError("Attribute specs must have distinct names")
        if not tables:
            raise InvalidTableError("A database needs at least one table")
        for index, table in enumerate(tables):
            for spec in table.specs:
                if by_name.get(spec.name) != spec:
                    raise InvalidTableError(
                        "Table attribute has no matching spec",
                        {"table": index, "attribute": spec.name},
                    )
        self._check_shared_marginals()

    def _check_shared_marginals(self) -> None:
        for (i, t1), (j, t2) in itertools.combinations(enumerate(self.tables), 2):
            for name in sorted(t1.attribute_set & t2.attribute_set):
                m1 = project_table(t1, (name,))
                m2 = project_table(t2, (name,))
                if m1.cells != m2.cells:
                    raise InconsistentDatabaseError(
                        "Tables disagree on a shared attribute",
                        {"attribute": name, "tables": [i, j]},
                    )

    @property
    def scheme(self) -> Scheme:
        return Scheme(tuple(t.attribute_set for t in self.tables))

    @property
    def attribute_names(self) -> Tuple[str, ...]:
        """Attributes used by some table, in spec order."""
        used = frozenset().union(*(t.attribute_set for t in self.tables))
        return tuple(s.name for s in self.specs if s.name in used)

    def spec(self, name: str) -> AttributeSpec:
        for s in self.specs:
            if s.name == name:
                return s
        raise InvalidInputError("Unknown attribute", {"attribute": name})

    def ordered(self, names: Iterable[str]) -> Tuple[str, ...]:
        wanted = set(names)
        return tuple(s.name for s in self.specs if s.name in wanted)


@dataclass(frozen=True)
class ConditionTuples:
    """Decision conditions as sets of value tuples over ``attributes``."""

    attributes: Tuple[str, ...]
    tuples: Tuple[FrozenSet[ValueTuple], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "attributes", tuple(self.attributes))
        tuples = tuple(frozenset(tuple(v) for v in group) for group in self.tuples)
        object.__setattr__(self, "tuples", tuples)
        seen: set = set()
        for j, group in enumerate(tuples):
            if not group:
                raise InvalidInputError("Every condition needs at least one tuple", {"condition": j})
            if any(len(v) != len(self.attributes) for v in group):
                raise InvalidInputError(
                    "Condition tuples must match the condition attributes", {"condition": j}
                )
            if seen & group:
                raise InvalidInputError("Conditions must be disjoint", {"condition": j})
            seen |= group


def is_refinement(s: Scheme, s_prime: Scheme) -> bool:
    """True iff every set of ``s`` lies inside some set of ``s_prime``."""
    return all(any(v <= w for w in s_prime) for v in s)


def _aligned(table: ProbTable, order: Sequence[str]) -> Dict[ValueTuple, Fraction]:
    """Cells re-keyed with attributes in ``order``."""
    positions = [table.attributes.index(name) for name in order]
    return {tuple(key[i] for i in positions): v for key, v in table.cells.items()}


def project_db(db: Database, s: Scheme) -> Database:
    """Project ``db`` onto a refinement of its scheme, one table per element of ``s``."""
    if not is_refinement(s, db.scheme):
        raise NotARefinementError(
            "Scheme is not a refinement of the database scheme",
            {"scheme": str(s), "database": str(db.scheme)},
        )
    tables = []
    for target in s:
        covering = [t for t in db.tables if target <= t.attribute_set]
        projected = project_table(covering[0], target)
        for other in covering[1:]:
            if _aligned(project_table(other, target), projected.attributes) != projected.cells:
                raise AmbiguousProjectionError(
                    "Covering tables give different marginals",
                    {"attributes": sorted(target)},
                )
        tables.append(projected)
    used = frozenset().union(*(t.attribute_set for t in tables))
    return Database(tuple(spec for spec in db.specs if spec.name in used), tuple(tables))


def extension_variables(db: Database, over: Sequence[str]) -> List[ValueTuple]:
    """Joint tuples over ``over`` in lexicographic order."""
    return list(itertools.product(*(db.spec(name).values for name in over)))


def extension_system(
    db: Database,
    over: Optional[Sequence[str]] = None,
    conditions: Optional[ConditionTuples] = None,
) -> CredalDescription:
    """Marginal-equality system of the database over the joint of ``over``.

    One variable per joint tuple, one equality per table cell. The condition
    map sums, per condition, the joint tuples whose condition attributes match.
    """
    names = tuple(over) if over is not None else db.attribute_names
    for name in names:
        db.spec(name)
    missing = [t.attributes for t in db.tables if not t.attribute_set <= set(names)]
    if missing:
        raise InvalidInputError(
            "Extension attributes must include every table's attributes",
            {"over": list(names), "uncovered_tables": [list(m) for m in missing]},
        )

    variables = extension_variables(db, names)
    position = {name: i for i, name in enumerate(names)}
    rows: List[LinearConstraint] = []
    for table in db.tables:
        columns = [position[name] for name in table.attributes]
        for key, value in table.cells.items():
            coefficients = [
                ONE if tuple(v[c] for c in columns) == key else ZERO for v in variables
            ]
            rows.append(eq(coefficients, value))

    condition_map: Tuple[FrozenSet[int], ...] = ()
    if conditions is not None:
        absent = [a for a in conditions.attributes if a not in position]
        if absent:
            raise UncoveredConditionError(
                "Condition attributes are missing from the extension", {"attributes": absent}
            )
        columns = [position[a] for a in conditions.attributes]
        condition_map = tuple(
            frozenset(
                k for k, v in enumerate(variables) if tuple(v[c] for c in columns) in group
            )
            for group in conditions.tuples
        )
    logger.debug(
        "Extension system built",
        attributes=list(names),
        variables=len(variables),
        equalities=len(rows),
    )
    return CredalDescription(LinearSystem(len(variables), tuple(rows)), condition_map)


def scheme_ladder(db: Database, v_c: Iterable[str]) -> List[Scheme]:
    """Projection schemes from cheapest to the full database scheme.

    Singletons of the condition attributes, then table sets cut down to the
    condition attributes, then whole tables touching them, then everything.
    Consecutive duplicates are dropped.
    """
    conditions = frozenset(v_c)
    covered = db.scheme.attributes
    uncovered = sorted(conditions - covered)
    if uncovered:
        raise UncoveredConditionError(
            "Condition attributes appear in no table", {"attributes": uncovered}
        )
    ordered = db.ordered(conditions)
    full = db.scheme
    candidates = [
        Scheme.of([name] for name in ordered),
        Scheme(tuple(v & conditions for v in full if v & conditions)),
        Scheme(tuple(v for v in full if v & conditions)),
        full,
    ]
    ladder: List[Scheme] = []
    for scheme in candidates:
        if not ladder or ladder[-1] != scheme:
            ladder.append(scheme)
    return ladder


def anytime_decide_pdb(
    problem: DecisionProblem,
    db: Database,
    conditions: ConditionTuples,
    deadline: Deadline = NO_DEADLINE,
    stop_on_singleton: bool = True,
) -> Iterator[DecisionStep]:
    """Walk the scheme ladder, emitting the admissible set at each rung."""
    if len(conditions.tuples) != problem.n:
        raise InvalidInputError(
            "Need one tuple set per decision condition",
            {"conditions": problem.n, "mapped": len(conditions.tuples)},
        )
    current: Sequence[str] = problem.actions
    for rung, scheme in enumerate(scheme_ladder(db, conditions.attributes), start=1):
        if deadline.expired():
            logger.warning("Deadline reached", backend=Backend.PDB.value, rungs=rung - 1)
            return
        projected = project_db(db, scheme)
        over = db.ordered(scheme.attributes | frozenset(conditions.attributes))
        credal = extension_system(projected, over, conditions)
        admissible = admissible_set(
            problem,
            credal,
            candidates=current,
            provenance=f"extension of {scheme} ({credal.system.variable_count} unknowns)",
        )
        current = admissible.actions
        intervals = condition_intervals(problem, credal)
        step = DecisionStep(
            rung, Backend.PDB, admissible, tuple(zip(problem.conditions, intervals)), credal
        )
        logger.info(
            "Rung evaluated",
            rung=rung,
            scheme=str(scheme),
            admissible=list(admissible.actions),
        )
        yield step
        if stop_on_singleton and len(admissible) == 1:
            return


__all__ = [
    "AttributeSpec",
    "ConditionTuples",
    "Database",
    "ProbTable",
    "Scheme",
    "anytime_decide_pdb",
    "extension_system",
    "extension_variables",
    "is_refinement",
    "project_db",
    "project_table",
    "scheme_ladder",
]
