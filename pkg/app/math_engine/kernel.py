"""Exact rational scalars, probability intervals, linear systems and an LP oracle.

Every admissibility decision in the package goes through this module, so it
never touches floating point: scalars are ``fractions.Fraction`` and the solver
is a two-phase tableau simplex with Bland's anti-cycling rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from decimal import Decimal
from enum import Enum
from fractions import Fraction
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from app.exceptions import (
    InfeasibleError,
    InvalidInputError,
    MalformedSystemError,
    UnboundedError,
)
from app.logger import session_logger as logger

Rational = Fraction
RationalLike = Union[int, str, Fraction, Decimal, float]

ZERO = Fraction(0)
ONE = Fraction(1)


def parse_rational(value: RationalLike) -> Fraction:
    """Convert ``value`` to an exact Fraction.

    Accepts ints, Fractions, Decimals, ``"p/q"`` and decimal strings
    (``"0.65"`` becomes 13/20). Floats are read through their shortest repr so
    ``0.1`` becomes 1/10 rather than the binary approximation.
    """
    if isinstance(value, bool):
        raise InvalidInputError("Booleans are not rational numbers", {"value": value})
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Decimal):
        if not value.is_finite():
            raise InvalidInputError("Non-finite number", {"value": str(value)})
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise InvalidInputError("Non-finite number", {"value": value})
        return Fraction(repr(value))
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise InvalidInputError("Empty string is not a number")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as e:
            raise InvalidInputError(f"Not a rational number: {value!r}", {"value": value}) from e
    raise InvalidInputError(
        f"Unsupported numeric type {type(value).__name__}", {"value": repr(value)}
    )


def format_rational(value: Fraction) -> str:
    """Render as ``p/q`` (or a plain integer)."""
    return str(Fraction(value))


@dataclass(frozen=True)
class Interval:
    """Closed probability interval [lower, upper] with 0 <= lower <= upper <= 1."""

    lower: Fraction
    upper: Fraction

    def __post_init__(self) -> None:
        lower = parse_rational(self.lower)
        upper = parse_rational(self.upper)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if not (ZERO <= lower <= upper <= ONE):
            raise InvalidInputError(
                "Interval bounds must satisfy 0 <= lower <= upper <= 1",
                {"lower": format_rational(lower), "upper": format_rational(upper)},
            )

    @classmethod
    def unit(cls) -> "Interval":
        return cls(ZERO, ONE)

    @classmethod
    def point(cls, value: RationalLike) -> "Interval":
        v = parse_rational(value)
        return cls(v, v)

    def contains(self, other: "Interval") -> bool:
        """True iff ``other`` lies inside this interval."""
        return self.lower <= other.lower and other.upper <= self.upper

    def issubset(self, other: "Interval") -> bool:
        return other.contains(self)

    def intersection(self, other: "Interval") -> Optional["Interval"]:
        lower = max(self.lower, other.lower)
        upper = min(self.upper, other.upper)
        if lower > upper:
            return None
        return Interval(lower, upper)

    @property
    def midpoint(self) -> Fraction:
        return (self.lower + self.upper) / 2

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    @property
    def is_vacuous(self) -> bool:
        return self.lower == ZERO and self.upper == ONE

    def __str__(self) -> str:
        return f"[{format_rational(self.lower)}, {format_rational(self.upper)}]"


class Relation(str, Enum):
    EQ = "="
    GE = ">="
    LE = "<="

    def holds(self, lhs: Fraction, rhs: Fraction) -> bool:
        if self is Relation.EQ:
            return lhs == rhs
        if self is Relation.GE:
            return lhs >= rhs
        return lhs <= rhs


class Sense(str, Enum):
    MIN = "min"
    MAX = "max"


def _as_tuple(values: Iterable[RationalLike]) -> Tuple[Fraction, ...]:
    return tuple(parse_rational(v) for v in values)


@dataclass(frozen=True)
class LinearConstraint:
    """One row ``coefficients . x  <relation>  rhs``."""

    coefficients: Tuple[Fraction, ...]
    relation: Relation
    rhs: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "coefficients", _as_tuple(self.coefficients))
        object.__setattr__(self, "relation", Relation(self.relation))
        object.__setattr__(self, "rhs", parse_rational(self.rhs))

    def lhs(self, point: Sequence[Fraction]) -> Fraction:
        return sum((c * x for c, x in zip(self.coefficients, point)), ZERO)

    def satisfied_by(self, point: Sequence[Fraction]) -> bool:
        return self.relation.holds(self.lhs(point), self.rhs)

    def __str__(self) -> str:
        terms = [
            f"{format_rational(c)}*x{j + 1}" for j, c in enumerate(self.coefficients) if c != 0
        ]
        return f"{' + '.join(terms) or '0'} {self.relation.value} {format_rational(self.rhs)}"


@dataclass(frozen=True)
class LinearSystem:
    """Constraint set over ``variable_count`` unknowns; its solution set is a credal set.

    With ``normalized`` on, the unit-sum row is implied and appears exactly once
    in :meth:`rows`; it is never stored in ``constraints``.
    """

    variable_count: int
    constraints: Tuple[LinearConstraint, ...] = field(default_factory=tuple)
    nonneg: bool = True
    normalized: bool = True

    def __post_init__(self) -> None:
        if self.variable_count < 1:
            raise MalformedSystemError(
                "A linear system needs at least one variable",
                {"variable_count": self.variable_count},
            )
        object.__setattr__(self, "constraints", tuple(self.constraints))
        for index, constraint in enumerate(self.constraints):
            if len(constraint.coefficients) != self.variable_count:
                raise MalformedSystemError(
                    "Constraint length does not match variable count",
                    {
                        "row": index,
                        "length": len(constraint.coefficients),
                        "variable_count": self.variable_count,
                    },
                )

    def unit_sum(self) -> LinearConstraint:
        return LinearConstraint((ONE,) * self.variable_count, Relation.EQ, ONE)

    def rows(self) -> Iterator[LinearConstraint]:
        yield from self.constraints
        if self.normalized:
            yield self.unit_sum()

    def with_constraints(self, *extra: LinearConstraint) -> "LinearSystem":
        return replace(self, constraints=self.constraints + tuple(extra))

    def satisfied_by(self, point: Sequence[RationalLike]) -> bool:
        values = _as_tuple(point)
        if len(values) != self.variable_count:
            return False
        if self.nonneg and any(v < 0 for v in values):
            return False
        return all(row.satisfied_by(values) for row in self.rows())


@dataclass(frozen=True)
class LPSolution:
    value: Fraction
    point: Tuple[Fraction, ...]


class _Tableau:
    """Dense tableau in canonical form: basic columns are unit vectors."""

    def __init__(
        self,
        matrix: List[List[Fraction]],
        rhs: List[Fraction],
        basis: List[int],
        width: int,
    ):
        self.matrix = matrix
        self.rhs = rhs
        self.basis = basis
        self.width = width

    def pivot(self, row: int, col: int) -> None:
        pivot_row = self.matrix[row]
        piv = pivot_row[col]
        if piv != ONE:
            self.matrix[row] = pivot_row = [v / piv for v in pivot_row]
            self.rhs[row] /= piv
        for i, other in enumerate(self.matrix):
            if i == row:
                continue
            factor = other[col]
            if factor == 0:
                continue
            self.matrix[i] = [a - factor * b for a, b in zip(other, pivot_row)]
            self.rhs[i] -= factor * self.rhs[row]
        self.basis[row] = col

    def reduced_costs(self, cost: Sequence[Fraction]) -> List[Fraction]:
        reduced = list(cost)
        for i, b in enumerate(self.basis):
            cb = cost[b]
            if cb == 0:
                continue
            row = self.matrix[i]
            for j in range(len(reduced)):
                if row[j] != 0:
                    reduced[j] -= cb * row[j]
        return reduced

    def objective(self, cost: Sequence[Fraction]) -> Fraction:
        return sum((cost[b] * self.rhs[i] for i, b in enumerate(self.basis)), ZERO)

    def minimize(self, cost: Sequence[Fraction], allowed: int) -> None:
        """Run Bland's rule over columns ``< allowed`` until optimal.

        Raises UnboundedError when an improving column has no positive entry.
        """
        while True:
            reduced = self.reduced_costs(cost)
            in_basis = set(self.basis)
            entering = next(
                (j for j in range(allowed) if j not in in_basis and reduced[j] < 0),
                None,
            )
            if entering is None:
                return
            best: Optional[Tuple[Fraction, int, int]] = None
            for i, row in enumerate(self.matrix):
                a = row[entering]
                if a > 0:
                    candidate = (self.rhs[i] / a, self.basis[i], i)
                    if best is None or candidate[:2] < best[:2]:
                        best = candidate
            if best is None:
                raise UnboundedError("Objective is unbounded over the feasible set")
            self.pivot(best[2], entering)

    def values(self) -> List[Fraction]:
        x = [ZERO] * self.width
        for i, b in enumerate(self.basis):
            x[b] = self.rhs[i]
        return x


def _standard_form(system: LinearSystem) -> Tuple[_Tableau, int]:
    """Build the phase-1 tableau.

    Column layout: structural columns (split as x+ / x- when ``nonneg`` is off),
    then one slack/surplus per inequality, then one artificial per row.
    Returns the tableau and the index of the first artificial column.
    """
    n = system.variable_count
    rows = list(system.rows())
    structural = n if system.nonneg else 2 * n
    inequality_rows = [i for i, r in enumerate(rows) if r.relation is not Relation.EQ]
    slack_of = {row: structural + k for k, row in enumerate(inequality_rows)}
    first_artificial = structural + len(inequality_rows)
    width = first_artificial + len(rows)

    matrix: List[List[Fraction]] = []
    rhs: List[Fraction] = []
    for i, constraint in enumerate(rows):
        line = [ZERO] * width
        for j, c in enumerate(constraint.coefficients):
            line[j] = c
            if not system.nonneg:
                line[n + j] = -c
        if i in slack_of:
            line[slack_of[i]] = ONE if constraint.relation is Relation.LE else -ONE
        b = constraint.rhs
        if b < 0:
            line = [-v for v in line]
            b = -b
        line[first_artificial + i] = ONE
        matrix.append(line)
        rhs.append(b)

    basis = [first_artificial + i for i in range(len(rows))]
    return _Tableau(matrix, rhs, basis, width), first_artificial


def _phase_one(system: LinearSystem) -> Tuple[_Tableau, int]:
    tableau, first_artificial = _standard_form(system)
    cost = [ZERO] * first_artificial + [ONE] * (tableau.width - first_artificial)
    tableau.minimize(cost, tableau.width)
    if tableau.objective(cost) != 0:
        raise InfeasibleError(
            "Linear system has no solution",
            {"variables": system.variable_count, "rows": len(tableau.rhs)},
        )

    # Drive zero-valued artificials out of the basis; drop rows that are redundant
    row = 0
    while row < len(tableau.basis):
        if tableau.basis[row] < first_artificial:
            row += 1
            continue
        col = next(
            (j for j in range(first_artificial) if tableau.matrix[row][j] != 0), None
        )
        if col is None:
            del tableau.matrix[row]
            del tableau.rhs[row]
            del tableau.basis[row]
            continue
        tableau.pivot(row, col)
        row += 1
    return tableau, first_artificial


def lp_feasible(system: LinearSystem) -> bool:
    """True iff the system has a solution, decided exactly."""
    try:
        _phase_one(system)
    except InfeasibleError:
        return False
    return True


def lp_solve(
    system: LinearSystem,
    objective: Sequence[RationalLike],
    sense: Union[Sense, str] = Sense.MIN,
) -> LPSolution:
    """Exact optimum of ``objective . x`` with an optimal point.

    Raises InfeasibleError when the system is empty and UnboundedError when the
    objective has no finite optimum (only possible with normalization off).
    """
    sense = Sense(sense)
    weights = _as_tuple(objective)
    n = system.variable_count
    if len(weights) != n:
        raise MalformedSystemError(
            "Objective length does not match variable count",
            {"length": len(weights), "variable_count": n},
        )

    tableau, first_artificial = _phase_one(system)
    sign = ONE if sense is Sense.MIN else -ONE
    cost = [ZERO] * tableau.width
    for j, w in enumerate(weights):
        cost[j] = sign * w
        if not system.nonneg:
            cost[n + j] = -sign * w
    tableau.minimize(cost, first_artificial)

    x = tableau.values()
    if system.nonneg:
        point = tuple(x[:n])
    else:
        point = tuple(x[j] - x[n + j] for j in range(n))
    value = sum((w * p for w, p in zip(weights, point)), ZERO)
    logger.debug(
        "LP solved",
        sense=sense.value,
        variables=n,
        rows=len(system.constraints),
        value=format_rational(value),
    )
    return LPSolution(value=value, point=point)


def lp_optimize(
    system: LinearSystem,
    objective: Sequence[RationalLike],
    sense: Union[Sense, str] = Sense.MIN,
) -> Fraction:
    """Exact optimum value of a linear objective over the system's solution set."""
    return lp_solve(system, objective, sense).value


def ge(coefficients: Iterable[RationalLike], rhs: RationalLike) -> LinearConstraint:
    return LinearConstraint(_as_tuple(coefficients), Relation.GE, parse_rational(rhs))


def le(coefficients: Iterable[RationalLike], rhs: RationalLike) -> LinearConstraint:
    return LinearConstraint(_as_tuple(coefficients), Relation.LE, parse_rational(rhs))


def eq(coefficients: Iterable[RationalLike], rhs: RationalLike) -> LinearConstraint:
    return LinearConstraint(_as_tuple(coefficients), Relation.EQ, parse_rational(rhs))


def indicator(size: int, indices: Iterable[int]) -> Tuple[Fraction, ...]:
    """0/1 coefficient vector selecting ``indices``."""
    chosen = set(indices)
    return tuple(ONE if j in chosen else ZERO for j in range(size))


__all__ = [
    "Interval",
    "LPSolution",
    "LinearConstraint",
    "LinearSystem",
    "Rational",
    "Relation",
    "Sense",
    "eq",
    "format_rational",
    "ge",
    "indicator",
    "le",
    "lp_feasible",
    "lp_optimize",
    "lp_solve",
    "parse_rational",
]
