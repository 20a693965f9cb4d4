"""Decision problems, E-admissibility, and the anytime decision loops.

An action is E-admissible when it maximizes expected utility for at least one
distribution in the credal set. Each test is one exact feasibility problem:
the credal system plus ``m - 1`` weak inequalities saying the action does at
least as well as every rival. Ties admit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import combinations
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from app.exceptions import (
    DegenerateConditionsError,
    EmptyAdmissibleError,
    InfeasibleCredalError,
    InvalidInputError,
    ShapeMismatchError,
)
from app.logger import session_logger as logger
from app.math_engine.anytime import NO_DEADLINE, Deadline
from app.math_engine.deduction import DeductionEngine, ProbStatement
from app.math_engine.kernel import (
    ZERO,
    Interval,
    LinearConstraint,
    LinearSystem,
    RationalLike,
    Sense,
    format_rational,
    ge,
    le,
    lp_feasible,
    lp_optimize,
    parse_rational,
)
from app.math_engine.logic import And, Formula, disjoin
from app.math_engine.worlds import (
    ConditionFirst,
    Layout,
    SemanticTree,
    build_system,
    condition_index_sets,
    tree_add_sentence,
    tree_init,
)


@dataclass(frozen=True)
class DecisionProblem:
    """Utility matrix ``utility[i][j] = U(action i, condition j)``."""

    actions: Tuple[str, ...]
    conditions: Tuple[str, ...]
    utility: Tuple[Tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        actions = tuple(self.actions)
        conditions = tuple(self.conditions)
        if len(actions) < 2:
            raise InvalidInputError("A decision needs at least two actions", {"actions": len(actions)})
        if len(conditions) < 2:
            raise DegenerateConditionsError(
                "A decision needs at least two conditions", {"conditions": len(conditions)}
            )
        for kind, names in (("action", actions), ("condition", conditions)):
            if len(set(names)) != len(names):
                raise InvalidInputError(f"Duplicate {kind} names", {f"{kind}s": list(names)})
        if len(self.utility) != len(actions) or any(
            len(row) != len(conditions) for row in self.utility
        ):
            raise ShapeMismatchError(
                "Utility matrix must be actions x conditions",
                {"actions": len(actions), "conditions": len(conditions)},
            )
        utility = tuple(tuple(parse_rational(u) for u in row) for row in self.utility)
        object.__setattr__(self, "actions", actions)
        object.__setattr__(self, "conditions", conditions)
        object.__setattr__(self, "utility", utility)

    @classmethod
    def build(
        cls,
        actions: Sequence[str],
        conditions: Sequence[str],
        utility: Sequence[Sequence[RationalLike]],
    ) -> "DecisionProblem":
        return cls(
            tuple(actions),
            tuple(conditions),
            tuple(tuple(parse_rational(u) for u in row) for row in utility),
        )

    @property
    def m(self) -> int:
        return len(self.actions)

    @property
    def n(self) -> int:
        return len(self.conditions)

    def action_index(self, name: str) -> int:
        try:
            return self.actions.index(name)
        except ValueError:
            raise InvalidInputError("Unknown action", {"action": name}) from None

    def expected_utility(self, i: int, probabilities: Sequence[Fraction]) -> Fraction:
        return sum((u * p for u, p in zip(self.utility[i], probabilities)), ZERO)


@dataclass(frozen=True)
class CredalDescription:
    """A credal system plus, per condition, the variables summing to its probability."""

    system: LinearSystem
    condition_map: Tuple[FrozenSet[int], ...]

    def __post_init__(self) -> None:
        condition_map = tuple(frozenset(s) for s in self.condition_map)
        object.__setattr__(self, "condition_map", condition_map)
        seen: set = set()
        for j, indices in enumerate(condition_map):
            bad = [v for v in indices if not 0 <= v < self.system.variable_count]
            if bad:
                raise InvalidInputError(
                    "Condition refers to unknown variables", {"condition": j, "indices": bad}
                )
            if seen & indices:
                raise InvalidInputError(
                    "Conditions must not share variables",
                    {"condition": j, "shared": sorted(seen & indices)},
                )
            seen |= indices

    def condition_vector(self, weights: Sequence[Fraction]) -> Tuple[Fraction, ...]:
        """Coefficient row for ``sum_j weights[j] * p(c_j)``."""
        coefficients = [ZERO] * self.system.variable_count
        for w, indices in zip(weights, self.condition_map):
            for v in indices:
                coefficients[v] = w
        return tuple(coefficients)


@dataclass(frozen=True)
class AdmissibleSet:
    actions: Tuple[str, ...]
    provenance: str = ""

    def __contains__(self, action: object) -> bool:
        return action in self.actions

    def __len__(self) -> int:
        return len(self.actions)

    def issubset(self, other: "AdmissibleSet") -> bool:
        return set(self.actions) <= set(other.actions)

    def __str__(self) -> str:
        return "{" + ", ".join(self.actions) + "}"


class Backend(str, Enum):
    FH = "fh"
    NILSSON = "nilsson"
    PDB = "pdb"


@dataclass(frozen=True)
class DecisionStep:
    """One emission of an anytime decision loop."""

    index: int
    backend: Backend
    admissible: AdmissibleSet
    intervals: Tuple[Tuple[str, Interval], ...] = ()
    credal: Optional[CredalDescription] = field(default=None, compare=False, repr=False)
    tree: Optional[SemanticTree] = field(default=None, compare=False, repr=False)

    def render(self) -> str:
        parts = [
            f"step={self.index}",
            f"backend={self.backend.value}",
            f"admissible={','.join(self.admissible.actions)}",
        ]
        parts += [
            f"interval:{name}={format_rational(iv.lower)},{format_rational(iv.upper)}"
            for name, iv in self.intervals
        ]
        return " ".join(parts)

    def to_dict(self) -> dict:
        return {
            "step": self.index,
            "backend": self.backend.value,
            "admissible": list(self.admissible.actions),
            "provenance": self.admissible.provenance,
            "intervals": {
                name: [format_rational(iv.lower), format_rational(iv.upper)]
                for name, iv in self.intervals
            },
        }


# ---------------------------------------------------------------------------
# E-admissibility
# ---------------------------------------------------------------------------


def _check_map(problem: DecisionProblem, credal: CredalDescription) -> None:
    if len(credal.condition_map) != problem.n:
        raise ShapeMismatchError(
            "Credal description must map every condition",
            {"conditions": problem.n, "mapped": len(credal.condition_map)},
        )


def domain_inequalities(
    problem: DecisionProblem, i: int, credal: CredalDescription
) -> List[LinearConstraint]:
    """Rows saying action ``i`` is at least as good as every rival."""
    _check_map(problem, credal)
    if not 0 <= i < problem.m:
        raise InvalidInputError("Action index out of range", {"index": i})
    rows = []
    for k in range(problem.m):
        if k == i:
            continue
        diff = [a - b for a, b in zip(problem.utility[i], problem.utility[k])]
        rows.append(ge(credal.condition_vector(diff), 0))
    return rows


def _require_feasible(credal: CredalDescription) -> None:
    if not lp_feasible(credal.system):
        raise InfeasibleCredalError(
            "Credal set is empty", {"variables": credal.system.variable_count}
        )


def e_admissible(
    problem: DecisionProblem,
    i: int,
    credal: CredalDescription,
    check_credal: bool = True,
) -> bool:
    """True iff some distribution in the credal set makes action ``i`` optimal."""
    if check_credal:
        _require_feasible(credal)
    augmented = credal.system.with_constraints(*domain_inequalities(problem, i, credal))
    return lp_feasible(augmented)


def admissible_set(
    problem: DecisionProblem,
    credal: CredalDescription,
    candidates: Optional[Sequence[str]] = None,
    provenance: str = "",
) -> AdmissibleSet:
    """Every E-admissible action among ``candidates`` (default: all), in action order.

    Rivals are always all actions of the problem, whatever the candidate list.
    """
    _require_feasible(credal)
    pool = set(candidates) if candidates is not None else set(problem.actions)
    admitted = tuple(
        name
        for i, name in enumerate(problem.actions)
        if name in pool and e_admissible(problem, i, credal, check_credal=False)
    )
    return AdmissibleSet(admitted, provenance)


def exclusivity_statements(conditions: Sequence[Formula]) -> List[ProbStatement]:
    """Exhaustiveness at [1,1] plus pairwise exclusivity at [0,0]."""
    if len(conditions) < 2:
        raise DegenerateConditionsError(
            "At least two conditions are required", {"count": len(conditions)}
        )
    statements = [ProbStatement(disjoin(list(conditions)), Interval.point(1))]
    statements += [
        ProbStatement(And(a, b), Interval.point(0)) for a, b in combinations(conditions, 2)
    ]
    return statements


def bounds_snapshot_system(
    problem: DecisionProblem, intervals: Sequence[Interval]
) -> CredalDescription:
    """One variable per condition bounded by its current interval."""
    if len(intervals) != problem.n:
        raise ShapeMismatchError(
            "Need one interval per condition",
            {"conditions": problem.n, "intervals": len(intervals)},
        )
    rows: List[LinearConstraint] = []
    for j, interval in enumerate(intervals):
        unit = tuple(Fraction(int(k == j)) for k in range(problem.n))
        rows.append(ge(unit, interval.lower))
        rows.append(le(unit, interval.upper))
    system = LinearSystem(problem.n, tuple(rows))
    return CredalDescription(system, tuple(frozenset((j,)) for j in range(problem.n)))


def condition_intervals(
    problem: DecisionProblem, credal: CredalDescription
) -> Tuple[Interval, ...]:
    """Entailed [min, max] of each condition probability over the credal set."""
    _check_map(problem, credal)
    _require_feasible(credal)
    result = []
    for j in range(problem.n):
        weights = [Fraction(int(k == j)) for k in range(problem.n)]
        objective = credal.condition_vector(weights)
        result.append(
            Interval(
                lp_optimize(credal.system, objective, Sense.MIN),
                lp_optimize(credal.system, objective, Sense.MAX),
            )
        )
    return tuple(result)


# ---------------------------------------------------------------------------
# Anytime loops
# ---------------------------------------------------------------------------


def _named(problem: DecisionProblem, intervals: Sequence[Interval]) -> Tuple[Tuple[str, Interval], ...]:
    return tuple(zip(problem.conditions, intervals))


def _log_step(step: DecisionStep) -> None:
    logger.info(
        "Admissible set emitted",
        backend=step.backend.value,
        step=step.index,
        admissible=list(step.admissible.actions),
    )


def anytime_decide_fh(
    problem: DecisionProblem,
    statements: Sequence[ProbStatement],
    condition_sentences: Sequence[Optional[Formula]],
    budget: int,
    deadline: Deadline = NO_DEADLINE,
    stop_on_singleton: bool = True,
) -> Iterator[DecisionStep]:
    """Interleave deduction steps with admissibility over per-condition bounds.

    ``condition_sentences[j]`` is the sentence whose interval bounds
    condition ``j``; ``None`` leaves that condition at [0,1].
    """
    if budget < 1:
        raise InvalidInputError("Budget must be at least 1", {"budget": budget})
    if len(condition_sentences) != problem.n:
        raise ShapeMismatchError(
            "Need one condition sentence per condition",
            {"conditions": problem.n, "sentences": len(condition_sentences)},
        )
    targets = [s for s in condition_sentences if s is not None]
    if not targets:
        raise InvalidInputError("At least one condition needs a sentence")
    engine = DeductionEngine(statements, targets)
    current: Sequence[str] = problem.actions

    for _ in range(budget):
        if deadline.expired():
            logger.warning("Deadline reached", backend=Backend.FH.value, steps=engine.steps_taken)
            return
        derived = engine.step()
        if derived is None:
            return
        intervals = [
            engine.interval(s) if s is not None else Interval.unit() for s in condition_sentences
        ]
        credal = bounds_snapshot_system(problem, intervals)
        admissible = admissible_set(
            problem,
            credal,
            candidates=current,
            provenance=f"interval snapshot after {derived.rule.value} step {derived.index}",
        )
        current = admissible.actions
        step = DecisionStep(derived.index, Backend.FH, admissible, _named(problem, intervals), credal)
        _log_step(step)
        yield step
        if stop_on_singleton and len(admissible) == 1:
            return


def _world_credal(
    problem: DecisionProblem,
    tree: SemanticTree,
    bounds: Sequence[Tuple[int, Interval]],
    conditions: Sequence[Formula],
) -> CredalDescription:
    system = build_system(tree, bounds).system
    return CredalDescription(system, condition_index_sets(tree, conditions))


def anytime_decide_nilsson(
    problem: DecisionProblem,
    pool: Sequence[Tuple[Formula, Interval]],
    layout: Layout,
    conditions: Sequence[Formula],
    order: Optional[Sequence[int]] = None,
    deadline: Deadline = NO_DEADLINE,
    stop_on_singleton: bool = True,
    leaf_limit: Optional[int] = None,
) -> Iterator[DecisionStep]:
    """Grow a semantic tree one pool sentence at a time, re-testing admissibility.

    Emits once for the initial tree (step 0) and once per added sentence.
    ``conditions[j]`` is the formula for condition ``j``; in condition-first
    layout they must be the layout's conditions.
    """
    if len(conditions) != problem.n:
        raise ShapeMismatchError(
            "Need one condition formula per condition",
            {"conditions": problem.n, "formulas": len(conditions)},
        )
    if isinstance(layout, ConditionFirst) and tuple(conditions) != layout.conditions:
        raise InvalidInputError("Condition-first layout must use the decision conditions")
    sequence = list(order) if order is not None else list(range(len(pool)))
    if len(set(sequence)) != len(sequence) or any(not 0 <= k < len(pool) for k in sequence):
        raise InvalidInputError(
            "Order must list distinct pool indices", {"order": sequence, "pool": len(pool)}
        )

    tree = tree_init(layout, leaf_limit)
    bounds: List[Tuple[int, Interval]] = []
    current: Sequence[str] = problem.actions

    def emit(index: int, note: str) -> DecisionStep:
        credal = _world_credal(problem, tree, bounds, conditions)
        admissible = admissible_set(problem, credal, candidates=current, provenance=note)
        intervals = condition_intervals(problem, credal)
        step = DecisionStep(
            index, Backend.NILSSON, admissible, _named(problem, intervals), credal, tree
        )
        _log_step(step)
        return step

    step = emit(0, f"{tree.leaf_count} world classes")
    current = step.admissible.actions
    yield step
    if stop_on_singleton and len(current) == 1:
        return

    for position, k in enumerate(sequence, start=1):
        if deadline.expired():
            logger.warning("Deadline reached", backend=Backend.NILSSON.value, steps=position - 1)
            return
        sentence, interval = pool[k]
        if sentence not in tree.sentences:
            tree = tree_add_sentence(tree, sentence, leaf_limit)
        bounds.append((tree.sentences.index(sentence), interval))
        step = emit(position, f"{tree.leaf_count} world classes after adding {sentence}")
        current = step.admissible.actions
        yield step
        if stop_on_singleton and len(current) == 1:
            return


class Fallback(str, Enum):
    RANDOM = "random"
    MAXIMIN = "maximin"
    MIDPOINT = "midpoint"


def fallback_choose(
    problem: DecisionProblem,
    admissible: AdmissibleSet,
    criterion: Fallback,
    seed: Optional[int] = None,
    intervals: Optional[Sequence[Interval]] = None,
) -> str:
    """Pick one action from a set that admissibility could not narrow further."""
    criterion = Fallback(criterion)
    if not admissible.actions:
        raise EmptyAdmissibleError("No admissible action to choose from")
    indices = [problem.action_index(a) for a in admissible.actions]

    if criterion is Fallback.RANDOM:
        rng = np.random.default_rng(seed)
        return admissible.actions[int(rng.integers(len(admissible.actions)))]

    if criterion is Fallback.MAXIMIN:
        best = max(indices, key=lambda i: (min(problem.utility[i]), -i))
        return problem.actions[best]

    if intervals is None or len(intervals) != problem.n:
        raise InvalidInputError("Midpoint fallback needs one interval per condition")
    mids = [iv.midpoint for iv in intervals]
    total = sum(mids, ZERO)
    probabilities = (
        [m / total for m in mids] if total > 0 else [Fraction(1, problem.n)] * problem.n
    )
    best = max(indices, key=lambda i: (problem.expected_utility(i, probabilities), -i))
    return problem.actions[best]


def step_intervals(problem: DecisionProblem, step: DecisionStep) -> Tuple[Interval, ...]:
    """Condition intervals entailed by the step's credal set.

    A bounds snapshot leaves each condition at its deduced interval; the
    credal system also forces the probabilities to sum to one, which can
    narrow them further.
    """
    if step.credal is None:
        return tuple(iv for _, iv in step.intervals)
    return condition_intervals(problem, step.credal)


def expected_utilities(
    problem: DecisionProblem, probabilities: Sequence[RationalLike]
) -> Dict[str, Fraction]:
    probs = [parse_rational(p) for p in probabilities]
    return {a: problem.expected_utility(i, probs) for i, a in enumerate(problem.actions)}


__all__ = [
    "AdmissibleSet",
    "Backend",
    "CredalDescription",
    "DecisionProblem",
    "DecisionStep",
    "Fallback",
    "admissible_set",
    "anytime_decide_fh",
    "anytime_decide_nilsson",
    "bounds_snapshot_system",
    "condition_intervals",
    "domain_inequalities",
    "e_admissible",
    "exclusivity_statements",
    "expected_utilities",
    "fallback_choose",
    "step_intervals",
]
