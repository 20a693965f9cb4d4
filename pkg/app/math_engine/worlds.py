"""Possible-worlds construction by semantic tree, and exact entailed bounds.

A leaf is a class of worlds: a truth-vector over the sentences currently in
the tree that some atom assignment realizes. Leaves are kept in depth-first
order with the true branch first, so column ``k`` of the world matrix is
leaf ``k``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from app.config import get_settings
from app.exceptions import (
    ConditionNotDeterminedError,
    DegenerateConditionsError,
    DuplicateSentenceError,
    InvalidInputError,
    LeafLimitExceededError,
)
from app.logger import session_logger as logger
from app.math_engine.kernel import (
    ONE,
    ZERO,
    Interval,
    LinearConstraint,
    LinearSystem,
    Sense,
    ge,
    indicator,
    le,
    lp_optimize,
)
from app.math_engine.logic import Formula, consistent, determined_truth


class TreeMode(str, Enum):
    TARGET_FIRST = "target_first"
    CONDITION_FIRST = "condition_first"


@dataclass(frozen=True)
class TargetFirst:
    """Root the tree at the target sentence."""

    target: Formula


@dataclass(frozen=True)
class ConditionFirst:
    """First n levels are the mutually exclusive, exhaustive decision conditions."""

    conditions: Tuple[Formula, ...]

    def __post_init__(self) -> None:
        conditions = tuple(self.conditions)
        object.__setattr__(self, "conditions", conditions)
        if len(conditions) < 2:
            raise DegenerateConditionsError(
                "At least two conditions are required", {"count": len(conditions)}
            )
        if len(set(conditions)) != len(conditions):
            raise DegenerateConditionsError(
                "Conditions must be pairwise distinct",
                {"conditions": [str(c) for c in conditions]},
            )


Layout = Union[TargetFirst, ConditionFirst]


@dataclass(frozen=True)
class WorldClass:
    labels: Tuple[bool, ...]

    def labeled(self, sentences: Sequence[Formula]) -> List[Tuple[Formula, bool]]:
        return list(zip(sentences, self.labels))


@dataclass(frozen=True)
class SemanticTree:
    sentences: Tuple[Formula, ...]
    leaves: Tuple[WorldClass, ...]
    mode: TreeMode
    condition_count: int = 0

    @property
    def leaf_count(self) -> int:
        return len(self.leaves)

    def index_of(self, sentence: Formula) -> int:
        try:
            return self.sentences.index(sentence)
        except ValueError:
            raise InvalidInputError(
                "Sentence is not in the tree", {"sentence": str(sentence)}
            ) from None

    def true_leaves(self, sentence_index: int) -> Tuple[int, ...]:
        return tuple(k for k, leaf in enumerate(self.leaves) if leaf.labels[sentence_index])


@dataclass(frozen=True)
class WorldProbabilitySystem:
    tree: SemanticTree
    system: LinearSystem


def _check_limit(count: int, leaf_limit: Optional[int]) -> None:
    limit = leaf_limit if leaf_limit is not None else get_settings().leaf_limit
    if count > limit:
        raise LeafLimitExceededError(
            "Semantic tree exceeds the leaf limit", {"leaves": count, "limit": limit}
        )


def tree_init(
    layout: Layout,
    leaf_limit: Optional[int] = None,
    atom_limit: Optional[int] = None,
) -> SemanticTree:
    """Initial tree: target true/false, or one live node per condition."""
    if isinstance(layout, TargetFirst):
        sentences: Tuple[Formula, ...] = (layout.target,)
        candidates = [(True,), (False,)]
        mode, n = TreeMode.TARGET_FIRST, 0
    else:
        sentences = layout.conditions
        n = len(sentences)
        candidates = [tuple(j == i for j in range(n)) for i in range(n)]
        mode = TreeMode.CONDITION_FIRST

    leaves = tuple(
        WorldClass(labels)
        for labels in candidates
        if consistent(list(zip(sentences, labels)), atom_limit)
    )
    _check_limit(len(leaves), leaf_limit)
    return SemanticTree(sentences, leaves, mode, n)


def tree_add_sentence(
    tree: SemanticTree,
    sentence: Formula,
    leaf_limit: Optional[int] = None,
    atom_limit: Optional[int] = None,
) -> SemanticTree:
    """Split every live leaf on ``sentence`` and prune inconsistent children."""
    if sentence in tree.sentences:
        raise DuplicateSentenceError(
            "Sentence is already in the tree", {"sentence": str(sentence)}
        )
    leaves: List[WorldClass] = []
    for leaf in tree.leaves:
        base = leaf.labeled(tree.sentences)
        for label in (True, False):
            if consistent([*base, (sentence, label)], atom_limit):
                leaves.append(WorldClass(leaf.labels + (label,)))
    _check_limit(len(leaves), leaf_limit)
    logger.debug(
        "Sentence added to semantic tree",
        sentence=str(sentence),
        leaves_before=tree.leaf_count,
        leaves_after=len(leaves),
    )
    return SemanticTree(tree.sentences + (sentence,), tuple(leaves), tree.mode, tree.condition_count)


def tree_from_sentences(
    layout: Layout,
    sentences: Iterable[Formula],
    leaf_limit: Optional[int] = None,
    atom_limit: Optional[int] = None,
) -> SemanticTree:
    tree = tree_init(layout, leaf_limit, atom_limit)
    for sentence in sentences:
        tree = tree_add_sentence(tree, sentence, leaf_limit, atom_limit)
    return tree


def _sentence_rows(tree: SemanticTree, index: int, bounds: Interval) -> List[LinearConstraint]:
    if not 0 <= index < len(tree.sentences):
        raise InvalidInputError(
            "Sentence index out of range", {"index": index, "sentences": len(tree.sentences)}
        )
    coefficients = indicator(tree.leaf_count, tree.true_leaves(index))
    rows = []
    if bounds.lower > ZERO:
        rows.append(ge(coefficients, bounds.lower))
    if bounds.upper < ONE:
        rows.append(le(coefficients, bounds.upper))
    return rows


def build_system(
    tree: SemanticTree, bounds: Sequence[Tuple[int, Interval]]
) -> WorldProbabilitySystem:
    """One variable per leaf; a lower and upper row per bounded sentence."""
    rows: List[LinearConstraint] = []
    for index, interval in bounds:
        rows.extend(_sentence_rows(tree, index, interval))
    return WorldProbabilitySystem(tree, LinearSystem(tree.leaf_count, tuple(rows)))


def entailed_bounds(
    tree: SemanticTree, bounds: Sequence[Tuple[int, Interval]], target_index: int
) -> Interval:
    """Tightest interval on the target implied by the bounded sentences.

    Raises InfeasibleError when the premise bounds admit no distribution.
    """
    system = build_system(tree, bounds).system
    if not 0 <= target_index < len(tree.sentences):
        raise InvalidInputError("Target index out of range", {"index": target_index})
    objective = indicator(tree.leaf_count, tree.true_leaves(target_index))
    lower = lp_optimize(system, objective, Sense.MIN)
    upper = lp_optimize(system, objective, Sense.MAX)
    return Interval(lower, upper)


def entailed_interval(
    statements: Sequence[Tuple[Formula, Interval]],
    target: Formula,
    leaf_limit: Optional[int] = None,
    atom_limit: Optional[int] = None,
) -> Interval:
    """Exact entailed interval on ``target`` from interval-labeled sentences."""
    tree = tree_init(TargetFirst(target), leaf_limit, atom_limit)
    for sentence, _ in statements:
        if sentence not in tree.sentences:
            tree = tree_add_sentence(tree, sentence, leaf_limit, atom_limit)
    bounds = [(tree.index_of(sentence), interval) for sentence, interval in statements]
    return entailed_bounds(tree, bounds, 0)


def condition_index_sets(
    tree: SemanticTree,
    conditions: Sequence[Formula],
    atom_limit: Optional[int] = None,
) -> Tuple[FrozenSet[int], ...]:
    """Leaf indices where each condition holds.

    Every condition must be decided (true or false) in every leaf.
    """
    result = []
    for condition in conditions:
        if condition in tree.sentences:
            result.append(frozenset(tree.true_leaves(tree.sentences.index(condition))))
            continue
        members = set()
        for k, leaf in enumerate(tree.leaves):
            truth = determined_truth(leaf.labeled(tree.sentences), condition, atom_limit)
            if truth is None:
                raise ConditionNotDeterminedError(
                    "Condition is not decided by a world class",
                    {"condition": str(condition), "leaf": k + 1},
                )
            if truth:
                members.add(k)
        result.append(frozenset(members))
    return tuple(result)


def format_matrix(tree: SemanticTree) -> str:
    """0/1 grid: one row per sentence, one column per leaf."""
    labels = [str(s) for s in tree.sentences]
    width = max((len(label) for label in labels), default=0)
    columns = [f"p{k + 1}" for k in range(tree.leaf_count)]
    col_width = max((len(c) for c in columns), default=1)
    lines = [" " * width + " | " + " ".join(c.rjust(col_width) for c in columns)]
    for i, label in enumerate(labels):
        cells = ("1" if leaf.labels[i] else "0" for leaf in tree.leaves)
        lines.append(label.ljust(width) + " | " + " ".join(c.rjust(col_width) for c in cells))
    return "\n".join(lines)


__all__ = [
    "ConditionFirst",
    "Layout",
    "SemanticTree",
    "TargetFirst",
    "TreeMode",
    "WorldClass",
    "WorldProbabilitySystem",
    "build_system",
    "condition_index_sets",
    "entailed_bounds",
    "entailed_interval",
    "format_matrix",
    "tree_add_sentence",
    "tree_from_sentences",
    "tree_init",
]
