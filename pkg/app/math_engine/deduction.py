"""Interval-labeled statements, four sound inference rules, and an anytime engine.

The engine applies one rule instance per step and keeps, for every sentence,
the tightest interval known so far. Reported intervals only ever narrow.

Agenda order (lowest key first):

* tier -1: pending multiple derivations (merging a new statement into the
  current one for the same sentence),
* tier 0: trivial derivation of each target,
* tier 1: work that produces a target or a goal sentence, grouped by the
  implication premise it serves; forward propagation before conjunction,
* tier 2: every other applicable instance, in premise order.

Goal sentences are antecedents (and their conjuncts) of implications whose
consequent is a target or another goal.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, Iterator, List, Optional, Sequence, Set, Tuple

from app.exceptions import (
    InconsistentPremisesError,
    InvalidInputError,
    SentenceMismatchError,
    ShapeMismatchError,
)
from app.logger import session_logger as logger
from app.math_engine.kernel import ONE, ZERO, Interval, format_rational
from app.math_engine.logic import And, Formula, Implies, conjuncts


class Rule(str, Enum):
    TRIVIAL = "trivial"
    FORWARD = "forward_implication"
    CONJUNCTION = "conjunction"
    MULTIPLE = "multiple"


@dataclass(frozen=True)
class Origin:
    """Where a statement came from: a premise, or a rule applied to parent ids."""

    rule: Optional[Rule] = None
    parents: Tuple[int, ...] = ()

    @property
    def is_premise(self) -> bool:
        return self.rule is None

    def __str__(self) -> str:
        if self.rule is None:
            return "premise"
        return f"{self.rule.value}({','.join(map(str, self.parents))})"


PREMISE = Origin()


@dataclass(frozen=True)
class ProbStatement:
    """``p(sentence) in bounds``."""

    sentence: Formula
    bounds: Interval
    origin: Origin = PREMISE

    def __str__(self) -> str:
        return f"p({self.sentence}) in {self.bounds}"


def rule_trivial(sentence: Formula) -> ProbStatement:
    return ProbStatement(sentence, Interval.unit(), Origin(Rule.TRIVIAL))


def rule_forward_implication(
    antecedent: ProbStatement, implication: ProbStatement
) -> ProbStatement:
    """From p(P) in [x,y] and p(P -> Q) in [u,v] derive p(Q) in [max(0, x+u-1), v]."""
    sentence = implication.sentence
    if not isinstance(sentence, Implies) or sentence.antecedent != antecedent.sentence:
        raise ShapeMismatchError(
            "Forward propagation needs an implication whose antecedent matches",
            {"antecedent": str(antecedent.sentence), "implication": str(sentence)},
        )
    x = antecedent.bounds.lower
    u, v = implication.bounds.lower, implication.bounds.upper
    return ProbStatement(
        sentence.consequent,
        Interval(max(ZERO, x + u - ONE), v),
        Origin(Rule.FORWARD),
    )


def rule_conjunction(s1: ProbStatement, s2: ProbStatement) -> ProbStatement:
    """p(A) in [x,y], p(B) in [u,v] give p(A & B) in [max(0, x+u-1), min(y,v)]."""
    x, y = s1.bounds.lower, s1.bounds.upper
    u, v = s2.bounds.lower, s2.bounds.upper
    return ProbStatement(
        And(s1.sentence, s2.sentence),
        Interval(max(ZERO, x + u - ONE), min(y, v)),
        Origin(Rule.CONJUNCTION),
    )


def rule_multiple(s1: ProbStatement, s2: ProbStatement) -> ProbStatement:
    """Intersect two intervals on the same sentence."""
    if s1.sentence != s2.sentence:
        raise SentenceMismatchError(
            "Multiple derivation needs statements on the same sentence",
            {"first": str(s1.sentence), "second": str(s2.sentence)},
        )
    merged = s1.bounds.intersection(s2.bounds)
    if merged is None:
        raise InconsistentPremisesError(
            "Statements on the same sentence have disjoint intervals",
            {"sentence": str(s1.sentence), "first": str(s1.bounds), "second": str(s2.bounds)},
        )
    return ProbStatement(s1.sentence, merged, Origin(Rule.MULTIPLE))


@dataclass(frozen=True)
class KnowledgeBase:
    statements: Tuple[ProbStatement, ...]
    target: Formula

    def __post_init__(self) -> None:
        object.__setattr__(self, "statements", tuple(self.statements))


@dataclass(frozen=True)
class DerivationStep:
    """One applied rule instance; ``statement_id`` is the produced statement's id."""

    index: int
    rule: Rule
    inputs: Tuple[int, ...]
    statement_id: int
    statement: ProbStatement


@dataclass(frozen=True)
class TraceStep:
    index: int
    rule: Rule
    inputs: Tuple[int, ...]
    statement_id: int
    produced: ProbStatement
    target_interval: Interval

    def render(self) -> str:
        return (
            f"step={self.index} rule={self.rule.value} "
            f"inputs={','.join(map(str, self.inputs)) or '-'} "
            f"produced=({self.statement_id}) {self.produced} "
            f"target={self.target_interval}"
        )

    def to_dict(self) -> dict:
        return {
            "step": self.index,
            "rule": self.rule.value,
            "inputs": list(self.inputs),
            "statement_id": self.statement_id,
            "sentence": str(self.produced.sentence),
            "lower": format_rational(self.produced.bounds.lower),
            "upper": format_rational(self.produced.bounds.upper),
            "target_lower": format_rational(self.target_interval.lower),
            "target_upper": format_rational(self.target_interval.upper),
        }


@dataclass(frozen=True)
class DeductionTrace:
    target: Formula
    steps: Tuple[TraceStep, ...]

    @property
    def intervals(self) -> List[Interval]:
        return [s.target_interval for s in self.steps]

    @property
    def final_interval(self) -> Interval:
        return self.steps[-1].target_interval if self.steps else Interval.unit()


@dataclass(frozen=True)
class _Instance:
    rule: Rule
    inputs: Tuple[int, ...]
    target: int = -1


@dataclass(order=True)
class _Entry:
    key: Tuple[int, int, int, Tuple[int, ...]]
    seq: int
    instance: _Instance = field(compare=False)


class DeductionEngine:
    """Stateful stepper over a premise list and one or more target sentences.

    Statement ids are 1-based: premises take 1..n in order, derived statements
    follow in production order.
    """

    def __init__(self, statements: Sequence[ProbStatement], targets: Sequence[Formula]):
        if not targets:
            raise InvalidInputError("Deduction needs at least one target sentence")
        self.targets: Tuple[Formula, ...] = tuple(targets)
        self._statements: List[ProbStatement] = []
        self._current: Dict[Formula, int] = {}
        self._tightest: Dict[Formula, Interval] = {}
        self._agenda: List[_Entry] = []
        self._seen: Set[_Instance] = set()
        self._seq = itertools.count()
        self._steps = 0

        premises = [replace(s, origin=PREMISE) for s in statements]
        self._premise_rank: Dict[Formula, int] = {}
        for index, s in enumerate(premises, start=1):
            self._premise_rank.setdefault(s.sentence, index)

        self._goal_anchor = self._goals(premises)
        self._useful = self._useful_sentences(premises)

        for index, s in enumerate(premises, start=1):
            self._record(s)
            if s.sentence in self._current:
                self._push(
                    _Instance(Rule.MULTIPLE, (self._current[s.sentence], index)),
                    (-1, 0, 0, (self._current[s.sentence], index)),
                )
            else:
                self._current[s.sentence] = index

        for t_index, target in enumerate(self.targets):
            self._push(_Instance(Rule.TRIVIAL, (), t_index), (0, t_index, 0, ()))

        for sentence, sid in list(self._current.items()):
            self._schedule_uses(sid)

    # -- static analysis -------------------------------------------------

    def _goals(self, premises: Sequence[ProbStatement]) -> Dict[Formula, int]:
        """Goal sentence -> smallest premise index of an implication it serves."""
        wanted: Set[Formula] = set(self.targets)
        anchors: Dict[Formula, int] = {}
        changed = True
        while changed:
            changed = False
            for index, s in enumerate(premises, start=1):
                f = s.sentence
                if isinstance(f, Implies) and f.consequent in wanted:
                    for g in conjuncts(f.antecedent):
                        if g not in anchors or index < anchors[g]:
                            anchors[g] = index
                            changed = True
                        wanted.add(g)
        return anchors

    def _useful_sentences(self, premises: Sequence[ProbStatement]) -> Set[Formula]:
        roots: List[Formula] = [s.sentence for s in premises] + list(self.targets)
        roots += list(self._goal_anchor)
        roots += [s.sentence.antecedent for s in premises if isinstance(s.sentence, Implies)]
        useful: Set[Formula] = set()
        for f in roots:
            useful.update(conjuncts(f))
        return useful

    # -- agenda ----------------------------------------------------------

    def _push(self, instance: _Instance, key: Tuple[int, int, int, Tuple[int, ...]]) -> None:
        if instance in self._seen:
            return
        self._seen.add(instance)
        heapq.heappush(self._agenda, _Entry(key, next(self._seq), instance))

    def _target_rank(self, sentence: Formula) -> Optional[int]:
        try:
            return self.targets.index(sentence)
        except ValueError:
            return None

    def _schedule_forward(self, antecedent_id: int, implication_id: int) -> None:
        implication = self._statements[implication_id - 1].sentence
        assert isinstance(implication, Implies)
        consequent = implication.consequent
        inputs = (antecedent_id, implication_id)
        if self._target_rank(consequent) is not None or consequent in self._goal_anchor:
            anchor = self._premise_rank.get(implication, implication_id)
            key = (1, anchor, 0, inputs)
        else:
            key = (2, 0, 0, inputs)
        self._push(_Instance(Rule.FORWARD, inputs), key)

    def _schedule_conjunction(self, left_id: int, right_id: int) -> None:
        left = self._statements[left_id - 1].sentence
        right = self._statements[right_id - 1].sentence
        produced = And(left, right)
        inputs = (left_id, right_id)
        if self._target_rank(produced) is not None:
            key = (1, 0, 1, inputs)
        elif produced in self._goal_anchor:
            key = (1, self._goal_anchor[produced], 1, inputs)
        else:
            key = (2, 0, 0, inputs)
        self._push(_Instance(Rule.CONJUNCTION, inputs), key)

    def _schedule_uses(self, sid: int) -> None:
        """Queue every instance in which the current statement ``sid`` takes part."""
        sentence = self._statements[sid - 1].sentence
        for other, other_id in list(self._current.items()):
            if isinstance(other, Implies) and other.antecedent == sentence:
                self._schedule_forward(sid, other_id)
        if isinstance(sentence, Implies) and sentence.antecedent in self._current:
            self._schedule_forward(self._current[sentence.antecedent], sid)
        for useful in self._useful:
            if not isinstance(useful, And):
                continue
            if useful.left == sentence and useful.right in self._current:
                right_id = sid if useful.right == sentence else self._current[useful.right]
                self._schedule_conjunction(sid, right_id)
            if useful.right == sentence and useful.left in self._current:
                left_id = sid if useful.left == sentence else self._current[useful.left]
                self._schedule_conjunction(left_id, sid)

    # -- state -----------------------------------------------------------

    def _record(self, statement: ProbStatement) -> int:
        self._statements.append(statement)
        known = self._tightest.get(statement.sentence)
        if known is None:
            self._tightest[statement.sentence] = statement.bounds
        else:
            merged = known.intersection(statement.bounds)
            if merged is None:
                raise InconsistentPremisesError(
                    "Statements on the same sentence have disjoint intervals",
                    {
                        "sentence": str(statement.sentence),
                        "known": str(known),
                        "new": str(statement.bounds),
                    },
                )
            self._tightest[statement.sentence] = merged
        return len(self._statements)

    def statement(self, sid: int) -> ProbStatement:
        return self._statements[sid - 1]

    @property
    def statements(self) -> Tuple[ProbStatement, ...]:
        return tuple(self._statements)

    def interval(self, sentence: Formula) -> Interval:
        """Tightest interval known for ``sentence``; [0,1] when nothing mentions it."""
        return self._tightest.get(sentence, Interval.unit())

    @property
    def steps_taken(self) -> int:
        return self._steps

    @property
    def exhausted(self) -> bool:
        return self._peek() is None

    def _is_live(self, instance: _Instance) -> bool:
        if instance.rule in (Rule.TRIVIAL, Rule.MULTIPLE):
            return True
        return all(
            self._current.get(self._statements[i - 1].sentence) == i for i in instance.inputs
        )

    def _peek(self) -> Optional[_Entry]:
        while self._agenda and not self._is_live(self._agenda[0].instance):
            heapq.heappop(self._agenda)
        return self._agenda[0] if self._agenda else None

    # -- stepping --------------------------------------------------------

    def step(self) -> Optional[DerivationStep]:
        """Apply the next rule instance; None once the agenda is empty."""
        entry = self._peek()
        if entry is None:
            return None
        heapq.heappop(self._agenda)
        instance = entry.instance

        if instance.rule is Rule.TRIVIAL:
            inputs: Tuple[int, ...] = ()
            produced = rule_trivial(self.targets[instance.target])
        elif instance.rule is Rule.FORWARD:
            inputs = instance.inputs
            produced = rule_forward_implication(
                self.statement(inputs[0]), self.statement(inputs[1])
            )
        elif instance.rule is Rule.CONJUNCTION:
            inputs = instance.inputs
            produced = rule_conjunction(self.statement(inputs[0]), self.statement(inputs[1]))
        else:
            new_id = instance.inputs[1]
            sentence = self.statement(new_id).sentence
            inputs = (self._current[sentence], new_id)
            produced = rule_multiple(self.statement(inputs[0]), self.statement(inputs[1]))

        produced = replace(produced, origin=Origin(instance.rule, inputs))
        sid = self._record(produced)
        self._steps += 1
        sentence = produced.sentence

        if instance.rule is Rule.MULTIPLE:
            current = self.statement(self._current[sentence])
            if produced.bounds != current.bounds and current.bounds.contains(produced.bounds):
                self._current[sentence] = sid
                self._schedule_uses(sid)
        elif sentence in self._current:
            self._push(
                _Instance(Rule.MULTIPLE, (self._current[sentence], sid)),
                (-1, 0, 0, (self._current[sentence], sid)),
            )
        else:
            self._current[sentence] = sid
            self._schedule_uses(sid)

        logger.debug(
            "Deduction step",
            step=self._steps,
            rule=instance.rule.value,
            inputs=list(inputs),
            produced=str(produced),
        )
        return DerivationStep(self._steps, instance.rule, inputs, sid, produced)

    def run(self, budget: int) -> Iterator[DerivationStep]:
        for _ in range(budget):
            derived = self.step()
            if derived is None:
                return
            yield derived


def anytime_deduce(kb: KnowledgeBase, budget: int) -> DeductionTrace:
    """Apply up to ``budget`` rule instances, recording the target interval after each."""
    if budget < 1:
        raise InvalidInputError("Budget must be at least 1", {"budget": budget})
    engine = DeductionEngine(kb.statements, [kb.target])
    steps = [
        TraceStep(
            index=d.index,
            rule=d.rule,
            inputs=d.inputs,
            statement_id=d.statement_id,
            produced=d.statement,
            target_interval=engine.interval(kb.target),
        )
        for d in engine.run(budget)
    ]
    logger.info(
        "Deduction finished",
        target=str(kb.target),
        steps=len(steps),
        interval=str(engine.interval(kb.target)),
    )
    return DeductionTrace(kb.target, tuple(steps))


__all__ = [
    "DeductionEngine",
    "DeductionTrace",
    "DerivationStep",
    "KnowledgeBase",
    "Origin",
    "PREMISE",
    "ProbStatement",
    "Rule",
    "TraceStep",
    "anytime_deduce",
    "rule_conjunction",
    "rule_forward_implication",
    "rule_multiple",
    "rule_trivial",
]
