"""Tests for the interval inference rules and the anytime deduction engine."""

from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from app.exceptions import (
    InconsistentPremisesError,
    InvalidInputError,
    SentenceMismatchError,
    ShapeMismatchError,
)
from app.math_engine.deduction import (
    DeductionEngine,
    KnowledgeBase,
    ProbStatement,
    Rule,
    anytime_deduce,
    rule_conjunction,
    rule_forward_implication,
    rule_multiple,
    rule_trivial,
)
from app.math_engine.kernel import Interval
from app.math_engine.logic import And, Atom, evaluate, parse_formula
from app.math_engine.worlds import entailed_interval

F = Fraction
RAIN = Atom("Rain")


def stmt(text, lower, upper):
    return ProbStatement(parse_formula(text), Interval(lower, upper))


class TestRules:
    def test_trivial(self):
        assert rule_trivial(RAIN).bounds == Interval.unit()

    def test_forward_implication(self):
        produced = rule_forward_implication(stmt("T", "0.95", "1"), stmt("T -> Rain", "0.4", "0.6"))
        assert produced.sentence == RAIN
        assert produced.bounds == Interval("0.35", "0.6")

    def test_forward_clamps_at_zero(self):
        produced = rule_forward_implication(stmt("T", "0.3", "1"), stmt("T -> Rain", "0.4", "0.6"))
        assert produced.bounds == Interval(0, "0.6")

    def test_forward_needs_matching_antecedent(self):
        with pytest.raises(ShapeMismatchError):
            rule_forward_implication(stmt("S", "1", "1"), stmt("T -> Rain", "0.4", "0.6"))
        with pytest.raises(ShapeMismatchError):
            rule_forward_implication(stmt("T", "1", "1"), stmt("T & Rain", "0.4", "0.6"))

    def test_conjunction(self):
        produced = rule_conjunction(stmt("P", "0.95", "1"), stmt("H", "0.95", "1"))
        assert produced.sentence == And(Atom("P"), Atom("H"))
        assert produced.bounds == Interval("0.9", "1")

    def test_conjunction_upper_is_min(self):
        produced = rule_conjunction(stmt("P", "0.2", "0.3"), stmt("H", "0.1", "0.7"))
        assert produced.bounds == Interval(0, "0.3")

    def test_multiple(self):
        produced = rule_multiple(stmt("Rain", "0.35", "0.6"), stmt("Rain", "0.55", "0.95"))
        assert produced.bounds == Interval("0.55", "0.6")

    def test_multiple_disjoint(self):
        with pytest.raises(InconsistentPremisesError):
            rule_multiple(stmt("Rain", "0.1", "0.2"), stmt("Rain", "0.5", "0.6"))

    def test_multiple_needs_same_sentence(self):
        with pytest.raises(SentenceMismatchError):
            rule_multiple(stmt("Rain", "0.1", "0.2"), stmt("Sun", "0.1", "0.2"))


class TestBeachDerivation:
    def test_trace(self, beach_kb):
        trace = anytime_deduce(beach_kb, 10)
        assert [s.rule for s in trace.steps] == [
            Rule.TRIVIAL,
            Rule.FORWARD,
            Rule.MULTIPLE,
            Rule.CONJUNCTION,
            Rule.FORWARD,
            Rule.MULTIPLE,
            Rule.FORWARD,
            Rule.MULTIPLE,
        ]
        assert trace.intervals[0] == Interval.unit()
        assert trace.intervals[1] == Interval("0.35", "0.6")
        assert trace.final_interval == Interval(F(11, 20), F(3, 5))

    def test_derived_statements(self, beach_kb):
        trace = anytime_deduce(beach_kb, 10)
        produced = {s.statement_id: s.produced for s in trace.steps}
        assert produced[9].bounds == Interval("0.35", "0.6")
        assert str(produced[11].sentence) == '"B. pressure < 30" & "Humidity > 80"'
        assert produced[11].bounds == Interval("0.9", "1")
        assert produced[12].bounds == Interval("0.55", "0.95")
        assert trace.steps[4].inputs == (11, 3)

    def test_budget_truncates(self, beach_kb):
        trace = anytime_deduce(beach_kb, 3)
        assert len(trace.steps) == 3
        assert trace.final_interval == Interval("0.35", "0.6")

    def test_render(self, beach_kb):
        step = anytime_deduce(beach_kb, 2).steps[1]
        assert step.render() == (
            "step=2 rule=forward_implication inputs=1,2 produced=(9) "
            "p(Rain) in [7/20, 3/5] target=[7/20, 3/5]"
        )
        assert step.to_dict()["target_lower"] == "7/20"

    def test_origins_point_at_parents(self, beach_kb):
        engine = DeductionEngine(beach_kb.statements, [RAIN])
        list(engine.run(10))
        assert engine.exhausted
        assert str(engine.statement(9).origin) == "forward_implication(1,2)"
        assert engine.statement(1).origin.is_premise


class TestEdgeCases:
    def test_target_never_mentioned(self):
        kb = KnowledgeBase((stmt("Sun", "0.2", "0.4"),), RAIN)
        trace = anytime_deduce(kb, 5)
        assert all(i == Interval.unit() for i in trace.intervals)

    def test_single_premise_on_target(self):
        kb = KnowledgeBase((stmt("Rain", "0.2", "0.3"),), RAIN)
        trace = anytime_deduce(kb, 5)
        assert [s.rule for s in trace.steps] == [Rule.TRIVIAL, Rule.MULTIPLE]
        assert trace.intervals[1] == Interval("0.2", "0.3")

    def test_empty_kb(self):
        trace = anytime_deduce(KnowledgeBase((), RAIN), 4)
        assert len(trace.steps) == 1
        assert trace.final_interval == Interval.unit()

    def test_contradictory_premises(self):
        kb = KnowledgeBase((stmt("Rain", "0.1", "0.2"), stmt("Rain", "0.5", "0.6")), RAIN)
        with pytest.raises(InconsistentPremisesError):
            anytime_deduce(kb, 5)

    def test_budget_must_be_positive(self):
        with pytest.raises(InvalidInputError):
            anytime_deduce(KnowledgeBase((), RAIN), 0)

    def test_engine_needs_target(self):
        with pytest.raises(InvalidInputError):
            DeductionEngine([], [])


# Random knowledge bases built around a hidden distribution over six atoms,
# so every premise set is satisfiable.

ATOMS = ("A", "B", "C", "D", "E", "G")
SHAPES = [
    "{0}",
    "!{0}",
    "{0} -> {1}",
    "{0} & {1}",
    "{0} | {1}",
    "({0} & {1}) -> {2}",
    "{0} -> ({1} | {2})",
]
WORLDS = [dict(zip(ATOMS, values)) for values in product((True, False), repeat=len(ATOMS))]
SLACK = [F(0), F(1, 20), F(1, 10), F(1, 4), F(1, 2)]


@st.composite
def sentence_texts(draw):
    shape = draw(st.sampled_from(SHAPES))
    names = draw(st.lists(st.sampled_from(ATOMS), min_size=3, max_size=3, unique=True))
    return shape.format(*names)


@st.composite
def satisfiable_kbs(draw):
    support = draw(st.lists(st.integers(0, len(WORLDS) - 1), min_size=1, max_size=10))
    weights = [0] * len(WORLDS)
    for index in support:
        weights[index] += draw(st.integers(1, 6))
    total = sum(weights)
    mass = [F(w, total) for w in weights]
    texts = draw(st.lists(sentence_texts(), min_size=1, max_size=6))
    statements = []
    for text in texts:
        sentence = parse_formula(text)
        p = sum((m for m, world in zip(mass, WORLDS) if evaluate(sentence, world)), F(0))
        lower = max(F(0), p - draw(st.sampled_from(SLACK)))
        upper = min(F(1), p + draw(st.sampled_from(SLACK)))
        statements.append(ProbStatement(sentence, Interval(lower, upper)))
    target = parse_formula(draw(st.sampled_from(["A", "D", "G", "A & B", "C | E"])))
    truth = sum((m for m, world in zip(mass, WORLDS) if evaluate(target, world)), F(0))
    return KnowledgeBase(tuple(statements), target), truth


@pytest.mark.properties
class TestDeductionProperties:
    @given(satisfiable_kbs(), st.integers(1, 30))
    @settings(max_examples=200, deadline=None)
    def test_sound_at_every_step(self, case, budget):
        kb, truth = case
        trace = anytime_deduce(kb, budget)
        entailed = entailed_interval([(s.sentence, s.bounds) for s in kb.statements], kb.target)
        for interval in trace.intervals:
            assert interval.contains(entailed)
            assert interval.lower <= truth <= interval.upper

    @given(satisfiable_kbs(), st.integers(1, 30))
    @settings(max_examples=200, deadline=None)
    def test_intervals_only_narrow(self, case, budget):
        kb, _ = case
        intervals = anytime_deduce(kb, budget).intervals
        for before, after in zip(intervals, intervals[1:]):
            assert before.contains(after)
