"""Tests for probabilistic tables, projection, extension and the scheme ladder."""

from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from app.exceptions import (
    AmbiguousProjectionError,
    InconsistentDatabaseError,
    InvalidInputError,
    InvalidTableError,
    NotARefinementError,
    NotASubsetError,
    UncoveredConditionError,
)
from app.math_engine.decide import DecisionProblem, admissible_set
from app.math_engine.kernel import Interval, Sense, lp_optimize, lp_solve
from app.math_engine.pdb import (
    AttributeSpec,
    ConditionTuples,
    Database,
    ProbTable,
    Scheme,
    anytime_decide_pdb,
    extension_system,
    extension_variables,
    is_refinement,
    project_db,
    project_table,
    scheme_ladder,
)

F = Fraction
YES_NO = ("yes", "no")
RAIN = AttributeSpec("Rain", YES_NO)
SUN = AttributeSpec("Sun", YES_NO)


def table(specs, values):
    keys = list(product(*(s.values for s in specs)))
    return ProbTable(tuple(specs), dict(zip(keys, (F(v) for v in values))))


class TestProbTable:
    def test_cells_follow_cross_product_order(self):
        t = ProbTable((RAIN,), {("no",): F(1, 4), ("yes",): F(3, 4)})
        assert list(t.cells) == [("yes",), ("no",)]
        assert t.probability(("yes",)) == F(3, 4)
        assert str(t) == "p(Rain)"

    def test_must_sum_to_one(self):
        with pytest.raises(InvalidTableError) as exc:
            table([RAIN], ["0.5", "0.4"])
        assert exc.value.details["sum"] == "9/10"

    def test_missing_cell(self):
        with pytest.raises(InvalidTableError):
            ProbTable((RAIN,), {("yes",): F(1)})

    def test_negative_cell(self):
        with pytest.raises(InvalidTableError):
            table([RAIN], ["1.5", "-0.5"])

    def test_attribute_spec_checks(self):
        with pytest.raises(InvalidInputError):
            AttributeSpec("Rain", ("yes",))
        with pytest.raises(InvalidInputError):
            AttributeSpec("Rain", ("yes", "yes"))


class TestProjection:
    def test_marginals(self, train_db):
        p1, p2, p3, p4 = train_db.tables
        assert project_table(p1, ["Rain"]).cells == {("yes",): F(1, 2), ("no",): F(1, 2)}
        assert project_table(p2, ["Trains"]).cells == {("yes",): F(1, 2), ("no",): F(1, 2)}
        assert project_table(p3, ["Temperature"]).cells == {
            ("high",): F(7, 10),
            ("med",): F(1, 5),
            ("low",): F(1, 10),
        }
        assert project_table(p4, ["Humidity"]).cells == {("high",): F(3, 4), ("low",): F(1, 4)}

    def test_projection_needs_subset(self, train_db):
        with pytest.raises(NotASubsetError):
            project_table(train_db.tables[0], ["Trains"])
        with pytest.raises(NotASubsetError):
            project_table(train_db.tables[0], [])

    def test_project_db(self, train_db):
        projected = project_db(train_db, Scheme.of([["Rain"], ["Trains"]]))
        assert [t.attributes for t in projected.tables] == [("Rain",), ("Trains",)]
        assert [s.name for s in projected.specs] == ["Rain", "Trains"]

    def test_project_db_needs_refinement(self, train_db):
        with pytest.raises(NotARefinementError):
            project_db(train_db, Scheme.of([["Rain", "Trains"]]))

    def test_ambiguous_projection(self):
        first = table([RAIN, SUN], ["0.25", "0.25", "0.25", "0.25"])
        second = table([SUN, RAIN], ["0.5", "0", "0", "0.5"])
        db = Database((RAIN, SUN), (first, second))
        with pytest.raises(AmbiguousProjectionError):
            project_db(db, Scheme.of([["Rain", "Sun"]]))


class TestDatabase:
    def test_shared_marginals_must_agree(self):
        first = table([RAIN, SUN], ["0.25", "0.25", "0.25", "0.25"])
        second = table([RAIN], ["0.9", "0.1"])
        with pytest.raises(InconsistentDatabaseError) as exc:
            Database((RAIN, SUN), (first, second))
        assert exc.value.details["attribute"] == "Rain"

    def test_table_specs_must_match(self):
        other_rain = AttributeSpec("Rain", ("wet", "dry"))
        with pytest.raises(InvalidTableError):
            Database((RAIN,), (table([other_rain], ["0.5", "0.5"]),))

    def test_scheme(self, train_db):
        assert train_db.scheme == Scheme.of(
            [
                ["Rain", "No Phones"],
                ["No Phones", "Trains"],
                ["No Phones", "Temperature"],
                ["Temperature", "Humidity"],
            ]
        )
        assert train_db.attribute_names == ("Rain", "No Phones", "Trains", "Temperature", "Humidity")


class TestScheme:
    def test_equality_ignores_order_and_repeats(self):
        assert Scheme.of([["a"], ["b"], ["a"]]) == Scheme.of([["b"], ["a"]])
        assert len(Scheme.of([["a"], ["a"]])) == 1
        assert hash(Scheme.of([["a"], ["b"]])) == hash(Scheme.of([["b"], ["a"]]))

    def test_empty_element(self):
        with pytest.raises(InvalidInputError):
            Scheme.of([[]])

    def test_refinement(self):
        fine = Scheme.of([["a"], ["b"]])
        coarse = Scheme.of([["a", "b"], ["c"]])
        assert is_refinement(fine, coarse)
        assert not is_refinement(coarse, fine)
        assert is_refinement(coarse, coarse)


class TestExtension:
    def test_full_extension_size(self, train_db):
        credal = extension_system(train_db)
        assert credal.system.variable_count == 48
        assert len(credal.system.constraints) == 20

    def test_variables_are_lexicographic(self, train_db):
        assert extension_variables(train_db, ["Rain", "Trains"]) == [
            ("yes", "yes"),
            ("yes", "no"),
            ("no", "yes"),
            ("no", "no"),
        ]

    def test_condition_map(self, train_db, train_problem):
        projected = project_db(train_db, Scheme.of([["Rain"], ["Trains"]]))
        credal = extension_system(projected, ["Rain", "Trains"], train_problem.condition_tuples)
        assert credal.condition_map == tuple(frozenset({k}) for k in range(4))

    def test_over_must_cover_tables(self, train_db):
        with pytest.raises(InvalidInputError):
            extension_system(train_db, ["Rain", "Trains"])

    def test_conditions_must_be_in_extension(self, train_db, train_problem):
        projected = project_db(train_db, Scheme.of([["Rain", "No Phones"]]))
        with pytest.raises(UncoveredConditionError):
            extension_system(projected, ["Rain", "No Phones"], train_problem.condition_tuples)

    def test_rung_two_minimum(self, train_db, train_problem):
        p1, p2 = train_db.tables[:2]
        scheme = Scheme.of([p1.attributes, p2.attributes])
        projected = project_db(train_db, scheme)
        credal = extension_system(
            projected, train_db.ordered(scheme.attributes), train_problem.condition_tuples
        )
        objective = credal.condition_vector([F(1), F(0), F(0), F(0)])
        assert lp_optimize(credal.system, objective, Sense.MIN) == F(1, 20)


class TestConditionTuples:
    def test_must_be_disjoint(self):
        with pytest.raises(InvalidInputError):
            ConditionTuples(("Rain",), (frozenset({("yes",)}), frozenset({("yes",), ("no",)})))

    def test_width_must_match(self):
        with pytest.raises(InvalidInputError):
            ConditionTuples(("Rain",), (frozenset({("yes", "no")}), frozenset({("no",)})))

    def test_nonempty(self):
        with pytest.raises(InvalidInputError):
            ConditionTuples(("Rain",), (frozenset(), frozenset({("no",)})))


class TestSchemeLadder:
    def test_train_ladder(self, train_db):
        ladder = scheme_ladder(train_db, ["Rain", "Trains"])
        assert ladder == [
            Scheme.of([["Rain"], ["Trains"]]),
            Scheme.of([["Rain", "No Phones"], ["No Phones", "Trains"]]),
            train_db.scheme,
        ]

    def test_condition_equal_to_a_table(self, train_db):
        ladder = scheme_ladder(train_db, ["Temperature", "Humidity"])
        assert len(ladder) == 4
        assert ladder[1] == Scheme.of([["Temperature"], ["Temperature", "Humidity"]])
        assert frozenset({"Temperature", "Humidity"}) in ladder[2].sets
        assert ladder[-1] == train_db.scheme

    def test_uncovered_condition(self, train_db):
        with pytest.raises(UncoveredConditionError):
            scheme_ladder(train_db, ["Rain", "Wind"])

    def test_anytime_rungs(self, train_db, train_problem):
        steps = list(
            anytime_decide_pdb(train_problem.problem, train_db, train_problem.condition_tuples)
        )
        assert [s.admissible.actions for s in steps] == [("Go", "Don't go"), ("Don't go",)]
        assert dict(steps[0].intervals)["rain, trains"] == Interval(0, F(1, 2))
        assert steps[1].credal.system.variable_count == 8

    def test_condition_count_must_match(self, train_db):
        problem = DecisionProblem.build(["a", "b"], ["c1", "c2"], [[1, 0], [0, 1]])
        conditions = ConditionTuples(
            ("Rain",), (frozenset({("yes",)}), frozenset({("no",)}), frozenset({("x",)}))
        )
        with pytest.raises(InvalidInputError):
            list(anytime_decide_pdb(problem, train_db, conditions))


# Random databases whose tables are marginals of one hidden joint distribution.

NAMES = ("A", "B", "C")
SPECS = {name: AttributeSpec(name, ("0", "1")) for name in NAMES}
SUBSETS = [("A",), ("C",), ("A", "B"), ("B", "C"), ("A", "C"), ("A", "B", "C")]
JOINT_KEYS = list(product(("0", "1"), repeat=3))


def marginal(joint, attributes):
    positions = [NAMES.index(a) for a in attributes]
    cells = {key: F(0) for key in product(("0", "1"), repeat=len(attributes))}
    for key, mass in joint.items():
        cells[tuple(key[i] for i in positions)] += mass
    return cells


@st.composite
def consistent_databases(draw):
    weights = draw(st.lists(st.integers(0, 5), min_size=8, max_size=8).filter(any))
    total = sum(weights)
    joint = {key: F(w, total) for key, w in zip(JOINT_KEYS, weights)}
    subsets = draw(st.lists(st.sampled_from(SUBSETS), min_size=1, max_size=3, unique=True))
    tables = tuple(
        ProbTable(tuple(SPECS[a] for a in s), marginal(joint, s)) for s in subsets
    )
    db = Database(tuple(SPECS.values()), tables)

    covered = sorted(db.scheme.attributes, key=NAMES.index)
    attributes = tuple(
        draw(st.lists(st.sampled_from(covered), min_size=1, max_size=2, unique=True))
    )
    attributes = tuple(sorted(attributes, key=NAMES.index))
    keys = list(product(("0", "1"), repeat=len(attributes)))
    conditions = ConditionTuples(attributes, tuple(frozenset({k}) for k in keys))
    m = draw(st.integers(2, 3))
    utility = [[F(draw(st.integers(0, 8)), 8) for _ in keys] for _ in range(m)]
    problem = DecisionProblem.build(
        [f"a{i}" for i in range(m)], ["/".join(k) for k in keys], utility
    )
    truth = marginal(joint, attributes)
    return db, conditions, problem, [truth[k] for k in keys]


@pytest.mark.properties
class TestProjectionProperties:
    @given(consistent_databases())
    @settings(max_examples=100, deadline=None)
    def test_finer_schemes_admit_more(self, case):
        db, conditions, problem, truth = case
        sets = []
        for scheme in scheme_ladder(db, conditions.attributes):
            projected = project_db(db, scheme)
            over = db.ordered(scheme.attributes | frozenset(conditions.attributes))
            sets.append(admissible_set(problem, extension_system(projected, over, conditions)))
        for coarse, fine in zip(sets, sets[1:]):
            assert fine.issubset(coarse)

        best = max(problem.expected_utility(i, truth) for i in range(problem.m))
        optimal = {
            a for i, a in enumerate(problem.actions) if problem.expected_utility(i, truth) == best
        }
        for admitted in sets:
            assert optimal <= set(admitted.actions)

    @given(consistent_databases(), st.data())
    @settings(max_examples=150, deadline=None)
    def test_projection_composes(self, case, data):
        db = case[0]
        source = data.draw(st.sampled_from(db.tables))
        middle = data.draw(
            st.lists(st.sampled_from(source.attributes), min_size=1, unique=True)
        )
        inner = data.draw(st.lists(st.sampled_from(middle), min_size=1, unique=True))
        twice = project_table(project_table(source, middle), inner)
        once = project_table(source, inner)
        assert twice.attributes == once.attributes
        assert twice.cells == once.cells

    @given(consistent_databases(), st.data())
    @settings(max_examples=100, deadline=None)
    def test_refined_extension_contains_full_extension(self, case, data):
        db, conditions, problem, _ = case
        refinement = self._draw_refinement(data, db)
        assert is_refinement(refinement, db.scheme)
        over = db.attribute_names
        full = extension_system(db, over, conditions)
        coarse = extension_system(project_db(db, refinement), over, conditions)

        size = full.system.variable_count
        for _ in range(3):
            objective = data.draw(st.lists(st.integers(-4, 4), min_size=size, max_size=size))
            for sense in (Sense.MIN, Sense.MAX):
                point = lp_solve(full.system, objective, sense).point
                assert coarse.system.satisfied_by(point)

        assert admissible_set(problem, full).issubset(admissible_set(problem, coarse))

    @staticmethod
    def _draw_refinement(data, db):
        # Singletons keep every attribute in the projected database
        sets = [frozenset({name}) for name in db.attribute_names]
        for element in db.scheme:
            kept = data.draw(st.lists(st.sampled_from(sorted(element)), unique=True))
            if kept:
                sets.append(frozenset(kept))
        return Scheme(tuple(sets))
