"""Tests for the JSON input file loaders."""

import json
from decimal import Decimal
from fractions import Fraction

import pytest

from app.exceptions import InputFileError, InvalidInputError, InvalidTableError
from app.math_engine.kernel import Interval
from app.math_engine.loaders import (
    load_database,
    load_kb,
    load_pool,
    load_problem,
    read_json,
)
from app.math_engine.logic import Atom, Not

F = Fraction


@pytest.fixture
def write(tmp_path):
    def _write(payload, name="input.json"):
        path = tmp_path / name
        text = payload if isinstance(payload, str) else json.dumps(payload)
        path.write_text(text, encoding="utf-8")
        return path

    return _write


class TestReadJson:
    def test_missing_file(self, tmp_path):
        with pytest.raises(InputFileError) as exc:
            read_json(tmp_path / "absent.json")
        assert exc.value.details["path"].endswith("absent.json")

    def test_malformed_json(self, write):
        path = write('{"target": "Rain",\n "statements": [}')
        with pytest.raises(InputFileError) as exc:
            read_json(path)
        assert exc.value.details["line"] == 2

    def test_not_utf8(self, tmp_path):
        path = tmp_path / "latin.json"
        path.write_bytes(b'{"target": "\xe9"}')
        with pytest.raises(InputFileError):
            read_json(path)

    def test_numbers_are_exact(self, write):
        assert read_json(write('{"x": 0.1}'))["x"] == Decimal("0.1")


class TestLoadKb:
    def test_beach_fixture(self, beach_kb):
        assert len(beach_kb.statements) == 7
        assert beach_kb.target == Atom("Rain")
        assert beach_kb.statements[1].bounds == Interval("0.4", "0.6")

    def test_numbers_and_strings(self, write):
        kb = load_kb(
            write(
                {
                    "target": "Rain",
                    "statements": [
                        {"sentence": "Rain", "lower": 0.65, "upper": "19/20"},
                    ],
                }
            )
        )
        assert kb.statements[0].bounds == Interval(F(13, 20), F(19, 20))

    def test_empty_statements(self, fixtures_dir):
        assert load_kb(fixtures_dir / "empty_kb.json").statements == ()

    def test_bad_formula(self, write):
        path = write({"target": "Rain", "statements": [{"sentence": "A &", "lower": 0, "upper": 1}]})
        with pytest.raises(InputFileError) as exc:
            load_kb(path)
        assert exc.value.details["errors"][0]["location"] == "statements.0.sentence"
        assert "column 4" in exc.value.message

    def test_missing_target(self, write):
        with pytest.raises(InputFileError) as exc:
            load_kb(write({"statements": []}))
        assert exc.value.details["errors"][0]["location"] == "target"

    def test_unknown_field(self, write):
        with pytest.raises(InputFileError):
            load_kb(write({"target": "Rain", "statements": [], "comment": "x"}))

    def test_not_a_number(self, write):
        path = write({"target": "Rain", "statements": [{"sentence": "Rain", "lower": "lots", "upper": 1}]})
        with pytest.raises(InputFileError):
            load_kb(path)

    def test_inverted_bounds(self, write):
        path = write({"target": "Rain", "statements": [{"sentence": "Rain", "lower": 0.6, "upper": 0.5}]})
        with pytest.raises(InvalidInputError):
            load_kb(path)


class TestLoadPool:
    def test_beach_pool(self, beach_pool):
        assert beach_pool.target == Atom("Rain")
        assert beach_pool.order == (0, 1, 2)
        assert len(beach_pool.pairs) == 3

    def test_conditions_pool_has_no_target(self, conditions_pool):
        assert conditions_pool.target is None
        assert conditions_pool.order is None

    @pytest.mark.parametrize("order", [[0, 0], [0, 3], [-1]])
    def test_bad_order(self, write, order):
        path = write({"sentences": [{"sentence": "A", "lower": 0, "upper": 1}] * 2, "order": order})
        with pytest.raises(InputFileError):
            load_pool(path)

    def test_needs_a_sentence(self, write):
        with pytest.raises(InputFileError):
            load_pool(write({"sentences": []}))


PROBLEM = {
    "actions": ["Go", "Stay"],
    "conditions": ["Rain", "Dry"],
    "utility": [[0, 1], ["4/5", "0.2"]],
}


class TestLoadProblem:
    def test_beach_problem(self, beach_problem):
        assert beach_problem.problem.actions == ("Go", "Do not go")
        assert beach_problem.condition_formulas == (Atom("Rain"), Not(Atom("Rain")))
        assert beach_problem.condition_tuples is None

    def test_train_problem_tuples(self, train_problem):
        tuples = train_problem.condition_tuples
        assert tuples.attributes == ("Rain", "Trains")
        assert tuples.tuples[1] == frozenset({("yes", "no")})

    def test_missing_sentences(self, write):
        problem_file = load_problem(write({**PROBLEM, "condition_sentences": {"Rain": "Rain"}}))
        assert problem_file.condition_sentences == (Atom("Rain"), None)
        with pytest.raises(InputFileError) as exc:
            problem_file.condition_formulas
        assert exc.value.details["conditions"] == ["Dry"]

    def test_unknown_condition_sentence(self, write):
        with pytest.raises(InputFileError):
            load_problem(write({**PROBLEM, "condition_sentences": {"Snow": "Snow"}}))

    def test_tuples_must_cover_conditions(self, write):
        payload = {
            **PROBLEM,
            "condition_tuples": {"attributes": ["Rain"], "tuples": {"Rain": [["yes"]]}},
        }
        with pytest.raises(InputFileError) as exc:
            load_problem(write(payload))
        assert exc.value.details["missing"] == ["Dry"]


TABLE = {"attributes": ["Rain"], "cells": [["yes", "0.5"], ["no", "0.5"]]}
ATTRIBUTES = [{"name": "Rain", "values": ["yes", "no"]}]


class TestLoadDatabase:
    def test_train_db(self, train_db):
        assert [t.attributes for t in train_db.tables][0] == ("Rain", "No Phones")
        assert train_db.tables[3].probability(("low", "high")) == 0

    def test_undeclared_attribute(self, write):
        table = {**TABLE, "attributes": ["Wind"]}
        with pytest.raises(InvalidTableError):
            load_database(write({"attributes": ATTRIBUTES, "tables": [table]}))

    def test_duplicate_cell(self, write):
        table = {**TABLE, "cells": [["yes", "0.5"], ["yes", "0.5"]]}
        with pytest.raises(InvalidTableError):
            load_database(write({"attributes": ATTRIBUTES, "tables": [table]}))

    def test_row_length(self, write):
        table = {**TABLE, "cells": [["yes", "no", "0.5"], ["no", "0.5"]]}
        with pytest.raises(InvalidTableError):
            load_database(write({"attributes": ATTRIBUTES, "tables": [table]}))

    def test_cells_must_sum_to_one(self, write):
        table = {**TABLE, "cells": [["yes", "0.5"], ["no", "0.4"]]}
        with pytest.raises(InvalidTableError):
            load_database(write({"attributes": ATTRIBUTES, "tables": [table]}))

    def test_duplicate_attribute_names(self, write):
        with pytest.raises(InvalidTableError):
            load_database(write({"attributes": ATTRIBUTES * 2, "tables": [TABLE]}))
