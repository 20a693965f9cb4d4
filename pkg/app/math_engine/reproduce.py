"""Worked-example checks run against the shipped fixtures.

Each check recomputes one published number or verdict from the fixture
files and reports PASS or FAIL with what it saw.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable, Iterator, List, Optional, Sequence, Tuple

from app.config import get_settings
from app.exceptions import CredalError
from app.logger import session_logger as logger
from app.math_engine.decide import (
    anytime_decide_fh,
    anytime_decide_nilsson,
    exclusivity_statements,
)
from app.math_engine.deduction import anytime_deduce
from app.math_engine.kernel import Interval, Sense, indicator, lp_optimize
from app.math_engine.loaders import load_database, load_kb, load_pool, load_problem
from app.math_engine.logic import Atom, parse_formula
from app.math_engine.maxent import (
    MODE_MAXENT,
    MODE_UNIFORM,
    centroid,
    conjunction_segment,
    eccentricity_squared,
    expected_ecc_mc,
    maxent_conjunction,
    maxent_on_segment,
    modus_ponens_segment,
)
from app.math_engine.pdb import (
    Scheme,
    anytime_decide_pdb,
    extension_system,
    project_db,
    project_table,
)
from app.math_engine.worlds import (
    ConditionFirst,
    SemanticTree,
    TargetFirst,
    build_system,
    tree_from_sentences,
)

F = Fraction
Column = Tuple[int, ...]

# World columns over (Rain, (B & H) -> Rain, Humidity > 80)
BEACH_FIRST_COLUMNS: Tuple[Column, ...] = (
    (0, 0, 1), (0, 1, 0), (1, 1, 0), (0, 1, 1), (1, 1, 1),
)
# ... and B. pressure < 30 appended
BEACH_SECOND_COLUMNS: Tuple[Column, ...] = (
    (1, 1, 1, 1), (1, 1, 1, 0), (1, 1, 0, 1), (1, 1, 0, 0),
    (0, 1, 0, 1), (0, 1, 1, 0), (0, 1, 0, 0), (0, 0, 1, 1),
)
# Over (c1, c2, c3, B -> c1, B)
CONDITION_COLUMNS: Tuple[Column, ...] = (
    (1, 0, 0, 1, 1), (1, 0, 0, 1, 0), (0, 1, 0, 1, 0),
    (0, 1, 0, 0, 1), (0, 0, 1, 1, 0), (0, 0, 1, 0, 1),
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def render(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"

    def to_dict(self) -> dict:
        return {"check": self.name, "passed": self.passed, "detail": self.detail}


def _columns(tree: SemanticTree) -> Counter:
    return Counter(tuple(int(v) for v in leaf.labels) for leaf in tree.leaves)


def _same_columns(tree: SemanticTree, expected: Iterable[Column]) -> bool:
    return _columns(tree) == Counter(expected)


class WorkedExamples:
    """Checks bound to a fixtures directory."""

    def __init__(self, fixtures_dir: Optional[Path] = None, samples: int = 1_000_000, seed: int = 7):
        self.fixtures = Path(fixtures_dir or get_settings().fixtures_dir)
        self.samples = samples
        self.seed = seed

    def _path(self, name: str) -> Path:
        return self.fixtures / name

    def checks(self) -> List[Tuple[str, Callable[[], Tuple[bool, str]]]]:
        return [
            ("deduction-beach-statements", self.deduction_statements),
            ("deduction-beach-interval", self.deduction_interval),
            ("fh-beach-decision", self.fh_decision),
            ("nilsson-beach-first-iteration", self.nilsson_first),
            ("nilsson-beach-second-iteration", self.nilsson_second),
            ("condition-first-matrix", self.condition_matrix),
            ("condition-first-min-c1", self.condition_min_c1),
            ("exclusivity-statement-count", self.exclusivity_count),
            ("maxent-ecc-conjunction", self.ecc_conjunction),
            ("maxent-conjunction-grid", self.maxent_grid),
            ("maxent-modus-ponens-centroid", self.modus_ponens_centroid),
            ("mc-maxent-mean", self.mc_maxent),
            ("mc-uniform-mean", self.mc_uniform),
            ("pdb-projections", self.pdb_projections),
            ("pdb-extension-size", self.pdb_extension_size),
            ("pdb-scheme-ladder", self.pdb_ladder),
            ("pdb-rung-two-minimum", self.pdb_rung_two_minimum),
        ]

    def run(self, only: Optional[Sequence[str]] = None) -> Iterator[CheckResult]:
        for name, check in self.checks():
            if only and name not in only:
                continue
            try:
                passed, detail = check()
            except CredalError as e:
                passed, detail = False, f"{e.code}: {e.message}"
            logger.info("Check finished", check=name, passed=passed)
            yield CheckResult(name, passed, detail)

    # -- deduction -------------------------------------------------------

    def deduction_statements(self) -> Tuple[bool, str]:
        trace = anytime_deduce(load_kb(self._path("beach_kb.json")), 100)
        produced = {(s.produced.sentence, s.produced.bounds) for s in trace.steps}
        wanted = [
            ("Rain", Interval(F(7, 20), F(3, 5))),
            ('"B. pressure < 30" & "Humidity > 80"', Interval(F(9, 10), F(1))),
            ("Rain", Interval(F(11, 20), F(19, 20))),
        ]
        missing = [
            f"p({s}) in {iv}" for s, iv in wanted if (parse_formula(s), iv) not in produced
        ]
        return not missing, "all derived" if not missing else "missing " + "; ".join(missing)

    def deduction_interval(self) -> Tuple[bool, str]:
        trace = anytime_deduce(load_kb(self._path("beach_kb.json")), 100)
        final = trace.final_interval
        return final == Interval(F(11, 20), F(3, 5)), f"final interval {final}"

    def fh_decision(self) -> Tuple[bool, str]:
        problem_file = load_problem(self._path("beach_problem.json"))
        kb = load_kb(self._path("beach_kb.json"))
        steps = list(
            anytime_decide_fh(
                problem_file.problem, kb.statements, problem_file.condition_sentences, 100
            )
        )
        for step in steps:
            rain = dict(step.intervals)["Rain"]
            if ("Go" in step.admissible) != (rain.lower <= F(1, 2)):
                return False, f"step {step.index}: {step.admissible} with p(Rain) in {rain}"
        final = steps[-1].admissible.actions
        return final == ("Do not go",), f"{len(steps)} steps, final {{{', '.join(final)}}}"

    # -- semantic trees ----------------------------------------------------

    def _nilsson_steps(self) -> list:
        problem_file = load_problem(self._path("beach_problem.json"))
        pool = load_pool(self._path("beach_pool.json"))
        assert pool.target is not None
        return list(
            anytime_decide_nilsson(
                problem_file.problem,
                pool.pairs,
                TargetFirst(pool.target),
                problem_file.condition_formulas,
                pool.order,
            )
        )

    def nilsson_first(self) -> Tuple[bool, str]:
        step = self._nilsson_steps()[2]
        tree = step.tree
        ok = (
            tree is not None
            and tree.leaf_count == 5
            and _same_columns(tree, BEACH_FIRST_COLUMNS)
            and step.admissible.actions == ("Go", "Do not go")
        )
        count = tree.leaf_count if tree is not None else 0
        return ok, f"{count} world classes, admissible {step.admissible}"

    def nilsson_second(self) -> Tuple[bool, str]:
        steps = self._nilsson_steps()
        step = steps[-1]
        tree = step.tree
        ok = (
            len(steps) == 4
            and tree is not None
            and tree.leaf_count == 8
            and _same_columns(tree, BEACH_SECOND_COLUMNS)
            and step.admissible.actions == ("Do not go",)
        )
        count = tree.leaf_count if tree is not None else 0
        return ok, f"{count} world classes, admissible {step.admissible}"

    def _condition_tree(self) -> Tuple[SemanticTree, list]:
        pool = load_pool(self._path("conditions_pool.json"))
        layout = ConditionFirst((Atom("c1"), Atom("c2"), Atom("c3")))
        tree = tree_from_sentences(layout, [s for s, _ in pool.pairs])
        return tree, pool.pairs

    def condition_matrix(self) -> Tuple[bool, str]:
        tree, _ = self._condition_tree()
        ok = tree.leaf_count == 6 and _same_columns(tree, CONDITION_COLUMNS)
        return ok, f"{tree.leaf_count} columns"

    def condition_min_c1(self) -> Tuple[bool, str]:
        tree, pairs = self._condition_tree()
        bounds = [(tree.index_of(s), iv) for s, iv in pairs]
        system = build_system(tree, bounds).system
        value = lp_optimize(system, indicator(tree.leaf_count, tree.true_leaves(0)), Sense.MIN)
        return value == F(7, 10), f"min p(c1) = {value}"

    def exclusivity_count(self) -> Tuple[bool, str]:
        counts = {
            n: len(exclusivity_statements([Atom(f"c{j}") for j in range(1, n + 1)]))
            for n in range(2, 7)
        }
        ok = all(c == n * (n - 1) // 2 + 1 for n, c in counts.items())
        return ok, ", ".join(f"n={n}: {c}" for n, c in counts.items())

    # -- maximum entropy -----------------------------------------------

    def ecc_conjunction(self) -> Tuple[bool, str]:
        value = eccentricity_squared(
            maxent_conjunction(F(9, 10), F(1, 10)), conjunction_segment(F(9, 10), F(1, 10))
        )
        return value == F(16, 25), f"ecc^2 = {value}"

    def maxent_grid(self) -> Tuple[bool, str]:
        worst = 0.0
        for i in range(1, 20):
            for j in range(1, 20):
                a, b = F(i, 20), F(j, 20)
                numeric = maxent_on_segment(conjunction_segment(a, b))
                exact = maxent_conjunction(a, b)
                worst = max(worst, max(abs(x - float(y)) for x, y in zip(numeric, exact)))
        return worst <= 1e-9, f"max deviation {worst:.2e}"

    def modus_ponens_centroid(self) -> Tuple[bool, str]:
        worst = 0.0
        for i in range(1, 20):
            for j in range(1, 21):
                x, y = F(i, 20), F(j, 20)
                if y < 1 - x:
                    continue
                seg = modus_ponens_segment(x, y)
                if seg.is_degenerate:
                    continue
                numeric = maxent_on_segment(seg)
                worst = max(
                    worst, max(abs(p - float(c)) for p, c in zip(numeric, centroid(seg)))
                )
        return worst <= 1e-9, f"max deviation {worst:.2e}"

    def mc_maxent(self) -> Tuple[bool, str]:
        estimate = expected_ecc_mc(MODE_MAXENT, self.samples, seed=self.seed)
        return abs(estimate.mean - 1 / 3) <= 0.01, f"mean {estimate.mean:.5f}"

    def mc_uniform(self) -> Tuple[bool, str]:
        estimate = expected_ecc_mc(MODE_UNIFORM, self.samples, seed=self.seed)
        return abs(estimate.mean - 0.5) <= 0.005, f"mean {estimate.mean:.5f}"

    # -- databases -------------------------------------------------------

    def pdb_projections(self) -> Tuple[bool, str]:
        db = load_database(self._path("train_db.json"))
        p1, p2, p3, _ = db.tables
        trains = project_table(p2, ["Trains"]).cells
        temperature = project_table(p3, ["Temperature"]).cells
        rain = project_table(p1, ["Rain"]).cells
        ok = (
            trains == {("yes",): F(1, 2), ("no",): F(1, 2)}
            and temperature == {("high",): F(7, 10), ("med",): F(1, 5), ("low",): F(1, 10)}
            and rain == {("yes",): F(1, 2), ("no",): F(1, 2)}
        )
        return ok, "Trains, Temperature and Rain marginals"

    def pdb_extension_size(self) -> Tuple[bool, str]:
        credal = extension_system(load_database(self._path("train_db.json")))
        system = credal.system
        ok = system.variable_count == 48 and len(system.constraints) == 20
        return ok, f"{system.variable_count} unknowns, {len(system.constraints)} equalities"

    def pdb_ladder(self) -> Tuple[bool, str]:
        problem_file = load_problem(self._path("train_problem.json"))
        assert problem_file.condition_tuples is not None
        db = load_database(self._path("train_db.json"))
        sets = [
            step.admissible.actions
            for step in anytime_decide_pdb(problem_file.problem, db, problem_file.condition_tuples)
        ]
        ok = sets == [("Go", "Don't go"), ("Don't go",)]
        return ok, " -> ".join("{" + ", ".join(s) + "}" for s in sets)

    def pdb_rung_two_minimum(self) -> Tuple[bool, str]:
        problem_file = load_problem(self._path("train_problem.json"))
        conditions = problem_file.condition_tuples
        assert conditions is not None
        db = load_database(self._path("train_db.json"))
        scheme = Scheme.of([db.tables[0].attributes, db.tables[1].attributes])
        projected = project_db(db, scheme)
        over = db.ordered(scheme.attributes)
        credal = extension_system(projected, over, conditions)
        objective = credal.condition_vector([F(1), F(0), F(0), F(0)])
        value = lp_optimize(credal.system, objective, Sense.MIN)
        return value == F(1, 20), f"min p(Rain=yes, Trains=yes) = {value}"


__all__ = ["CheckResult", "WorkedExamples"]
