"""Propositional sentences, a small parser, and truth-table consistency checks.

Atoms are opaque names: ``"Temperature > 85"`` is one atom, not arithmetic.

Syntax: ``!`` (not), ``&`` (and), ``|`` (or), ``->`` (implies), parentheses,
bare identifiers or double-quoted names (``\\"`` and ``\\\\`` escape inside
quotes). Precedence is ``!`` > ``&`` > ``|`` > ``->``; ``->`` is
right-associative, ``&`` and ``|`` are left-associative.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from app.config import get_settings
from app.exceptions import (
    AtomLimitExceededError,
    FormulaSyntaxError,
    InvalidInputError,
    UnboundAtomError,
)

Assignment = Mapping[str, bool]

_IDENTIFIER = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")

# Binding strength used when rendering
_PREC_IMPLIES = 1
_PREC_OR = 2
_PREC_AND = 3
_PREC_NOT = 4
_PREC_ATOM = 5


@dataclass(frozen=True)
class Atom:
    name: str

    def __post_init__(self) -> None:
        if not isinstance(self.name, str) or not self.name:
            raise InvalidInputError("Atom names must be nonempty strings", {"name": self.name})

    def atoms(self) -> FrozenSet[str]:
        return frozenset((self.name,))

    def evaluate(self, assignment: Assignment) -> bool:
        try:
            return bool(assignment[self.name])
        except KeyError:
            raise UnboundAtomError(f"Atom {self.name!r} is not assigned", {"atom": self.name})

    def __str__(self) -> str:
        if _IDENTIFIER.fullmatch(self.name):
            return self.name
        escaped = self.name.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'


@dataclass(frozen=True)
class Not:
    operand: "Formula"

    def atoms(self) -> FrozenSet[str]:
        return self.operand.atoms()

    def evaluate(self, assignment: Assignment) -> bool:
        return not self.operand.evaluate(assignment)

    def __str__(self) -> str:
        return "!" + _render(self.operand, _PREC_NOT)


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"

    def atoms(self) -> FrozenSet[str]:
        return self.left.atoms() | self.right.atoms()

    def evaluate(self, assignment: Assignment) -> bool:
        return self.left.evaluate(assignment) and self.right.evaluate(assignment)

    def __str__(self) -> str:
        return f"{_render(self.left, _PREC_AND)} & {_render(self.right, _PREC_AND + 1)}"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"

    def atoms(self) -> FrozenSet[str]:
        return self.left.atoms() | self.right.atoms()

    def evaluate(self, assignment: Assignment) -> bool:
        return self.left.evaluate(assignment) or self.right.evaluate(assignment)

    def __str__(self) -> str:
        return f"{_render(self.left, _PREC_OR)} | {_render(self.right, _PREC_OR + 1)}"


@dataclass(frozen=True)
class Implies:
    antecedent: "Formula"
    consequent: "Formula"

    def atoms(self) -> FrozenSet[str]:
        return self.antecedent.atoms() | self.consequent.atoms()

    def evaluate(self, assignment: Assignment) -> bool:
        return (not self.antecedent.evaluate(assignment)) or self.consequent.evaluate(assignment)

    def __str__(self) -> str:
        return (
            f"{_render(self.antecedent, _PREC_IMPLIES + 1)} -> "
            f"{_render(self.consequent, _PREC_IMPLIES)}"
        )


Formula = Union[Atom, Not, And, Or, Implies]
Labeled = Sequence[Tuple[Formula, bool]]


def _precedence(formula: Formula) -> int:
    if isinstance(formula, Atom):
        return _PREC_ATOM
    if isinstance(formula, Not):
        return _PREC_NOT
    if isinstance(formula, And):
        return _PREC_AND
    if isinstance(formula, Or):
        return _PREC_OR
    return _PREC_IMPLIES


def _render(formula: Formula, minimum: int) -> str:
    text = str(formula)
    return f"({text})" if _precedence(formula) < minimum else text


def evaluate(formula: Formula, assignment: Assignment) -> bool:
    """Classical truth value; raises UnboundAtomError for unassigned atoms."""
    return formula.evaluate(assignment)


def conjoin(formulas: Sequence[Formula]) -> Formula:
    """Left-associated conjunction of one or more formulas."""
    if not formulas:
        raise InvalidInputError("Cannot conjoin an empty list of formulas")
    result = formulas[0]
    for f in formulas[1:]:
        result = And(result, f)
    return result


def disjoin(formulas: Sequence[Formula]) -> Formula:
    """Left-associated disjunction of one or more formulas."""
    if not formulas:
        raise InvalidInputError("Cannot disjoin an empty list of formulas")
    result = formulas[0]
    for f in formulas[1:]:
        result = Or(result, f)
    return result


def conjuncts(formula: Formula) -> List[Formula]:
    """Every And-subformula of ``formula`` (including itself), outermost first."""
    if not isinstance(formula, And):
        return [formula]
    return [formula, *conjuncts(formula.left), *conjuncts(formula.right)]


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    column: int


def _tokenize(text: str) -> List[_Token]:
    tokens: List[_Token] = []
    i = 0
    while i < len(text):
        ch = text[i]
        column = i + 1
        if ch.isspace():
            i += 1
        elif text.startswith("->", i):
            tokens.append(_Token("->", "->", column))
            i += 2
        elif ch in "!&|()":
            tokens.append(_Token(ch, ch, column))
            i += 1
        elif ch == '"':
            i += 1
            chars: List[str] = []
            while True:
                if i >= len(text):
                    raise FormulaSyntaxError(
                        "Unterminated quoted atom", {"column": column, "text": text}
                    )
                c = text[i]
                if c == "\\" and i + 1 < len(text):
                    chars.append(text[i + 1])
                    i += 2
                elif c == '"':
                    i += 1
                    break
                else:
                    chars.append(c)
                    i += 1
            name = "".join(chars)
            if not name:
                raise FormulaSyntaxError("Empty quoted atom", {"column": column, "text": text})
            tokens.append(_Token("atom", name, column))
        else:
            match = _IDENTIFIER.match(text, i)
            if match is None:
                raise FormulaSyntaxError(
                    f"Unexpected character {ch!r}", {"column": column, "text": text}
                )
            tokens.append(_Token("atom", match.group(), column))
            i = match.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def _peek(self) -> Optional[_Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _fail(self, message: str) -> FormulaSyntaxError:
        token = self._peek()
        column = token.column if token else len(self.text) + 1
        return FormulaSyntaxError(message, {"column": column, "text": self.text})

    def _accept(self, kind: str) -> bool:
        token = self._peek()
        if token is not None and token.kind == kind:
            self.pos += 1
            return True
        return False

    def parse(self) -> Formula:
        if not self.tokens:
            raise self._fail("Empty formula")
        formula = self._implication()
        trailing = self._peek()
        if trailing is not None:
            raise self._fail(f"Unexpected token {trailing.text!r}")
        return formula

    def _implication(self) -> Formula:
        left = self._disjunction()
        if self._accept("->"):
            return Implies(left, self._implication())
        return left

    def _disjunction(self) -> Formula:
        left = self._conjunction()
        while self._accept("|"):
            left = Or(left, self._conjunction())
        return left

    def _conjunction(self) -> Formula:
        left = self._unary()
        while self._accept("&"):
            left = And(left, self._unary())
        return left

    def _unary(self) -> Formula:
        if self._accept("!"):
            return Not(self._unary())
        return self._primary()

    def _primary(self) -> Formula:
        token = self._peek()
        if token is None:
            raise self._fail("Unexpected end of formula")
        if token.kind == "atom":
            self.pos += 1
            return Atom(token.text)
        if self._accept("("):
            inner = self._implication()
            if not self._accept(")"):
                raise self._fail("Expected ')'")
            return inner
        raise self._fail(f"Unexpected token {token.text!r}")


def parse_formula(text: str) -> Formula:
    """Parse a sentence; raises FormulaSyntaxError with a 1-based column."""
    if not isinstance(text, str):
        raise FormulaSyntaxError("Formula must be a string", {"text": repr(text)})
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# Consistency
# ---------------------------------------------------------------------------


def find_model(labeled: Labeled, atom_limit: Optional[int] = None) -> Optional[Dict[str, bool]]:
    """Return an assignment giving every formula its label, or None.

    Exhaustive over the union of atoms; raises AtomLimitExceededError past the
    configured atom cap.
    """
    limit = atom_limit if atom_limit is not None else get_settings().atom_limit
    names = sorted(set().union(*(f.atoms() for f, _ in labeled))) if labeled else []
    if len(names) > limit:
        raise AtomLimitExceededError(
            "Too many atoms for exhaustive consistency check",
            {"atoms": len(names), "limit": limit},
        )
    for values in itertools.product((True, False), repeat=len(names)):
        assignment = dict(zip(names, values))
        if all(f.evaluate(assignment) == label for f, label in labeled):
            return assignment
    return None


def consistent(labeled: Labeled, atom_limit: Optional[int] = None) -> bool:
    """True iff some assignment gives each formula its required label."""
    return find_model(labeled, atom_limit) is not None


def determined_truth(
    labeled: Labeled, formula: Formula, atom_limit: Optional[int] = None
) -> Optional[bool]:
    """Whether a consistent labeled set forces ``formula`` true, false, or neither."""
    can_be_true = consistent([*labeled, (formula, True)], atom_limit)
    can_be_false = consistent([*labeled, (formula, False)], atom_limit)
    if can_be_true and not can_be_false:
        return True
    if can_be_false and not can_be_true:
        return False
    return None


def all_atoms(formulas: Iterable[Formula]) -> FrozenSet[str]:
    result: FrozenSet[str] = frozenset()
    for f in formulas:
        result |= f.atoms()
    return result


__all__ = [
    "And",
    "Assignment",
    "Atom",
    "Formula",
    "Implies",
    "Labeled",
    "Not",
    "Or",
    "all_atoms",
    "conjoin",
    "conjuncts",
    "consistent",
    "determined_truth",
    "disjoin",
    "evaluate",
    "find_model",
    "parse_formula",
]
