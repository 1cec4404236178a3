"""Parsing, solving, and comparison of the linear one-variable equations that label MWPs.

Grammar (whitespace insignificant)::

    EQ     := EXPR '=' EXPR
    EXPR   := TERM (('+'|'-') TERM)*
    TERM   := FACTOR (('*'|'/') FACTOR)*
    FACTOR := NUMBER | 'X' | '(' EXPR ')' | '-' FACTOR

All arithmetic is over exact rationals; no float tolerance anywhere.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

# Numeric constants an equation may use without a matching quantity in the text
# (percent-style problems). Any other unmatched literal fails alignment.
CONSTANT_WHITELIST = frozenset({Fraction(1), Fraction(100)})


class EquationSyntaxError(ValueError):
    """Raised when an equation string does not parse; `kind` classifies the failure."""

    UNBALANCED_PARENS = "unbalanced_parens"
    DANGLING_OPERATOR = "dangling_operator"
    MULTIPLE_EQUALS = "multiple_equals"
    MISSING_EQUALS = "missing_equals"
    MISSING_UNKNOWN = "missing_unknown"
    BAD_CHARACTER = "bad_character"
    EMPTY = "empty"
    TRAILING_INPUT = "trailing_input"

    def __init__(self, kind: str, message: str):
        super().__init__(f"{kind}: {message}")
        self.kind = kind


class EquationSolveError(ValueError):
    """Base for failures of solve_linear on a syntactically valid equation."""


class DegenerateEquationError(EquationSolveError):
    """0*X = 0: every rational satisfies the equation."""


class InconsistentEquationError(EquationSolveError):
    """0*X = c with c != 0: no rational satisfies the equation."""


class NonlinearEquationError(EquationSolveError):
    """X appears with degree != 1 after normalization."""


class EquationDomainError(EquationSolveError):
    """Division by zero or by a subexpression containing X."""


class AlignmentError(ValueError):
    """An equation literal matches no text quantity and is not whitelisted."""


@dataclass(frozen=True)
class Unknown:
    def render(self) -> str:
        return "X"


@dataclass(frozen=True)
class Literal:
    value: Fraction

    def render(self) -> str:
        if self.value.denominator == 1:
            return str(self.value.numerator)
        return f"{self.value.numerator}/{self.value.denominator}"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Node"
    right: "Node"

    def render(self) -> str:
        return f"({self.left.render()}{self.op}{self.right.render()})"


Node = Union[Unknown, Literal, BinOp]


@dataclass(frozen=True)
class Equation:
    left: Node
    right: Node
    source_text: str

    def render(self) -> str:
        return f"{self.left.render()}={self.right.render()}"

    def literals(self) -> list[Fraction]:
        """All literal values in left-to-right source order."""
        out: list[Fraction] = []

        def walk(node: Node) -> None:
            if isinstance(node, Literal):
                out.append(node.value)
            elif isinstance(node, BinOp):
                walk(node.left)
                walk(node.right)

        walk(self.left)
        walk(self.right)
        return out


@dataclass(frozen=True)
class QuantityAlignment:
    """Maps each equation literal occurrence (in source order) to a placeholder_id,
    or to None for a whitelisted constant with no text quantity."""

    slots: tuple[Union[int, None], ...]

    def placeholder_ids(self) -> list[int]:
        return [s for s in self.slots if s is not None]


_TOKEN_RE = re.compile(r"\s*(?:(\d+\.\d+|\d+|\.\d+)|([Xx])|([=+\-*/()]))")


def _tokenize(text: str) -> list[str]:
    tokens: list[str] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            rest = text[pos:].strip()
            if not rest:
                break
            raise EquationSyntaxError(
                EquationSyntaxError.BAD_CHARACTER,
                f"unexpected character {rest[0]!r} in {text!r}",
            )
        number, unknown, op = m.groups()
        if number is not None:
            tokens.append(number)
        elif unknown is not None:
            tokens.append("X")
        else:
            tokens.append(op)
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[str]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> str | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self) -> str | None:
        tok = self.peek()
        if tok is not None:
            self.i += 1
        return tok

    def expr(self) -> Node:
        node = self.term()
        while self.peek() in ("+", "-"):
            op = self.next()
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.peek() in ("*", "/"):
            op = self.next()
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Node:
        tok = self.next()
        if tok is None:
            raise EquationSyntaxError(
                EquationSyntaxError.DANGLING_OPERATOR, "operand expected at end of input"
            )
        if tok == "X":
            return Unknown()
        if tok == "(":
            node = self.expr()
            if self.next() != ")":
                raise EquationSyntaxError(
                    EquationSyntaxError.UNBALANCED_PARENS, "missing closing parenthesis"
                )
            return node
        if tok == "-":
            # unary minus, normalized to (0 - e)
            return BinOp("-", Literal(Fraction(0)), self.factor())
        if tok[0].isdigit() or tok[0] == ".":
            return Literal(Fraction(tok))
        raise EquationSyntaxError(
            EquationSyntaxError.DANGLING_OPERATOR, f"operand expected, got {tok!r}"
        )


def _contains_unknown(node: Node) -> bool:
    if isinstance(node, Unknown):
        return True
    if isinstance(node, BinOp):
        return _contains_unknown(node.left) or _contains_unknown(node.right)
    return False


def parse_equation(text: str) -> Equation:
    """Parse an equation string, classifying malformed inputs by error kind."""
    tokens = _tokenize(text)
    if not tokens:
        raise EquationSyntaxError(EquationSyntaxError.EMPTY, "empty equation")
    eq_count = tokens.count("=")
    if eq_count == 0:
        raise EquationSyntaxError(EquationSyntaxError.MISSING_EQUALS, f"no '=' in {text!r}")
    if eq_count > 1:
        raise EquationSyntaxError(
            EquationSyntaxError.MULTIPLE_EQUALS, f"{eq_count} '=' signs in {text!r}"
        )
    if tokens.count("(") != tokens.count(")"):
        raise EquationSyntaxError(
            EquationSyntaxError.UNBALANCED_PARENS,
            f"{tokens.count('(')} open vs {tokens.count(')')} close in {text!r}",
        )
    split = tokens.index("=")
    sides = []
    for side_tokens, name in ((tokens[:split], "left"), (tokens[split + 1 :], "right")):
        if not side_tokens:
            raise EquationSyntaxError(
                EquationSyntaxError.DANGLING_OPERATOR, f"{name} side of '=' is empty"
            )
        parser = _Parser(side_tokens)
        node = parser.expr()
        if parser.peek() is not None:
            kind = (
                EquationSyntaxError.UNBALANCED_PARENS
                if parser.peek() == ")"
                else EquationSyntaxError.TRAILING_INPUT
            )
            raise EquationSyntaxError(kind, f"unexpected {parser.peek()!r} on {name} side")
        sides.append(node)
    left, right = sides
    if not (_contains_unknown(left) or _contains_unknown(right)):
        raise EquationSyntaxError(
            EquationSyntaxError.MISSING_UNKNOWN, f"no unknown X in {text!r}"
        )
    return Equation(left, right, text)


def _linearize(node: Node) -> tuple[Fraction, Fraction]:
    """Reduce a node to (a, b) with value a*X + b, over exact rationals."""
    if isinstance(node, Unknown):
        return Fraction(1), Fraction(0)
    if isinstance(node, Literal):
        return Fraction(0), node.value
    a1, b1 = _linearize(node.left)
    a2, b2 = _linearize(node.right)
    if node.op == "+":
        return a1 + a2, b1 + b2
    if node.op == "-":
        return a1 - a2, b1 - b2
    if node.op == "*":
        if a1 != 0 and a2 != 0:
            raise NonlinearEquationError("product of two X-bearing subexpressions")
        return a1 * b2 + a2 * b1, b1 * b2
    # division
    if a2 != 0:
        raise EquationDomainError("division by a subexpression containing X")
    if b2 == 0:
        raise EquationDomainError("division by zero")
    return a1 / b2, b1 / b2


def solve_linear(eq: Equation) -> Fraction:
    """Return the unique x with left(x) = right(x).

    Raises DegenerateEquationError / InconsistentEquationError for 0*X = 0 and
    0*X = c respectively, NonlinearEquationError and EquationDomainError for
    invariant violations.
    """
    a1, b1 = _linearize(eq.left)
    a2, b2 = _linearize(eq.right)
    a, b = a1 - a2, b2 - b1
    if a == 0:
        if b == 0:
            raise DegenerateEquationError(f"{eq.source_text!r} holds for every X")
        raise InconsistentEquationError(f"{eq.source_text!r} holds for no X")
    return b / a


def equivalence_verdict(a: Equation, b: Equation) -> tuple[bool, str]:
    """Solve both sides and compare; a degenerate/inconsistent side is never equivalent."""
    try:
        xa = solve_linear(a)
    except EquationSolveError as exc:
        return False, f"first equation unsolvable: {exc}"
    try:
        xb = solve_linear(b)
    except EquationSolveError as exc:
        return False, f"second equation unsolvable: {exc}"
    if xa == xb:
        return True, "equal solutions"
    return False, f"solutions differ: {xa} vs {xb}"


def equations_equivalent(a: Equation, b: Equation) -> bool:
    """True iff both equations solve to the same rational."""
    return equivalence_verdict(a, b)[0]


def align_quantities(eq: Equation, quantities: Sequence) -> QuantityAlignment:
    """Greedy left-to-right match of equation literals to text quantities.

    Each literal consumes the first unconsumed quantity of equal value (text
    order); a value already consumed is reused from its leftmost holder; a
    literal with no text match must be in CONSTANT_WHITELIST, else
    AlignmentError. `quantities` needs `.value` and `.placeholder_id` fields.
    """
    consumed: set[int] = set()
    slots: list[int | None] = []
    for lit in eq.literals():
        match = next(
            (q for q in quantities if q.value == lit and q.placeholder_id not in consumed),
            None,
        )
        if match is None:
            match = next((q for q in quantities if q.value == lit), None)
        if match is not None:
            consumed.add(match.placeholder_id)
            slots.append(match.placeholder_id)
        elif lit in CONSTANT_WHITELIST:
            slots.append(None)
        else:
            raise AlignmentError(
                f"equation literal {lit} has no matching quantity and is not a whitelisted constant"
            )
    return QuantityAlignment(tuple(slots))
