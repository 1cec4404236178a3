"""Shared test oracles: random equation trees with an evaluator that is
independent of the parser/solver under test."""

from __future__ import annotations

import random
from fractions import Fraction


def random_tree(rng: random.Random, depth: int):
    """Random expression tree as nested tuples ('op', l, r) | Fraction leaf.

    Literals 1..12, depth-bounded, divisors resampled so evaluation never
    divides by zero.
    """
    if depth == 0 or rng.random() < 0.3:
        return Fraction(rng.randint(1, 12))
    op = rng.choice("+-*/~")  # ~ is unary minus
    if op == "~":
        return ("~", random_tree(rng, depth - 1))
    left = random_tree(rng, depth - 1)
    right = random_tree(rng, depth - 1)
    if op == "/":
        while evaluate(right) == 0:
            right = random_tree(rng, depth - 1)
    return (op, left, right)


def evaluate(tree) -> Fraction:
    """Direct recursive evaluation; shares no code with the parser or solver."""
    if isinstance(tree, Fraction):
        return tree
    if tree[0] == "~":
        return -evaluate(tree[1])
    op, left, right = tree
    a, b = evaluate(left), evaluate(right)
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    return a / b


def render(tree) -> str:
    """Print a tree in the toolkit's equation grammar (fully parenthesized)."""
    if isinstance(tree, Fraction):
        return str(tree.numerator)
    if tree[0] == "~":
        return f"(-{render(tree[1])})"
    op, left, right = tree
    return f"({render(left)}{op}{render(right)})"
