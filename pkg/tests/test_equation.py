from __future__ import annotations

import random
from fractions import Fraction

import pytest

from helpers import evaluate, random_tree, render
from mwpa import corpus
from mwpa.equation import (
    AlignmentError,
    DegenerateEquationError,
    EquationDomainError,
    EquationSyntaxError,
    InconsistentEquationError,
    NonlinearEquationError,
    align_quantities,
    equations_equivalent,
    equivalence_verdict,
    parse_equation,
    solve_linear,
)


def solve(text: str) -> Fraction:
    return solve_linear(parse_equation(text))


class TestParse:
    def test_simple_addition(self):
        eq = parse_equation("X = 8+5")
        assert eq.render() == "X=(8+5)"

    def test_unbalanced_parens(self):
        with pytest.raises(EquationSyntaxError) as err:
            parse_equation("X = ((9+3-3")
        assert err.value.kind == EquationSyntaxError.UNBALANCED_PARENS

    def test_close_without_open(self):
        with pytest.raises(EquationSyntaxError) as err:
            parse_equation("X = 9+3)")
        assert err.value.kind == EquationSyntaxError.UNBALANCED_PARENS

    def test_precedence(self):
        eq = parse_equation("X = (7+3)/5")
        assert eq.render() == "X=((7+3)/5)"
        assert solve_linear(eq) == 2

    def test_star_binds_tighter_than_plus(self):
        assert solve("X = 2+3*4") == 14

    def test_left_associativity(self):
        assert solve("X = 8-3-2") == 3
        assert solve("X = 24/4/2") == 3

    def test_dangling_operator(self):
        with pytest.raises(EquationSyntaxError) as err:
            parse_equation("X = 8+")
        assert err.value.kind == EquationSyntaxError.DANGLING_OPERATOR

    def test_multiple_equals(self):
        with pytest.raises(EquationSyntaxError) as err:
            parse_equation("X = 8 = 5")
        assert err.value.kind == EquationSyntaxError.MULTIPLE_EQUALS

    def test_missing_equals(self):
        with pytest.raises(EquationSyntaxError) as err:
            parse_equation("X + 5")
        assert err.value.kind == EquationSyntaxError.MISSING_EQUALS

    def test_missing_unknown(self):
        with pytest.raises(EquationSyntaxError) as err:
            parse_equation("7 = 3+4")
        assert err.value.kind == EquationSyntaxError.MISSING_UNKNOWN

    def test_empty(self):
        with pytest.raises(EquationSyntaxError) as err:
            parse_equation("   ")
        assert err.value.kind == EquationSyntaxError.EMPTY

    def test_bad_character(self):
        with pytest.raises(EquationSyntaxError) as err:
            parse_equation("X = 3 + y")
        assert err.value.kind == EquationSyntaxError.BAD_CHARACTER

    def test_unary_minus_normalized(self):
        assert solve("X = -2+5") == 3
        assert solve("X = -(3+4)") == -7

    def test_lowercase_x(self):
        assert solve("x = 5*2") == 10

    def test_decimal_literals(self):
        assert solve("X = 2.5*4") == 10


class TestSolve:
    def test_table_examples(self):
        assert solve("X = 8+5") == 13
        assert solve("X = 6-2-3") == 1
        assert solve("X = 9-3+2") == 8

    def test_x_on_both_sides(self):
        assert solve("2*X+3 = X+10") == 7

    def test_x_under_coefficient(self):
        assert solve("3*X = 12") == 4
        assert solve("X/4 = 3") == 12

    def test_degenerate(self):
        with pytest.raises(DegenerateEquationError):
            solve("X = X")

    def test_inconsistent(self):
        with pytest.raises(InconsistentEquationError):
            solve("X+1 = X")

    def test_nonlinear(self):
        with pytest.raises(NonlinearEquationError):
            solve("X*X = 4")

    def test_division_by_x(self):
        with pytest.raises(EquationDomainError):
            solve("8/X = 2")

    def test_division_by_zero(self):
        with pytest.raises(EquationDomainError):
            solve("X = 5/0")

    def test_exact_rationals(self):
        assert solve("X = 1/3") == Fraction(1, 3)
        assert solve("X = 1/3+1/6") == Fraction(1, 2)


class TestEquivalence:
    def test_same_solution(self):
        a, b = parse_equation("X = 9-3+2"), parse_equation("X = 8")
        assert equations_equivalent(a, b)

    def test_different_solutions(self):
        a, b = parse_equation("X = (6-(2)+3)"), parse_equation("X = 6-(2+3)")
        ok, reason = equivalence_verdict(a, b)
        assert not ok and "7" in reason and "1" in reason

    def test_reflexive(self):
        eq = parse_equation("X = (7+3)/5")
        assert equations_equivalent(eq, eq)

    def test_degenerate_never_equivalent(self):
        ok, reason = equivalence_verdict(parse_equation("X = X"), parse_equation("X = X"))
        assert not ok and "unsolvable" in reason

    def test_equivalence_relation_on_samples(self):
        rng = random.Random(7)
        eqs = []
        while len(eqs) < 30:
            tree = random_tree(rng, 3)
            eqs.append(parse_equation(f"X = {render(tree)}"))
        for i in range(0, 27, 3):
            a, b, c = eqs[i], eqs[i + 1], eqs[i + 2]
            assert equations_equivalent(a, a)
            assert equations_equivalent(a, b) == equations_equivalent(b, a)
            if equations_equivalent(a, b) and equations_equivalent(b, c):
                assert equations_equivalent(a, c)


class TestAlignment:
    def test_table1_mapping(self, nancy_problem):
        alignment = align_quantities(nancy_problem.equation, nancy_problem.quantities)
        assert alignment.slots == (0, 1)

    def test_whitelisted_constant(self):
        p = corpus.problem_from_text(
            "pct", "A score of 40 points doubled . How many points is that out of 100 ?",
            "X=100", "other",
        )
        # 100 appears in text here, so it consumes the quantity instead
        assert align_quantities(p.equation, p.quantities).slots == (1,)
        eq = parse_equation("X=40*100/100")
        qs = corpus.extract_quantities("The class scored 40 points . What percent is that ?")
        alignment = align_quantities(eq, qs)
        assert alignment.slots == (0, None, None)

    def test_duplicates_consumed_in_text_order(self):
        eq = parse_equation("X = 3*3")
        qs = corpus.extract_quantities("He bought 3 bags with 3 toys each . How many toys ?")
        alignment = align_quantities(eq, qs)
        assert alignment.slots == (0, 1)

    def test_reuse_when_text_has_fewer_duplicates(self):
        eq = parse_equation("X = 5+5")
        qs = corpus.extract_quantities("She had 5 pens . How many in two such sets ?")
        assert align_quantities(eq, qs).slots == (0, 0)

    def test_unmatched_literal_fails(self):
        eq = parse_equation("X = 7+2")
        qs = corpus.extract_quantities("There were 7 ducks . How many now ?")
        with pytest.raises(AlignmentError):
            align_quantities(eq, qs)


class TestPrintParseSolveOracle:
    def test_round_trip_sample(self):
        rng = random.Random(123)
        for _ in range(1000):
            tree = random_tree(rng, 4)
            expected = evaluate(tree)
            assert solve(f"X = {render(tree)}") == expected
