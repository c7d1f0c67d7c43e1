from fractions import Fraction

import pytest

from specgap.diffpoly import ParamPoly, Poly1
from specgap.parse import PolyParseError, parse_param_poly, parse_poly1, parse_polyd


def test_grammar_example():
    assert parse_poly1("1/2*x^2 - 3*x + 7/4") == Poly1([Fraction(7, 4), -3, Fraction(1, 2)])


def test_decimals_are_exact():
    assert parse_poly1("0.1*x") == Poly1([0, Fraction(1, 10)])
    assert parse_poly1("1.25") == Poly1([Fraction(5, 4)])


def test_whitespace_and_signs():
    assert parse_poly1("  - x ^ 3 +x") == Poly1([0, 1, 0, -1])


def test_param_poly():
    p = parse_param_poly("l1*x + l2*x^3")
    assert p.nparams == 2
    assert p == ParamPoly({(1, 0, 1, 0): 1, (3, 0, 0, 1): 1}, 2)


@pytest.mark.parametrize("text,col", [("x^^2", 3), ("2*y", 3), ("x +", 4), ("(x", 3)])
def test_errors_report_column(text, col):
    with pytest.raises(PolyParseError) as info:
        parse_poly1(text)
    assert info.value.column == col
    assert "^" in info.value.diagnostic()


def test_polyd_names():
    p = parse_polyd("x1^2 + x2*x3", 3)
    assert p.d == 3 and p.degree == 2
    assert parse_polyd("x^2+y^2", 2) == parse_polyd("x1^2+x2^2", 2)
