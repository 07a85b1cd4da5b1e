import math
from fractions import Fraction

import numpy as np
import pytest

from fracsubspace.errors import ParseError
from fracsubspace.expr_parser import (array_from_ast, ast_names, exponent_from_ast, parse, parse_poly,
                                      scalar_from_ast, tokenize)
from fracsubspace.poly import Poly
from fracsubspace.series import ExponentVector


def test_tokenize_numbers_and_power_synonym():
    kinds = [(t.kind, t.value) for t in tokenize("2.5e-3*x**2")]
    assert kinds == [("NUM", "2.5e-3"), ("STAR", "*"), ("ID", "x"), ("CARET", "**"), ("NUM", "2")]


def test_tokenize_e_without_digits_is_a_name():
    kinds = [t.kind for t in tokenize("2e")]
    assert kinds == ["NUM", "ID"]


def test_parse_precedence():
    assert parse("a + b*c^2") == ('add', ('name', 'a'), ('mul', ('name', 'b'), ('pow', ('name', 'c'), ('num', 2))))
    assert parse("-x^2") == ('neg', ('pow', ('name', 'x'), ('num', 2)))
    assert parse("f(x, 1/2)") == ('call', 'f', (('name', 'x'), ('div', ('num', 1), ('num', 2))))


def test_numbers_are_exact():
    assert parse("0.3") == ('num', Fraction(3, 10))


@pytest.mark.parametrize("text,message", [
    ("f(x", "Missing closing parenthesis"),
    ("a $ b", "Unexpected character '\\$'"),
    ("a, b", "trailing"),
    ("", "Empty"),
    ("(a))", "trailing"),
])
def test_parse_errors(text, message):
    with pytest.raises(ParseError, match=message):
        parse(text)


def test_ast_names():
    assert ast_names(parse("gamma(1+beta)*K1^2 - x")) == {"beta", "K1", "x"}


def test_exponent_from_ast():
    e = exponent_from_ast(parse("2*alpha + beta/2 - 1"), ["alpha", "beta"])
    assert e == ExponentVector(-1, {"alpha": 2, "beta": Fraction(1, 2)})


@pytest.mark.parametrize("text", ["alpha*beta", "1/alpha", "gamma(alpha)", "lam"])
def test_exponent_from_ast_rejects(text):
    with pytest.raises(ParseError):
        exponent_from_ast(parse(text), ["alpha", "beta"])


def test_scalar_from_ast():
    assert scalar_from_ast(parse("gamma(1+b)/sqrt(4)"), {"b": 2.0}) == pytest.approx(1.0)
    assert scalar_from_ast(parse("exp(1) - e + pi"), {}) == pytest.approx(math.pi)
    # a binding overrides the constant
    assert scalar_from_ast(parse("e^2"), {"e": 3.0}) == pytest.approx(9.0)
    with pytest.raises(ParseError):
        scalar_from_ast(parse("q + 1"), {})
    with pytest.raises(ParseError):
        scalar_from_ast(parse("1/(a-a)"), {"a": 1.0})


def test_array_from_ast():
    t = np.array([0.0, 0.5, 1.0])
    x = np.array([1.0, 2.0, 3.0])
    got = array_from_ast(parse("sinh(t)*x^2 + gamma(2)*cosh(t)"), {"t": t, "x": x})
    np.testing.assert_allclose(got, np.sinh(t) * x ** 2 + np.cosh(t))


def test_parse_poly():
    p = parse_poly("3*gamma(2)*K1^2 - a*K1*K2 + 1", ["K1", "K2"], {"a": 2.0})
    assert p.close_to(Poly({(("K1", 2),): 3.0, (("K1", 1), ("K2", 1)): -2.0, (): 1.0}))
    assert str(p) == "-2*K1*K2 + 3*K1^2 + 1"


def test_parse_poly_with_call_symbol():
    def call_symbol(fname, args):
        if fname == "Dt" and args[0] == ('name', 'K1'):
            return "D[gamma]K1"
        return None

    p = parse_poly("2*Dt(K1, gamma) + K1", ["K1"], {}, call_symbol)
    assert p.close_to(2 * Poly.symbol("D[gamma]K1") + Poly.symbol("K1"))


@pytest.mark.parametrize("text", ["K1^(1/2)", "1/K1", "K1^-1"])
def test_parse_poly_rejects(text):
    with pytest.raises(ParseError):
        parse_poly(text, ["K1"], {})
