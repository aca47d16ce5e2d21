import math

import numpy as np
import pytest

from mcgehee import expr
from mcgehee.errors import ParseError, UnboundParameterError, UnknownFunctionError
from mcgehee.expr import BinOp, Call, Neg, Num, Pow, Theta, parse
from mcgehee.jets import Jet2


def evaluate(text, theta=0.0, params=None):
    f = expr.compile_node(parse(text), params or {})
    return f(Jet2.variable(theta)).val


# ----------------------------------------------------------------- parsing
def test_literals_and_precedence():
    assert evaluate("2+3*4^2") == 50.0
    assert evaluate("2*3+4") == 10.0
    assert evaluate("-2^2") == -4.0
    assert evaluate("2^3^2") == 512.0
    assert evaluate("(2+3)*4") == 20.0
    assert evaluate("2 - 3 - 4") == -5.0
    assert evaluate("16/4/2") == 2.0


def test_number_formats():
    assert evaluate("1e-3") == 1e-3
    assert evaluate("2.5E+2") == 250.0
    assert evaluate(".5") == 0.5
    assert evaluate("7.") == 7.0


def test_pi_and_theta():
    assert evaluate("2*pi") == 2 * math.pi
    assert evaluate("theta + 1", theta=0.25) == 1.25


def test_ast_shape():
    node = parse("cos(theta)^2")
    assert node == Pow(Call("cos", Theta()), Num(2.0))
    assert parse("-x*y") == BinOp("*", Neg(expr.Param("x")), expr.Param("y"))


def test_unary_minus_chain():
    assert evaluate("--3") == 3.0
    assert evaluate("-(-(-2))") == -2.0


def test_free_parameters():
    node = parse("-1/cos(theta) - 4*a^(3/2)/sqrt(a + 2*sin(theta)^2)")
    assert expr.free_parameters(node) == {"a"}


def test_isosceles_expression_value():
    text = "-1/cos(theta) - 4*a^(3/2)/sqrt(a + 2*sin(theta)^2)"
    assert evaluate(text, 0.0, {"a": 1.0}) == pytest.approx(-5.0, abs=1e-14)


def test_parameter_in_exponent():
    assert evaluate("2^k", params={"k": 3.0}) == 8.0


# ----------------------------------------------------------------- errors
def test_truncated_input():
    with pytest.raises(ParseError) as err:
        parse("2+")
    assert err.value.position == 2


def test_unbalanced_paren():
    with pytest.raises(ParseError):
        parse("(2")


def test_trailing_garbage():
    with pytest.raises(ParseError):
        parse("2 3")


def test_unknown_function():
    with pytest.raises(UnknownFunctionError) as err:
        parse("sinh(theta)")
    assert err.value.position == 0


def test_bad_character():
    with pytest.raises(ParseError):
        parse("2 @ 3")


def test_unbound_parameter_at_compile():
    with pytest.raises(UnboundParameterError):
        expr.compile_node(parse("a*theta"), {})


# ----------------------------------------------------------------- round trip
ROUND_TRIP_SOURCES = [
    "2+3*4^2",
    "-2^2",
    "2^3^2",
    "-(cos(theta)^4+sin(theta)^4)/4 - (e/2)*cos(theta)^2*sin(theta)^2",
    "-1/cos(theta) - 4*a^(3/2)/sqrt(a + 2*sin(theta)^2)",
    "1 - 2 - 3*theta/(4 - cos(theta))",
    "exp(-theta^2) * log(2 + sin(theta))",
    "abs(2 + cos(theta)) - tan(theta/4)",
]


@pytest.mark.parametrize("source", ROUND_TRIP_SOURCES)
def test_print_parse_round_trip(source):
    params = {"a": 1.3, "e": 4.0}
    node = parse(source)
    printed = expr.to_source(node)
    f = expr.compile_node(node, params)
    g = expr.compile_node(parse(printed), params)
    grid = np.linspace(-1.2, 1.2, 100)
    a, b = f(Jet2.variable(grid)), g(Jet2.variable(grid))
    assert np.array_equal(a.val, b.val)
    assert np.array_equal(a.d1, b.d1)
    assert np.array_equal(a.d2, b.d2)
