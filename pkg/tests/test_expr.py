import math

import numpy as np
import pytest

from expr.dual import eval_dual, eval_dual_batch
from expr.models import (
    ArityError,
    BinOp,
    Call,
    ExpressionDomainError,
    ExpressionSyntaxError,
    Num,
    UnknownIdentifierError,
    Var,
    max_variable_index,
)
from expr.parser import parse, print_expression


def test_parse_division_of_call():
    assert parse("cos(x1)/4") == BinOp("/", Call("cos", Var(1)), Num(4.0))


def test_parse_is_whitespace_insensitive():
    assert parse("  x1 *  ( 2+x2 ) ") == parse("x1*(2+x2)")


def test_precedence_power_over_unary_minus():
    # -x1^2 is -(x1^2)
    assert eval_dual(parse("-x1^2"), [3.0]).value == pytest.approx(-9.0)
    assert eval_dual(parse("2-3-4"), [0.0]).value == pytest.approx(-5.0)
    assert eval_dual(parse("8/4/2"), [0.0]).value == pytest.approx(1.0)


def test_unknown_variable_outside_scope():
    with pytest.raises(UnknownIdentifierError) as exc:
        parse("x1 + x2*x2", d=1)
    assert "x2" in str(exc.value)
    assert exc.value.position == 5


def test_unknown_identifier_and_arity():
    with pytest.raises(UnknownIdentifierError):
        parse("abs(x1)")
    with pytest.raises(ArityError):
        parse("sin(x1, x2)")
    with pytest.raises(ArityError):
        parse("cos()")


@pytest.mark.parametrize("text,position", [("x1 +", 4), ("(x1", 3), ("x1 $ 2", 3), ("x1^1.5", 3)])
def test_syntax_errors_carry_position(text, position):
    with pytest.raises(ExpressionSyntaxError) as exc:
        parse(text)
    assert exc.value.position == position


def test_empty_text_rejected():
    with pytest.raises(ExpressionSyntaxError):
        parse("   ")


def test_sin_of_half_pi():
    assert eval_dual(parse("sin(pi/2)"), [0.0]).value == pytest.approx(1.0)


def test_pi_is_the_float_pi():
    dv = eval_dual(parse("pi"), [0.0])
    assert dv.value == math.pi
    assert np.all(dv.partials == 0.0)


def test_eval_dual_sin_at_zero():
    dv = eval_dual(parse("sin(x1)"), [0.0])
    assert dv.value == 0.0
    np.testing.assert_allclose(dv.partials, [1.0])


def test_eval_dual_product_rule():
    dv = eval_dual(parse("x1^2 * x2"), [3.0, 5.0])
    assert dv.value == pytest.approx(45.0)
    np.testing.assert_allclose(dv.partials, [30.0, 9.0])


def test_negative_integer_exponent():
    dv = eval_dual(parse("x1^-2"), [2.0])
    assert dv.value == pytest.approx(0.25)
    np.testing.assert_allclose(dv.partials, [-0.25])


def test_domain_errors_name_the_subexpression():
    with pytest.raises(ExpressionDomainError) as exc:
        eval_dual(parse("1/(x1-1)"), [1.0])
    assert "x1 - 1" in exc.value.subexpression
    with pytest.raises(ExpressionDomainError):
        eval_dual(parse("sqrt(x1)"), [-1.0])
    with pytest.raises(ExpressionDomainError):
        eval_dual(parse("sqrt(x1)"), [0.0])


def test_batch_evaluation_masks_bad_rows():
    X = np.array([[4.0], [-1.0], [9.0]])
    dv, bad = eval_dual_batch(parse("sqrt(x1)"), X)
    assert bad.tolist() == [False, True, False]
    np.testing.assert_allclose(dv.value[~bad], [2.0, 3.0])
    np.testing.assert_allclose(dv.partials[~bad, 0], [0.25, 1.0 / 6.0])


def test_batch_matches_single_point():
    e = parse("exp(x1)*cos(x2) + x1*x2^3")
    X = np.random.default_rng(0).uniform(-1, 1, size=(20, 2))
    dv, bad = eval_dual_batch(e, X)
    assert not bad.any()
    for k, x in enumerate(X):
        single = eval_dual(e, x)
        assert dv.value[k] == pytest.approx(float(single.value))
        np.testing.assert_allclose(dv.partials[k], single.partials)


SMOOTH = [
    "sin(x1)*cos(x2)",
    "exp(x1/2) - x2^3 + 1/(2 + x1^2)",
    "sqrt(1 + x1^2 + x2^2)",
    "x1*x2/(3 + cos(x1*x2))",
    "(x1 - x2)^4 - 2*pi*x2",
]


@pytest.mark.parametrize("text", SMOOTH)
def test_partials_match_central_differences(text):
    e = parse(text)
    rng = np.random.default_rng(7)
    h = 1e-5
    for x in rng.uniform(-1, 1, size=(50, 2)):
        dv = eval_dual(e, x)
        for j in range(2):
            step = np.zeros(2)
            step[j] = h
            fd = (float(eval_dual(e, x + step).value) - float(eval_dual(e, x - step).value)) / (2 * h)
            assert abs(dv.partials[j] - fd) / (1 + abs(dv.partials[j])) <= 1e-6


@pytest.mark.parametrize(
    "text",
    ["cos(x1)/4", "-x1^2", "(-x1)^2", "x1 - (x2 - 3)", "x1/(x2*x1)", "--x1", "2^3^2", "x1^-2", "1e-05*x1"] + SMOOTH,
)
def test_print_parse_round_trip(text):
    tree = parse(text)
    assert parse(print_expression(tree)) == tree


def test_max_variable_index():
    assert max_variable_index(parse("x3 + sin(x1)")) == 3
    assert max_variable_index(parse("2*pi")) == 0


@pytest.mark.parametrize(
    "text, printed",
    [
        ("(x1*x2)+x3", "x1 * x2 + x3"),
        ("x1 - (x2 - x3)", "x1 - (x2 - x3)"),
        ("(x1 - x2) - x3", "x1 - x2 - x3"),
        ("(x1 + x2)*x3", "(x1 + x2) * x3"),
        ("-(x1^2)", "-x1^2"),
    ],
)
def test_printer_uses_minimal_parentheses(text, printed):
    assert print_expression(parse(text)) == printed
