from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from diffcalc.interp import realexpr as rx
from diffcalc.interp.realexpr import Cos, Neg, Pow, Prod, Rat, Sin, Sum, Var, canonical, parse_expr

x, y = Var("x"), Var("y")


def test_like_terms_collect():
    assert canonical(Sum((x, x))) == Prod((Rat(2), x))
    assert canonical(rx.sub(x, x)) == rx.ZERO


def test_constant_term_comes_first():
    assert canonical(parse_expr("x + 3")) == Sum((Rat(3), x))


def test_products_commute():
    assert canonical(Prod((x, y))) == canonical(Prod((y, x)))


def test_powers_expand():
    assert canonical(parse_expr("(x + 1)^2")) == canonical(parse_expr("x * x + 2 * x + 1"))
    assert canonical(Prod((x, x))) == Pow(x, 2)


def test_zero_arguments_fold():
    assert canonical(parse_expr("sin(0) + cos(0) + exp(0)")) == Rat(2)
    assert canonical(Sin(rx.sub(x, x))) == rx.ZERO
    assert canonical(Cos(Sum((x, Neg(x))))) == rx.ONE


def test_transcendental_arguments_are_canonical():
    assert canonical(Sin(Sum((x, x)))) == Sin(Prod((Rat(2), x)))


def test_subst():
    assert rx.subst(parse_expr("x * y"), "x", Rat(2)) == Prod((Rat(2), y))
    assert rx.subst_many(parse_expr("x + y"), {"x": y, "y": Rat(1)}) == Sum((Rat(1), y))


def test_expr_vars_and_prims():
    e = parse_expr("h(x, 2) + y")
    assert rx.expr_vars(e) == {"x", "y"}
    assert rx.contains_prim(e)
    assert not rx.contains_prim(parse_expr("sin(x)"))


def test_sexpr_rendering():
    assert rx.expr_to_sexpr(canonical(parse_expr("x + 3"))) == "(sum (rat 3) (var x))"
    assert rx.expr_to_sexpr(Pow(Sin(x), 2)) == "(pow (sin (var x)) 2)"


@pytest.mark.parametrize("text", ["-2 * x + 1/2 * y^3", "x * sin(y) + exp(2 * x)", "-(x + y)"])
def test_infix_text_parses_back(text):
    e = parse_expr(text)
    assert parse_expr(rx.show_expr(e)) == e


def test_parse_errors():
    with pytest.raises(rx.RealExprParseError):
        parse_expr("x +")
    with pytest.raises(rx.RealExprParseError):
        parse_expr("x ^ y")


def test_fraction_coefficients_stay_exact():
    e = canonical(parse_expr("1/3 * x + 1/6 * x"))
    assert e == Prod((Rat(Fraction(1, 2)), x))


coefficients = st.integers(-5, 5)


def linear(a, b, v=x):
    return Sum((Prod((Rat(a), v)), Rat(b)))


@settings(derandomize=True, max_examples=150)
@given(coefficients, coefficients, coefficients, coefficients, coefficients, coefficients)
def test_ring_laws(a, b, c, d, e, f):
    p, q, r = linear(a, b), linear(c, d, y), linear(e, f)
    assert canonical(Sum((p, q))) == canonical(Sum((q, p)))
    assert canonical(Prod((p, q))) == canonical(Prod((q, p)))
    assert canonical(Prod((p, Sum((q, r))))) == canonical(Sum((Prod((p, q)), Prod((p, r)))))
    assert canonical(Sum((p, Neg(p)))) == rx.ZERO
    assert canonical(canonical(Prod((p, r)))) == canonical(Prod((p, r)))


def test_exponentials_in_one_monomial_merge():
    assert canonical(parse_expr("exp(x) * exp(x)")) == rx.Exp(Prod((Rat(2), x)))
    assert canonical(parse_expr("exp(x) * exp(y)")) == canonical(parse_expr("exp(x + y)"))


def test_odd_and_even_arguments_normalise():
    assert canonical(Sin(Neg(x))) == Prod((Rat(-1), Sin(x)))
    assert canonical(Cos(Neg(x))) == Cos(x)


def test_primitives_survive_the_sympy_bridge():
    e = parse_expr("2 * h(x + 1, y) + h(x + 1, y)")
    assert canonical(e) == Prod((Rat(3), rx.Prim("h", (Sum((Rat(1), x)), y))))
    assert rx.from_sympy(rx.to_sympy(canonical(e))) == canonical(e)
