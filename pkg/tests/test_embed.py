import pytest
from hypothesis import given, settings, strategies as st

from diffcalc.base import terms as tm
from diffcalc.interp import realexpr as rx
from diffcalc.interp.embed import NotInterpretable, embed, reify
from diffcalc.interp.primitives import DEFAULT_PRIMITIVES, UnsupportedPrimitive
from diffcalc.interp.realexpr import Prim, Rat, Var, canonical, parse_expr
from diffcalc.syntax.printer import show_term


def c(text):
    return canonical(parse_expr(text))


@pytest.mark.parametrize(
    "term, expected",
    [
        ("3 (+) 4 * 2", "11"),
        ("y (-) y", "0"),
        ("D{x * x ; x @ y}", "2 * y"),
        ("D{x * x * x ; x @ 2}", "12"),
        ("Int{x dx ; a .. b}", "1/2 * b^2 + -1/2 * a^2"),
        ("Int{x * x dx ; 0 .. 3}", "9"),
        ("Delta{x * x ; x @ a , d}", "2 * a * d + d^2"),
        ("sin 0 (+) cos 0", "1"),
        ("D{sin x ; x @ y}", "cos(y)"),
        ("(\\z:R. z * z) 3", "9"),
        ("(D{\\y:R. x * y ; x @ 1}) 5", "5"),
        ("((\\u:R. u) (+) (\\u:R. u * u)) 2", "6"),
    ],
)
def test_embed(parse, term, expected):
    assert embed(parse(term)) == c(expected)


def test_free_function_variables_become_opaque_primitives(parse):
    assert embed(parse("h 2 (+) h 2")) == rx.Prod((Rat(2), Prim("h", (Rat(2),))))


def test_free_function_variable_cannot_be_differentiated(parse):
    with pytest.raises(UnsupportedPrimitive):
        embed(parse("D{h x ; x @ 1}"))


@pytest.mark.parametrize("term", ["(1, 2)", "sin", "inl 0 as R+R", "\\x:R. x"])
def test_not_interpretable(parse, term):
    with pytest.raises(NotInterpretable):
        embed(parse(term))


def test_reify_subtracts_negative_summands():
    t = reify(c("x + -2 * y"))
    assert t == tm.Sub(tm.Var("x"), tm.Mul(tm.num(2), tm.Var("y")))
    assert show_term(t) == "x (-) 2 * y"


def test_reify_unfolds_powers():
    assert reify(c("x^2")) == tm.Mul(tm.Var("x"), tm.Var("x"))


def test_reify_primitives():
    sin = tm.Const("sin", DEFAULT_PRIMITIVES["sin"].type)
    assert reify(c("sin(x)")) == tm.App(sin, tm.Var("x"))
    assert reify(Prim("h", (Var("x"),))) == tm.App(tm.Var("h"), tm.Var("x"))


coefficients = st.integers(-4, 4)


@settings(derandomize=True, max_examples=100)
@given(coefficients, coefficients, coefficients, coefficients)
def test_reify_then_embed_is_canonical(a, b, k, m):
    e = canonical(rx.Sum((
        rx.Prod((Rat(a), Var("x"), Var("y"))),
        rx.Prod((Rat(b), rx.Pow(Var("x"), 2))),
        rx.Prod((Rat(k), rx.Sin(Var("y")))),
        Rat(m),
    )))
    assert embed(reify(e)) == e
