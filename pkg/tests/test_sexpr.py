import pytest

from diffcalc.interp.realexpr import Rat, Sum, Var
from diffcalc.syntax import sexpr
from diffcalc.syntax.lexer import ParseError
from diffcalc.syntax.parser import parse_type


def test_term_forms(parse):
    t = parse("\\x:R. x (+) 1")
    text = sexpr.term_to_sexpr(t)
    assert text == "(lam x R (add (var x) (const 1 R)))"
    assert sexpr.term_from_sexpr(text) == t


def test_binder_forms(parse):
    assert sexpr.term_to_sexpr(parse("D{x ; x @ 2}")) == "(der (var x) x (const 2 R))"
    assert sexpr.term_to_sexpr(parse("Int{x dx ; 0 .. 1}")) == "(int (const 0 R) (const 1 R) (var x) x)"
    assert sexpr.term_to_sexpr(parse("inl 1 as R+R")) == "(inl (const 1 R) (sum R R))"


def test_type_forms():
    ty = parse_type("(R,R)->R+R")
    assert sexpr.type_to_sexpr(ty) == "(arrow (prod R R) (sum R R))"
    assert sexpr.type_from_sexpr("(arrow (prod R R) (sum R R))") == ty


def test_expression_forms():
    assert sexpr.expr_from_sexpr("(sum (rat 3) (var x))") == Sum((Rat(3), Var("x")))
    assert sexpr.expr_to_sexpr(Sum((Rat(3), Var("x")))) == "(sum (rat 3) (var x))"


@pytest.mark.parametrize("text", ["(a b", "a)", ")", ""])
def test_malformed(text):
    with pytest.raises(ParseError):
        sexpr.read(text)


@pytest.mark.parametrize("text", ["(lam x)", "(proj one (var x))", "x", "(frob (var x))"])
def test_unknown_term_forms(text):
    with pytest.raises(ParseError):
        sexpr.term_from_sexpr(text)


def test_unknown_type_form():
    with pytest.raises(ParseError):
        sexpr.type_from_sexpr("(arrow R)")
