import pytest
from hypothesis import given, settings, strategies as st

from diffcalc.base import terms as tm
from diffcalc.calculus import theorems as th
from diffcalc.base.types import R
from diffcalc.calculus.equality import EqConfig, term_eq
from diffcalc.calculus.reducer import FuelExhausted
from diffcalc.calculus.typechecker import TypeCheckError
from diffcalc.syntax.parser import parse_term, parse_type
from diffcalc.syntax.printer import show_term


def test_newton_leibniz_golden(parse, eq_config):
    check = th.check_newton_leibniz(parse("f y"), "y", parse("(0, 0)"), parse("(2, 3)"), eq_config)
    assert check.holds
    assert term_eq(check.lhs, parse("(5, 6, 3)"), eq_config)
    report = check.report()
    assert report.verdict == "true"
    assert report.inputs["to"] == "(2, 3)"


def test_chain_rule_golden(programs, parse, eq_config):
    check = th.check_chain_rule(programs["f"], programs["g"], parse("(r3, r4)"), parse("(r1, r2)"), eq_config)
    assert check.holds
    expected = parse("(r1 (+) 2 * r2, r4 * r1 (+) (r3 (+) 2 * r4) * r2, r2)")
    assert term_eq(check.lhs, expected, eq_config)
    assert term_eq(check.rhs, expected, eq_config)


def test_chain_rule_with_identity(parse, eq_config):
    ident = parse("\\x:(R,R). x")
    assert th.check_chain_rule(ident, ident, parse("(1, 2)"), parse("(a, b)"), eq_config)


def test_magsqr_gradient(programs, parse, eq_config):
    gradient = th.ad_gradient(programs["magSqr"], parse("(a, b)"))
    assert term_eq(gradient, parse("(2 * a, 2 * b)"), eq_config)


def test_jacobian_and_directional_derivatives(programs, parse, eq_config):
    f, point = programs["jacobianf"], parse("(x, y)")
    assert term_eq(th.ad_gradient(f, point), parse("((2 * x, y), (0, x (+) 1))"), eq_config)
    along = th.ad_basis(f, point)
    assert len(along) == 2
    assert term_eq(along[0], parse("(2 * x, y)"), eq_config)
    assert term_eq(along[1], parse("(0, x (+) 1)"), eq_config)


def test_basis():
    assert th.basis(R) == [tm.num(1)]
    assert [show_term(e) for e in th.basis(parse_type("(R,R,R)"))] == ["(1, 0, 0)", "(0, 1, 0)", "(0, 0, 1)"]
    with pytest.raises(ValueError):
        th.basis(parse_type("R->R"))


def test_taylor_golden(programs, parse, eq_config):
    f = programs["taylorf"]
    origin, c = parse("(0, 0)"), parse("(c1, c2)")
    check = th.check_taylor(f, origin, c, 2, cfg=eq_config)
    assert check.holds
    assert sorted(check.extra) == ["partial_0", "partial_1", "partial_2"]

    first = th.power_mul(tm.App(th.derive_n(f, 1), origin), c, 1)
    assert term_eq(first, parse("(0, c2)"), eq_config)
    second = th.power_mul(tm.App(th.derive_n(f, 2), origin), c, 2)
    assert term_eq(second, parse("(4 * c1 * c2, 6 * c1 * c1)"), eq_config)
    hessian = tm.App(th.derive_n(f, 2), origin)
    assert term_eq(hessian, parse("(((0, 6), (2, 0)), ((2, 0), (0, 0)))"), eq_config)


def test_taylor_polar_to_cartesian(programs, parse, eq_config):
    expected = parse("(1 (+) dr (-) 1/2 * dth * dth, dth (+) dr * dth)")
    check = th.check_taylor(
        programs["polar2cartesian"], parse("(1, 0)"), parse("(1 (+) dr, dth)"), 2, expected, eq_config
    )
    assert check.holds


def test_truncated_taylor_is_not_exact(programs, parse, eq_config):
    check = th.check_taylor(programs["taylorf"], parse("(0, 0)"), parse("(c1, c2)"), 1, cfg=eq_config)
    assert check.verdict == "false"
    report = check.report()
    assert report.witness is not None
    assert report.witness.reason == "normal forms differ"


def test_taylor_expansion_shape(programs, parse):
    expansion = th.taylor_expansion(programs["sqr"], parse("1"), parse("x"), 3)
    assert expansion.order == 3
    assert len(expansion.partial_sums) == 4
    assert [str(c) for c in expansion.coefficients] == ["1", "1", "1/2", "1/6"]
    assert expansion.term is expansion.partial_sums[-1]
    with pytest.raises(ValueError):
        th.taylor_expansion(programs["sqr"], parse("1"), parse("x"), -1)


def test_incremental_average(programs, parse, eq_config):
    increment = th.derive_incremental(programs["average"], parse("(x1, x2)"), parse("(d, 0)"))
    assert term_eq(increment, parse("d * 1/2"), eq_config)
    check = th.check_incremental(programs["average"], parse("(x1, x2)"), parse("(d, 0)"), eq_config)
    assert check.holds
    assert "increment" in check.report().extra


def test_fun_derive(parse, eq_config):
    derivative = th.fun_derive(parse("\\x:R. x * x * x"))
    assert isinstance(derivative, tm.Lam)
    assert term_eq(tm.App(derivative, tm.num(2)), tm.num(12), eq_config)


def test_fun_derive_normalizes_its_argument(parse, eq_config):
    derivative = th.fun_derive(parse("(\\g:R->R. g) (\\x:R. x * x)"))
    assert term_eq(tm.App(derivative, tm.num(3)), tm.num(6), eq_config)


def test_fun_derive_errors(parse):
    with pytest.raises(th.NotALambda):
        th.fun_derive(parse("3"))
    with pytest.raises(TypeCheckError) as info:
        th.fun_derive(parse("\\s:R+R. 1"))
    assert info.value.kind == "NoDerivativeType"


def test_iterated_derivatives(parse, eq_config):
    cube = parse("x * x * x")
    assert th.derive_at_n(cube, "x", tm.num(2), 0) is cube
    assert term_eq(th.derive_at_n(cube, "x", tm.num(2), 2), tm.num(12), eq_config)
    f = parse("\\x:R. x")
    assert th.derive_n(f, 0) is f
    with pytest.raises(ValueError):
        th.derive_n(f, -1)


def test_power_mul(parse):
    t = parse("2")
    assert th.power_mul(t, parse("3"), 0) is t
    assert show_term(th.power_mul(t, parse("3"), 2)) == "2 * 3 * 3"
    with pytest.raises(TypeCheckError):
        th.power_mul(parse("1"), parse("(1, 2)"), 1)


def test_discussion_laws(parse, eq_config):
    x = "x"
    assert th.check_derivative_additivity(parse("x * x"), parse("3 * x"), x, parse("2"), eq_config)
    assert th.check_product_rule(parse("x * x"), parse("x (+) 1"), x, parse("a"), eq_config)
    assert th.check_linearity(parse("3 (+) b"), x, parse("2"), eq_config)
    assert th.check_distributivity(parse("a"), parse("b"), parse("c"), eq_config)
    assert th.check_telescoping([parse(v) for v in ("a", "b", "c", "d")], eq_config)


def test_law_preconditions(parse):
    with pytest.raises(ValueError):
        th.check_linearity(parse("x"), "x", parse("2"))
    with pytest.raises(ValueError):
        th.check_telescoping([parse("a")])


def test_out_of_fuel_is_inconclusive(parse):
    check = th.compare_sides("loop", {}, parse("fix (\\f:R->R. f) 1"), parse("1"), EqConfig(fuel=50, seed=1))
    assert check.verdict == "inconclusive"
    assert not check
    assert "fuel exhausted" in check.detail


small = st.integers(-3, 3)


@settings(derandomize=True, max_examples=12, deadline=None)
@given(small, small, small, small)
def test_taylor_terminates_for_quadratics(a, b, c, center):
    f = parse_term(f"\\x:R. {a} (+) {b} * x (+) {c} * x * x")
    check = th.check_taylor(f, tm.num(center), tm.Var("t"), 2, cfg=EqConfig(seed=3, trials=2))
    assert check.holds


@settings(derandomize=True, max_examples=12, deadline=None)
@given(small, small, small)
def test_incremental_identity(a, b, c):
    f = parse_term(f"\\p:(R,R). {a} * pi1 p * pi2 p (+) {b} * pi1 p (+) {c}")
    check = th.check_incremental(f, parse_term("(u, v)"), parse_term("(du, dv)"), EqConfig(seed=3, trials=2))
    assert check.holds


def test_zero_fuel_is_a_budget_not_a_default(programs, parse):
    f, point = programs["magSqr"], parse("(1, 2)")
    with pytest.raises(FuelExhausted):
        th.ad_gradient(f, point, fuel=0)
    with pytest.raises(FuelExhausted):
        th.ad_directional(f, point, parse("(1, 0)"), fuel=0)
    assert show_term(th.ad_gradient(f, point, fuel=None)) == show_term(th.ad_gradient(f, point, fuel=1_000))
