import numpy as np
import pytest

from diffcalc.base import terms as tm
from diffcalc.base.types import Arrow, Product, R
from diffcalc.calculus.equality import readback
from diffcalc.calculus.reducer import (
    RULES,
    Fuel,
    FuelExhausted,
    Reducer,
    StuckTerm,
    is_normal_form,
    normal_form,
    normalize,
    show_path,
    step,
)
from diffcalc.calculus.typechecker import typecheck
from diffcalc.validator.generate import TermGenerator, split_products

RR = Product((R, R))


def value(t, ctx=None):
    return readback(normal_form(t, ctx=ctx), ctx)


def test_beta_trace(parse):
    trace = normalize(parse(r"(\x:R. x) 3"))
    assert trace.final == tm.num(3)
    assert trace.rules() == ["Beta"]
    assert trace.render() == "#1 Beta @ ε: (\\x:R. x) 3 ⟶ 3"
    assert trace.render(unicode=True) == "#1 Beta @ ε: (λx:R. x) 3 ⟶ 3"


def test_strategy_is_leftmost_outermost(parse):
    first = step(parse(r"(\x:R. x) ((\y:R. y) 1)"))
    assert first.rule == "Beta"
    assert first.path == ()


def test_points_reduce_before_bodies(parse):
    first = step(parse(r"D{(\z:R. z) x ; x @ (\y:R. y) 1}"))
    assert first.path == ("at",)


def test_step_on_normal_form_is_none(parse):
    assert step(parse(r"\x:R. x")) is None
    assert step(parse("1 (+) 2")) is None


def test_projection(parse):
    s = step(parse("pi2 (1, 2)"))
    assert (s.rule, s.after) == ("Proj", tm.num(2))


def test_matrix_multiplication(parse):
    t = parse("((1,4),(2,5),(3,6)) * (7,8,9)")
    trace = normalize(t)
    assert trace.rules()[0] == "EAppMul4"
    assert readback(trace.final) == tm.Tuple((tm.num(50), tm.num(122)))


def test_scaling_a_tuple(parse):
    trace = normalize(parse("(1, 2) * 3"))
    assert trace.rules() == ["EAppMul1"]
    assert readback(trace.final) == tm.Tuple((tm.num(3), tm.num(6)))


def test_tuple_addition(parse):
    trace = normalize(parse("(1, 2) (+) (3, 4)"))
    assert trace.rules() == ["EAppAdd1"]
    assert readback(trace.final) == tm.Tuple((tm.num(4), tm.num(6)))


def test_function_addition(parse):
    trace = normalize(parse(r"(\x:R. x) (+) (\y:R. y * 2)"))
    assert trace.rules() == ["EAppAdd2"]
    assert tm.alpha_eq(trace.final, parse(r"\x:R. x (+) x * 2"))


def test_function_subtraction_renames_the_right_binder(parse):
    trace = normalize(parse(r"(\x:R. x) (-) (\y:R. y * y)"))
    assert tm.alpha_eq(trace.final, parse(r"\x:R. x (-) x * x"))


def test_scalar_derivative_is_left_to_the_base_interpreter(parse):
    t = parse("D{x * x ; x @ 3}")
    assert is_normal_form(t)
    assert value(t) == tm.num(6)


def test_derivative_at_a_tuple_splits_into_partials(parse):
    trace = normalize(parse("D{pi1 x * pi2 x ; x @ (2, 3)}"))
    assert trace.rules()[0] == "EAppDer4"
    assert readback(trace.final) == tm.Tuple((tm.num(3), tm.num(2)))


def test_derivative_of_a_tuple_body(parse):
    trace = normalize(parse("D{(x * x, 3 * x) ; x @ 2}"))
    assert trace.rules() == ["EAppDer1"]
    assert readback(trace.final) == tm.Tuple((tm.num(4), tm.num(3)))


def test_derivative_under_a_lambda(parse):
    t = parse(r"(D{\y:R. x * y ; x @ 1}) 5")
    trace = normalize(t)
    assert "EAppDer3" in trace.rules()
    assert readback(trace.final) == tm.num(5)


def test_derivative_of_an_injection(parse):
    trace = normalize(parse("D{inl (x * x) as R+R ; x @ 3}"))
    assert trace.rules() == ["EAppDer2"]
    assert isinstance(trace.final, tm.Inl)
    assert readback(trace.final) == tm.Inl(tm.num(6), trace.final.annot)


def test_integral_rules(parse):
    assert value(parse("Int{2 * x dx ; 0 .. 3}")) == tm.num(9)
    trace = normalize(parse(r"(Int{\y:R. x * y dx ; 0 .. 1}) 2"))
    assert "EAppInt3" in trace.rules()
    assert readback(trace.final) == tm.num(1)
    trace = normalize(parse("Int{(x, 1) dx ; 0 .. 2}"))
    assert trace.rules() == ["EAppInt1"]
    assert readback(trace.final) == tm.Tuple((tm.num(2), tm.num(2)))


def test_integral_over_a_tuple_staircases(parse):
    trace = normalize(parse("Int{(pi2 x, pi1 x) dx ; (0, 0) .. (2, 3)}"))
    assert trace.rules()[0] == "EAppInt4"
    # the integrand is the gradient of x1*x2
    assert readback(trace.final) == tm.num(6)


def test_case_reduction(parse):
    assert value(parse("case inr 5 as R+R of inl a => a | inr b => b * 2")) == tm.num(10)
    assert value(parse("case inl 5 as R+R of inl a => a (+) 1 | inr b => b")) == tm.num(6)


def test_fuel_exhaustion_keeps_partial_trace(parse):
    with pytest.raises(FuelExhausted) as err:
        normalize(parse(r"fix (\h:R->R. h)"), fuel=50)
    assert len(err.value.trace) == 50
    assert set(err.value.trace.rules()) == {"FixUnfold", "Beta"}
    assert err.value.trace.replay() == err.value.term


def test_fix_reaches_a_normal_form_when_unused(parse):
    assert value(parse(r"(fix (\h:R->R. \n:R. 7)) 1")) == tm.num(7)


def test_stuck_term():
    ctx = tm.TypingContext.of(y=RR)
    with pytest.raises(StuckTerm):
        normalize(tm.Proj(1, tm.Var("y")), ctx=ctx)


def test_preservation_checking_mode(parse):
    reducer = Reducer(check_preservation=True)
    trace = reducer.normalize(parse("D{pi1 x * pi2 x ; x @ (2, 3)} * (1, 1)"))
    assert readback(trace.final) == tm.num(5)


def test_random_strategy_agrees(parse):
    t = parse("((1,4),(2,5),(3,6)) * (7,8,9)")
    for seed in range(5):
        trace = Reducer(strategy="random", seed=seed).normalize(t)
        assert readback(trace.final) == tm.Tuple((tm.num(50), tm.num(122)))


def test_unknown_strategy():
    with pytest.raises(ValueError):
        Reducer(strategy="innermost")


def test_trace_replays_to_final(parse):
    trace = normalize(parse("D{f x ; x @ (1, 2)}"))
    assert trace.replay() == trace.final
    assert all(s.rule in RULES for s in trace.steps)


def test_fuel():
    fuel = Fuel(3)
    fuel.consume()
    assert fuel.used == 1 and bool(fuel)
    with pytest.raises(ValueError):
        Fuel(-1)


def test_show_path():
    assert show_path(()) == "ε"
    assert show_path(("fun", "body", "2")) == "fun/body/2"


@pytest.mark.parametrize("seed", range(30))
def test_generated_terms_normalize_and_preserve_type(seed):
    t, ty = TermGenerator(np.random.default_rng(seed)).closed()
    trace = Reducer(check_preservation=True).normalize(t, Fuel(20_000))
    assert typecheck(None, trace.final) == ty
    assert is_normal_form(trace.final)


@pytest.mark.parametrize("seed", range(30))
def test_open_terms_normalize_and_preserve_type(seed):
    t, ty, ctx = TermGenerator(np.random.default_rng(seed)).open()
    flat, flat_ctx = split_products(t, ctx)
    assert typecheck(flat_ctx, flat) == ty
    trace = Reducer(check_preservation=True).normalize(flat, Fuel(20_000), flat_ctx)
    assert typecheck(flat_ctx, trace.final) == ty
    assert is_normal_form(trace.final, flat_ctx)


def test_split_products_leaves_interpretable_variables():
    ctx = tm.TypingContext.of(a=R, p=RR, h=Arrow(R, R))
    t = tm.Add(tm.App(tm.Var("h"), tm.Proj(1, tm.Var("p"))), tm.Var("a"))
    flat, flat_ctx = split_products(t, ctx)
    assert flat_ctx.as_dict() == {"a": R, "h": Arrow(R, R), "p1": R, "p2": R}
    assert flat == tm.Add(
        tm.App(tm.Var("h"), tm.Proj(1, tm.Tuple((tm.Var("p1"), tm.Var("p2"))))), tm.Var("a")
    )
    assert normal_form(flat, ctx=flat_ctx) == tm.Add(tm.App(tm.Var("h"), tm.Var("p1")), tm.Var("a"))


def test_pair_variables_block_projection():
    ctx = tm.TypingContext.of(p=RR)
    with pytest.raises(StuckTerm):
        normalize(tm.Proj(1, tm.Var("p")), ctx=ctx)
