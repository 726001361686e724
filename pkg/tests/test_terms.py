import itertools
from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diffcalc.base import terms as tm
from diffcalc.base.types import Product, R
from diffcalc.validator.generate import TermGenerator

x, y, z = tm.Var("x"), tm.Var("y"), tm.Var("z")


def test_tuples_need_two_items():
    with pytest.raises(ValueError):
        tm.Tuple((x,))


def test_num_normalises_rationals():
    assert tm.num(2) == tm.Const("2", R)
    assert tm.num("4/6") == tm.Const("2/3", R)
    assert tm.literal_value(tm.num("-1/2")) == Fraction(-1, 2)
    assert tm.literal_value(tm.Const("sin")) is None


def test_free_vars_respects_every_binder(parse):
    assert tm.free_vars(parse(r"\x:R. x (+) y", builtins=False)) == {"y"}
    assert tm.free_vars(parse("D{x * y ; x @ z}", builtins=False)) == {"y", "z"}
    assert tm.free_vars(parse("Int{x * y dx ; a .. b}", builtins=False)) == {"y", "a", "b"}
    assert tm.free_vars(parse("Delta{x * y ; x @ a , d}", builtins=False)) == {"y", "a", "d"}
    case = parse("case s of inl a => a (+) b | inr c => c", builtins=False)
    assert tm.free_vars(case) == {"s", "b"}


def test_point_of_a_derivative_is_outside_its_binder():
    # x in the point is free even though the body binds x.
    assert tm.free_vars(tm.Der(x, "x", x)) == {"x"}


def test_substitute_replaces_free_occurrences():
    t = tm.Add(x, tm.Mul(x, y))
    assert tm.substitute(t, "x", tm.num(3)) == tm.Add(tm.num(3), tm.Mul(tm.num(3), y))


def test_substitute_leaves_bound_occurrences():
    lam = tm.Lam("x", R, x)
    assert tm.substitute(lam, "x", tm.num(3)) == lam


def test_substitute_avoids_capture():
    lam = tm.Lam("y", R, tm.Add(x, y))
    out = tm.substitute(lam, "x", y)
    assert out == tm.Lam("y_1", R, tm.Add(y, tm.Var("y_1")))
    assert tm.alpha_eq(out, tm.Lam("w", R, tm.Add(y, tm.Var("w"))))


def test_substitute_avoids_capture_under_derivative():
    der = tm.Der(tm.Mul(x, y), "y", z)
    out = tm.substitute(der, "x", y)
    assert isinstance(out, tm.Der)
    assert out.var != "y"
    assert tm.free_vars(out) == {"y", "z"}


def test_substitute_many_is_sequential():
    t = tm.Add(x, y)
    assert tm.substitute_many(t, {"x": tm.num(1), "y": tm.num(2)}) == tm.Add(tm.num(1), tm.num(2))


def test_alpha_equivalence():
    assert tm.alpha_eq(tm.Lam("x", R, x), tm.Lam("y", R, y))
    assert not tm.alpha_eq(tm.Lam("x", R, y), tm.Lam("y", R, y))
    assert not tm.alpha_eq(tm.Lam("x", R, x), tm.Lam("x", Product((R, R)), x))
    assert tm.alpha_eq(tm.Der(tm.Mul(x, x), "x", z), tm.Der(tm.Mul(y, y), "y", z))
    assert not tm.alpha_eq(tm.Der(x, "x", z), tm.Der(x, "x", y))


def test_alpha_equivalence_of_case_branches():
    a = tm.Case(z, "a", tm.Var("a"), "b", tm.num(0))
    b = tm.Case(z, "c", tm.Var("c"), "d", tm.num(0))
    assert tm.alpha_eq(a, b)


def test_fresh_var():
    assert tm.fresh_var("x", set()) == "x"
    assert tm.fresh_var("x", {"x"}) == "x_1"
    assert tm.fresh_var("x", {"x", "x_1"}) == "x_2"


@settings(derandomize=True, max_examples=200)
@given(st.sets(st.from_regex(r"[a-c](_[1-9])?", fullmatch=True)), st.sampled_from(["a", "b", "c"]))
def test_fresh_var_never_collides(avoid, base):
    name = tm.fresh_var(base, avoid)
    assert name not in avoid
    assert name.startswith(base)


@settings(derandomize=True, max_examples=100)
@given(st.integers(-50, 50), st.integers(-50, 50))
def test_substitution_of_absent_variable_is_identity(a, b):
    t = tm.Lam("x", R, tm.Add(tm.Mul(x, tm.num(a)), tm.num(b)))
    assert tm.substitute(t, "q", tm.num(a)) == t


def test_positions():
    t = tm.Der(tm.Mul(x, x), "x", tm.Tuple((tm.num(1), y)))
    paths = [path for path, _ in tm.subterms(t)]
    assert paths[0] == ()
    # points are visited before bodies
    assert paths[1] == ("at",)
    assert tm.get_at(t, ("at", "2")) == y
    replaced = tm.replace_at(t, ("at", "2"), tm.num(5))
    assert replaced.at == tm.Tuple((tm.num(1), tm.num(5)))
    assert tm.size(t) == 7


def test_binder_of():
    lam = tm.Lam("x", R, x)
    assert tm.binder_of(lam, "body") == "x"
    assert tm.binder_of(tm.Der(x, "x", y), "at") is None


def test_all_vars_includes_binders():
    assert tm.all_vars(tm.Lam("x", R, y)) == {"x", "y"}


def test_typing_context():
    ctx = tm.TypingContext.of(x=R).extend("x", Product((R, R)))
    assert ctx.lookup("x") == Product((R, R))
    assert ctx.lookup("y") is None
    assert "x" in ctx and "y" not in ctx
    assert ctx.names() == {"x"}


def test_close_context_types_missing_variables_as_r():
    ctx = tm.close_context(tm.Add(x, y), tm.TypingContext.of(x=Product((R, R))))
    assert ctx.lookup("x") == Product((R, R))
    assert ctx.lookup("y") == R


# ---- substitution over generated terms ----

BINDER_FIELDS = {"body": "var", "lbranch": "lvar", "rbranch": "rvar"}

seeds = st.integers(0, 2**32 - 1)


def freshen(t, names):
    """Alpha-variant of ``t`` with every binder renamed to the next of ``names``."""
    out = t
    for label, child in tm.children(t):
        bound = tm.binder_of(t, label)
        if bound is not None:
            new = next(names)
            child = tm.rename(child, bound, new)
            out = replace(out, **{BINDER_FIELDS[label]: new})
        out = tm.with_child(out, label, freshen(child, names))
    return out


def open_instance(seed, size=3):
    """An open term, one of its context variables and a replacement of that variable's type."""
    gen = TermGenerator(np.random.default_rng(seed))
    ctx = gen.context(size)
    t, _, _ = gen.open(ctx=ctx)
    name = gen.choice(sorted(ctx.names()))
    s = gen.term(ctx.lookup(name), ctx, 2)
    return gen, ctx, t, name, s


def without(ctx, name):
    return tm.TypingContext(tuple(b for b in ctx.bindings if b[0] != name))


def test_freshen_renames_every_binder():
    t = tm.Lam("x", R, tm.Der(tm.Mul(x, y), "y", x))
    out = freshen(t, (f"r{i}" for i in itertools.count()))
    assert out == tm.Lam("r0", R, tm.Der(tm.Mul(tm.Var("r0"), tm.Var("r1")), "r1", tm.Var("r0")))
    assert tm.alpha_eq(out, t)


@settings(derandomize=True, max_examples=80, deadline=None)
@given(seeds)
def test_free_variables_of_a_substitution(seed):
    _, _, t, name, s = open_instance(seed)
    out = tm.free_vars(tm.substitute(t, name, s))
    if name in tm.free_vars(t):
        assert out == (tm.free_vars(t) - {name}) | tm.free_vars(s)
    else:
        assert out == tm.free_vars(t)


@settings(derandomize=True, max_examples=80, deadline=None)
@given(seeds)
def test_substitution_respects_alpha_equivalence(seed):
    _, _, t, name, s = open_instance(seed)
    variant = freshen(t, (f"r{i}" for i in itertools.count()))
    assert tm.alpha_eq(variant, t)
    assert tm.alpha_eq(tm.substitute(variant, name, s), tm.substitute(t, name, s))


@settings(derandomize=True, max_examples=80, deadline=None)
@given(seeds)
def test_substitutions_commute(seed):
    # t[s/x][u/y] = t[u/y][s[u/y]/x] when x is distinct from y and not free in u.
    gen, ctx, t, name, s = open_instance(seed)
    others = sorted(ctx.names() - {name})
    other = gen.choice(others)
    u = gen.term(ctx.lookup(other), without(ctx, name), 2)
    left = tm.substitute(tm.substitute(t, name, s), other, u)
    right = tm.substitute(tm.substitute(t, other, u), name, tm.substitute(s, other, u))
    assert tm.alpha_eq(left, right)
