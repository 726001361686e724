# The MIT License (MIT)
# Copyright © 2025 The diffcalc developers

# Permission is hereby granted, free of charge, to any person obtaining a copy of this software and associated
# documentation files (the “Software”), to deal in the Software without restriction, including without limitation
# the rights to use, copy, modify, merge, publish, distribute, sublicense, and/or sell copies of the Software,
# and to permit persons to whom the Software is furnished to do so, subject to the following conditions:

# The above copyright notice and this permission notice shall be included in all copies or substantial portions of
# the Software.

# THE SOFTWARE IS PROVIDED “AS IS”, WITHOUT WARRANTY OF ANY KIND, EXPRESS OR IMPLIED, INCLUDING BUT NOT LIMITED TO
# THE WARRANTIES OF MERCHANTABILITY, FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL
# THE AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER LIABILITY, WHETHER IN AN ACTION
# OF CONTRACT, TORT OR OTHERWISE, ARISING FROM, OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER
# DEALINGS IN THE SOFTWARE.

"""
Discrete derivatives ``Δt/Δy|_{a,d}``.

A discrete program is any term without ``∂`` or ``∫``. On top of the base
rules the discrete reducer fires, at a ``Delta`` node:

- DVar:    ``Δy/Δy|_{a,d}`` is ``d``;
- DConst:  ``Δt/Δy|_{a,d}`` is the zero of the body type when ``y`` is not free in ``t``;
- DLam:    the delta moves under a lambda body;
- DPair:   the delta moves into each tuple component;
- DUnfold: otherwise ``t[a⊕d/y] ⊖ t[a/y]``;

and, at an application, DApp rewrites
``(λx.λdx. Δt/Δy|_{x,dx}) t1 t2`` to ``(λy.t)(t1⊕t2) ⊖ (λy.t) t1``.
"""

from typing import Optional

from ..base import terms as tm
from ..base.errors import DiffcalcError
from ..base.types import Arrow, Base, Product, Type
from .equality import EqConfig
from .reducer import Reducer, Step
from .theorems import TheoremCheck, compare_sides
from .typechecker import TypeCheckError

DISCRETE_RULES = ("DVar", "DConst", "DLam", "DPair", "DUnfold", "DApp")


class NotDiscrete(DiffcalcError):
    """The term uses ``∂`` or ``∫``."""


def check_discrete(t: tm.Term) -> None:
    for path, sub in tm.subterms(t):
        if isinstance(sub, (tm.Der, tm.Int)):
            where = "/".join(path) or "ε"
            raise NotDiscrete(f"{type(sub).__name__} is not allowed in a discrete program (at {where})")


def zero_of(ty: Type) -> tm.Term:
    """The additive zero of an addable type."""
    if isinstance(ty, Base):
        return tm.num(0)
    if isinstance(ty, Product):
        return tm.Tuple(tuple(zero_of(c) for c in ty.components))
    if isinstance(ty, Arrow):
        return tm.Lam("_", ty.domain, zero_of(ty.codomain))
    raise TypeCheckError("NotAddable", "TDDer", tm.Var("_"), "an addable type", ty)


def _derive_app(t: tm.App) -> Optional[tm.Term]:
    """DApp, when ``t`` is ``(λx.λdx. Δbody/Δy|_{x,dx}) t1 t2``."""
    inner = t.fun
    if not (isinstance(inner, tm.App) and isinstance(inner.fun, tm.Lam)):
        return None
    outer_lam = inner.fun
    dx_lam = outer_lam.body
    if not isinstance(dx_lam, tm.Lam):
        return None
    delta = dx_lam.body
    if not (
        isinstance(delta, tm.DDer)
        and delta.at == tm.Var(outer_lam.var)
        and delta.delta == tm.Var(dx_lam.var)
        and outer_lam.var != dx_lam.var
        and outer_lam.var not in tm.free_vars(delta.body) - {delta.var}
        and dx_lam.var not in tm.free_vars(delta.body) - {delta.var}
    ):
        return None
    fn = tm.Lam(delta.var, outer_lam.annot, delta.body)
    t1, t2 = inner.arg, t.arg
    return tm.Sub(tm.App(fn, tm.Add(t1, t2)), tm.App(fn, t1))


class DiscreteReducer(Reducer):
    """The base rule table extended with the discrete rules."""

    def contract(self, t: tm.Term, ctx: tm.TypingContext):
        if isinstance(t, tm.App):
            derived = _derive_app(t)
            if derived is not None:
                return "DApp", derived
        if isinstance(t, tm.DDer):
            return self._delta(t, ctx)
        return super().contract(t, ctx)

    def _delta(self, t: tm.DDer, ctx: tm.TypingContext):
        body, y, at, d = t.body, t.var, t.at, t.delta
        if body == tm.Var(y):
            return "DVar", d
        if y not in tm.free_vars(body):
            return "DConst", zero_of(self.type_of(ctx, t))
        if isinstance(body, tm.Lam):
            avoid = tm.free_vars(at) | tm.free_vars(d) | {y}
            if body.var in avoid:
                z = tm.fresh_var(body.var, avoid | tm.all_vars(body.body))
                inner = tm.rename(body.body, body.var, z)
            else:
                z, inner = body.var, body.body
            return "DLam", tm.Lam(z, body.annot, tm.DDer(inner, y, at, d))
        if isinstance(body, tm.Tuple):
            return "DPair", tm.Tuple(tuple(tm.DDer(b, y, at, d) for b in body.items))
        moved = tm.substitute(body, y, tm.Add(at, d))
        return "DUnfold", tm.Sub(moved, tm.substitute(body, y, at))


_DEFAULT_DISCRETE = DiscreteReducer()


def discrete_step(t: tm.Term, ctx: Optional[tm.TypingContext] = None) -> Optional[Step]:
    check_discrete(t)
    return _DEFAULT_DISCRETE.step(t, ctx)


def derive_fn(f: tm.Term, ctx: Optional[tm.TypingContext] = None) -> tm.Lam:
    """
    ``Derive f = λx:A. λdx:A. Δ(f y)/Δy|_{x,dx}`` for ``f : A → B``.

    Raises:
        NotDiscrete: ``f`` uses ``∂`` or ``∫``.
        TypeCheckError: ``f`` is not a function.
    """
    check_discrete(f)
    ctx = tm.close_context(f, ctx)
    ty = _DEFAULT_DISCRETE.type_of(ctx, f)
    if not isinstance(ty, Arrow):
        raise TypeCheckError("NotAFunction", "TDDer", f, "a function type", ty)
    avoid = tm.all_vars(f) | ctx.names()
    x = tm.fresh_var("x", avoid)
    dx = tm.fresh_var("dx", avoid | {x})
    y = tm.fresh_var("y", avoid | {x, dx})
    body = tm.DDer(tm.App(f, tm.Var(y)), y, tm.Var(x), tm.Var(dx))
    return tm.Lam(x, ty.domain, tm.Lam(dx, ty.domain, body))


def check_derive(
    f: tm.Term,
    x: tm.Term,
    delta: tm.Term,
    cfg: Optional[EqConfig] = None,
    ctx: Optional[tm.TypingContext] = None,
) -> TheoremCheck:
    """``f (x⊕delta) = f x ⊕ (derive_fn f) x delta``."""
    for t in (f, x, delta):
        check_discrete(t)
    lhs = tm.App(f, tm.Add(x, delta))
    rhs = tm.Add(tm.App(f, x), tm.App(tm.App(derive_fn(f, ctx), x), delta))
    return compare_sides(
        "discrete_derive", {"f": f, "x": x, "delta": delta}, lhs, rhs, cfg, ctx, DiscreteReducer()
    )
