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

from dataclasses import replace
from typing import List, Optional, Tuple

from ..base import terms as tm
from ..base.errors import DiffcalcError
from . import realexpr as rx
from .primitives import BUILTIN_NODES, DEFAULT_PRIMITIVES, PrimitiveTable
from .symbolic import sym_diff, sym_integrate


class NotInterpretable(DiffcalcError):
    """The term is not an interpretable base-type normal form."""


def embed(t: tm.Term, prims: Optional[PrimitiveTable] = None) -> rx.RealExpr:
    """
    Map a base-type interpretable normal form to a canonical RealExpr.

    Args:
        t: An nb term of base type; free base variables become symbols and
            free function variables become opaque primitives.
        prims: Primitive table, defaults to sin/cos/exp.

    Returns:
        RealExpr: the canonical interpretation of ``t``.
    """
    return rx.canonical(_embed(t, prims or DEFAULT_PRIMITIVES))


def _spine(t: tm.Term) -> Tuple[tm.Term, List[tm.Term]]:
    args = []
    while isinstance(t, tm.App):
        args.append(t.arg)
        t = t.fun
    return t, list(reversed(args))


def _apply(head: tm.Term, args: List[tm.Term]) -> tm.Term:
    for a in args:
        head = tm.App(head, a)
    return head


def _embed(t: tm.Term, prims: PrimitiveTable) -> rx.RealExpr:
    if isinstance(t, tm.Const):
        value = tm.literal_value(t)
        if value is None:
            raise NotInterpretable(f"constant {t.name} used without its arguments")
        return rx.Rat(value)
    if isinstance(t, tm.Var):
        return rx.Var(t.name)
    if isinstance(t, tm.Add):
        return rx.Sum((_embed(t.l, prims), _embed(t.r, prims)))
    if isinstance(t, tm.Sub):
        return rx.sub(_embed(t.l, prims), _embed(t.r, prims))
    if isinstance(t, tm.Mul):
        return rx.Prod((_embed(t.l, prims), _embed(t.r, prims)))
    if isinstance(t, tm.Der):
        derivative = sym_diff(_embed(t.body, prims), t.var, prims)
        return rx.subst(derivative, t.var, _embed(t.at, prims))
    if isinstance(t, tm.Int):
        return sym_integrate(
            _embed(t.body, prims), t.var, _embed(t.lo, prims), _embed(t.hi, prims), prims
        )
    if isinstance(t, tm.DDer):
        body = _embed(t.body, prims)
        at = _embed(t.at, prims)
        moved = rx.Sum((at, _embed(t.delta, prims)))
        return rx.sub(rx.subst(body, t.var, moved), rx.subst(body, t.var, at))
    if isinstance(t, tm.App):
        head, args = _spine(t)
        return _embed_app(head, args, prims)
    raise NotInterpretable(f"{type(t).__name__} is not an interpretable base term: {t}")


def _push_under(binder_term: tm.Term, arg: tm.Term) -> tm.Term:
    """Move an application inside a Der/Int/DDer of function type."""
    var, body = binder_term.var, binder_term.body
    if var in tm.free_vars(arg):
        new_var = tm.fresh_var(var, tm.free_vars(arg) | tm.free_vars(body))
        body = tm.rename(body, var, new_var)
        var = new_var
    return replace(binder_term, var=var, body=tm.App(body, arg))


def _embed_app(head: tm.Term, args: List[tm.Term], prims: PrimitiveTable) -> rx.RealExpr:
    if isinstance(head, tm.Const):
        if tm.literal_value(head) is not None:
            raise NotInterpretable(f"literal {head.name} applied to arguments")
        sig = prims.require(head.name)
        if len(args) != sig.arity:
            raise NotInterpretable(
                f"primitive {head.name} expects {sig.arity} arguments, got {len(args)}"
            )
        embedded = tuple(_embed(a, prims) for a in args)
        if head.name in BUILTIN_NODES:
            return BUILTIN_NODES[head.name](embedded[0])
        return rx.Prim(head.name, embedded)
    if isinstance(head, tm.Var):
        return rx.Prim(head.name, tuple(_embed(a, prims) for a in args))
    if isinstance(head, tm.Lam):
        reduced = tm.substitute(head.body, head.var, args[0])
        return _embed(_apply(reduced, args[1:]), prims)
    if isinstance(head, (tm.Add, tm.Sub)):
        left = _embed_app(*_spine(_apply(head.l, args)), prims)
        right = _embed_app(*_spine(_apply(head.r, args)), prims)
        return rx.Sum((left, right)) if isinstance(head, tm.Add) else rx.sub(left, right)
    if isinstance(head, tm.Mul):
        return rx.Prod((_embed_app(*_spine(_apply(head.l, args)), prims), _embed(head.r, prims)))
    if isinstance(head, (tm.Der, tm.Int, tm.DDer)):
        return _embed(_apply(_push_under(head, args[0]), args[1:]), prims)
    raise NotInterpretable(f"cannot apply {type(head).__name__} in base interpretation: {head}")


def _reify_product(factors, prims: PrimitiveTable) -> tm.Term:
    out = None
    for f in factors:
        if isinstance(f, rx.Pow):
            parts = [reify(f.base, prims)] * f.exp
        else:
            parts = [reify(f, prims)]
        for p in parts:
            out = p if out is None else tm.Mul(out, p)
    return out


def _negated(e: rx.RealExpr) -> Optional[rx.RealExpr]:
    """``-e`` when ``e`` carries a negative rational coefficient."""
    if isinstance(e, rx.Rat) and e.value < 0:
        return rx.Rat(-e.value)
    if isinstance(e, rx.Prod) and isinstance(e.factors[0], rx.Rat) and e.factors[0].value < 0:
        c = -e.factors[0].value
        rest = e.factors[1:]
        if c == 1:
            return rx.mul(*rest)
        return rx.Prod((rx.Rat(c), *rest))
    return None


def reify(e: rx.RealExpr, prims: Optional[PrimitiveTable] = None) -> tm.Term:
    """
    Read a real expression back as a base-type term.

    Negative summands after the first become ``(-)``; powers unfold into
    repeated ``*``; primitives missing from the table read back as free
    function variables.
    """
    prims = prims or DEFAULT_PRIMITIVES
    if isinstance(e, rx.Rat):
        return tm.num(e.value)
    if isinstance(e, rx.Var):
        return tm.Var(e.name)
    if isinstance(e, rx.Sum):
        out = reify(e.terms[0], prims)
        for term in e.terms[1:]:
            negated = _negated(term)
            if negated is None:
                out = tm.Add(out, reify(term, prims))
            else:
                out = tm.Sub(out, reify(negated, prims))
        return out
    if isinstance(e, rx.Neg):
        return tm.Sub(tm.num(0), reify(e.expr, prims))
    if isinstance(e, rx.Prod):
        return _reify_product(e.factors, prims)
    if isinstance(e, rx.Pow):
        return _reify_product((e,), prims)
    if isinstance(e, (rx.Sin, rx.Cos, rx.Exp, rx.Prim)):
        if isinstance(e, rx.Prim):
            name, args = e.name, e.args
        else:
            name, args = type(e).__name__.lower(), (e.arg,)
        head = tm.Const(name, prims[name].type) if name in prims else tm.Var(name)
        return _apply(head, [reify(a, prims) for a in args])
    raise TypeError(f"not a RealExpr: {e!r}")
