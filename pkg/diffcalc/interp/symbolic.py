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

"""Differentiation, integration, evaluation and equality of real expressions, on sympy."""

import logging
from typing import Any, Dict, Mapping, Optional, Union

import numpy as np
import sympy as sp
from sympy.core.function import AppliedUndef

from ..base import consts
from ..base.errors import DiffcalcError
from .primitives import DEFAULT_PRIMITIVES, PrimitiveSignature, PrimitiveTable, UnsupportedPrimitive, placeholder
from .realexpr import (
    PRIMITIVE_MARK,
    Cos,
    Exp,
    Neg,
    Pow,
    Prim,
    Prod,
    Rat,
    RealExpr,
    Sin,
    Sum,
    Unrepresentable,
    Var,
    canonical,
    contains_prim,
    expr_children,
    expr_vars,
    from_sympy,
    show_expr,
    subst,
    sympy_normal,
    to_sympy,
)

logger = logging.getLogger(__name__)

Numeric = Union[float, np.ndarray]


class IntegrationUnsupported(DiffcalcError):
    """The integrand has no antiderivative in the supported class."""


class UnboundVariable(DiffcalcError):
    """Numeric evaluation met a variable with no value."""


class PrimitiveFunctions:
    """
    Resolves primitive names to sympy function classes for one table.

    Registered primitives get a class whose ``fdiff`` instantiates the
    signature's derivative template, so ``sympy.diff`` applies the chain rule
    through them. Unknown names stay undefined functions.
    """

    def __init__(self, prims: PrimitiveTable):
        self.prims = prims
        self._classes: Dict[str, Any] = {}

    def __call__(self, name: str):
        if name not in self._classes:
            sig = self.prims.get(name)
            self._classes[name] = sp.Function(name) if sig is None else self._define(sig)
        return self._classes[name]

    def _define(self, sig: PrimitiveSignature):
        resolve = self

        def fdiff(fn, argindex=1):
            template = to_sympy(sig.derivatives[argindex - 1], resolve)
            return template.xreplace({sp.Symbol(placeholder(i).name): a for i, a in enumerate(fn.args)})

        return type(sig.name, (sp.Function,), {"fdiff": fdiff, PRIMITIVE_MARK: True})


def _require_rules(e: RealExpr, x: str, prims: PrimitiveTable) -> None:
    if isinstance(e, Prim) and x in expr_vars(e):
        sig = prims.require(e.name)
        if sig.arity != len(e.args):
            raise UnsupportedPrimitive(
                f"primitive {e.name} applied to {len(e.args)} arguments, expects {sig.arity}"
            )
    for child in expr_children(e):
        _require_rules(child, x, prims)


def sym_diff(e: RealExpr, x: str, prims: Optional[PrimitiveTable] = None) -> RealExpr:
    """Symbolic derivative of ``e`` with respect to ``x``, canonical."""
    prims = prims or DEFAULT_PRIMITIVES
    _require_rules(e, x, prims)
    return from_sympy(sp.diff(to_sympy(e, PrimitiveFunctions(prims)), sp.Symbol(x)))


def _integrate_primitive(term: sp.Expr, x: sp.Symbol, prims: PrimitiveTable) -> sp.Expr:
    coefficient, dependent = term.as_independent(x, as_Add=False)
    if not isinstance(dependent, AppliedUndef):
        raise IntegrationUnsupported(f"cannot integrate {term} in {x}")
    sig = prims.require(dependent.func.__name__)
    if sig.arity != 1 or sig.antiderivative is None:
        raise IntegrationUnsupported(f"primitive {sig.name} has no antiderivative rule")
    arg = dependent.args[0]
    slope = sp.diff(arg, x)
    if not slope.is_Rational or slope == 0:
        raise IntegrationUnsupported(f"argument {arg} is not affine in {x}")
    return coefficient * to_sympy(sig.integral(from_sympy(arg))) / slope


def _integrate_term(term: sp.Expr, x: sp.Symbol, prims: PrimitiveTable) -> sp.Expr:
    if any(f.has(x) for f in term.atoms(AppliedUndef)):
        return _integrate_primitive(term, x, prims)
    result = sp.integrate(term, x, conds="none")
    if result.has(sp.Integral):
        raise IntegrationUnsupported(f"no closed-form antiderivative of {term} in {x}")
    return result


def antiderivative(e: RealExpr, x: str, prims: Optional[PrimitiveTable] = None) -> RealExpr:
    """
    An antiderivative of ``e`` in ``x``.

    Each monomial goes to ``sympy.integrate``, except products of an
    ``x``-free coefficient and a registered unary primitive of an argument
    affine in ``x``, which use the primitive's antiderivative rule. The result
    must fall back inside the RealExpr class (no ``erf``, ``log``, negative
    powers, ...).
    """
    prims = prims or DEFAULT_PRIMITIVES
    sx = sp.Symbol(x)
    pieces = [_integrate_term(term, sx, prims) for term in sp.Add.make_args(sympy_normal(to_sympy(e)))]
    try:
        return from_sympy(sp.Add(*pieces))
    except Unrepresentable as err:
        raise IntegrationUnsupported(f"antiderivative of {show_expr(e)} in {x}: {err}") from None


def sym_integrate(
    e: RealExpr,
    x: str,
    lo: RealExpr,
    hi: RealExpr,
    prims: Optional[PrimitiveTable] = None,
) -> RealExpr:
    """Definite integral ``F(hi) - F(lo)``, canonical."""
    primitive = antiderivative(e, x, prims)
    return canonical(Sum((subst(primitive, x, hi), Neg(subst(primitive, x, lo)))))


def _eval(e: RealExpr, env: Mapping[str, Numeric], prims: PrimitiveTable) -> Numeric:
    if isinstance(e, Rat):
        return float(e.value)
    if isinstance(e, Var):
        if e.name not in env:
            raise UnboundVariable(f"no value for variable {e.name}")
        return env[e.name]
    if isinstance(e, Sum):
        return sum((_eval(t, env, prims) for t in e.terms[1:]), _eval(e.terms[0], env, prims))
    if isinstance(e, Neg):
        return -_eval(e.expr, env, prims)
    if isinstance(e, Prod):
        out = _eval(e.factors[0], env, prims)
        for f in e.factors[1:]:
            out = out * _eval(f, env, prims)
        return out
    if isinstance(e, Pow):
        return _eval(e.base, env, prims) ** e.exp
    if isinstance(e, Sin):
        return np.sin(_eval(e.arg, env, prims))
    if isinstance(e, Cos):
        return np.cos(_eval(e.arg, env, prims))
    if isinstance(e, Exp):
        return np.exp(_eval(e.arg, env, prims))
    if isinstance(e, Prim):
        sig = prims.require(e.name)
        if sig.evaluator is None:
            raise UnsupportedPrimitive(f"primitive {e.name} has no numeric evaluator")
        return sig.evaluator(*(_eval(a, env, prims) for a in e.args))
    raise TypeError(f"not a RealExpr: {e!r}")


def evaluate(
    e: RealExpr, env: Mapping[str, Numeric], prims: Optional[PrimitiveTable] = None
) -> Numeric:
    """IEEE double evaluation; array-valued environments evaluate pointwise."""
    result = _eval(e, env, prims or DEFAULT_PRIMITIVES)
    if np.ndim(result) == 0:
        return float(result)
    return np.asarray(result, dtype=float)


def _transcendental(e: RealExpr) -> bool:
    if isinstance(e, (Sin, Cos, Exp)):
        return True
    return any(_transcendental(c) for c in expr_children(e))


def expr_eq(
    a: RealExpr,
    b: RealExpr,
    prims: Optional[PrimitiveTable] = None,
    rtol: float = consts.EXPR_EQ_RTOL,
) -> bool:
    """
    Equality under the base interpretation.

    Canonical forms decide polynomials. Transcendental differences go through
    ``sympy.simplify``. With an opaque primitive left over, both sides are
    sampled at a fixed set of pseudo-random points.
    """
    ca, cb = canonical(a), canonical(b)
    if ca == cb:
        return True
    if _transcendental(ca) or _transcendental(cb):
        if sp.simplify(to_sympy(ca) - to_sympy(cb)) == 0:
            return True
    if not (contains_prim(ca) or contains_prim(cb)):
        return False

    names = sorted(expr_vars(ca) | expr_vars(cb))
    rng = np.random.default_rng(consts.EXPR_EQ_SEED)
    points = rng.uniform(
        consts.SAMPLE_LOW, consts.SAMPLE_HIGH, size=(consts.EXPR_EQ_SAMPLES, len(names))
    )
    env = {name: points[:, i] for i, name in enumerate(names)}
    try:
        va = np.broadcast_to(evaluate(ca, env, prims), (consts.EXPR_EQ_SAMPLES,))
        vb = np.broadcast_to(evaluate(cb, env, prims), (consts.EXPR_EQ_SAMPLES,))
    except UnsupportedPrimitive as e:
        logger.debug(f"sampling unavailable for {show_expr(ca)} vs {show_expr(cb)}: {e}")
        return False
    tolerance = rtol * np.maximum(1.0, np.abs(va))
    return bool(np.all(np.abs(va - vb) <= tolerance))
