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
Theorem builders and checkers.

Builders produce terms: the function derivative ``f'``, iterated
derivatives, power multiplication and Taylor polynomials. Checkers build the
two sides of an identity and compare them with term equality, returning a
:class:`TheoremCheck` whose ``verdict`` is ``"inconclusive"`` when either side
ran out of fuel.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Dict, List, Optional, Sequence

from ..base import terms as tm
from ..base.errors import DiffcalcError
from ..base.types import Base, Product, R, Type, is_differentiable_point
from ..protocol import TheoremReport, WitnessReport
from ..syntax.printer import show_term
from .equality import Comparator, EqConfig, EqResult
from .reducer import Fuel, FuelExhausted, Reducer
from .typechecker import TypeCheckError, TypeChecker

logger = logging.getLogger(__name__)


class NotALambda(DiffcalcError):
    """The function argument of a builder does not normalize to a lambda."""


def _fresh(base: str, *ts: tm.Term, extra=()) -> str:
    avoid = set(extra)
    for t in ts:
        avoid |= tm.all_vars(t)
    return tm.fresh_var(base, avoid)


def _as_lambda(f: tm.Term, ctx: Optional[tm.TypingContext], reducer: Optional[Reducer]) -> tm.Lam:
    if isinstance(f, tm.Lam):
        return f
    try:
        value = (reducer or Reducer()).normalize(f, Fuel(), ctx).final
    except FuelExhausted as e:
        raise NotALambda(f"{show_term(f)} did not normalize: {e}") from e
    if not isinstance(value, tm.Lam):
        raise NotALambda(f"{show_term(f)} normalizes to {show_term(value)}, not a lambda")
    return value


def fun_derive(
    f: tm.Term, ctx: Optional[tm.TypingContext] = None, reducer: Optional[Reducer] = None
) -> tm.Lam:
    """
    The derivative function ``λx:T. ∂t[y/x]/∂y|_x`` of ``f = λx:T. t``.

    The inner binder is fresh, so ``x`` in the point refers to the outer
    lambda.

    Raises:
        NotALambda: ``f`` does not normalize to a lambda.
        TypeCheckError: the domain contains an arrow or a sum.
    """
    lam = _as_lambda(f, ctx, reducer)
    if not is_differentiable_point(lam.annot):
        raise TypeCheckError(
            "NoDerivativeType", "TDer", lam, "a type without arrows or sums", lam.annot
        )
    y = _fresh(lam.var, lam.body, extra={lam.var})
    body = tm.rename(lam.body, lam.var, y)
    return tm.Lam(lam.var, lam.annot, tm.Der(body, y, tm.Var(lam.var)))


def derive_n(
    f: tm.Term, n: int, ctx: Optional[tm.TypingContext] = None, reducer: Optional[Reducer] = None
) -> tm.Term:
    """``f⁽ⁿ⁾``: ``f`` itself for ``n = 0``, otherwise ``n`` nested ``fun_derive``."""
    if n < 0:
        raise ValueError(f"derivative order must be non-negative, got {n}")
    for _ in range(n):
        f = fun_derive(f, ctx, reducer)
    return f


def derive_at_n(t: tm.Term, x: str, t2: tm.Term, n: int) -> tm.Term:
    """``∂ⁿt/∂xⁿ|_{t2}``; the order-0 case is ``t`` unchanged."""
    if n < 0:
        raise ValueError(f"derivative order must be non-negative, got {n}")
    if n == 0:
        return t
    return tm.Der(derive_at_n(t, x, tm.Var(x), n - 1), x, t2)


def power_mul(
    t: tm.Term, t1: tm.Term, n: int, ctx: Optional[tm.TypingContext] = None
) -> tm.Term:
    """
    ``t*t1ⁿ``, the left-nested ``((t*t1)*t1)..``.

    Every stage is typechecked, so a TypeCheckError names the first product
    that does not contract.
    """
    if n < 0:
        raise ValueError(f"power must be non-negative, got {n}")
    checker = TypeChecker()
    ctx = tm.close_context(t1, tm.close_context(t, ctx))
    for _ in range(n):
        t = tm.Mul(t, t1)
        checker.check(ctx, t)
    return t


@dataclass
class TaylorExpansion:
    center: tm.Term
    order: int
    partial_sums: List[tm.Term]
    coefficients: List[Fraction]

    @property
    def term(self) -> tm.Term:
        return self.partial_sums[-1]


def taylor_expansion(
    f: tm.Term,
    t0: tm.Term,
    t: tm.Term,
    k: int,
    ctx: Optional[tm.TypingContext] = None,
    reducer: Optional[Reducer] = None,
) -> TaylorExpansion:
    """
    Order-``k`` Taylor polynomial of ``f`` around ``t0``, evaluated at ``t``.

    Args:
        f: A function over an arrow- and sum-free domain.
        t0: The expansion center.
        t: The point of evaluation, same type as ``t0``.
        k: Truncation order.

    Returns:
        TaylorExpansion: ``partial_sums[j]`` adds ``(f⁽ʲ⁾ t0)*(t⊖t0)ʲ * 1/j!``
        to ``partial_sums[j-1]``.
    """
    if k < 0:
        raise ValueError(f"Taylor order must be non-negative, got {k}")
    displacement = tm.Sub(t, t0)
    partial = tm.App(f, t0)
    sums = [partial]
    coefficients = [Fraction(1)]
    derivative = f
    for j in range(1, k + 1):
        derivative = fun_derive(derivative, ctx, reducer)
        coefficient = Fraction(1, math.factorial(j))
        power = power_mul(tm.App(derivative, t0), displacement, j, ctx)
        partial = tm.Add(partial, tm.Mul(power, tm.num(coefficient)))
        sums.append(partial)
        coefficients.append(coefficient)
    return TaylorExpansion(t0, k, sums, coefficients)


def taylor_expand(
    f: tm.Term, t0: tm.Term, t: tm.Term, k: int, ctx: Optional[tm.TypingContext] = None
) -> tm.Term:
    return taylor_expansion(f, t0, t, k, ctx).term


def _gradient_term(f: tm.Term, point: tm.Term) -> tm.Term:
    x = _fresh("x", f, point)
    return tm.Der(tm.App(f, tm.Var(x)), x, point)


def ad_gradient(
    f: tm.Term, point: tm.Term, ctx: Optional[tm.TypingContext] = None, fuel: Optional[int] = None
) -> tm.Term:
    """Normal form of ``∂(f x)/∂x|_point``; for ``f : T → R`` this is the gradient tuple."""
    return Reducer().normalize(_gradient_term(f, point), Fuel(fuel) if fuel is not None else None, ctx).final


def ad_directional(
    f: tm.Term,
    point: tm.Term,
    direction: tm.Term,
    ctx: Optional[tm.TypingContext] = None,
    fuel: Optional[int] = None,
) -> tm.Term:
    """Normal form of ``∂(f x)/∂x|_point * direction``."""
    term = tm.Mul(_gradient_term(f, point), direction)
    return Reducer().normalize(term, Fuel(fuel) if fuel is not None else None, ctx).final


def basis(ty: Type) -> List[tm.Term]:
    """Unit tuples ``(1,0,..)``, ``(0,1,..)``, .. of a tuple-of-base type."""
    if isinstance(ty, Base):
        return [tm.num(1)]
    if not isinstance(ty, Product) or not all(isinstance(c, Base) for c in ty.components):
        raise ValueError(f"basis needs a base type or a tuple of base types, got {ty}")
    n = len(ty.components)
    return [tm.Tuple(tuple(tm.num(int(i == j)) for j in range(n))) for i in range(n)]


def ad_basis(
    f: tm.Term, point: tm.Term, ctx: Optional[tm.TypingContext] = None
) -> List[tm.Term]:
    """Directional derivatives along each unit tuple of the point's type."""
    ctx = tm.close_context(point, ctx)
    ty = TypeChecker().check(ctx, point)
    return [ad_directional(f, point, e, ctx) for e in basis(ty)]


def derive_incremental(
    f: tm.Term,
    x: tm.Term,
    delta: tm.Term,
    ctx: Optional[tm.TypingContext] = None,
    fuel: Optional[int] = None,
) -> tm.Term:
    """Normal form of ``∫_x^{x⊕delta} ∂(f y)/∂y|_z dz``, the change of ``f`` at ``x``."""
    y = _fresh("y", f, x, delta)
    z = _fresh("z", f, x, delta, extra={y})
    term = tm.Int(x, tm.Add(x, delta), tm.Der(tm.App(f, tm.Var(y)), y, tm.Var(z)), z)
    return Reducer().normalize(term, Fuel(fuel) if fuel is not None else None, ctx).final


# ---- checkers ----


@dataclass
class TheoremCheck:
    theorem: str
    inputs: Dict[str, tm.Term]
    lhs: tm.Term
    rhs: tm.Term
    verdict: str
    result: Optional[EqResult] = None
    lhs_nf: Optional[tm.Term] = None
    rhs_nf: Optional[tm.Term] = None
    detail: Optional[str] = None
    extra: Dict[str, tm.Term] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.verdict == "true"

    def __bool__(self) -> bool:
        return self.holds

    def report(self) -> TheoremReport:
        witness = None
        if self.result is not None and self.result.witness is not None:
            w = self.result.witness
            witness = WitnessReport(
                reason=w.reason,
                substitution={k: show_term(v) for k, v in w.substitution.items()},
                lhs_nf=show_term(w.lhs_nf) if w.lhs_nf is not None else None,
                rhs_nf=show_term(w.rhs_nf) if w.rhs_nf is not None else None,
                path="/".join(w.path) if w.path else "ε",
            )
        return TheoremReport(
            theorem=self.theorem,
            inputs={k: show_term(v) for k, v in self.inputs.items()},
            lhs=show_term(self.lhs),
            rhs=show_term(self.rhs),
            lhs_nf=show_term(self.lhs_nf) if self.lhs_nf is not None else None,
            rhs_nf=show_term(self.rhs_nf) if self.rhs_nf is not None else None,
            verdict=self.verdict,
            witness=witness,
            detail=self.detail,
            extra={k: show_term(v) for k, v in self.extra.items()},
        )


def compare_sides(
    theorem: str,
    inputs: Dict[str, tm.Term],
    lhs: tm.Term,
    rhs: tm.Term,
    cfg: Optional[EqConfig] = None,
    ctx: Optional[tm.TypingContext] = None,
    reducer: Optional[Reducer] = None,
) -> TheoremCheck:
    """Compare the two sides of an identity and package the outcome."""
    comparator = Comparator(cfg, reducer=reducer)
    try:
        result = comparator.check(lhs, rhs, ctx)
    except FuelExhausted as e:
        logger.warning(f"{theorem}: a side did not normalize, verdict inconclusive ({e})")
        return TheoremCheck(theorem, inputs, lhs, rhs, "inconclusive", detail=str(e))
    lhs_nf = rhs_nf = None
    if result.lhs_nf is not None:
        inner = _closing_context(result, ctx, lhs, rhs)
        lhs_nf = comparator.readback(result.lhs_nf, inner)
        rhs_nf = comparator.readback(result.rhs_nf, inner)
    verdict = "true" if result.equal else "false"
    if not result.equal:
        logger.info(f"{theorem}: sides differ\n{result.witness.describe()}")
    return TheoremCheck(theorem, inputs, lhs, rhs, verdict, result, lhs_nf, rhs_nf)


def _closing_context(result: EqResult, ctx, lhs: tm.Term, rhs: tm.Term) -> tm.TypingContext:
    # Normal forms of the last trial mention only base symbols.
    names = tm.free_vars(result.lhs_nf) | tm.free_vars(result.rhs_nf)
    outer = tm.close_context(rhs, tm.close_context(lhs, ctx))
    out = tm.EMPTY_CONTEXT
    for name in sorted(names):
        ty = outer.lookup(name)
        out = out.extend(name, ty if isinstance(ty, Base) else R)
    return out


def newton_leibniz_sides(t: tm.Term, y: str, t1: tm.Term, t2: tm.Term):
    x = _fresh("x", t, t1, t2, extra={y})
    lhs = tm.Int(t1, t2, tm.Der(t, y, tm.Var(x)), x)
    rhs = tm.Sub(tm.substitute(t, y, t2), tm.substitute(t, y, t1))
    return lhs, rhs


def check_newton_leibniz(
    t: tm.Term,
    y: str,
    t1: tm.Term,
    t2: tm.Term,
    cfg: Optional[EqConfig] = None,
    ctx: Optional[tm.TypingContext] = None,
) -> TheoremCheck:
    """``∫_{t1}^{t2} ∂t/∂y|_x dx = t[t2/y] ⊖ t[t1/y]``."""
    lhs, rhs = newton_leibniz_sides(t, y, t1, t2)
    return compare_sides(
        "newton_leibniz", {"t": t, "y": tm.Var(y), "from": t1, "to": t2}, lhs, rhs, cfg, ctx
    )


def chain_rule_sides(f: tm.Term, g: tm.Term, t1: tm.Term, t: tm.Term):
    x = _fresh("x", f, g, t1, t)
    y = _fresh("y", f, g, t1, t, extra={x})
    z = _fresh("z", f, g, t1, t, extra={x, y})
    lhs = tm.Mul(tm.Der(tm.App(f, tm.App(g, tm.Var(x))), x, t1), t)
    inner = tm.Mul(tm.Der(tm.App(g, tm.Var(z)), z, t1), t)
    rhs = tm.Mul(tm.Der(tm.App(f, tm.Var(y)), y, tm.App(g, t1)), inner)
    return lhs, rhs


def check_chain_rule(
    f: tm.Term,
    g: tm.Term,
    t1: tm.Term,
    t: tm.Term,
    cfg: Optional[EqConfig] = None,
    ctx: Optional[tm.TypingContext] = None,
) -> TheoremCheck:
    """``∂(f(g x))/∂x|_{t1} * t = ∂(f y)/∂y|_{g t1} * (∂(g z)/∂z|_{t1} * t)``."""
    lhs, rhs = chain_rule_sides(f, g, t1, t)
    return compare_sides("chain_rule", {"f": f, "g": g, "at": t1, "t": t}, lhs, rhs, cfg, ctx)


def check_taylor(
    f: tm.Term,
    t0: tm.Term,
    t: tm.Term,
    k: int,
    expected: Optional[tm.Term] = None,
    cfg: Optional[EqConfig] = None,
    ctx: Optional[tm.TypingContext] = None,
) -> TheoremCheck:
    """Compare the order-``k`` expansion with ``expected``, or with ``f t`` when omitted."""
    expansion = taylor_expansion(f, t0, t, k, ctx)
    target = expected if expected is not None else tm.App(f, t)
    check = compare_sides(
        "taylor", {"f": f, "at": t0, "t": t, "order": tm.num(k)}, expansion.term, target, cfg, ctx
    )
    check.extra = {f"partial_{j}": s for j, s in enumerate(expansion.partial_sums)}
    return check


def check_derivative_additivity(
    t1: tm.Term,
    t2: tm.Term,
    x: str,
    t3: tm.Term,
    cfg: Optional[EqConfig] = None,
    ctx: Optional[tm.TypingContext] = None,
) -> TheoremCheck:
    """``∂(t1⊕t2)/∂x|_{t3} = ∂t1/∂x|_{t3} ⊕ ∂t2/∂x|_{t3}``."""
    lhs = tm.Der(tm.Add(t1, t2), x, t3)
    rhs = tm.Add(tm.Der(t1, x, t3), tm.Der(t2, x, t3))
    inputs = {"t1": t1, "t2": t2, "x": tm.Var(x), "at": t3}
    return compare_sides("derivative_additivity", inputs, lhs, rhs, cfg, ctx)


def check_product_rule(
    t1: tm.Term,
    t2: tm.Term,
    x: str,
    t3: tm.Term,
    cfg: Optional[EqConfig] = None,
    ctx: Optional[tm.TypingContext] = None,
) -> TheoremCheck:
    """``∂(t1*t2)/∂x|_{t3} = ∂t1/∂x|_{t3} * t2[t3/x] ⊕ t1[t3/x] * ∂t2/∂x|_{t3}`` for base ``x``."""
    lhs = tm.Der(tm.Mul(t1, t2), x, t3)
    rhs = tm.Add(
        tm.Mul(tm.Der(t1, x, t3), tm.substitute(t2, x, t3)),
        tm.Mul(tm.substitute(t1, x, t3), tm.Der(t2, x, t3)),
    )
    inputs = {"t1": t1, "t2": t2, "x": tm.Var(x), "at": t3}
    return compare_sides("product_rule", inputs, lhs, rhs, cfg, ctx)


def check_linearity(
    t1: tm.Term,
    x: str,
    t2: tm.Term,
    cfg: Optional[EqConfig] = None,
    ctx: Optional[tm.TypingContext] = None,
) -> TheoremCheck:
    """``∂(t1*x)/∂x|_{t2} = t1`` when ``x`` is not free in ``t1``."""
    if x in tm.free_vars(t1):
        raise ValueError(f"{x} must not be free in {show_term(t1)}")
    lhs = tm.Der(tm.Mul(t1, tm.Var(x)), x, t2)
    return compare_sides("linearity", {"t1": t1, "x": tm.Var(x), "at": t2}, lhs, t1, cfg, ctx)


def check_distributivity(
    t1: tm.Term,
    t2: tm.Term,
    t3: tm.Term,
    cfg: Optional[EqConfig] = None,
    ctx: Optional[tm.TypingContext] = None,
) -> TheoremCheck:
    """``t1*(t2⊕t3) = (t1*t2) ⊕ (t1*t3)``."""
    lhs = tm.Mul(t1, tm.Add(t2, t3))
    rhs = tm.Add(tm.Mul(t1, t2), tm.Mul(t1, t3))
    return compare_sides("distributivity", {"t1": t1, "t2": t2, "t3": t3}, lhs, rhs, cfg, ctx)


def check_telescoping(
    ts: Sequence[tm.Term],
    cfg: Optional[EqConfig] = None,
    ctx: Optional[tm.TypingContext] = None,
) -> TheoremCheck:
    """``(t1⊖t2) ⊕ (t2⊖t3) ⊕ .. ⊕ (t_{n-1}⊖t_n) = t1 ⊖ t_n``."""
    if len(ts) < 2:
        raise ValueError("telescoping needs at least two terms")
    differences = [tm.Sub(a, b) for a, b in zip(ts, ts[1:])]
    lhs = reduce(tm.Add, differences[1:], differences[0])
    rhs = tm.Sub(ts[0], ts[-1])
    inputs = {f"t{i + 1}": t for i, t in enumerate(ts)}
    return compare_sides("telescoping", inputs, lhs, rhs, cfg, ctx)


def check_incremental(
    f: tm.Term,
    x: tm.Term,
    delta: tm.Term,
    cfg: Optional[EqConfig] = None,
    ctx: Optional[tm.TypingContext] = None,
) -> TheoremCheck:
    """``f (x⊕delta) = f x ⊕ derive_incremental(f, x, delta)``."""
    increment = derive_incremental(f, x, delta, ctx, cfg.fuel if cfg else None)
    lhs = tm.App(f, tm.Add(x, delta))
    rhs = tm.Add(tm.App(f, x), increment)
    check = compare_sides("incremental", {"f": f, "x": x, "delta": delta}, lhs, rhs, cfg, ctx)
    check.extra = {"increment": increment}
    return check
