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
Numeric oracles: programs compiled to numpy callables, central finite
differences and adaptive Simpson quadrature.

None of this is used by normalization; the suites compare the exact
interpreter against these independent float computations.
"""

from typing import Callable, List, Optional, Sequence

import numpy as np

from ..base import consts
from ..base import terms as tm
from ..base.types import Arrow, Base, Product, R, Type
from ..calculus.reducer import Fuel, Reducer
from ..calculus.typechecker import TypeChecker
from ..interp.embed import embed
from ..interp.primitives import DEFAULT_PRIMITIVES, PrimitiveTable
from ..interp.realexpr import RealExpr
from ..interp.symbolic import evaluate
from .generate import symbols

Vector = np.ndarray


def flatten(n: tm.Term, ty: Type) -> List[tm.Term]:
    """Base-typed components of a normal form, left to right."""
    if isinstance(ty, Base):
        return [n]
    if isinstance(ty, Product):
        if not isinstance(n, tm.Tuple):
            raise ValueError(f"expected a tuple normal form of type {ty}")
        out: List[tm.Term] = []
        for item, c in zip(n.items, ty.components):
            out.extend(flatten(item, c))
        return out
    raise ValueError(f"cannot flatten a value of type {ty}")


class CompiledFunction:
    """
    A closed program ``f : A -> B`` over point types, normalized once on a
    symbolic argument and evaluated with numpy afterwards.

    Calling it with a flat vector of ``A``'s base components returns the flat
    vector of ``B``'s.
    """

    def __init__(
        self,
        f: tm.Term,
        prims: Optional[PrimitiveTable] = None,
        reducer: Optional[Reducer] = None,
        fuel: int = consts.DEFAULT_FUEL,
    ):
        self.prims = prims or DEFAULT_PRIMITIVES
        ty = TypeChecker(self.prims).check(tm.EMPTY_CONTEXT, f)
        if not isinstance(ty, Arrow):
            raise ValueError(f"expected a function, got a value of type {ty}")
        self.domain, self.codomain = ty.domain, ty.codomain
        arg = symbols(self.domain, "s", tm.all_vars(f))
        self.names = [v.name for v in flatten(arg, self.domain)]
        ctx = tm.TypingContext.of({name: R for name in self.names})
        nf = (reducer or Reducer(self.prims)).normalize(tm.App(f, arg), Fuel(fuel), ctx).final
        self.exprs: List[RealExpr] = [embed(leaf, self.prims) for leaf in flatten(nf, self.codomain)]

    def __call__(self, point: Sequence[float]) -> Vector:
        env = dict(zip(self.names, (float(p) for p in point)))
        return np.array([evaluate(e, env, self.prims) for e in self.exprs], dtype=float)


def value_of(
    t: tm.Term,
    prims: Optional[PrimitiveTable] = None,
    reducer: Optional[Reducer] = None,
    fuel: int = consts.DEFAULT_FUEL,
) -> Vector:
    """Flat float vector of a closed term of point type."""
    prims = prims or DEFAULT_PRIMITIVES
    ty = TypeChecker(prims).check(tm.EMPTY_CONTEXT, t)
    nf = (reducer or Reducer(prims)).normalize(t, Fuel(fuel), tm.EMPTY_CONTEXT).final
    return np.array([evaluate(embed(leaf, prims), {}, prims) for leaf in flatten(nf, ty)], dtype=float)


def jacobian(fn: Callable[[Vector], Vector], point: Sequence[float], h: float = consts.FINITE_DIFF_STEP) -> np.ndarray:
    """Central-difference Jacobian, shape ``(len(fn(point)), len(point))``."""
    point = np.asarray(point, dtype=float)
    columns = []
    for i in range(point.size):
        step = np.zeros_like(point)
        step[i] = h
        columns.append((fn(point + step) - fn(point - step)) / (2 * h))
    return np.stack(columns, axis=1)


def adaptive_simpson(
    fn: Callable[[float], float],
    a: float,
    b: float,
    tol: float = consts.QUADRATURE_TOL,
    max_depth: int = 50,
) -> float:
    """``∫_a^b fn`` by adaptive Simpson with Richardson correction."""

    def simpson(fa, fm, fb, lo, hi):
        return (hi - lo) / 6 * (fa + 4 * fm + fb)

    def recurse(lo, hi, fa, fm, fb, whole, eps, depth):
        mid = (lo + hi) / 2
        lm, rm = (lo + mid) / 2, (mid + hi) / 2
        flm, frm = fn(lm), fn(rm)
        left = simpson(fa, flm, fm, lo, mid)
        right = simpson(fm, frm, fb, mid, hi)
        if depth <= 0 or abs(left + right - whole) <= 15 * eps:
            return left + right + (left + right - whole) / 15
        return recurse(lo, mid, fa, flm, fm, left, eps / 2, depth - 1) + recurse(
            mid, hi, fm, frm, fb, right, eps / 2, depth - 1
        )

    if a == b:
        return 0.0
    fa, fb, fm = fn(a), fn(b), fn((a + b) / 2)
    return recurse(a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, max_depth)


def staircase_integral(
    gradient: Callable[[Vector], np.ndarray],
    lo: Sequence[float],
    hi: Sequence[float],
    tol: float = consts.QUADRATURE_TOL,
) -> Vector:
    """
    Line integral of ``gradient`` from ``lo`` to ``hi`` along the axis-parallel
    path that moves one coordinate at a time, first to last.

    ``gradient(p)`` returns a ``(outputs, len(p))`` matrix of partials.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    total = None
    for i in range(lo.size):

        def along(s, i=i):
            p = np.concatenate([hi[:i], [s], lo[i + 1 :]])
            return gradient(p)[:, i]

        outputs = along(lo[i]).size
        piece = np.array(
            [adaptive_simpson(lambda s, k=k: float(along(s)[k]), lo[i], hi[i], tol) for k in range(outputs)]
        )
        total = piece if total is None else total + piece
    return total


def close(actual: Vector, expected: Vector, rtol: float) -> bool:
    """``|a - e| <= rtol * max(1, |e|)`` componentwise."""
    actual = np.atleast_1d(np.asarray(actual, dtype=float))
    expected = np.atleast_1d(np.asarray(expected, dtype=float))
    if actual.shape != expected.shape:
        return False
    return bool(np.all(np.abs(actual - expected) <= rtol * np.maximum(1.0, np.abs(expected))))
