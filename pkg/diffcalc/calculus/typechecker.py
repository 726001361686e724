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
Syntax-directed typing.

``derivative_type(T, T0)`` is ``T`` for a base denominator and the tuple of
componentwise derivative types for a product denominator.
``antiderivative_type`` inverts it for a fixed denominator; TMul and TInt use
it to recover the addable result type from the checked operand types.
"""

from typing import Optional, Union

from ..base import terms as tm
from ..base.errors import DiffcalcError
from ..base.types import Arrow, Base, Product, R, Sum, Type, is_differentiable_point
from ..interp.primitives import DEFAULT_PRIMITIVES, PrimitiveTable
from ..syntax.printer import excerpt, show_type

KINDS = (
    "UnboundVariable",
    "ArityMismatch",
    "NotAddable",
    "NoDerivativeType",
    "ApplicationMismatch",
    "BranchMismatch",
    "ProjectionOutOfRange",
    "AnnotationRequired",
    "OperandMismatch",
    "UnknownConstant",
    "NotAFunction",
    "NotASum",
)


def _describe(value: Union[Type, str, None]) -> str:
    if value is None:
        return "-"
    if isinstance(value, str):
        return value
    return show_type(value)


class TypeCheckError(DiffcalcError):
    """
    A failed typing premise.

    Rendered as ``<rule>: expected <type>, found <type> in <term-excerpt>``.
    """

    def __init__(
        self,
        kind: str,
        rule: str,
        term: tm.Term,
        expected: Union[Type, str, None] = None,
        actual: Union[Type, str, None] = None,
    ):
        assert kind in KINDS, kind
        self.kind = kind
        self.rule = rule
        self.term = term
        self.expected = expected
        self.actual = actual
        super().__init__(
            f"{rule}: expected {_describe(expected)}, found {_describe(actual)} in {excerpt(term)}"
        )


def is_addable(t: Type) -> bool:
    if isinstance(t, Base):
        return True
    if isinstance(t, Product):
        return all(is_addable(c) for c in t.components)
    if isinstance(t, Arrow):
        return is_addable(t.codomain)
    return False


def derivative_type(t: Type, t0: Type, term: Optional[tm.Term] = None) -> Type:
    """``∂t/∂t0``; raises NoDerivativeType when ``t0`` holds an arrow or a sum."""
    if isinstance(t0, Base):
        return t
    if isinstance(t0, Product):
        return Product(tuple(derivative_type(t, c, term) for c in t0.components))
    raise TypeCheckError(
        "NoDerivativeType",
        "TDer",
        term if term is not None else tm.Var("_"),
        "a type without arrows or sums",
        t0,
    )


def antiderivative_type(d: Type, t0: Type) -> Optional[Type]:
    """The unique ``T`` with ``derivative_type(T, t0) == d``, or None."""
    if isinstance(t0, Base):
        return d
    if isinstance(t0, Product):
        if not isinstance(d, Product) or len(d.components) != len(t0.components):
            return None
        candidates = [antiderivative_type(dc, tc) for dc, tc in zip(d.components, t0.components)]
        first = candidates[0]
        if first is None or any(c != first for c in candidates):
            return None
        return first
    return None


class TypeChecker:
    def __init__(self, prims: Optional[PrimitiveTable] = None):
        self.prims = prims if prims is not None else DEFAULT_PRIMITIVES

    def check(self, ctx: tm.TypingContext, t: tm.Term) -> Type:
        method = getattr(self, f"_{type(t).__name__.lower()}")
        return method(ctx, t)

    def _const(self, ctx, t: tm.Const) -> Type:
        if tm.literal_value(t) is not None:
            if not isinstance(t.type, Base):
                raise TypeCheckError("ArityMismatch", "TCon", t, "a base type", t.type)
            return t.type
        if t.name not in self.prims:
            raise TypeCheckError("UnknownConstant", "TCon", t, "a registered primitive", t.name)
        declared = self.prims[t.name].type
        if t.type != declared:
            raise TypeCheckError("ArityMismatch", "TCon", t, declared, t.type)
        return declared

    def _var(self, ctx, t: tm.Var) -> Type:
        ty = ctx.lookup(t.name)
        if ty is None:
            raise TypeCheckError("UnboundVariable", "TVar", t, f"a binding for {t.name}", "none")
        return ty

    def _lam(self, ctx, t: tm.Lam) -> Type:
        return Arrow(t.annot, self.check(ctx.extend(t.var, t.annot), t.body))

    def _app(self, ctx, t: tm.App) -> Type:
        fun = self.check(ctx, t.fun)
        if not isinstance(fun, Arrow):
            raise TypeCheckError("NotAFunction", "TApp", t, "a function type", fun)
        arg = self.check(ctx, t.arg)
        if arg != fun.domain:
            raise TypeCheckError("ApplicationMismatch", "TApp", t, fun.domain, arg)
        return fun.codomain

    def _tuple(self, ctx, t: tm.Tuple) -> Type:
        return Product(tuple(self.check(ctx, item) for item in t.items))

    def _proj(self, ctx, t: tm.Proj) -> Type:
        ty = self.check(ctx, t.tuple)
        if not isinstance(ty, Product):
            raise TypeCheckError("ProjectionOutOfRange", "TProj", t, "a product type", ty)
        if not 1 <= t.index <= len(ty.components):
            raise TypeCheckError(
                "ProjectionOutOfRange", "TProj", t, f"index in 1..{len(ty.components)}", str(t.index)
            )
        return ty.components[t.index - 1]

    def _additive(self, ctx, t, rule: str) -> Type:
        left = self.check(ctx, t.l)
        right = self.check(ctx, t.r)
        if left != right:
            raise TypeCheckError("OperandMismatch", rule, t, left, right)
        if not is_addable(left):
            raise TypeCheckError("NotAddable", rule, t, "an addable type", left)
        return left

    def _add(self, ctx, t: tm.Add) -> Type:
        return self._additive(ctx, t, "TAdd")

    def _sub(self, ctx, t: tm.Sub) -> Type:
        return self._additive(ctx, t, "TSub")

    def _point(self, ctx, t: tm.Term, point: tm.Term, rule: str) -> Type:
        ty = self.check(ctx, point)
        if not is_differentiable_point(ty):
            raise TypeCheckError(
                "NoDerivativeType", rule, t, "a type without arrows or sums", ty
            )
        return ty

    def _recover(self, t: tm.Term, rule: str, d: Type, t0: Type) -> Type:
        result = antiderivative_type(d, t0)
        if result is None:
            expected = "∂T/∂" + show_type(t0)
            kind = "ArityMismatch" if isinstance(t0, Product) and not (
                isinstance(d, Product) and len(d.components) == len(t0.components)
            ) else "OperandMismatch"
            raise TypeCheckError(kind, rule, t, expected, d)
        if not is_addable(result):
            raise TypeCheckError("NotAddable", rule, t, "an addable type", result)
        return result

    def _mul(self, ctx, t: tm.Mul) -> Type:
        scalar = self._point(ctx, t, t.r, "TMul")
        return self._recover(t, "TMul", self.check(ctx, t.l), scalar)

    def _der(self, ctx, t: tm.Der) -> Type:
        point = self._point(ctx, t, t.at, "TDer")
        body = self.check(ctx.extend(t.var, point), t.body)
        return derivative_type(body, point, t)

    def _int(self, ctx, t: tm.Int) -> Type:
        lo = self._point(ctx, t, t.lo, "TInt")
        hi = self.check(ctx, t.hi)
        if hi != lo:
            raise TypeCheckError("OperandMismatch", "TInt", t, lo, hi)
        body = self.check(ctx.extend(t.var, lo), t.body)
        return self._recover(t, "TInt", body, lo)

    def _injection(self, ctx, t, rule: str, left: bool) -> Type:
        if not isinstance(t.annot, Sum):
            raise TypeCheckError("AnnotationRequired", rule, t, "a sum annotation", t.annot)
        payload = self.check(ctx, t.term)
        wanted = t.annot.left if left else t.annot.right
        if payload != wanted:
            raise TypeCheckError("OperandMismatch", rule, t, wanted, payload)
        return t.annot

    def _inl(self, ctx, t: tm.Inl) -> Type:
        return self._injection(ctx, t, "TInl", True)

    def _inr(self, ctx, t: tm.Inr) -> Type:
        return self._injection(ctx, t, "TInr", False)

    def _case(self, ctx, t: tm.Case) -> Type:
        scrutinee = self.check(ctx, t.scrutinee)
        if not isinstance(scrutinee, Sum):
            raise TypeCheckError("NotASum", "TCase", t, "a sum type", scrutinee)
        left = self.check(ctx.extend(t.lvar, scrutinee.left), t.lbranch)
        right = self.check(ctx.extend(t.rvar, scrutinee.right), t.rbranch)
        if left != right:
            raise TypeCheckError("BranchMismatch", "TCase", t, left, right)
        return left

    def _fix(self, ctx, t: tm.Fix) -> Type:
        ty = self.check(ctx, t.term)
        if not isinstance(ty, Arrow):
            raise TypeCheckError("NotAFunction", "TFix", t, "T->T", ty)
        if ty.domain != ty.codomain:
            raise TypeCheckError("ApplicationMismatch", "TFix", t, ty.domain, ty.codomain)
        return ty.domain

    def _dder(self, ctx, t: tm.DDer) -> Type:
        at = self.check(ctx, t.at)
        delta = self.check(ctx, t.delta)
        if at != delta:
            raise TypeCheckError("OperandMismatch", "TDDer", t, at, delta)
        if not is_addable(at):
            raise TypeCheckError("NotAddable", "TDDer", t, "an addable type", at)
        body = self.check(ctx.extend(t.var, at), t.body)
        if not is_addable(body):
            raise TypeCheckError("NotAddable", "TDDer", t, "an addable type", body)
        return body


_DEFAULT_CHECKER = TypeChecker()


def typecheck(
    ctx: Optional[tm.TypingContext], t: tm.Term, prims: Optional[PrimitiveTable] = None
) -> Type:
    """The unique type of ``t`` under ``ctx``, or TypeCheckError."""
    checker = _DEFAULT_CHECKER if prims is None else TypeChecker(prims)
    return checker.check(ctx or tm.EMPTY_CONTEXT, t)


def typecheck_open(t: tm.Term, ctx: Optional[tm.TypingContext] = None, default: Type = R) -> Type:
    """Typecheck with unbound free variables defaulted to ``default``."""
    return typecheck(tm.close_context(t, ctx, default), t)
