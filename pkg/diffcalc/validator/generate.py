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
Seeded generators of well-typed terms and polynomial programs.

Every generator draws from an explicit ``numpy.random.Generator`` so that a
suite run is reproducible from its seed.
"""

import itertools
from functools import reduce
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from ..base import terms as tm
from ..base.types import Arrow, Base, Product, R, Sum, Type

RR = Product((R, R))

# Types the metatheory generator draws from. Lambda domains stay first order
# apart from R->R so that closed base-typed normal forms are interpretable.
TYPE_POOL: Tuple[Type, ...] = (
    R,
    RR,
    Arrow(R, R),
    Arrow(RR, R),
    Arrow(R, RR),
    Arrow(Arrow(R, R), R),
)

POINT_TYPES: Tuple[Type, ...] = (R, RR)

# Free variables of open terms, with the name each kind is drawn under.
OPEN_VARIABLES: Tuple[Tuple[Type, str], ...] = ((R, "a"), (RR, "p"), (Arrow(R, R), "h"))

LITERALS = ("-2", "-1", "0", "1", "2", "3", "1/2")

NAMES = ("x", "y", "z", "u", "v", "w")


def leaves(ty: Type, access: tm.Term) -> List[tm.Term]:
    """Projection chains from ``access`` to every base component of ``ty``."""
    if isinstance(ty, Base):
        return [access]
    if isinstance(ty, Product):
        out: List[tm.Term] = []
        for i, c in enumerate(ty.components):
            out.extend(leaves(c, tm.Proj(i + 1, access)))
        return out
    raise ValueError(f"{ty} has no base leaves")


def symbols(ty: Type, prefix: str, avoid=()) -> tm.Term:
    """A tuple of fresh base variables shaped like ``ty``."""
    taken = set(avoid)

    def build(t: Type, hint: str) -> tm.Term:
        if isinstance(t, Base):
            name = tm.fresh_var(hint, taken)
            taken.add(name)
            return tm.Var(name)
        if isinstance(t, Product):
            return tm.Tuple(tuple(build(c, f"{hint}{i + 1}") for i, c in enumerate(t.components)))
        raise ValueError(f"cannot build symbols for {t}")

    return build(ty, prefix)


def constant_point(ty: Type, values: Sequence) -> tm.Term:
    """``values`` laid out as a literal of type ``ty``."""
    it = iter(values)

    def build(t: Type) -> tm.Term:
        if isinstance(t, Base):
            return tm.num(next(it))
        return tm.Tuple(tuple(build(c) for c in t.components))

    return build(ty)


def split_products(t: tm.Term, ctx: tm.TypingContext) -> Tuple[tm.Term, tm.TypingContext]:
    """
    Substitute a tuple of fresh base variables for every product-typed
    variable of ``ctx``.

    The result only has free variables of interpretable type, the setting in
    which a stuck well-typed term is a bug.
    """
    avoid = set(tm.all_vars(t)) | set(ctx.names())
    out = tm.EMPTY_CONTEXT
    for name, ty in ctx.bindings:
        if not isinstance(ty, Product):
            out = out.extend(name, ty)
            continue
        components = symbols(ty, name, avoid)
        t = tm.substitute(t, name, components)
        for leaf in sorted(tm.free_vars(components)):
            avoid.add(leaf)
            out = out.extend(leaf, R)
    return t, out


def width(ty: Type) -> int:
    if isinstance(ty, Base):
        return 1
    if isinstance(ty, Product):
        return sum(width(c) for c in ty.components)
    raise ValueError(f"{ty} is not a point type")


class TermGenerator:
    """
    Random fix-free, well-typed terms, closed or over a drawn context.

    Args:
        rng: Source of randomness.
        max_depth: Nesting bound of compound constructors.
    """

    def __init__(self, rng: np.random.Generator, max_depth: int = 3):
        self.rng = rng
        self.max_depth = max_depth
        self._counter = itertools.count()

    def choice(self, options: Sequence):
        return options[int(self.rng.integers(len(options)))]

    def fresh(self) -> str:
        return f"{self.choice(NAMES)}{next(self._counter)}"

    def type(self) -> Type:
        return self.choice(TYPE_POOL)

    def closed(self, ty: Optional[Type] = None) -> Tuple[tm.Term, Type]:
        ty = ty if ty is not None else self.type()
        return self.term(ty, tm.EMPTY_CONTEXT, self.max_depth), ty

    def context(self, size: Optional[int] = None) -> tm.TypingContext:
        """
        Free variables of base, pair and ``R->R`` type.

        Names come from ``OPEN_VARIABLES`` and never clash with the binders
        ``fresh`` hands out.
        """
        size = int(self.rng.integers(1, 4)) if size is None else size
        ctx = tm.EMPTY_CONTEXT
        for _ in range(size):
            ty, hint = self.choice(OPEN_VARIABLES)
            ctx = ctx.extend(tm.fresh_var(hint, ctx.names()), ty)
        return ctx

    def open(
        self, ty: Optional[Type] = None, ctx: Optional[tm.TypingContext] = None
    ) -> Tuple[tm.Term, Type, tm.TypingContext]:
        """A term well typed under ``ctx``, a fresh ``context()`` when None."""
        ctx = ctx if ctx is not None else self.context()
        ty = ty if ty is not None else self.type()
        return self.term(ty, ctx, self.max_depth), ty, ctx

    # ---- leaves ----

    def literal(self) -> tm.Term:
        return tm.num(self.choice(LITERALS))

    def variables(self, ty: Type, ctx: tm.TypingContext) -> List[tm.Term]:
        return [tm.Var(name) for name, t in ctx.as_dict().items() if t == ty]

    def leaf(self, ty: Type, ctx: tm.TypingContext) -> tm.Term:
        found = self.variables(ty, ctx)
        if found and self.rng.random() < 0.5:
            return self.choice(found)
        if isinstance(ty, Base):
            return self.literal()
        if isinstance(ty, Product):
            return tm.Tuple(tuple(self.leaf(c, ctx) for c in ty.components))
        if isinstance(ty, Arrow):
            x = self.fresh()
            return tm.Lam(x, ty.domain, self.leaf(ty.codomain, ctx.extend(x, ty.domain)))
        if isinstance(ty, Sum):
            return self.injection(ty, ctx, 0)
        raise TypeError(f"not a type: {ty!r}")

    # ---- compound ----

    def term(self, ty: Type, ctx: tm.TypingContext, depth: int) -> tm.Term:
        if depth <= 0:
            return self.leaf(ty, ctx)
        builders = self.builders(ty, ctx)
        return self.choice(builders)(ty, ctx, depth - 1)

    def builders(self, ty: Type, ctx: tm.TypingContext) -> List[Callable]:
        out: List[Callable] = [self._leaf, self._beta, self._case]
        if isinstance(ty, Base):
            out += [self._apply, self._project, self._apply_variable]
        if isinstance(ty, Product):
            out.append(self._tuple)
        if isinstance(ty, Arrow):
            out.append(self._lambda)
        if isinstance(ty, Sum):
            out.append(self.injection)
        if not isinstance(ty, Sum):
            out += [self._add, self._sub, self._mul, self._integral]
        out.append(self._derivative)
        return out

    def _leaf(self, ty, ctx, depth):
        return self.leaf(ty, ctx)

    def _tuple(self, ty: Product, ctx, depth):
        return tm.Tuple(tuple(self.term(c, ctx, depth) for c in ty.components))

    def _lambda(self, ty: Arrow, ctx, depth):
        x = self.fresh()
        return tm.Lam(x, ty.domain, self.term(ty.codomain, ctx.extend(x, ty.domain), depth))

    def injection(self, ty: Sum, ctx, depth):
        if self.rng.random() < 0.5:
            return tm.Inl(self.term(ty.left, ctx, depth), ty)
        return tm.Inr(self.term(ty.right, ctx, depth), ty)

    def _beta(self, ty, ctx, depth):
        domain = self.choice(POINT_TYPES)
        x = self.fresh()
        body = self.term(ty, ctx.extend(x, domain), depth)
        return tm.App(tm.Lam(x, domain, body), self.term(domain, ctx, depth))

    def _apply(self, ty, ctx, depth):
        fun_types = [t for t in TYPE_POOL if isinstance(t, Arrow) and t.codomain == ty]
        fun_ty = self.choice(fun_types)
        return tm.App(self.term(fun_ty, ctx, depth), self.term(fun_ty.domain, ctx, depth))

    def _apply_variable(self, ty, ctx, depth):
        found = self.variables(Arrow(R, ty), ctx)
        if not found:
            return self._apply(ty, ctx, depth)
        return tm.App(self.choice(found), self.term(R, ctx, depth))

    def _project(self, ty, ctx, depth):
        i = int(self.rng.integers(1, 3))
        return tm.Proj(i, self.term(RR, ctx, depth))

    def _case(self, ty, ctx, depth):
        scrutinee_ty = Sum(R, R)
        l, r = self.fresh(), self.fresh()
        return tm.Case(
            self.injection(scrutinee_ty, ctx, depth),
            l,
            self.term(ty, ctx.extend(l, R), depth),
            r,
            self.term(ty, ctx.extend(r, R), depth),
        )

    def _add(self, ty, ctx, depth):
        return tm.Add(self.term(ty, ctx, depth), self.term(ty, ctx, depth))

    def _sub(self, ty, ctx, depth):
        return tm.Sub(self.term(ty, ctx, depth), self.term(ty, ctx, depth))

    def _mul(self, ty, ctx, depth):
        scalar = self.choice(POINT_TYPES)
        factor = ty if isinstance(scalar, Base) else Product((ty, ty))
        return tm.Mul(self.term(factor, ctx, depth), self.term(scalar, ctx, depth))

    def _derivative(self, ty, ctx, depth):
        point = self.choice(POINT_TYPES)
        x = self.fresh()
        if isinstance(point, Base) or not (
            isinstance(ty, Product) and len(ty.components) == 2 and ty.components[0] == ty.components[1]
        ):
            point, body_ty = R, ty
        else:
            body_ty = ty.components[0]
        body = self.term(body_ty, ctx.extend(x, point), depth)
        return tm.Der(body, x, self.term(point, ctx, depth))

    def _integral(self, ty, ctx, depth):
        point = self.choice(POINT_TYPES)
        body_ty = ty if isinstance(point, Base) else Product((ty, ty))
        x = self.fresh()
        return tm.Int(
            self.term(point, ctx, depth),
            self.term(point, ctx, depth),
            self.term(body_ty, ctx.extend(x, point), depth),
            x,
        )


class PolynomialGenerator:
    """Random polynomial programs over tuples of base values."""

    def __init__(self, rng: np.random.Generator, low: int = -3, high: int = 3):
        self.rng = rng
        self.low = low
        self.high = high

    def coefficient(self) -> int:
        return int(self.rng.integers(self.low, self.high + 1))

    def integers(self, n: int, low: int = -3, high: int = 3) -> List[int]:
        return [int(v) for v in self.rng.integers(low, high + 1, size=n)]

    def polynomial(self, atoms: Sequence[tm.Term], degree: int = 2) -> tm.Term:
        """``c0 ⊕ Σ c*m`` over every monomial of ``atoms`` up to ``degree``."""
        monomials: List[tm.Term] = [tm.num(self.coefficient())]
        for d in range(1, degree + 1):
            for combo in itertools.combinations_with_replacement(atoms, d):
                product = reduce(tm.Mul, combo[1:], tm.Mul(tm.num(self.coefficient()), combo[0]))
                monomials.append(product)
        return reduce(tm.Add, monomials[1:], monomials[0])

    def body(self, codomain: Type, atoms: Sequence[tm.Term], degree: int = 2) -> tm.Term:
        if isinstance(codomain, Base):
            return self.polynomial(atoms, degree)
        if isinstance(codomain, Product):
            return tm.Tuple(tuple(self.body(c, atoms, degree) for c in codomain.components))
        raise ValueError(f"polynomial bodies need base or tuple codomains, got {codomain}")

    def program(self, domain: Type, codomain: Type, degree: int = 2, var: str = "x") -> tm.Lam:
        """``λvar:domain. body`` with a polynomial in the base leaves of ``var``."""
        return tm.Lam(var, domain, self.body(codomain, leaves(domain, tm.Var(var)), degree))

    def curried(self, domain: Type, degree: int = 2, var: str = "x", inner: str = "u") -> tm.Lam:
        """``λvar:domain. λinner:R. body`` of type ``domain -> R -> R``."""
        atoms = leaves(domain, tm.Var(var)) + [tm.Var(inner)]
        return tm.Lam(var, domain, tm.Lam(inner, R, self.polynomial(atoms, degree)))

    def point(self, ty: Type, low: int = -3, high: int = 3) -> tm.Term:
        return constant_point(ty, self.integers(width(ty), low, high))

    def choice(self, options: Sequence):
        return options[int(self.rng.integers(len(options)))]
