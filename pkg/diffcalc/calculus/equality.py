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
Equality of terms through their normal forms.

Closed normal forms compare by type: base values through the base
interpreter, tuples pointwise, functions by applying both sides to the same
fresh argument, injections by constructor and payload.

Open terms are closed by substitution. Base variables stay symbolic. Tuple
variables become tuples of fresh symbols. Function variables become random
polynomial lambdas of degree at most two, and sum variables alternate
between ``inl`` and ``inr`` across trials. A ``True`` answer means no trial
found a difference; ``False`` comes with the substitution that separates
the two sides.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set

import numpy as np
from pydantic import BaseModel, Field

from ..base import consts
from ..base import terms as tm
from ..base.types import Arrow, Base, Product, R, Sum, Type
from ..interp.embed import embed, reify
from ..interp.primitives import DEFAULT_PRIMITIVES, PrimitiveTable
from ..interp.symbolic import expr_eq
from ..syntax.printer import show_term
from .reducer import Fuel, Reducer, show_path
from .typechecker import TypeChecker

logger = logging.getLogger(__name__)

# Coefficient range of random polynomial instantiations.
COEFF_LOW, COEFF_HIGH = -3, 3


class EqConfig(BaseModel):
    fuel: int = Field(consts.DEFAULT_FUEL, ge=1, description="Step budget for each inner normalization.")
    trials: int = Field(consts.DEFAULT_TRIALS, ge=1, description="Substitution samples for open terms.")
    seed: int = Field(default_factory=consts.default_seed, description="Seed of the instantiation RNG.")
    rtol: float = Field(consts.EXPR_EQ_RTOL, gt=0, description="Relative tolerance of sampled base equality.")


@dataclass
class Witness:
    """Why two terms were found different."""

    reason: str
    substitution: Dict[str, tm.Term] = field(default_factory=dict)
    lhs_nf: Optional[tm.Term] = None
    rhs_nf: Optional[tm.Term] = None
    path: tm.Path = ()

    def describe(self) -> str:
        lines = [self.reason]
        for name, value in self.substitution.items():
            lines.append(f"  {name} := {show_term(value)}")
        if self.lhs_nf is not None:
            lines.append(f"  lhs nf: {show_term(self.lhs_nf)}")
            lines.append(f"  rhs nf: {show_term(self.rhs_nf)}")
            lines.append(f"  first difference @ {show_path(self.path)}")
        return "\n".join(lines)


@dataclass
class EqResult:
    equal: bool
    trials: int = 0
    witness: Optional[Witness] = None
    lhs_nf: Optional[tm.Term] = None
    rhs_nf: Optional[tm.Term] = None

    def __bool__(self) -> bool:
        return self.equal


def _base_leaves(ty: Type, access: tm.Term) -> List[tm.Term]:
    """Projections of ``access`` reaching every base component of ``ty``."""
    if isinstance(ty, Base):
        return [access]
    if isinstance(ty, Product):
        out = []
        for i, c in enumerate(ty.components):
            out.extend(_base_leaves(c, tm.Proj(i + 1, access)))
        return out
    return []


class Instantiator:
    """Closed stand-ins for free variables, drawn from a seeded generator."""

    def __init__(self, rng: np.random.Generator, avoid: Set[str]):
        self.rng = rng
        self.avoid = set(avoid)
        self.symbols: List[str] = []

    def fresh(self, base: str) -> str:
        name = tm.fresh_var(base, self.avoid)
        self.avoid.add(name)
        return name

    def symbol(self, base: str) -> tm.Var:
        name = self.fresh(base)
        self.symbols.append(name)
        return tm.Var(name)

    def coefficient(self) -> tm.Term:
        return tm.num(int(self.rng.integers(COEFF_LOW, COEFF_HIGH + 1)))

    def polynomial(self, leaves: List[tm.Term]) -> tm.Term:
        monomials: List[tm.Term] = [self.coefficient()]
        for leaf in leaves:
            monomials.append(tm.Mul(self.coefficient(), leaf))
        for a, b in itertools.combinations_with_replacement(leaves, 2):
            monomials.append(tm.Mul(tm.Mul(self.coefficient(), a), b))
        out = monomials[0]
        for m in monomials[1:]:
            out = tm.Add(out, m)
        return out

    def body(self, ty: Type, leaves: List[tm.Term], side: int) -> tm.Term:
        """A closed-over-``leaves`` term of type ``ty``."""
        if isinstance(ty, Base):
            return self.polynomial(leaves)
        if isinstance(ty, Product):
            return tm.Tuple(tuple(self.body(c, leaves, side) for c in ty.components))
        if isinstance(ty, Arrow):
            var = self.fresh("u")
            inner = leaves + _base_leaves(ty.domain, tm.Var(var))
            return tm.Lam(var, ty.domain, self.body(ty.codomain, inner, side))
        if isinstance(ty, Sum):
            if side % 2 == 0:
                return tm.Inl(self.body(ty.left, leaves, side), ty)
            return tm.Inr(self.body(ty.right, leaves, side), ty)
        raise TypeError(f"not a type: {ty!r}")

    def value(self, ty: Type, hint: str, side: int) -> tm.Term:
        """A stand-in of type ``ty``: symbols at base leaves, random functions otherwise."""
        if isinstance(ty, Base):
            return self.symbol(hint)
        if isinstance(ty, Product):
            return tm.Tuple(
                tuple(self.value(c, f"{hint}{i + 1}", side) for i, c in enumerate(ty.components))
            )
        if isinstance(ty, Arrow):
            return self.body(ty, [], side)
        if isinstance(ty, Sum):
            if side % 2 == 0:
                return tm.Inl(self.value(ty.left, hint, side), ty)
            return tm.Inr(self.value(ty.right, hint, side), ty)
        raise TypeError(f"not a type: {ty!r}")


def _needs_sampling(ty: Type) -> bool:
    if isinstance(ty, Base):
        return False
    if isinstance(ty, Product):
        return any(_needs_sampling(c) for c in ty.components)
    return True


class Comparator:
    """
    Term equality under a fixed configuration.

    Args:
        cfg: Fuel, trial count, seed and base tolerance.
        prims: Primitive table shared by typing, reduction and interpretation.
        reducer: Reducer used for every normalization.
    """

    def __init__(
        self,
        cfg: Optional[EqConfig] = None,
        prims: Optional[PrimitiveTable] = None,
        reducer: Optional[Reducer] = None,
    ):
        self.cfg = cfg or EqConfig()
        self.prims = prims if prims is not None else DEFAULT_PRIMITIVES
        self.reducer = reducer or Reducer(self.prims)
        self.checker = TypeChecker(self.prims)
        self.rng = np.random.default_rng(self.cfg.seed)

    def normalize(self, t: tm.Term, ctx: tm.TypingContext) -> tm.Term:
        return self.reducer.normalize(t, Fuel(self.cfg.fuel), ctx).final

    # ---- normal forms ----

    def nf_eq(self, n1: tm.Term, n2: tm.Term, ctx: Optional[tm.TypingContext] = None) -> bool:
        return self.nf_diff(n1, n2, ctx) is None

    def nf_diff(
        self, n1: tm.Term, n2: tm.Term, ctx: Optional[tm.TypingContext] = None
    ) -> Optional[tm.Path]:
        """First position where two normal forms differ, or None."""
        ctx = tm.close_context(n2, tm.close_context(n1, ctx))
        ty = self.checker.check(ctx, n1)
        return self._diff(n1, n2, ty, ctx, ())

    def _diff(
        self, n1: tm.Term, n2: tm.Term, ty: Type, ctx: tm.TypingContext, path: tm.Path
    ) -> Optional[tm.Path]:
        if isinstance(ty, Base):
            same = expr_eq(embed(n1, self.prims), embed(n2, self.prims), self.prims, self.cfg.rtol)
            return None if same else path
        if isinstance(ty, Product):
            for i, c in enumerate(ty.components):
                a = n1.items[i] if isinstance(n1, tm.Tuple) else self.normalize(tm.Proj(i + 1, n1), ctx)
                b = n2.items[i] if isinstance(n2, tm.Tuple) else self.normalize(tm.Proj(i + 1, n2), ctx)
                found = self._diff(a, b, c, ctx, path + (str(i + 1),))
                if found is not None:
                    return found
            return None
        if isinstance(ty, Arrow):
            avoid = tm.all_vars(n1) | tm.all_vars(n2) | ctx.names()
            for side in (0, 1) if _needs_sampling(ty.domain) else (0,):
                inst = Instantiator(self.rng, avoid)
                arg = inst.value(ty.domain, "v", side)
                inner = ctx
                for name in inst.symbols:
                    inner = inner.extend(name, R)
                a = self.normalize(tm.App(n1, arg), inner)
                b = self.normalize(tm.App(n2, arg), inner)
                found = self._diff(a, b, ty.codomain, inner, path + ("arg",))
                if found is not None:
                    return found
            return None
        if isinstance(ty, Sum):
            if tm.is_injection(n1) and tm.is_injection(n2):
                if type(n1) is not type(n2):
                    return path
                side = ty.left if isinstance(n1, tm.Inl) else ty.right
                return self._diff(n1.term, n2.term, side, ctx, path + ("term",))
            return None if tm.alpha_eq(n1, n2) else path
        raise TypeError(f"not a type: {ty!r}")

    # ---- open terms ----

    def check(
        self, t1: tm.Term, t2: tm.Term, ctx: Optional[tm.TypingContext] = None
    ) -> EqResult:
        """
        Compare two terms for every sampled closing substitution.

        Raises:
            FuelExhausted: if either side does not normalize within ``cfg.fuel``.
        """
        ctx = tm.close_context(t2, tm.close_context(t1, ctx))
        ty1 = self.checker.check(ctx, t1)
        ty2 = self.checker.check(ctx, t2)
        if ty1 != ty2:
            return EqResult(False, 0, Witness(f"types differ: {ty1} vs {ty2}"))

        free = sorted(tm.free_vars(t1) | tm.free_vars(t2))
        typed = [(name, ctx.lookup(name)) for name in free]
        sampled = [(name, ty) for name, ty in typed if not isinstance(ty, Base)]
        trials = self.cfg.trials if any(_needs_sampling(ty) for _, ty in sampled) else 1
        avoid = tm.all_vars(t1) | tm.all_vars(t2) | ctx.names()

        lhs = rhs = None
        for trial in range(trials):
            inst = Instantiator(self.rng, avoid)
            substitution = {name: inst.value(ty, name, trial) for name, ty in sampled}
            inner = tm.TypingContext.of({name: ty for name, ty in typed if isinstance(ty, Base)})
            for name in inst.symbols:
                inner = inner.extend(name, R)
            lhs = self.normalize(tm.substitute_many(t1, substitution), inner)
            rhs = self.normalize(tm.substitute_many(t2, substitution), inner)
            found = self._diff(lhs, rhs, ty1, inner, ())
            if found is not None:
                witness = Witness("normal forms differ", substitution, lhs, rhs, found)
                logger.debug(f"terms differ on trial {trial}:\n{witness.describe()}")
                return EqResult(False, trial + 1, witness, lhs, rhs)
        return EqResult(True, trials, None, lhs, rhs)

    def readback(self, n: tm.Term, ctx: Optional[tm.TypingContext] = None) -> tm.Term:
        """
        A normal form with every maximal base-typed part replaced by its
        canonical interpretation, e.g. ``(1*7 (+) 2*8 (+) 3*9, ..)`` reads
        back as ``(50, ..)``.
        """
        ctx = tm.close_context(n, ctx)
        return self._readback(n, ctx)

    def _readback(self, n: tm.Term, ctx: tm.TypingContext) -> tm.Term:
        if isinstance(n, tm.Tuple):
            return tm.Tuple(tuple(self._readback(i, ctx) for i in n.items))
        if isinstance(n, tm.Lam):
            return tm.Lam(n.var, n.annot, self._readback(n.body, ctx.extend(n.var, n.annot)))
        if isinstance(n, (tm.Inl, tm.Inr)):
            return type(n)(self._readback(n.term, ctx), n.annot)
        if isinstance(self.checker.check(ctx, n), Base) and self.reducer.is_nb(n, ctx):
            return reify(embed(n, self.prims), self.prims)
        return n


def nf_eq(
    n1: tm.Term,
    n2: tm.Term,
    ctx: Optional[tm.TypingContext] = None,
    cfg: Optional[EqConfig] = None,
) -> bool:
    return Comparator(cfg).nf_eq(n1, n2, ctx)


def check_equal(
    t1: tm.Term,
    t2: tm.Term,
    cfg: Optional[EqConfig] = None,
    ctx: Optional[tm.TypingContext] = None,
    prims: Optional[PrimitiveTable] = None,
) -> EqResult:
    return Comparator(cfg, prims).check(t1, t2, ctx)


def term_eq(
    t1: tm.Term,
    t2: tm.Term,
    cfg: Optional[EqConfig] = None,
    ctx: Optional[tm.TypingContext] = None,
) -> bool:
    return check_equal(t1, t2, cfg, ctx).equal


def readback(n: tm.Term, ctx: Optional[tm.TypingContext] = None) -> tm.Term:
    return Comparator().readback(n, ctx)
