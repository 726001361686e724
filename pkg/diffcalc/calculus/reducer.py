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
Full reduction with fuel.

The default strategy is leftmost-outermost: the rule table is tried at the
root first, then children are visited left to right, with points and bounds
before bodies. Positions are tuples of child labels (``fun``, ``arg``,
``body``, ``at``, ``lo``, ``hi``, ``l``, ``r``, ``tuple``, ``term``,
``scrutinee``, ``lbranch``, ``rbranch``, ``delta`` and ``1..n`` for tuple
items).

Typing information needed by the rules (is this point of base type?) comes
from the context carried down the walk; binder types are the lambda
annotation, the type of the point or lower bound, or the matching side of
the scrutinee's sum type.
"""

import logging
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterator, List, Optional, Tuple

import numpy as np

from ..base import consts
from ..base import terms as tm
from ..base.errors import DiffcalcError
from ..base.types import Base, Sum, Type, is_interpretable
from ..interp.primitives import DEFAULT_PRIMITIVES, PrimitiveTable
from ..syntax.printer import show_term
from .typechecker import TypeChecker

logger = logging.getLogger(__name__)

RULES = (
    "Beta",
    "Proj",
    "CaseInl",
    "CaseInr",
    "FixUnfold",
    "EAppDer1",
    "EAppDer2",
    "EAppDer3",
    "EAppDer4",
    "EAppInt1",
    "EAppInt2",
    "EAppInt3",
    "EAppInt4",
    "EAppAdd1",
    "EAppAdd2",
    "EAppSub1",
    "EAppSub2",
    "EAppMul1",
    "EAppMul2",
    "EAppMul3",
    "EAppMul4",
)


def show_path(path: tm.Path) -> str:
    return "/".join(path) if path else "ε"


@dataclass(frozen=True)
class Step:
    """One contraction: ``before`` at ``path`` was replaced by ``after``."""

    rule: str
    path: tm.Path
    before: tm.Term
    after: tm.Term

    def render(self, n: int, unicode: bool = False) -> str:
        return (
            f"#{n} {self.rule} @ {show_path(self.path)}: "
            f"{show_term(self.before, unicode)} ⟶ {show_term(self.after, unicode)}"
        )


@dataclass
class ReductionTrace:
    initial: tm.Term
    steps: List[Step] = field(default_factory=list)
    final: Optional[tm.Term] = None

    def replay(self) -> tm.Term:
        t = self.initial
        for s in self.steps:
            t = tm.replace_at(t, s.path, s.after)
        return t

    def rules(self) -> List[str]:
        return [s.rule for s in self.steps]

    def render(self, unicode: bool = False) -> str:
        return "\n".join(s.render(i + 1, unicode) for i, s in enumerate(self.steps))

    def __len__(self) -> int:
        return len(self.steps)


class Fuel:
    """A step budget; every applied rule consumes exactly one unit."""

    def __init__(self, remaining: int = consts.DEFAULT_FUEL):
        if remaining < 0:
            raise ValueError(f"fuel must be non-negative, got {remaining}")
        self.initial = remaining
        self.remaining = remaining

    def consume(self) -> None:
        if self.remaining <= 0:
            raise ValueError("no fuel left")
        self.remaining -= 1

    @property
    def used(self) -> int:
        return self.initial - self.remaining

    def __bool__(self) -> bool:
        return self.remaining > 0

    def __repr__(self) -> str:
        return f"Fuel(remaining={self.remaining})"


class StuckTerm(DiffcalcError):
    """No rule applies but the term is not a normal form."""

    def __init__(self, term: tm.Term, trace: Optional[ReductionTrace] = None):
        self.term = term
        self.trace = trace
        super().__init__(f"stuck term (not a normal form, no rule applies): {show_term(term)}")


class FuelExhausted(DiffcalcError):
    def __init__(self, term: tm.Term, trace: ReductionTrace):
        self.term = term
        self.trace = trace
        super().__init__(f"fuel exhausted after {len(trace)} steps at: {show_term(term)}")


class PreservationViolation(DiffcalcError):
    def __init__(self, step: Step, before: Type, after: Type):
        self.step = step
        super().__init__(
            f"{step.rule} @ {show_path(step.path)} changed the type from {before} to {after}"
        )


@dataclass(frozen=True)
class Redex:
    path: tm.Path
    ctx: tm.TypingContext
    rule: str
    before: tm.Term
    after: tm.Term

    def as_step(self) -> Step:
        return Step(self.rule, self.path, self.before, self.after)


def _sum_terms(items: List[tm.Term], ctor=tm.Add) -> tm.Term:
    return reduce(ctor, items[1:], items[0])


def _avoid(*ts: tm.Term) -> frozenset:
    out = set()
    for t in ts:
        out |= tm.all_vars(t)
    return frozenset(out)


def _open_lambda(lam: tm.Lam, avoid: frozenset) -> Tuple[str, tm.Term]:
    """The lambda's binder and body, renamed away from ``avoid`` if needed."""
    if lam.var not in avoid:
        return lam.var, lam.body
    fresh = tm.fresh_var(lam.var, avoid | tm.all_vars(lam.body))
    return fresh, tm.rename(lam.body, lam.var, fresh)


def _staircase(items: Tuple[tm.Term, ...], i: int, var: str, tail: Tuple[tm.Term, ...]) -> tm.Tuple:
    """``(items_1, .., items_{i-1}, var, tail_{i+1}, .., tail_n)``"""
    return tm.Tuple(items[:i] + (tm.Var(var),) + tail[i + 1 :])


class Reducer:
    """
    Rule table plus strategy.

    Args:
        prims: Primitive table used for typing constants.
        check_preservation: Re-typecheck every contracted redex and raise
            PreservationViolation if its type changed.
        strategy: ``"leftmost"`` (default) or ``"random"``; the random
            strategy picks uniformly among all redexes and needs ``seed``.
        trace_log: Log each fired rule at debug level.
    """

    def __init__(
        self,
        prims: Optional[PrimitiveTable] = None,
        check_preservation: bool = False,
        strategy: str = "leftmost",
        seed: Optional[int] = None,
        trace_log: bool = False,
    ):
        if strategy not in ("leftmost", "random"):
            raise ValueError(f"unknown strategy {strategy!r}")
        self.prims = prims if prims is not None else DEFAULT_PRIMITIVES
        self.checker = TypeChecker(self.prims)
        self.check_preservation = check_preservation
        self.strategy = strategy
        self.rng = np.random.default_rng(consts.default_seed() if seed is None else seed)
        self.trace_log = trace_log

    def type_of(self, ctx: tm.TypingContext, t: tm.Term) -> Type:
        return self.checker.check(ctx, t)

    def is_base(self, ctx: tm.TypingContext, t: tm.Term) -> bool:
        return isinstance(self.type_of(ctx, t), Base)

    # ---- rule table ----

    def contract(self, t: tm.Term, ctx: tm.TypingContext) -> Optional[Tuple[str, tm.Term]]:
        """The rule firing at the root of ``t`` and its contractum, if any."""
        if isinstance(t, tm.App) and isinstance(t.fun, tm.Lam):
            return "Beta", tm.substitute(t.fun.body, t.fun.var, t.arg)
        if isinstance(t, tm.Proj) and isinstance(t.tuple, tm.Tuple):
            if 1 <= t.index <= len(t.tuple.items):
                return "Proj", t.tuple.items[t.index - 1]
            return None
        if isinstance(t, tm.Case):
            if isinstance(t.scrutinee, tm.Inl):
                return "CaseInl", tm.substitute(t.lbranch, t.lvar, t.scrutinee.term)
            if isinstance(t.scrutinee, tm.Inr):
                return "CaseInr", tm.substitute(t.rbranch, t.rvar, t.scrutinee.term)
            return None
        if isinstance(t, tm.Fix):
            return "FixUnfold", tm.App(t.term, t)
        if isinstance(t, tm.Der):
            return self._derivative(t, ctx)
        if isinstance(t, tm.Int):
            return self._integral(t, ctx)
        if isinstance(t, (tm.Add, tm.Sub)):
            return self._additive(t)
        if isinstance(t, tm.Mul):
            return self._multiply(t, ctx)
        return None

    def _derivative(self, t: tm.Der, ctx) -> Optional[Tuple[str, tm.Term]]:
        body, x, at = t.body, t.var, t.at
        if isinstance(at, tm.Tuple):
            xi = tm.fresh_var(x, _avoid(body, at) | {x})
            partials = tuple(
                tm.Der(tm.substitute(body, x, _staircase(at.items, i, xi, at.items)), xi, item)
                for i, item in enumerate(at.items)
            )
            return "EAppDer4", tm.Tuple(partials)
        if not self.is_base(ctx, at):
            return None
        if isinstance(body, tm.Tuple):
            return "EAppDer1", tm.Tuple(tuple(tm.Der(b, x, at) for b in body.items))
        if isinstance(body, (tm.Inl, tm.Inr)):
            return "EAppDer2", type(body)(tm.Der(body.term, x, at), body.annot)
        if isinstance(body, tm.Lam):
            y, inner = _open_lambda(body, tm.free_vars(at) | {x})
            return "EAppDer3", tm.Lam(y, body.annot, tm.Der(inner, x, at))
        return None

    def _integral(self, t: tm.Int, ctx) -> Optional[Tuple[str, tm.Term]]:
        lo, hi, body, x = t.lo, t.hi, t.body, t.var
        if isinstance(lo, tm.Tuple) and isinstance(hi, tm.Tuple):
            xi = tm.fresh_var(x, _avoid(body, lo, hi) | {x})
            pieces = [
                tm.Int(
                    lo.items[i],
                    hi.items[i],
                    tm.Proj(i + 1, tm.substitute(body, x, _staircase(hi.items, i, xi, lo.items))),
                    xi,
                )
                for i in range(len(lo.items))
            ]
            return "EAppInt4", _sum_terms(pieces)
        if not self.is_base(ctx, lo):
            return None
        if isinstance(body, tm.Tuple):
            return "EAppInt1", tm.Tuple(tuple(tm.Int(lo, hi, b, x) for b in body.items))
        if isinstance(body, (tm.Inl, tm.Inr)):
            return "EAppInt2", type(body)(tm.Int(lo, hi, body.term, x), body.annot)
        if isinstance(body, tm.Lam):
            y, inner = _open_lambda(body, tm.free_vars(lo) | tm.free_vars(hi) | {x})
            return "EAppInt3", tm.Lam(y, body.annot, tm.Int(lo, hi, inner, x))
        return None

    def _additive(self, t) -> Optional[Tuple[str, tm.Term]]:
        ctor = type(t)
        name = "EAppAdd" if ctor is tm.Add else "EAppSub"
        l, r = t.l, t.r
        if isinstance(l, tm.Tuple) and isinstance(r, tm.Tuple) and len(l.items) == len(r.items):
            return f"{name}1", tm.Tuple(tuple(ctor(a, b) for a, b in zip(l.items, r.items)))
        if isinstance(l, tm.Lam) and isinstance(r, tm.Lam):
            if l.var in tm.free_vars(r):
                z = tm.fresh_var(l.var, _avoid(l, r))
                left = tm.rename(l.body, l.var, z)
            else:
                z, left = l.var, l.body
            right = tm.rename(r.body, r.var, z)
            return f"{name}2", tm.Lam(z, l.annot, ctor(left, right))
        return None

    def _multiply(self, t: tm.Mul, ctx) -> Optional[Tuple[str, tm.Term]]:
        l, r = t.l, t.r
        if isinstance(l, tm.Tuple) and isinstance(r, tm.Tuple) and len(l.items) == len(r.items):
            return "EAppMul4", _sum_terms([tm.Mul(a, b) for a, b in zip(l.items, r.items)])
        if not isinstance(l, (tm.Tuple, tm.Lam, tm.Inl, tm.Inr)) or not self.is_base(ctx, r):
            return None
        if isinstance(l, tm.Tuple):
            return "EAppMul1", tm.Tuple(tuple(tm.Mul(a, r) for a in l.items))
        if isinstance(l, tm.Lam):
            y, inner = _open_lambda(l, tm.free_vars(r))
            return "EAppMul2", tm.Lam(y, l.annot, tm.Mul(inner, r))
        return "EAppMul3", type(l)(tm.Mul(l.term, r), l.annot)

    # ---- walking ----

    def child_context(self, t: tm.Term, label: str, ctx: tm.TypingContext) -> tm.TypingContext:
        """Context under which child ``label`` of ``t`` is typed."""
        var = tm.binder_of(t, label)
        if var is None:
            return ctx
        if isinstance(t, tm.Lam):
            return ctx.extend(var, t.annot)
        if isinstance(t, (tm.Der, tm.DDer)):
            return ctx.extend(var, self.type_of(ctx, t.at))
        if isinstance(t, tm.Int):
            return ctx.extend(var, self.type_of(ctx, t.lo))
        if isinstance(t, tm.Case):
            ty = self.type_of(ctx, t.scrutinee)
            assert isinstance(ty, Sum)
            return ctx.extend(var, ty.left if label == "lbranch" else ty.right)
        raise AssertionError(f"unexpected binder in {type(t).__name__}")

    def redexes(
        self, t: tm.Term, ctx: tm.TypingContext, path: tm.Path = ()
    ) -> Iterator[Redex]:
        """Every redex of ``t`` in strategy order (pre-order, root first)."""
        fired = self.contract(t, ctx)
        if fired is not None:
            rule, after = fired
            yield Redex(path, ctx, rule, t, after)
        for label, child in tm.children(t):
            yield from self.redexes(child, self.child_context(t, label, ctx), path + (label,))

    def select(self, t: tm.Term, ctx: tm.TypingContext) -> Optional[Redex]:
        if self.strategy == "leftmost":
            return next(self.redexes(t, ctx), None)
        candidates = list(self.redexes(t, ctx))
        if not candidates:
            return None
        return candidates[int(self.rng.integers(len(candidates)))]

    # ---- normal forms ----

    def is_nb(self, t: tm.Term, ctx: tm.TypingContext) -> bool:
        """Irreducible term of interpretable type, handed to the base interpreter."""
        if not is_interpretable(self.type_of(ctx, t)):
            return False
        if isinstance(t, tm.Const):
            return True
        if isinstance(t, tm.Var):
            return True
        if isinstance(t, tm.App):
            return self.is_nb(t.fun, ctx) and self._nf(t.arg, ctx)
        if isinstance(t, (tm.Add, tm.Sub)):
            l_nb, r_nb = self.is_nb(t.l, ctx), self.is_nb(t.r, ctx)
            return (l_nb and (r_nb or self._nf(t.r, ctx))) or (
                r_nb and self._nf(t.l, ctx)
            )
        if isinstance(t, tm.Mul):
            return self.is_nb(t.l, ctx) and self.is_nb(t.r, ctx)
        if isinstance(t, tm.Der):
            return self.is_nb(t.at, ctx) and self.is_nb(t.body, self.child_context(t, "body", ctx))
        if isinstance(t, tm.Int):
            return (
                self.is_nb(t.lo, ctx)
                and self.is_nb(t.hi, ctx)
                and self.is_nb(t.body, self.child_context(t, "body", ctx))
            )
        if isinstance(t, tm.DDer):
            return (
                self.is_nb(t.at, ctx)
                and self.is_nb(t.delta, ctx)
                and self.is_nb(t.body, self.child_context(t, "body", ctx))
            )
        return False

    def is_normal_form(self, t: tm.Term, ctx: Optional[tm.TypingContext] = None) -> bool:
        """nb, a tuple of nf, an injection of nf, or a lambda whose body cannot reduce."""
        return self._nf(t, tm.close_context(t, ctx))

    def _nf(self, t: tm.Term, ctx: tm.TypingContext) -> bool:
        if isinstance(t, tm.Tuple):
            return all(self._nf(item, ctx) for item in t.items)
        if isinstance(t, tm.Lam):
            inner = ctx.extend(t.var, t.annot)
            return self._nf(t.body, inner) or next(self.redexes(t.body, inner), None) is None
        if isinstance(t, (tm.Inl, tm.Inr)):
            return self._nf(t.term, ctx)
        return self.is_nb(t, ctx)

    # ---- driving ----

    def step(self, t: tm.Term, ctx: Optional[tm.TypingContext] = None) -> Optional[Step]:
        """The next step under the strategy, or None at a normal form."""
        ctx = tm.close_context(t, ctx)
        redex = self.select(t, ctx)
        if redex is None:
            if not self._nf(t, ctx):
                raise StuckTerm(t)
            return None
        return self._apply(redex)

    def _apply(self, redex: Redex) -> Step:
        step = redex.as_step()
        if self.check_preservation:
            before = self.type_of(redex.ctx, redex.before)
            after = self.type_of(redex.ctx, redex.after)
            if before != after:
                raise PreservationViolation(step, before, after)
        if self.trace_log:
            logger.debug(f"{step.rule} @ {show_path(step.path)}: {show_term(step.before)}")
        return step

    def normalize(
        self,
        t: tm.Term,
        fuel: Optional[Fuel] = None,
        ctx: Optional[tm.TypingContext] = None,
    ) -> ReductionTrace:
        """
        Reduce ``t`` until no rule applies.

        Args:
            t: A well-typed term; free variables missing from ``ctx`` are typed R.
            fuel: Step budget, defaults to ``DEFAULT_FUEL``.
            ctx: Typing context for the free variables of ``t``.

        Returns:
            ReductionTrace: the full trace, ``final`` holding the normal form.

        Raises:
            FuelExhausted: with the partial trace, when the budget runs out.
            StuckTerm: when no rule applies to a term that is not a normal form.
        """
        fuel = fuel if fuel is not None else Fuel()
        ctx = tm.close_context(t, ctx)
        self.type_of(ctx, t)
        trace = ReductionTrace(initial=t)
        current = t
        while True:
            redex = self.select(current, ctx)
            if redex is None:
                if not self._nf(current, ctx):
                    raise StuckTerm(current, trace)
                trace.final = current
                return trace
            if not fuel:
                trace.final = current
                raise FuelExhausted(current, trace)
            fuel.consume()
            step = self._apply(redex)
            trace.steps.append(step)
            current = tm.replace_at(current, step.path, step.after)


_DEFAULT_REDUCER = Reducer()


def step(t: tm.Term, ctx: Optional[tm.TypingContext] = None) -> Optional[Step]:
    return _DEFAULT_REDUCER.step(t, ctx)


def is_normal_form(t: tm.Term, ctx: Optional[tm.TypingContext] = None) -> bool:
    return _DEFAULT_REDUCER.is_normal_form(t, ctx)


def normalize(
    t: tm.Term,
    fuel: Optional[int] = None,
    ctx: Optional[tm.TypingContext] = None,
    reducer: Optional[Reducer] = None,
) -> ReductionTrace:
    budget = Fuel(consts.DEFAULT_FUEL if fuel is None else fuel)
    return (reducer or _DEFAULT_REDUCER).normalize(t, budget, ctx)


def normal_form(
    t: tm.Term,
    fuel: Optional[int] = None,
    ctx: Optional[tm.TypingContext] = None,
    reducer: Optional[Reducer] = None,
) -> tm.Term:
    return normalize(t, fuel, ctx, reducer).final
