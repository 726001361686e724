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
Term syntax of the calculus.

Terms are immutable dataclasses with named variables. Binders are Lam (over
its body), Der, Int and DDer (over their body only) and Case (one variable per
branch). Everything here is a pure function of its inputs; fresh names are
drawn from an explicit avoid set.
"""

import re
from dataclasses import dataclass, fields, replace
from fractions import Fraction
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, List, Mapping
from typing import Optional, Tuple as _Tuple, Union

from .types import R, Sum as SumType, Type

Path = _Tuple[str, ...]

_LITERAL_RE = re.compile(r"^-?\d+(/\d+)?$")


class Term:
    """Base class of every term node."""

    __slots__ = ()

    def __str__(self) -> str:
        from ..syntax.printer import show_term

        return show_term(self)


@dataclass(frozen=True)
class Const(Term):
    name: str
    type: Type = R


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class Lam(Term):
    var: str
    annot: Type
    body: Term


@dataclass(frozen=True)
class App(Term):
    fun: Term
    arg: Term


@dataclass(frozen=True)
class Tuple(Term):
    items: _Tuple[Term, ...]

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        if len(self.items) < 2:
            raise ValueError(f"tuples need at least 2 items, got {len(self.items)}")


@dataclass(frozen=True)
class Proj(Term):
    index: int
    tuple: Term


@dataclass(frozen=True)
class Add(Term):
    l: Term
    r: Term


@dataclass(frozen=True)
class Sub(Term):
    l: Term
    r: Term


@dataclass(frozen=True)
class Mul(Term):
    l: Term
    r: Term


@dataclass(frozen=True)
class Der(Term):
    """``∂body/∂var|_at``."""

    body: Term
    var: str
    at: Term


@dataclass(frozen=True)
class Int(Term):
    """``∫_lo^hi body d var``."""

    lo: Term
    hi: Term
    body: Term
    var: str


@dataclass(frozen=True)
class Inl(Term):
    term: Term
    annot: Optional[Type] = None


@dataclass(frozen=True)
class Inr(Term):
    term: Term
    annot: Optional[Type] = None


@dataclass(frozen=True)
class Case(Term):
    scrutinee: Term
    lvar: str
    lbranch: Term
    rvar: str
    rbranch: Term


@dataclass(frozen=True)
class Fix(Term):
    term: Term


@dataclass(frozen=True)
class DDer(Term):
    """Discrete derivative ``Δbody/Δvar|_{at,delta}``."""

    body: Term
    var: str
    at: Term
    delta: Term


# Child fields in traversal order. Points and bounds come before bodies.
_CHILDREN: Dict[type, _Tuple[str, ...]] = {
    Const: (),
    Var: (),
    Lam: ("body",),
    App: ("fun", "arg"),
    Proj: ("tuple",),
    Add: ("l", "r"),
    Sub: ("l", "r"),
    Mul: ("l", "r"),
    Der: ("at", "body"),
    Int: ("lo", "hi", "body"),
    Inl: ("term",),
    Inr: ("term",),
    Case: ("scrutinee", "lbranch", "rbranch"),
    Fix: ("term",),
    DDer: ("at", "delta", "body"),
}

# child field -> field holding the variable bound over it
_BINDERS: Dict[type, Dict[str, str]] = {
    Lam: {"body": "var"},
    Der: {"body": "var"},
    Int: {"body": "var"},
    DDer: {"body": "var"},
    Case: {"lbranch": "lvar", "rbranch": "rvar"},
}


def num(value: Union[int, str, Fraction]) -> Const:
    """A rational literal of type R."""
    return Const(str(Fraction(value)), R)


def literal_value(t: Term) -> Optional[Fraction]:
    if isinstance(t, Const) and _LITERAL_RE.match(t.name):
        return Fraction(t.name)
    return None


def is_injection(t: Term) -> bool:
    return isinstance(t, (Inl, Inr))


def children(t: Term) -> List[_Tuple[str, Term]]:
    """Immediate subterms with their labels, in traversal order."""
    if isinstance(t, Tuple):
        return [(str(i + 1), item) for i, item in enumerate(t.items)]
    return [(name, getattr(t, name)) for name in _CHILDREN[type(t)]]


def with_child(t: Term, label: str, new: Term) -> Term:
    if isinstance(t, Tuple):
        items = list(t.items)
        items[int(label) - 1] = new
        return Tuple(tuple(items))
    return replace(t, **{label: new})


def binder_of(t: Term, label: str) -> Optional[str]:
    """The variable ``t`` binds over its child ``label``, if any."""
    binders = _BINDERS.get(type(t))
    if binders and label in binders:
        return getattr(t, binders[label])
    return None


def map_children(t: Term, fn: Callable[[str, Term], Term]) -> Term:
    if isinstance(t, Tuple):
        return Tuple(tuple(fn(str(i + 1), item) for i, item in enumerate(t.items)))
    names = _CHILDREN[type(t)]
    if not names:
        return t
    return replace(t, **{name: fn(name, getattr(t, name)) for name in names})


def get_at(t: Term, path: Path) -> Term:
    for label in path:
        t = dict(children(t))[label]
    return t


def replace_at(t: Term, path: Path, new: Term) -> Term:
    if not path:
        return new
    head, rest = path[0], path[1:]
    child = dict(children(t))[head]
    return with_child(t, head, replace_at(child, rest, new))


def subterms(t: Term, path: Path = ()) -> Iterator[_Tuple[Path, Term]]:
    """Pre-order walk yielding every position and the subterm found there."""
    yield path, t
    for label, child in children(t):
        yield from subterms(child, path + (label,))


def size(t: Term) -> int:
    return 1 + sum(size(c) for _, c in children(t))


def free_vars(t: Term) -> FrozenSet[str]:
    if isinstance(t, Var):
        return frozenset((t.name,))
    out = set()
    for label, child in children(t):
        fv = free_vars(child)
        bound = binder_of(t, label)
        if bound is not None:
            fv = fv - {bound}
        out |= fv
    return frozenset(out)


def all_vars(t: Term) -> FrozenSet[str]:
    """Every variable name in ``t``, free or bound."""
    out = set()
    for _, sub in subterms(t):
        if isinstance(sub, Var):
            out.add(sub.name)
        binders = _BINDERS.get(type(sub), {})
        for field_name in binders.values():
            out.add(getattr(sub, field_name))
    return frozenset(out)


def fresh_var(base: str, avoid: Iterable[str]) -> str:
    """First of ``base, base_1, base_2, ...`` not in ``avoid``."""
    avoid = set(avoid)
    if base not in avoid:
        return base
    i = 1
    while f"{base}_{i}" in avoid:
        i += 1
    return f"{base}_{i}"


def substitute(t: Term, x: str, s: Term) -> Term:
    """Capture-avoiding ``t[s/x]``."""
    return _subst(t, x, s, free_vars(s))


def rename(t: Term, old: str, new: str) -> Term:
    return _subst(t, old, Var(new), frozenset((new,)))


def _subst(t: Term, x: str, s: Term, s_fv: FrozenSet[str]) -> Term:
    if isinstance(t, Var):
        return s if t.name == x else t
    if x not in free_vars(t):
        return t
    if isinstance(t, Tuple):
        return Tuple(tuple(_subst(item, x, s, s_fv) for item in t.items))
    binders = _BINDERS.get(type(t), {})
    updates = {}
    for label in _CHILDREN[type(t)]:
        child = getattr(t, label)
        binder_field = binders.get(label)
        if binder_field is None:
            updates[label] = _subst(child, x, s, s_fv)
            continue
        v = getattr(t, binder_field)
        if v == x:
            continue
        if v in s_fv and x in free_vars(child):
            new_v = fresh_var(v, s_fv | free_vars(child) | {x})
            child = rename(child, v, new_v)
            updates[binder_field] = new_v
        updates[label] = _subst(child, x, s, s_fv)
    return replace(t, **updates)


def substitute_many(t: Term, mapping: Mapping[str, Term]) -> Term:
    """Sequential substitution; callers keep replacement free variables disjoint from the keys."""
    for name, s in mapping.items():
        t = substitute(t, name, s)
    return t


def alpha_eq(t1: Term, t2: Term) -> bool:
    return _alpha(t1, t2, {}, {}, 0)


def _alpha(a: Term, b: Term, env_a: dict, env_b: dict, depth: int) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, Var):
        ia, ib = env_a.get(a.name), env_b.get(b.name)
        if ia is None and ib is None:
            return a.name == b.name
        return ia == ib
    if isinstance(a, Tuple):
        return len(a.items) == len(b.items) and all(
            _alpha(x, y, env_a, env_b, depth) for x, y in zip(a.items, b.items)
        )
    binders = _BINDERS.get(type(a), {})
    child_fields = _CHILDREN[type(a)]
    binder_fields = set(binders.values())
    for f in fields(a):
        if f.name in child_fields or f.name in binder_fields:
            continue
        if getattr(a, f.name) != getattr(b, f.name):
            return False
    for label in child_fields:
        ca, cb = getattr(a, label), getattr(b, label)
        binder_field = binders.get(label)
        if binder_field is None:
            ok = _alpha(ca, cb, env_a, env_b, depth)
        else:
            ok = _alpha(
                ca,
                cb,
                {**env_a, getattr(a, binder_field): depth},
                {**env_b, getattr(b, binder_field): depth},
                depth + 1,
            )
        if not ok:
            return False
    return True


@dataclass(frozen=True)
class TypingContext:
    """Ordered variable bindings; lookups see the rightmost binding."""

    bindings: _Tuple[_Tuple[str, Type], ...] = ()

    @classmethod
    def of(cls, mapping: Optional[Mapping[str, Type]] = None, **kwargs: Type) -> "TypingContext":
        items = dict(mapping or {})
        items.update(kwargs)
        return cls(tuple(items.items()))

    def extend(self, name: str, ty: Type) -> "TypingContext":
        return TypingContext(self.bindings + ((name, ty),))

    def lookup(self, name: str) -> Optional[Type]:
        for bound, ty in reversed(self.bindings):
            if bound == name:
                return ty
        return None

    def names(self) -> FrozenSet[str]:
        return frozenset(name for name, _ in self.bindings)

    def as_dict(self) -> Dict[str, Type]:
        return {name: ty for name, ty in self.bindings}

    def __contains__(self, name: str) -> bool:
        return self.lookup(name) is not None

    def __len__(self) -> int:
        return len(self.bindings)


EMPTY_CONTEXT = TypingContext()


def close_context(t: Term, ctx: Optional[TypingContext] = None, default: Type = R) -> TypingContext:
    """Extend ``ctx`` so every free variable of ``t`` is bound, missing ones at ``default``."""
    ctx = ctx or EMPTY_CONTEXT
    for name in sorted(free_vars(t)):
        if name not in ctx:
            ctx = ctx.extend(name, default)
    return ctx


def sum_annotation(t: Term) -> Optional[SumType]:
    if isinstance(t, (Inl, Inr)) and isinstance(t.annot, SumType):
        return t.annot
    return None
