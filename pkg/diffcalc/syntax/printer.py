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

from dataclasses import dataclass

from ..base import terms as tm
from ..base.types import Arrow, Base, Product, Sum, Type

# Binding strength, loosest first.
LAM, ADD, MUL, APP, ATOM = range(5)


@dataclass(frozen=True)
class Notation:
    lam: str
    add: str
    sub: str
    arrow: str
    proj: str
    der: str
    int: str
    delta: str


ASCII = Notation("\\", "(+)", "(-)", "->", "pi", "D", "Int", "Delta")
UNICODE = Notation("λ", "⊕", "⊖", "→", "π", "∂", "∫", "Δ")


def show_type(t: Type, unicode: bool = False) -> str:
    n = UNICODE if unicode else ASCII
    return _type(t, n)


def _type(t: Type, n: Notation) -> str:
    if isinstance(t, Base):
        return t.name
    if isinstance(t, Product):
        return "(" + ",".join(_type(c, n) for c in t.components) + ")"
    if isinstance(t, Arrow):
        dom = _type(t.domain, n)
        if isinstance(t.domain, Arrow):
            dom = f"({dom})"
        return f"{dom}{n.arrow}{_type(t.codomain, n)}"
    if isinstance(t, Sum):
        left, right = _type(t.left, n), _type(t.right, n)
        if isinstance(t.left, Arrow):
            left = f"({left})"
        if isinstance(t.right, (Arrow, Sum)):
            right = f"({right})"
        return f"{left}+{right}"
    raise TypeError(f"not a type: {t!r}")


def precedence(t: tm.Term) -> int:
    if isinstance(t, (tm.Lam, tm.Case)):
        return LAM
    if isinstance(t, (tm.Add, tm.Sub)):
        return ADD
    if isinstance(t, tm.Mul):
        return MUL
    if isinstance(t, (tm.App, tm.Proj, tm.Fix, tm.Inl, tm.Inr)):
        return APP
    return ATOM


def show_term(t: tm.Term, unicode: bool = False) -> str:
    """Surface syntax that the parser reads back to the same tree."""
    return _term(t, UNICODE if unicode else ASCII)


def _at(t: tm.Term, level: int, n: Notation) -> str:
    text = _term(t, n)
    return f"({text})" if precedence(t) < level else text


def _term(t: tm.Term, n: Notation) -> str:
    if isinstance(t, tm.Const):
        return t.name
    if isinstance(t, tm.Var):
        return t.name
    if isinstance(t, tm.Lam):
        return f"{n.lam}{t.var}:{_type(t.annot, n)}. {_term(t.body, n)}"
    if isinstance(t, tm.App):
        return f"{_at(t.fun, APP, n)} {_at(t.arg, ATOM, n)}"
    if isinstance(t, tm.Tuple):
        return "(" + ", ".join(_term(i, n) for i in t.items) + ")"
    if isinstance(t, tm.Proj):
        return f"{n.proj}{t.index} {_at(t.tuple, ATOM, n)}"
    if isinstance(t, (tm.Add, tm.Sub, tm.Mul)):
        op = {tm.Add: n.add, tm.Sub: n.sub, tm.Mul: "*"}[type(t)]
        level = precedence(t)
        return f"{_at(t.l, level, n)} {op} {_at(t.r, level + 1, n)}"
    if isinstance(t, tm.Der):
        return f"{n.der}{{{_term(t.body, n)} ; {t.var} @ {_term(t.at, n)}}}"
    if isinstance(t, tm.Int):
        return f"{n.int}{{{_term(t.body, n)} d{t.var} ; {_term(t.lo, n)} .. {_term(t.hi, n)}}}"
    if isinstance(t, tm.DDer):
        return (
            f"{n.delta}{{{_term(t.body, n)} ; {t.var} @ {_term(t.at, n)} , {_term(t.delta, n)}}}"
        )
    if isinstance(t, (tm.Inl, tm.Inr)):
        kw = "inl" if isinstance(t, tm.Inl) else "inr"
        text = f"{kw} {_at(t.term, ATOM, n)}"
        if t.annot is not None:
            text += f" as {_type(t.annot, n)}"
        return text
    if isinstance(t, tm.Case):
        lbranch = _at(t.lbranch, ADD, n)
        return (
            f"case {_term(t.scrutinee, n)} of inl {t.lvar} => {lbranch} "
            f"| inr {t.rvar} => {_term(t.rbranch, n)}"
        )
    if isinstance(t, tm.Fix):
        return f"fix {_at(t.term, ATOM, n)}"
    raise TypeError(f"not a term: {t!r}")


def excerpt(t: tm.Term, limit: int = 60) -> str:
    text = show_term(t)
    return text if len(text) <= limit else text[: limit - 3] + "..."
