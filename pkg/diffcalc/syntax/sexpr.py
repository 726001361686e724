"""Canonical S-expression forms for types, terms and real expressions."""

import re
from fractions import Fraction
from typing import List, Union

from ..base import terms as tm
from ..base.types import Arrow, Base, Product, Sum, Type
from ..interp import realexpr as rx
from .lexer import ParseError

SExpr = Union[str, List["SExpr"]]

_ATOM_RE = re.compile(r"\s*(\(|\)|[^\s()]+)")


def read(text: str) -> SExpr:
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _ATOM_RE.match(text, pos)
        if m is None:
            raise ParseError("bad s-expression", pos, text)
        tokens.append(m.group(1))
        pos = m.end()
    value, rest = _read(tokens, 0)
    if rest != len(tokens):
        raise ParseError("trailing input after s-expression", -1, text)
    return value


def _read(tokens: List[str], i: int):
    if i >= len(tokens):
        raise ParseError("unexpected end of s-expression")
    tok = tokens[i]
    if tok == ")":
        raise ParseError("unbalanced ')'")
    if tok != "(":
        return tok, i + 1
    items = []
    i += 1
    while i < len(tokens) and tokens[i] != ")":
        item, i = _read(tokens, i)
        items.append(item)
    if i >= len(tokens):
        raise ParseError("missing ')'")
    return items, i + 1


# ---- types ----


def type_to_sexpr(t: Type) -> str:
    if isinstance(t, Base):
        return t.name
    if isinstance(t, Product):
        return "(prod " + " ".join(type_to_sexpr(c) for c in t.components) + ")"
    if isinstance(t, Arrow):
        return f"(arrow {type_to_sexpr(t.domain)} {type_to_sexpr(t.codomain)})"
    if isinstance(t, Sum):
        return f"(sum {type_to_sexpr(t.left)} {type_to_sexpr(t.right)})"
    raise TypeError(f"not a type: {t!r}")


def _type(s: SExpr) -> Type:
    if isinstance(s, str):
        return Base(s)
    head, *args = s
    if head == "prod":
        return Product(tuple(_type(a) for a in args))
    if head == "arrow" and len(args) == 2:
        return Arrow(_type(args[0]), _type(args[1]))
    if head == "sum" and len(args) == 2:
        return Sum(_type(args[0]), _type(args[1]))
    raise ParseError(f"unknown type form {head!r}")


def type_from_sexpr(text: str) -> Type:
    return _type(read(text))


# ---- terms ----


def term_to_sexpr(t: tm.Term) -> str:
    s = term_to_sexpr
    if isinstance(t, tm.Const):
        return f"(const {t.name} {type_to_sexpr(t.type)})"
    if isinstance(t, tm.Var):
        return f"(var {t.name})"
    if isinstance(t, tm.Lam):
        return f"(lam {t.var} {type_to_sexpr(t.annot)} {s(t.body)})"
    if isinstance(t, tm.App):
        return f"(app {s(t.fun)} {s(t.arg)})"
    if isinstance(t, tm.Tuple):
        return "(tuple " + " ".join(s(i) for i in t.items) + ")"
    if isinstance(t, tm.Proj):
        return f"(proj {t.index} {s(t.tuple)})"
    if isinstance(t, (tm.Add, tm.Sub, tm.Mul)):
        op = {tm.Add: "add", tm.Sub: "sub", tm.Mul: "mul"}[type(t)]
        return f"({op} {s(t.l)} {s(t.r)})"
    if isinstance(t, tm.Der):
        return f"(der {s(t.body)} {t.var} {s(t.at)})"
    if isinstance(t, tm.Int):
        return f"(int {s(t.lo)} {s(t.hi)} {s(t.body)} {t.var})"
    if isinstance(t, (tm.Inl, tm.Inr)):
        kw = "inl" if isinstance(t, tm.Inl) else "inr"
        annot = "" if t.annot is None else " " + type_to_sexpr(t.annot)
        return f"({kw} {s(t.term)}{annot})"
    if isinstance(t, tm.Case):
        return f"(case {s(t.scrutinee)} {t.lvar} {s(t.lbranch)} {t.rvar} {s(t.rbranch)})"
    if isinstance(t, tm.Fix):
        return f"(fix {s(t.term)})"
    if isinstance(t, tm.DDer):
        return f"(dder {s(t.body)} {t.var} {s(t.at)} {s(t.delta)})"
    raise TypeError(f"not a term: {t!r}")


def _name(s: SExpr) -> str:
    if not isinstance(s, str):
        raise ParseError(f"expected a name, found {s!r}")
    return s


def _term(s: SExpr) -> tm.Term:
    if isinstance(s, str) or not s:
        raise ParseError(f"expected a term form, found {s!r}")
    head, *args = s
    n = len(args)
    if head == "const" and n == 2:
        return tm.Const(_name(args[0]), _type(args[1]))
    if head == "var" and n == 1:
        return tm.Var(_name(args[0]))
    if head == "lam" and n == 3:
        return tm.Lam(_name(args[0]), _type(args[1]), _term(args[2]))
    if head == "app" and n == 2:
        return tm.App(_term(args[0]), _term(args[1]))
    if head == "tuple":
        return tm.Tuple(tuple(_term(a) for a in args))
    if head == "proj" and n == 2:
        return tm.Proj(int(_name(args[0])), _term(args[1]))
    if head in ("add", "sub", "mul") and n == 2:
        ctor = {"add": tm.Add, "sub": tm.Sub, "mul": tm.Mul}[head]
        return ctor(_term(args[0]), _term(args[1]))
    if head == "der" and n == 3:
        return tm.Der(_term(args[0]), _name(args[1]), _term(args[2]))
    if head == "int" and n == 4:
        return tm.Int(_term(args[0]), _term(args[1]), _term(args[2]), _name(args[3]))
    if head in ("inl", "inr") and n in (1, 2):
        ctor = tm.Inl if head == "inl" else tm.Inr
        return ctor(_term(args[0]), _type(args[1]) if n == 2 else None)
    if head == "case" and n == 5:
        return tm.Case(_term(args[0]), _name(args[1]), _term(args[2]), _name(args[3]), _term(args[4]))
    if head == "fix" and n == 1:
        return tm.Fix(_term(args[0]))
    if head == "dder" and n == 4:
        return tm.DDer(_term(args[0]), _name(args[1]), _term(args[2]), _term(args[3]))
    raise ParseError(f"unknown term form {head!r} with {n} arguments")


def term_from_sexpr(text: str) -> tm.Term:
    try:
        return _term(read(text))
    except ValueError as e:
        raise ParseError(str(e)) from e


# ---- real expressions ----

expr_to_sexpr = rx.expr_to_sexpr

_UNARY = {"sin": rx.Sin, "cos": rx.Cos, "exp": rx.Exp}


def _expr(s: SExpr) -> rx.RealExpr:
    if isinstance(s, str) or not s:
        raise ParseError(f"expected an expression form, found {s!r}")
    head, *args = s
    if head == "rat" and len(args) == 1:
        return rx.Rat(Fraction(_name(args[0])))
    if head == "var" and len(args) == 1:
        return rx.Var(_name(args[0]))
    if head == "sum":
        return rx.Sum(tuple(_expr(a) for a in args))
    if head == "prod":
        return rx.Prod(tuple(_expr(a) for a in args))
    if head == "neg" and len(args) == 1:
        return rx.Neg(_expr(args[0]))
    if head == "pow" and len(args) == 2:
        return rx.Pow(_expr(args[0]), int(_name(args[1])))
    if head in _UNARY and len(args) == 1:
        return _UNARY[head](_expr(args[0]))
    if head == "prim" and args:
        return rx.Prim(_name(args[0]), tuple(_expr(a) for a in args[1:]))
    raise ParseError(f"unknown expression form {head!r}")


def expr_from_sexpr(text: str) -> rx.RealExpr:
    try:
        return _expr(read(text))
    except ValueError as e:
        raise ParseError(str(e)) from e
