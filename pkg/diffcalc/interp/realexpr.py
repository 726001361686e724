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
Symbolic real expressions.

Canonical form goes through sympy: an expression is expanded into a sum of
monomials over *atoms* (variables, sin/cos/exp of canonical arguments and
opaque primitives) with exact rational coefficients, then read back:

- monomials are ordered by total degree, then by the s-expression keys of
  their atoms, so the constant term comes first;
- a monomial renders as its atom (coefficient 1) or as a ``Prod`` that starts
  with its ``Rat`` coefficient;
- ``sin 0``, ``cos 0`` and ``exp 0`` fold to rationals, and the exponentials
  of one monomial merge into a single ``exp``.
"""

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Dict, FrozenSet, List, Mapping, Optional, Tuple

import sympy as sp
from sympy.core.function import AppliedUndef

from ..base.errors import DiffcalcError


class RealExprParseError(DiffcalcError):
    pass


class RealExpr:
    __slots__ = ()

    def __str__(self) -> str:
        return show_expr(self)


@dataclass(frozen=True)
class Rat(RealExpr):
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True)
class Var(RealExpr):
    name: str


@dataclass(frozen=True)
class Sum(RealExpr):
    terms: Tuple[RealExpr, ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if len(self.terms) < 2:
            raise ValueError("Sum needs at least 2 terms")


@dataclass(frozen=True)
class Neg(RealExpr):
    expr: RealExpr


@dataclass(frozen=True)
class Prod(RealExpr):
    factors: Tuple[RealExpr, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if len(self.factors) < 2:
            raise ValueError("Prod needs at least 2 factors")


@dataclass(frozen=True)
class Pow(RealExpr):
    base: RealExpr
    exp: int

    def __post_init__(self):
        if self.exp < 1:
            raise ValueError(f"Pow exponent must be positive, got {self.exp}")


@dataclass(frozen=True)
class Sin(RealExpr):
    arg: RealExpr


@dataclass(frozen=True)
class Cos(RealExpr):
    arg: RealExpr


@dataclass(frozen=True)
class Exp(RealExpr):
    arg: RealExpr


@dataclass(frozen=True)
class Prim(RealExpr):
    name: str
    args: Tuple[RealExpr, ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


ZERO = Rat(Fraction(0))
ONE = Rat(Fraction(1))

_UNARY = {Sin: "sin", Cos: "cos", Exp: "exp"}
_UNARY_BY_NAME = {name: cls for cls, name in _UNARY.items()}


def add(*es: RealExpr) -> RealExpr:
    if not es:
        return ZERO
    return es[0] if len(es) == 1 else Sum(es)


def mul(*es: RealExpr) -> RealExpr:
    if not es:
        return ONE
    return es[0] if len(es) == 1 else Prod(es)


def sub(a: RealExpr, b: RealExpr) -> RealExpr:
    return Sum((a, Neg(b)))


def expr_children(e: RealExpr) -> Tuple[RealExpr, ...]:
    if isinstance(e, Sum):
        return e.terms
    if isinstance(e, Prod):
        return e.factors
    if isinstance(e, (Neg,)):
        return (e.expr,)
    if isinstance(e, Pow):
        return (e.base,)
    if isinstance(e, (Sin, Cos, Exp)):
        return (e.arg,)
    if isinstance(e, Prim):
        return e.args
    return ()


def expr_vars(e: RealExpr) -> FrozenSet[str]:
    if isinstance(e, Var):
        return frozenset((e.name,))
    out = frozenset()
    for c in expr_children(e):
        out |= expr_vars(c)
    return out


def contains_prim(e: RealExpr) -> bool:
    if isinstance(e, Prim):
        return True
    return any(contains_prim(c) for c in expr_children(e))


def replace_vars(e: RealExpr, mapping: Mapping[str, RealExpr]) -> RealExpr:
    """Simultaneous structural replacement of variables, no canonicalisation."""
    if isinstance(e, Var):
        return mapping.get(e.name, e)
    if isinstance(e, Rat):
        return e
    if isinstance(e, Sum):
        return Sum(tuple(replace_vars(t, mapping) for t in e.terms))
    if isinstance(e, Prod):
        return Prod(tuple(replace_vars(t, mapping) for t in e.factors))
    if isinstance(e, Neg):
        return Neg(replace_vars(e.expr, mapping))
    if isinstance(e, Pow):
        return Pow(replace_vars(e.base, mapping), e.exp)
    if isinstance(e, (Sin, Cos, Exp)):
        return type(e)(replace_vars(e.arg, mapping))
    if isinstance(e, Prim):
        return Prim(e.name, tuple(replace_vars(a, mapping) for a in e.args))
    raise TypeError(f"not a RealExpr: {e!r}")


# ---- s-expressions ---------------------------------------------------------


def expr_to_sexpr(e: RealExpr) -> str:
    if isinstance(e, Rat):
        return f"(rat {e.value})"
    if isinstance(e, Var):
        return f"(var {e.name})"
    if isinstance(e, Sum):
        return "(sum " + " ".join(expr_to_sexpr(t) for t in e.terms) + ")"
    if isinstance(e, Prod):
        return "(prod " + " ".join(expr_to_sexpr(t) for t in e.factors) + ")"
    if isinstance(e, Neg):
        return f"(neg {expr_to_sexpr(e.expr)})"
    if isinstance(e, Pow):
        return f"(pow {expr_to_sexpr(e.base)} {e.exp})"
    if isinstance(e, (Sin, Cos, Exp)):
        return f"({_UNARY[type(e)]} {expr_to_sexpr(e.arg)})"
    if isinstance(e, Prim):
        args = "".join(" " + expr_to_sexpr(a) for a in e.args)
        return f"(prim {e.name}{args})"
    raise TypeError(f"not a RealExpr: {e!r}")


@lru_cache(maxsize=65536)
def atom_key(e: RealExpr) -> str:
    return expr_to_sexpr(e)


# ---- sympy bridge ----------------------------------------------------------

Monomial = Tuple[Tuple[RealExpr, int], ...]

_TO_SYMPY = {Sin: sp.sin, Cos: sp.cos, Exp: sp.exp}
_FROM_SYMPY = {sp.sin: Sin, sp.cos: Cos, sp.exp: Exp}

# Marks sympy function classes that stand for registered primitives.
PRIMITIVE_MARK = "_diffcalc_primitive"


class Unrepresentable(DiffcalcError):
    """A sympy expression has no RealExpr counterpart."""


def to_sympy(e: RealExpr, functions: Optional[Callable[[str], Any]] = None) -> sp.Expr:
    """
    The sympy expression of ``e``.

    ``functions`` maps a primitive name to the sympy function class applied
    for it; by default every primitive is an undefined function.
    """
    if isinstance(e, Rat):
        return sp.Rational(e.value.numerator, e.value.denominator)
    if isinstance(e, Var):
        return sp.Symbol(e.name)
    if isinstance(e, Sum):
        return sp.Add(*(to_sympy(t, functions) for t in e.terms))
    if isinstance(e, Neg):
        return -to_sympy(e.expr, functions)
    if isinstance(e, Prod):
        return sp.Mul(*(to_sympy(f, functions) for f in e.factors))
    if isinstance(e, Pow):
        return sp.Pow(to_sympy(e.base, functions), e.exp)
    if isinstance(e, (Sin, Cos, Exp)):
        return _TO_SYMPY[type(e)](to_sympy(e.arg, functions))
    if isinstance(e, Prim):
        head = functions(e.name) if functions is not None else sp.Function(e.name)
        return head(*(to_sympy(a, functions) for a in e.args))
    raise TypeError(f"not a RealExpr: {e!r}")


def sympy_normal(expr: sp.Expr) -> sp.Expr:
    """Expanded sum of monomials, exponentials of one monomial merged."""
    expanded = sp.expand(expr, deep=True, power_exp=False, power_base=False, log=False)
    return sp.powsimp(expanded, deep=True, combine="exp")


def _atom(base: sp.Expr) -> RealExpr:
    if base.is_Symbol:
        return Var(base.name)
    if base == sp.E:
        return Exp(ONE)
    node = _FROM_SYMPY.get(base.func)
    if node is not None:
        return node(_assemble(base.args[0]))
    if isinstance(base, AppliedUndef) or getattr(base.func, PRIMITIVE_MARK, False):
        return Prim(base.func.__name__, tuple(_assemble(a) for a in base.args))
    raise Unrepresentable(f"{base} is not a real expression atom")


def _sorted_monomial(powers: Mapping[RealExpr, int]) -> Monomial:
    return tuple(sorted(((a, k) for a, k in powers.items() if k), key=lambda p: atom_key(p[0])))


def _monomial_order(m: Monomial):
    return (sum(k for _, k in m), tuple((atom_key(a), k) for a, k in m))


def _assemble(expr: sp.Expr) -> RealExpr:
    poly: Dict[Monomial, Fraction] = {}
    for term in sp.Add.make_args(expr):
        coeff, rest = term.as_coeff_Mul()
        if not coeff.is_Rational:
            raise Unrepresentable(f"coefficient {coeff} is not rational")
        powers: Dict[RealExpr, int] = {}
        for factor in sp.Mul.make_args(rest):
            if factor == sp.S.One:
                continue
            base, k = factor.args if isinstance(factor, sp.Pow) else (factor, sp.S.One)
            if not (k.is_Integer and k > 0):
                raise Unrepresentable(f"{factor} is not a positive integer power")
            atom = _atom(base)
            powers[atom] = powers.get(atom, 0) + int(k)
        mono = _sorted_monomial(powers)
        value = poly.get(mono, Fraction(0)) + Fraction(int(coeff.p), int(coeff.q))
        if value == 0:
            poly.pop(mono, None)
        else:
            poly[mono] = value
    return _from_monomials(poly)


def _from_monomials(poly: Mapping[Monomial, Fraction]) -> RealExpr:
    terms: List[RealExpr] = []
    for m, c in sorted(poly.items(), key=lambda mc: _monomial_order(mc[0])):
        factors = [a if k == 1 else Pow(a, k) for a, k in m]
        if not factors:
            terms.append(Rat(c))
        elif c == 1:
            terms.append(mul(*factors))
        else:
            terms.append(Prod((Rat(c), *factors)))
    return add(*terms)


def from_sympy(expr: sp.Expr) -> RealExpr:
    """Canonical RealExpr of a sympy expression; raises Unrepresentable."""
    return _assemble(sympy_normal(sp.sympify(expr)))


@lru_cache(maxsize=65536)
def canonical(e: RealExpr) -> RealExpr:
    return from_sympy(to_sympy(e))


def is_canonical(e: RealExpr) -> bool:
    return canonical(e) == e


def subst(e: RealExpr, x: str, value: RealExpr) -> RealExpr:
    """``e[value/x]`` in canonical form."""
    return canonical(replace_vars(e, {x: value}))


def subst_many(e: RealExpr, mapping: Mapping[str, RealExpr]) -> RealExpr:
    return canonical(replace_vars(e, mapping))


# ---- infix text ------------------------------------------------------------


def _is_pow_base_atom(e: RealExpr) -> bool:
    if isinstance(e, Rat):
        return e.value.denominator == 1 and e.value >= 0
    return isinstance(e, (Var, Sin, Cos, Exp, Prim))


def show_expr(e: RealExpr) -> str:
    """Infix rendering that parses back to the same tree."""
    if isinstance(e, Rat):
        return str(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Sum):
        return " + ".join(
            f"({show_expr(t)})" if isinstance(t, Sum) else show_expr(t) for t in e.terms
        )
    if isinstance(e, Prod):
        return " * ".join(
            f"({show_expr(f)})" if isinstance(f, (Sum, Prod)) else show_expr(f)
            for f in e.factors
        )
    if isinstance(e, Neg):
        return f"-({show_expr(e.expr)})"
    if isinstance(e, Pow):
        base = show_expr(e.base)
        if not _is_pow_base_atom(e.base):
            base = f"({base})"
        return f"{base}^{e.exp}"
    if isinstance(e, (Sin, Cos, Exp)):
        return f"{_UNARY[type(e)]}({show_expr(e.arg)})"
    if isinstance(e, Prim):
        return f"{e.name}(" + ", ".join(show_expr(a) for a in e.args) + ")"
    raise TypeError(f"not a RealExpr: {e!r}")


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>-?\d+(?:/\d+)?)|(?P<neg>-\()|(?P<id>[A-Za-z_][A-Za-z0-9_']*)|(?P<op>[+*^(),]))"
)


def _tokenize(text: str) -> List[Tuple[str, str]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            raise RealExprParseError(f"unexpected character {text[pos]!r} at {pos}")
        kind = m.lastgroup
        tokens.append((kind, m.group(kind)))
        pos = m.end()
    return tokens


class _InfixParser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self, value=None):
        tok = self.peek()
        if tok[0] is None or (value is not None and tok[1] != value):
            raise RealExprParseError(f"expected {value or 'token'}, found {tok[1]!r}")
        self.pos += 1
        return tok

    def expr(self) -> RealExpr:
        terms = [self.term()]
        while self.peek() == ("op", "+"):
            self.take("+")
            terms.append(self.term())
        return add(*terms)

    def term(self) -> RealExpr:
        factors = [self.power()]
        while self.peek() == ("op", "*"):
            self.take("*")
            factors.append(self.power())
        return mul(*factors)

    def power(self) -> RealExpr:
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take("^")
            kind, value = self.take()
            if kind != "num" or "/" in value or value.startswith("-"):
                raise RealExprParseError(f"bad exponent {value!r}")
            return Pow(base, int(value))
        return base

    def atom(self) -> RealExpr:
        kind, value = self.take()
        if kind == "num":
            return Rat(Fraction(value))
        if kind == "neg":
            inner = self.expr()
            self.take(")")
            return Neg(inner)
        if kind == "id":
            if self.peek() == ("op", "("):
                self.take("(")
                args = [self.expr()]
                while self.peek() == ("op", ","):
                    self.take(",")
                    args.append(self.expr())
                self.take(")")
                if value in _UNARY_BY_NAME and len(args) == 1:
                    return _UNARY_BY_NAME[value](args[0])
                return Prim(value, tuple(args))
            return Var(value)
        if (kind, value) == ("op", "("):
            inner = self.expr()
            self.take(")")
            return inner
        raise RealExprParseError(f"unexpected token {value!r}")


def parse_expr(text: str) -> RealExpr:
    parser = _InfixParser(text)
    e = parser.expr()
    if parser.pos != len(parser.tokens):
        raise RealExprParseError(f"trailing input at token {parser.peek()[1]!r}")
    return e
