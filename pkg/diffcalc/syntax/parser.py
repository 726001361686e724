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
Recursive-descent parser for the surface syntax (see docs/grammar.md).

Identifiers resolve in this order: enclosing binders, registered primitives,
named built-in programs (when supplied), then free variables.
"""

from fractions import Fraction
from typing import List, Mapping, Optional

from ..base import terms as tm
from ..base.types import Arrow, Base, Product, Sum, Type
from ..interp.primitives import DEFAULT_PRIMITIVES, PrimitiveTable
from .lexer import KEYWORDS, ParseError, Token, tokenize


class Parser:
    def __init__(
        self,
        text: str,
        prims: Optional[PrimitiveTable] = None,
        builtins: Optional[Mapping[str, tm.Term]] = None,
    ):
        self.text = text
        self.tokens: List[Token] = tokenize(text)
        self.pos = 0
        self.prims = prims if prims is not None else DEFAULT_PRIMITIVES
        self.builtins = builtins or {}
        self.scope: List[str] = []

    # ---- token helpers ----

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def at(self, kind: str, value: Optional[str] = None, offset: int = 0) -> bool:
        tok = self.peek(offset)
        return tok.kind == kind and (value is None or tok.value == value)

    def at_keyword(self, word: str) -> bool:
        return self.at("IDENT", word)

    def expect(self, kind: str, value: Optional[str] = None) -> Token:
        tok = self.peek()
        if not self.at(kind, value):
            wanted = value if value is not None else kind
            found = tok.value or tok.kind
            raise ParseError(f"expected {wanted!r}, found {found!r}", tok.pos, self.text)
        self.pos += 1
        return tok

    def ident(self) -> str:
        tok = self.expect("IDENT")
        if tok.value in KEYWORDS:
            raise ParseError(f"keyword {tok.value!r} used as a name", tok.pos, self.text)
        return tok.value

    def done(self):
        if not self.at("EOF"):
            tok = self.peek()
            raise ParseError(f"unexpected trailing {tok.value!r}", tok.pos, self.text)

    # ---- types ----

    def type_(self) -> Type:
        left = self.sum_type()
        if self.at("ARROW"):
            self.pos += 1
            return Arrow(left, self.type_())
        return left

    def sum_type(self) -> Type:
        t = self.atom_type()
        while self.at("PUNCT", "+"):
            self.pos += 1
            t = Sum(t, self.atom_type())
        return t

    def atom_type(self) -> Type:
        if self.at("PUNCT", "("):
            self.pos += 1
            items = [self.type_()]
            while self.at("PUNCT", ","):
                self.pos += 1
                items.append(self.type_())
            self.expect("PUNCT", ")")
            return items[0] if len(items) == 1 else Product(tuple(items))
        return Base(self.ident())

    # ---- terms ----

    def term(self) -> tm.Term:
        if self.at("LAMBDA"):
            return self.lam()
        if self.at_keyword("case"):
            return self.case()
        return self.add_expr()

    def bound(self, name: str, parse):
        self.scope.append(name)
        try:
            return parse()
        finally:
            self.scope.pop()

    def lam(self) -> tm.Term:
        self.expect("LAMBDA")
        var = self.ident()
        self.expect("PUNCT", ":")
        annot = self.type_()
        self.expect("PUNCT", ".")
        return tm.Lam(var, annot, self.bound(var, self.term))

    def case(self) -> tm.Term:
        self.expect("IDENT", "case")
        scrutinee = self.term()
        self.expect("IDENT", "of")
        self.expect("IDENT", "inl")
        lvar = self.ident()
        self.expect("FATARROW")
        lbranch = self.bound(lvar, self.term)
        self.expect("PUNCT", "|")
        self.expect("IDENT", "inr")
        rvar = self.ident()
        self.expect("FATARROW")
        rbranch = self.bound(rvar, self.term)
        return tm.Case(scrutinee, lvar, lbranch, rvar, rbranch)

    def add_expr(self) -> tm.Term:
        t = self.mul_expr()
        while self.at("OPLUS") or self.at("OMINUS"):
            op = self.peek().kind
            self.pos += 1
            right = self.mul_expr()
            t = tm.Add(t, right) if op == "OPLUS" else tm.Sub(t, right)
        return t

    def mul_expr(self) -> tm.Term:
        t = self.app_expr()
        while self.at("PUNCT", "*"):
            self.pos += 1
            t = tm.Mul(t, self.app_expr())
        return t

    def app_expr(self) -> tm.Term:
        t = self.prefix()
        while self.starts_atom():
            t = tm.App(t, self.atom())
        return t

    def prefix(self) -> tm.Term:
        if self.at("PROJ"):
            index = int(self.expect("PROJ").value)
            return tm.Proj(index, self.atom())
        if self.at_keyword("fix"):
            self.pos += 1
            return tm.Fix(self.atom())
        if self.at_keyword("inl") or self.at_keyword("inr"):
            ctor = tm.Inl if self.expect("IDENT").value == "inl" else tm.Inr
            payload = self.atom()
            annot = None
            if self.at_keyword("as"):
                self.pos += 1
                annot = self.type_()
            return ctor(payload, annot)
        return self.atom()

    def starts_atom(self) -> bool:
        tok = self.peek()
        if tok.kind == "NUM":
            return True
        if tok.kind == "PUNCT":
            return tok.value == "("
        if tok.kind == "IDENT":
            return tok.value not in KEYWORDS
        return False

    def atom(self) -> tm.Term:
        tok = self.peek()
        if tok.kind == "NUM":
            self.pos += 1
            return tm.num(Fraction(tok.value))
        if self.at("PUNCT", "("):
            self.pos += 1
            items = [self.term()]
            while self.at("PUNCT", ","):
                self.pos += 1
                items.append(self.term())
            self.expect("PUNCT", ")")
            return items[0] if len(items) == 1 else tm.Tuple(tuple(items))
        if tok.kind == "IDENT" and self.at("PUNCT", "{", offset=1):
            if tok.value == "D":
                return self.derivative()
            if tok.value == "Int":
                return self.integral()
            if tok.value == "Delta":
                return self.discrete()
        name = self.ident()
        return self.resolve(name)

    def resolve(self, name: str) -> tm.Term:
        if name in self.scope:
            return tm.Var(name)
        if name in self.prims:
            return tm.Const(name, self.prims[name].type)
        if name in self.builtins:
            return self.builtins[name]
        return tm.Var(name)

    def derivative(self) -> tm.Term:
        self.expect("IDENT", "D")
        self.expect("PUNCT", "{")
        mark = self.pos
        var = self._binder_after_semicolon(mark)
        body = self.bound(var, self.term)
        self.expect("PUNCT", ";")
        self.ident()
        self.expect("PUNCT", "@")
        at = self.term()
        self.expect("PUNCT", "}")
        return tm.Der(body, var, at)

    def discrete(self) -> tm.Term:
        self.expect("IDENT", "Delta")
        self.expect("PUNCT", "{")
        var = self._binder_after_semicolon(self.pos)
        body = self.bound(var, self.term)
        self.expect("PUNCT", ";")
        self.ident()
        self.expect("PUNCT", "@")
        at = self.term()
        self.expect("PUNCT", ",")
        delta = self.term()
        self.expect("PUNCT", "}")
        return tm.DDer(body, var, at, delta)

    def integral(self) -> tm.Term:
        self.expect("IDENT", "Int")
        self.expect("PUNCT", "{")
        semi = self._top_level_semicolon(self.pos)
        marker = self.tokens[semi - 1]
        if marker.kind != "IDENT" or len(marker.value) < 2 or not marker.value.startswith("d"):
            raise ParseError("integral body must end with d<var>", marker.pos, self.text)
        var = marker.value[1:]
        # Parse the body on the slice before the d<var> marker.
        body_parser = Parser.__new__(Parser)
        body_parser.text = self.text
        body_parser.tokens = self.tokens[self.pos : semi - 1] + [Token("EOF", "", marker.pos)]
        body_parser.pos = 0
        body_parser.prims = self.prims
        body_parser.builtins = self.builtins
        body_parser.scope = self.scope + [var]
        body = body_parser.term()
        body_parser.done()
        self.pos = semi + 1
        lo = self.term()
        self.expect("DOTDOT")
        hi = self.term()
        self.expect("PUNCT", "}")
        return tm.Int(lo, hi, body, var)

    def _top_level_semicolon(self, start: int) -> int:
        depth = 0
        for i in range(start, len(self.tokens)):
            tok = self.tokens[i]
            if tok.kind == "PUNCT" and tok.value in "({":
                depth += 1
            elif tok.kind == "PUNCT" and tok.value in ")}":
                if depth == 0:
                    break
                depth -= 1
            elif tok.kind == "PUNCT" and tok.value == ";" and depth == 0:
                return i
        raise ParseError("missing ';' in bracketed binder", self.tokens[start].pos, self.text)

    def _binder_after_semicolon(self, start: int) -> str:
        semi = self._top_level_semicolon(start)
        tok = self.tokens[semi + 1]
        if tok.kind != "IDENT" or tok.value in KEYWORDS:
            raise ParseError("expected a variable after ';'", tok.pos, self.text)
        return tok.value


def parse_term(
    text: str,
    prims: Optional[PrimitiveTable] = None,
    builtins: Optional[Mapping[str, tm.Term]] = None,
) -> tm.Term:
    parser = Parser(text, prims, builtins)
    t = parser.term()
    parser.done()
    return t


def parse_type(text: str) -> Type:
    parser = Parser(text)
    t = parser.type_()
    parser.done()
    return t
