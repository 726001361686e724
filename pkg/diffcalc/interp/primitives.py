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

from dataclasses import dataclass, field
from types import MappingProxyType
from collections.abc import Mapping
from typing import Callable, Iterator, Optional, Tuple

import numpy as np

from ..base.errors import DiffcalcError
from ..base.types import R, Type, arrow
from .realexpr import Cos, Exp, Neg, RealExpr, Sin, Var, replace_vars


class UnsupportedPrimitive(DiffcalcError):
    """A primitive has no signature, or lacks the rule an operation needs."""


def placeholder(i: int) -> Var:
    """Template variable standing for the i-th argument of a primitive."""
    return Var(f"_{i}")


@dataclass(frozen=True)
class PrimitiveSignature:
    """
    A primitive function over the base type.

    Attributes:
        name: Constant name used in terms.
        arity: Number of base arguments (curried in the term language).
        derivatives: One partial derivative template per argument, written
            over the placeholders ``_0, _1, ...``.
        antiderivative: Optional template over ``_0`` for unary primitives.
        evaluator: Optional numpy-compatible callable used for numeric evaluation.
    """

    name: str
    arity: int
    derivatives: Tuple[RealExpr, ...]
    antiderivative: Optional[RealExpr] = None
    evaluator: Optional[Callable] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "derivatives", tuple(self.derivatives))
        if self.arity < 1:
            raise ValueError(f"primitive {self.name} needs a positive arity")
        if len(self.derivatives) != self.arity:
            raise ValueError(
                f"primitive {self.name} declares {self.arity} arguments but {len(self.derivatives)} derivative rules"
            )
        if self.antiderivative is not None and self.arity != 1:
            raise ValueError(f"antiderivative only supported for unary primitives, not {self.name}")

    @property
    def type(self) -> Type:
        return arrow(*([R] * (self.arity + 1)))

    def derivative(self, i: int, args: Tuple[RealExpr, ...]) -> RealExpr:
        return self._instantiate(self.derivatives[i], args)

    def integral(self, arg: RealExpr) -> RealExpr:
        if self.antiderivative is None:
            raise UnsupportedPrimitive(f"primitive {self.name} has no antiderivative rule")
        return self._instantiate(self.antiderivative, (arg,))

    def _instantiate(self, template: RealExpr, args: Tuple[RealExpr, ...]) -> RealExpr:
        return replace_vars(template, {placeholder(i).name: a for i, a in enumerate(args)})


class PrimitiveTable(Mapping):
    """Immutable name -> signature table; ``register`` returns an extended copy."""

    def __init__(self, signatures=()):
        self._signatures = MappingProxyType({s.name: s for s in signatures})

    def __getitem__(self, name: str) -> PrimitiveSignature:
        return self._signatures[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._signatures)

    def __len__(self) -> int:
        return len(self._signatures)

    def register(self, signature: PrimitiveSignature) -> "PrimitiveTable":
        return PrimitiveTable([*self._signatures.values(), signature])

    def require(self, name: str) -> PrimitiveSignature:
        try:
            return self._signatures[name]
        except KeyError:
            raise UnsupportedPrimitive(f"no signature for primitive {name!r}") from None


_x = placeholder(0)

DEFAULT_PRIMITIVES = PrimitiveTable(
    [
        PrimitiveSignature("sin", 1, (Cos(_x),), Neg(Cos(_x)), np.sin),
        PrimitiveSignature("cos", 1, (Neg(Sin(_x)),), Sin(_x), np.cos),
        PrimitiveSignature("exp", 1, (Exp(_x),), Exp(_x), np.exp),
    ]
)

# Primitives that have a dedicated RealExpr node.
BUILTIN_NODES = {"sin": Sin, "cos": Cos, "exp": Exp}
