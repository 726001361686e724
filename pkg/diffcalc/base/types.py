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
from typing import Tuple as _Tuple, Union


@dataclass(frozen=True)
class Base:
    """An opaque base type handled by the base interpreter (only ``R`` ships)."""

    name: str = "R"

    def __str__(self) -> str:
        return show_type(self)


@dataclass(frozen=True)
class Product:
    components: _Tuple["Type", ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if len(self.components) < 2:
            raise ValueError(
                f"product types need at least 2 components, got {len(self.components)}"
            )

    def __str__(self) -> str:
        return show_type(self)


@dataclass(frozen=True)
class Arrow:
    domain: "Type"
    codomain: "Type"

    def __str__(self) -> str:
        return show_type(self)


@dataclass(frozen=True)
class Sum:
    left: "Type"
    right: "Type"

    def __str__(self) -> str:
        return show_type(self)


Type = Union[Base, Product, Arrow, Sum]

R = Base("R")


def is_interpretable(t: Type) -> bool:
    """Base types closed under arrows."""
    if isinstance(t, Base):
        return True
    if isinstance(t, Arrow):
        return is_interpretable(t.domain) and is_interpretable(t.codomain)
    return False


def is_differentiable_point(t: Type) -> bool:
    """True when ``t`` contains no arrow or sum anywhere."""
    if isinstance(t, Base):
        return True
    if isinstance(t, Product):
        return all(is_differentiable_point(c) for c in t.components)
    return False


def arrow(*types: Type) -> Type:
    """Right-nested arrow: ``arrow(A, B, C) == A -> (B -> C)``."""
    if len(types) == 1:
        return types[0]
    return Arrow(types[0], arrow(*types[1:]))


def show_type(t: Type) -> str:
    """ASCII rendering: ``->`` is loosest and right-assoc, ``+`` binds tighter."""
    if isinstance(t, Base):
        return t.name
    if isinstance(t, Product):
        return "(" + ",".join(show_type(c) for c in t.components) + ")"
    if isinstance(t, Arrow):
        dom = show_type(t.domain)
        if isinstance(t.domain, Arrow):
            dom = f"({dom})"
        return f"{dom}->{show_type(t.codomain)}"
    if isinstance(t, Sum):
        left = show_type(t.left)
        right = show_type(t.right)
        if isinstance(t.left, Arrow):
            left = f"({left})"
        if isinstance(t.right, (Arrow, Sum)):
            right = f"({right})"
        return f"{left}+{right}"
    raise TypeError(f"not a type: {t!r}")
