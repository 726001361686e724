import re
from dataclasses import dataclass
from typing import List

from ..base.errors import DiffcalcError


class ParseError(DiffcalcError):
    def __init__(self, message: str, pos: int = -1, text: str = ""):
        self.pos = pos
        self.text = text
        where = f" at {pos}" if pos >= 0 else ""
        super().__init__(f"parse error{where}: {message}")


@dataclass(frozen=True)
class Token:
    kind: str
    value: str
    pos: int


# Longest forms first.
_TOKEN_KINDS = [
    ("WS", r"\s+"),
    ("OPLUS", r"\(\+\)|⊕"),
    ("OMINUS", r"\(-\)|⊖"),
    ("ARROW", r"->|→"),
    ("FATARROW", r"=>"),
    ("DOTDOT", r"\.\."),
    ("NUM", r"-?\d+(?:\.\d+|/\d+)?"),
    ("PROJ", r"(?:pi|π)\d+"),
    ("LAMBDA", r"\\|λ"),
    ("IDENT", r"[A-Za-z_][A-Za-z0-9_']*|∂|∫|Δ"),
    ("PUNCT", r"[(),:.;@{}|*+]"),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{name}>{pattern})" for name, pattern in _TOKEN_KINDS))

KEYWORDS = {"case", "of", "inl", "inr", "as", "fix"}

# Unicode spellings of the bracketed binders.
BINDER_ALIASES = {"∂": "D", "∫": "Int", "Δ": "Delta"}


def tokenize(text: str) -> List[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        value = m.group(kind)
        if kind == "IDENT" and value in BINDER_ALIASES:
            value = BINDER_ALIASES[value]
        elif kind == "PROJ":
            value = value.lstrip("piπ")
        if kind != "WS":
            tokens.append(Token(kind, value, pos))
        pos = m.end()
    tokens.append(Token("EOF", "", len(text)))
    return tokens
