"""Demo programs, resolvable by name in any term position."""

from types import MappingProxyType
from typing import Dict, Mapping

from .base import terms as tm
from .syntax.parser import parse_term

# Later entries may refer to earlier ones.
SOURCES = (
    ("f", r"\x:(R,R). (pi1 x (+) pi2 x, pi1 x * pi2 x, pi2 x)"),
    ("g", r"\x:(R,R). (pi1 x (+) pi2 x, pi2 x)"),
    ("sqr", r"\a:R. a * a"),
    ("magSqr", r"\x:(R,R). sqr (pi1 x) (+) sqr (pi2 x)"),
    ("average", r"\x:(R,R). (pi1 x (+) pi2 x) * 1/2"),
    ("average4", r"\x:(R,R,R,R). (pi1 x (+) pi2 x (+) pi3 x (+) pi4 x) * 1/4"),
    ("polar2cartesian", r"\x:(R,R). (pi1 x * cos (pi2 x), pi1 x * sin (pi2 x))"),
    ("taylorf", r"\x:(R,R). (2 * pi1 x * pi2 x, 3 * pi1 x * pi1 x (+) pi2 x)"),
    ("jacobianf", r"\z:(R,R). (pi1 z * pi1 z, pi1 z * pi2 z (+) pi2 z)"),
)


def _load() -> Dict[str, tm.Term]:
    programs: Dict[str, tm.Term] = {}
    for name, source in SOURCES:
        programs[name] = parse_term(source, builtins=programs)
    return programs


PROGRAMS: Mapping[str, tm.Term] = MappingProxyType(_load())


def program(name: str) -> tm.Term:
    try:
        return PROGRAMS[name]
    except KeyError:
        raise KeyError(f"no built-in program named {name!r}; known: {', '.join(PROGRAMS)}") from None
