import re
from typing import Union

_SIZE_RE = re.compile(r"^\s*(\d+)\s*([kKmMgG]?)[bB]?\s*$")
_UNITS = {"": 1, "k": 1024, "m": 1024**2, "g": 1024**3}


def parse_size(value: Union[int, str]) -> int:
    """
    Byte count from an int or a string such as ``"512"``, ``"16MB"`` or ``"2G"``.

    Raises:
        ValueError: the string is not a size.
    """
    if isinstance(value, int):
        if value < 0:
            raise ValueError(f"size must be non-negative, got {value}")
        return value
    m = _SIZE_RE.match(value)
    if m is None:
        raise ValueError(f"not a size: {value!r}")
    return int(m.group(1)) * _UNITS[m.group(2).lower()]
