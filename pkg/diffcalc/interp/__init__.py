from . import realexpr
from . import primitives
from . import symbolic
from . import embed
