from . import lexer
from . import printer
from . import parser
from . import sexpr
