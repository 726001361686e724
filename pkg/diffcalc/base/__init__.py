from . import consts
from . import errors
from . import types
from . import terms
