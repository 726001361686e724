from . import typechecker
from . import reducer
from . import equality
from . import theorems
from . import discrete
