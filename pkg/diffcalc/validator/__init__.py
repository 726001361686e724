from . import generate
from . import oracle
from .suites import SUITES, run_suites
