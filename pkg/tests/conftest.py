import pytest

from diffcalc.base import consts
from diffcalc.calculus.equality import Comparator, EqConfig
from diffcalc.programs import PROGRAMS
from diffcalc.syntax.parser import parse_term


@pytest.fixture(autouse=True)
def _default_seed(monkeypatch):
    monkeypatch.delenv(consts.SEED_ENV_VAR, raising=False)


@pytest.fixture
def parse():
    """Parse surface syntax with the demo programs in scope."""

    def _parse(text: str, builtins: bool = True):
        return parse_term(text, builtins=PROGRAMS if builtins else None)

    return _parse


@pytest.fixture
def eq_config():
    return EqConfig(seed=consts.DEFAULT_SEED, trials=4, fuel=20_000)


@pytest.fixture
def comparator(eq_config):
    return Comparator(eq_config)


@pytest.fixture
def programs():
    return PROGRAMS
