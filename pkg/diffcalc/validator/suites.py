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

"""
Property suites over seeded random instances.

Each suite scores every case as passed, failed or inconclusive and folds the
scores into a :class:`~diffcalc.protocol.SuiteSummary`. Failures are logged
with the offending instance; a summary is also written to the events log
when one is configured.
"""

import logging
import time
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Sequence

import numpy as np

from ..base import consts
from ..base import terms as tm
from ..base.errors import DiffcalcError
from ..base.types import Arrow, Base, Product, R
from ..calculus import theorems as th
from ..calculus.discrete import DiscreteReducer, check_derive, derive_fn
from ..calculus.equality import Comparator, EqConfig
from ..calculus.reducer import Fuel, FuelExhausted, PreservationViolation, Reducer, StuckTerm
from ..calculus.typechecker import typecheck
from ..interp.embed import embed
from ..protocol import SuiteSummary
from ..syntax.parser import parse_term, parse_type
from ..syntax.printer import excerpt, show_term, show_type
from ..syntax.sexpr import term_from_sexpr, term_to_sexpr
from ..utils.logging import EventLog
from . import oracle
from .generate import (
    POINT_TYPES,
    PolynomialGenerator,
    TermGenerator,
    leaves,
    split_products,
    symbols,
    width,
)

logger = logging.getLogger(__name__)

SUITES = ("metatheory", "theorems", "discrete", "roundtrip")

METATHEORY_PROPERTIES = (
    "preservation",
    "progress",
    "strong_normalization",
    "confluence",
    "interpretability",
    "open_preservation",
    "open_progress",
)

THEOREM_PROPERTIES = (
    "newton_leibniz",
    "chain_rule",
    "taylor",
    "derivative_additivity",
    "product_rule",
    "linearity",
    "distributivity",
    "telescoping",
)


class Tally:
    """Running score of one property."""

    def __init__(self, suite: str, seed: int):
        self.suite = suite
        self.seed = seed
        self.cases = 0
        self.failures = 0
        self.inconclusive = 0
        self.failed_cases: List[str] = []
        self.started = time.perf_counter()

    def record(self, verdict: Optional[bool], label: str, detail: str = "") -> None:
        """``True`` passes, ``False`` fails, ``None`` is inconclusive."""
        self.cases += 1
        if verdict is None:
            self.inconclusive += 1
            logger.debug(f"{self.suite}: inconclusive {label} {detail}")
        elif not verdict:
            self.failures += 1
            self.failed_cases.append(f"{label} {detail}".strip())
            logger.warning(f"{self.suite}: failed {label} {detail}")

    def run(self, label: str, case: Callable[[], Optional[bool]]) -> None:
        """Score ``case``; an unexpected error counts as a failure."""
        try:
            verdict = case()
        except FuelExhausted as e:
            self.record(None, label, str(e))
        except (DiffcalcError, ValueError) as e:
            self.record(False, label, f"{type(e).__name__}: {e}")
        else:
            self.record(verdict, label)

    def summary(self) -> SuiteSummary:
        return SuiteSummary(
            suite=self.suite,
            cases=self.cases,
            failures=self.failures,
            inconclusive=self.inconclusive,
            elapsed=round(time.perf_counter() - self.started, 3),
            seed=self.seed,
            failed_cases=self.failed_cases,
        )


# ---- metatheory ----


def metatheory(
    cases: int = consts.METATHEORY_CASES,
    seed: Optional[int] = None,
    fuel: int = consts.DEFAULT_FUEL,
) -> List[SuiteSummary]:
    """
    Preservation, progress, strong normalization, confluence and
    interpretability over random closed fix-free terms, then preservation
    and progress again over open terms whose free variables are of type
    R, (R,R) or R->R.

    Returns:
        List[SuiteSummary]: one summary per property.
    """
    seed = consts.default_seed() if seed is None else seed
    gen = TermGenerator(np.random.default_rng(seed))
    checking = Reducer(check_preservation=True)
    shuffled = Reducer(strategy="random", seed=seed)
    comparator = Comparator(EqConfig(fuel=fuel, seed=seed))
    tallies = {name: Tally(f"metatheory.{name}", seed) for name in METATHEORY_PROPERTIES}

    for i in range(cases):
        t, ty = gen.closed()
        label = f"#{i} {excerpt(t)}"
        final = None
        try:
            trace = checking.normalize(t, Fuel(fuel))
            final = trace.final
            replayed = trace.replay() == final
            typed = checking.type_of(tm.EMPTY_CONTEXT, final) == ty
            tallies["preservation"].record(replayed and typed, label)
            tallies["progress"].record(True, label)
            tallies["strong_normalization"].record(True, label)
        except PreservationViolation as e:
            tallies["preservation"].record(False, label, str(e))
        except StuckTerm as e:
            tallies["progress"].record(False, label, str(e))
        except FuelExhausted as e:
            tallies["strong_normalization"].record(False, label, str(e))

        if final is not None:
            tallies["confluence"].run(
                label,
                lambda: comparator.nf_eq(final, shuffled.normalize(t, Fuel(fuel)).final),
            )

        base_term, base_ty = gen.closed(gen.choice(POINT_TYPES))
        tallies["interpretability"].run(
            f"#{i} {excerpt(base_term)}",
            lambda: _interpretable(checking, base_term, base_ty, fuel),
        )

        open_term, open_ty, ctx = gen.open()
        _open_case(checking, open_term, open_ty, ctx, fuel, tallies, f"#{i} {excerpt(open_term)}")

    return [tally.summary() for tally in tallies.values()]


def _open_case(
    reducer: Reducer,
    t: tm.Term,
    ty,
    ctx: tm.TypingContext,
    fuel: int,
    tallies: Dict[str, Tally],
    label: str,
) -> None:
    # Pair variables are split into base components first; R and R->R stay free.
    flat, flat_ctx = split_products(t, ctx)
    try:
        trace = reducer.normalize(flat, Fuel(fuel), flat_ctx)
    except PreservationViolation as e:
        tallies["open_preservation"].record(False, label, str(e))
        return
    except StuckTerm as e:
        tallies["open_progress"].record(False, label, str(e))
        return
    except FuelExhausted as e:
        tallies["open_progress"].record(None, label, str(e))
        return
    typed = reducer.type_of(ctx, t) == ty and reducer.type_of(flat_ctx, trace.final) == ty
    tallies["open_preservation"].record(typed and trace.replay() == trace.final, label)
    tallies["open_progress"].record(reducer.is_normal_form(trace.final, flat_ctx), label)


def _interpretable(reducer: Reducer, t: tm.Term, ty, fuel: int) -> bool:
    final = reducer.normalize(t, Fuel(fuel)).final
    for leaf in oracle.flatten(final, ty):
        if not reducer.is_nb(leaf, tm.EMPTY_CONTEXT):
            return False
        embed(leaf)
    return True


# ---- theorems ----


def theorems(
    cases: int = consts.THEOREM_CASES,
    seed: Optional[int] = None,
    fuel: int = consts.DEFAULT_FUEL,
    trials: int = consts.DEFAULT_TRIALS,
    property_cases: Optional[Mapping[str, int]] = None,
) -> List[SuiteSummary]:
    """
    Newton-Leibniz, chain rule, Taylor exactness, the four derivative laws,
    distributivity and telescoping over random polynomial instances.

    ``property_cases`` maps a property such as ``theorems.chain_rule`` to its
    own case count; the rest run ``cases``.
    """
    seed = consts.default_seed() if seed is None else seed
    pg = PolynomialGenerator(np.random.default_rng(seed))
    cfg = EqConfig(fuel=fuel, trials=trials, seed=seed)
    checks: Dict[str, Callable[[], Optional[bool]]] = {
        "newton_leibniz": lambda: _newton_leibniz(pg, cfg),
        "chain_rule": lambda: _chain_rule(pg, cfg),
        "taylor": lambda: _taylor(pg, cfg),
        "derivative_additivity": lambda: _additivity(pg, cfg),
        "product_rule": lambda: _product_rule(pg, cfg),
        "linearity": lambda: _linearity(pg, cfg),
        "distributivity": lambda: _distributivity(pg, cfg),
        "telescoping": lambda: _telescoping(pg, cfg),
    }
    out = []
    for name, check in checks.items():
        tally = Tally(f"theorems.{name}", seed)
        for i in range((property_cases or {}).get(tally.suite, cases)):
            tally.run(f"#{i}", check)
        out.append(tally.summary())
    return out


def _verdict(check: th.TheoremCheck) -> Optional[bool]:
    if check.verdict == "inconclusive":
        return None
    if not check.holds:
        logger.info(f"{check.theorem} counterexample: {check.report().model_dump_json()}")
    return check.holds


def _free_symbols(n: int = 2) -> List[tm.Term]:
    return [tm.Var(name) for name in ("a", "b", "c")[:n]]


def _newton_leibniz(pg: PolynomialGenerator, cfg: EqConfig) -> Optional[bool]:
    point_ty, value_ty = pg.choice(POINT_TYPES), pg.choice(POINT_TYPES)
    t = pg.body(value_ty, leaves(point_ty, tm.Var("y")))
    lo, hi = pg.point(point_ty), pg.point(point_ty)
    check = th.check_newton_leibniz(t, "y", lo, hi, cfg)
    if not check.holds:
        return _verdict(check)
    # The integral side against quadrature of the interpreter's derivative.
    n, w = width(point_ty), width(value_ty)
    derivative = oracle.CompiledFunction(tm.Lam("p", point_ty, tm.Der(t, "y", tm.Var("p"))))
    expected = oracle.staircase_integral(
        lambda p: derivative(p).reshape(n, w).T, oracle.value_of(lo), oracle.value_of(hi)
    )
    return oracle.close(oracle.value_of(check.lhs), expected, consts.DISCRETE_AGREEMENT_TOL)


def _chain_rule(pg: PolynomialGenerator, cfg: EqConfig) -> Optional[bool]:
    a, b, c = (pg.choice(POINT_TYPES) for _ in range(3))
    g = pg.program(a, b)
    f = pg.program(b, c)
    at, direction = pg.point(a), pg.point(a)
    check = th.check_chain_rule(f, g, at, direction, cfg)
    if not check.holds:
        return _verdict(check)
    # Both sides against a finite-difference Jacobian of the composition.
    outer, inner = oracle.CompiledFunction(f), oracle.CompiledFunction(g)
    jac = oracle.jacobian(lambda p: outer(inner(p)), oracle.value_of(at))
    expected = jac @ oracle.value_of(direction)
    return oracle.close(oracle.value_of(check.lhs), expected, consts.FINITE_DIFF_TOL) and oracle.close(
        oracle.value_of(check.rhs), expected, consts.FINITE_DIFF_TOL
    )


def _taylor(pg: PolynomialGenerator, cfg: EqConfig) -> Optional[bool]:
    point_ty, value_ty = pg.choice(POINT_TYPES), pg.choice(POINT_TYPES)
    degree = pg.choice((1, 2))
    f = pg.program(point_ty, value_ty, degree)
    center = pg.point(point_ty)
    target = symbols(point_ty, "c")
    order = degree + pg.choice((0, 0, 1))
    return _verdict(th.check_taylor(f, center, target, order, cfg=cfg))


def _additivity(pg: PolynomialGenerator, cfg: EqConfig) -> Optional[bool]:
    point_ty, value_ty = pg.choice(POINT_TYPES), pg.choice(POINT_TYPES)
    atoms = leaves(point_ty, tm.Var("x"))
    t1, t2 = pg.body(value_ty, atoms), pg.body(value_ty, atoms)
    at = symbols(point_ty, "a") if pg.choice((True, False)) else pg.point(point_ty)
    return _verdict(th.check_derivative_additivity(t1, t2, "x", at, cfg))


def _product_rule(pg: PolynomialGenerator, cfg: EqConfig) -> Optional[bool]:
    value_ty = pg.choice(POINT_TYPES)
    x = tm.Var("x")
    t1 = pg.body(value_ty, [x, tm.Var("a")])
    t2 = pg.polynomial([x, tm.Var("b")])
    at = pg.choice((tm.Var("c"), pg.point(R)))
    return _verdict(th.check_product_rule(t1, t2, "x", at, cfg))


def _linearity(pg: PolynomialGenerator, cfg: EqConfig) -> Optional[bool]:
    t1 = pg.body(pg.choice(POINT_TYPES), _free_symbols())
    at = pg.choice((tm.Var("c"), pg.point(R)))
    return _verdict(th.check_linearity(t1, "x", at, cfg))


def _distributivity(pg: PolynomialGenerator, cfg: EqConfig) -> Optional[bool]:
    scalar_ty, value_ty = pg.choice(POINT_TYPES), pg.choice(POINT_TYPES)
    factor_ty = value_ty if isinstance(scalar_ty, Base) else Product((value_ty, value_ty))
    atoms = _free_symbols(3)
    t1 = pg.body(factor_ty, atoms)
    t2, t3 = pg.body(scalar_ty, atoms), pg.body(scalar_ty, atoms)
    return _verdict(th.check_distributivity(t1, t2, t3, cfg))


def _telescoping(pg: PolynomialGenerator, cfg: EqConfig) -> Optional[bool]:
    value_ty = pg.choice(POINT_TYPES)
    ts = [pg.body(value_ty, _free_symbols()) for _ in range(pg.choice((2, 3, 4)))]
    return _verdict(th.check_telescoping(ts, cfg))


# ---- discrete ----


def discrete(
    cases: int = consts.DISCRETE_CASES,
    seed: Optional[int] = None,
    fuel: int = consts.DEFAULT_FUEL,
    trials: int = consts.DEFAULT_TRIALS,
) -> List[SuiteSummary]:
    """The defining equation of ``derive_fn`` and its agreement with the analytical increment."""
    seed = consts.default_seed() if seed is None else seed
    pg = PolynomialGenerator(np.random.default_rng(seed))
    cfg = EqConfig(fuel=fuel, trials=trials, seed=seed)
    equation = Tally("discrete.defining_equation", seed)
    agreement = Tally("discrete.analytical_agreement", seed)
    for i in range(cases):
        equation.run(f"#{i}", lambda: _defining_equation(pg, cfg))
        agreement.run(f"#{i}", lambda: _agreement(pg, fuel))
    return [equation.summary(), agreement.summary()]


def _defining_equation(pg: PolynomialGenerator, cfg: EqConfig) -> Optional[bool]:
    point_ty = pg.choice(POINT_TYPES)
    if pg.choice((True, False, False)):
        f = pg.curried(point_ty)
    else:
        f = pg.program(point_ty, pg.choice(POINT_TYPES))
    if pg.choice((True, False)):
        x = symbols(point_ty, "a")
        delta = symbols(point_ty, "d")
    else:
        x, delta = pg.point(point_ty), pg.point(point_ty)
    return _verdict(check_derive(f, x, delta, cfg))


def _agreement(pg: PolynomialGenerator, fuel: int) -> bool:
    f = pg.program(R, R, pg.choice((1, 2, 3)))
    a = tm.num(Fraction(pg.coefficient(), 2))
    d = tm.num(Fraction(pg.coefficient(), 2))
    finite = tm.App(tm.App(derive_fn(f), a), d)
    discrete_value = oracle.value_of(finite, reducer=DiscreteReducer(), fuel=fuel)
    analytical_value = oracle.value_of(th.derive_incremental(f, a, d, fuel=fuel), fuel=fuel)
    return oracle.close(discrete_value, analytical_value, consts.DISCRETE_AGREEMENT_TOL)


# ---- round trip ----


def roundtrip(cases: int = consts.ROUNDTRIP_CASES, seed: Optional[int] = None) -> List[SuiteSummary]:
    """Text (ASCII and Unicode) and S-expression printing read back to the same tree."""
    seed = consts.default_seed() if seed is None else seed
    rng = np.random.default_rng(seed)
    gen = TermGenerator(rng)
    pg = PolynomialGenerator(rng)
    tally = Tally("roundtrip", seed)
    for i in range(cases):
        t, ty = gen.closed()
        kind = i % 5
        if kind == 3:
            body = gen.term(ty, tm.EMPTY_CONTEXT.extend("self", ty), 2)
            t = tm.Fix(tm.Lam("self", ty, body))
        elif kind == 4:
            t = derive_fn(pg.program(gen.choice(POINT_TYPES), gen.choice(POINT_TYPES)))
            ty = typecheck(tm.EMPTY_CONTEXT, t)
        tally.run(f"#{i} {excerpt(t)}", lambda: _round_trips(t, ty))
    return [tally.summary()]


def _round_trips(t: tm.Term, ty) -> bool:
    ascii_text = show_term(t)
    return (
        parse_term(ascii_text) == t
        and parse_term(show_term(t, unicode=True)) == t
        and show_term(parse_term(ascii_text)) == ascii_text
        and term_from_sexpr(term_to_sexpr(t)) == t
        and parse_type(show_type(ty)) == ty
    )


# ---- driver ----


def run_suites(
    names: Sequence[str] = SUITES,
    cases: Optional[int] = None,
    seed: Optional[int] = None,
    fuel: int = consts.DEFAULT_FUEL,
    trials: int = consts.DEFAULT_TRIALS,
    events: Optional[EventLog] = None,
    property_cases: Optional[Mapping[str, int]] = None,
) -> List[SuiteSummary]:
    """
    Run the named suites in order.

    Args:
        names: Any of ``SUITES``.
        cases: Cases per property; each suite's own default when None.
        property_cases: Case counts of single theorem properties, on top of
            ``PROPERTY_CASES`` when ``cases`` is None.
        seed: Generator seed, ``default_seed()`` when None.
        events: Events logger receiving one EVENT record per summary.

    Returns:
        List[SuiteSummary]: every property summary, in run order.
    """
    seed = consts.default_seed() if seed is None else seed
    known = {f"theorems.{p}" for p in THEOREM_PROPERTIES}
    unknown = sorted(set(property_cases or {}) - known)
    if unknown:
        raise ValueError(f"unknown properties {', '.join(unknown)}; choose from {', '.join(sorted(known))}")
    overrides = {**(consts.PROPERTY_CASES if cases is None else {}), **(property_cases or {})}
    runners = {
        "metatheory": lambda n: metatheory(n or consts.METATHEORY_CASES, seed, fuel),
        "theorems": lambda n: theorems(n or consts.THEOREM_CASES, seed, fuel, trials, overrides),
        "discrete": lambda n: discrete(n or consts.DISCRETE_CASES, seed, fuel, trials),
        "roundtrip": lambda n: roundtrip(n or consts.ROUNDTRIP_CASES, seed),
    }
    summaries: List[SuiteSummary] = []
    for name in names:
        if name not in runners:
            raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
        logger.info(f"Running suite {name} (seed {seed})")
        for summary in runners[name](cases):
            logger.info(
                f"{summary.suite}: {summary.cases} cases, {summary.failures} failures, "
                f"{summary.inconclusive} inconclusive in {summary.elapsed}s"
            )
            if events is not None:
                events.record("suite", summary)
            summaries.append(summary)
    return summaries
