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
The ``diffcalc`` command line.

Every subcommand parses its terms with the demo programs in scope (unless
``--no-builtins``), typechecks them, and prints either text or a JSON report.
Exit codes: 0 success, 1 type or parse error, 2 fuel exhausted, 3 equality
undefined because a side did not normalize.
"""

import sys
import json
import logging
import argparse
from typing import Callable, Dict, Mapping, Optional, Sequence

from pydantic import BaseModel
from rich.console import Console
from rich.table import Table

from .base import consts
from .base import terms as tm
from .base.errors import DiffcalcError
from .base.types import Base, Product
from .calculus import discrete as dc
from .calculus import theorems as th
from .calculus.equality import Comparator
from .calculus.reducer import Fuel, FuelExhausted, Reducer
from .calculus.typechecker import TypeChecker, TypeCheckError
from .programs import PROGRAMS
from .protocol import EqReport, GradientReport, NormalizeReport, StepRecord, WitnessReport
from .syntax.lexer import ParseError
from .syntax.parser import parse_term, parse_type
from .syntax.printer import show_term, show_type
from .syntax.sexpr import term_to_sexpr, type_to_sexpr
from .utils import config as config_utils
from .utils.logging import setup_logging
from .validator.suites import SUITES, run_suites

logger = logging.getLogger(__name__)


class Session:
    """Parsed configuration plus the shared machinery of one invocation."""

    def __init__(self, args: argparse.Namespace, out: Console, err: Console):
        self.args = args
        self.out = out
        self.err = err
        self.config = config_utils.config(args)
        self.events = config_utils.check_config(self.config)
        self.unicode: bool = getattr(args, "unicode", False)
        self.reducer = Reducer(
            check_preservation=self.config.reducer.check_preservation,
            trace_log=self.config.logging.trace,
        )
        self.ctx = tm.EMPTY_CONTEXT
        for binding in args.var or []:
            name, _, ty = binding.partition(":")
            if not name.strip() or not ty.strip():
                raise ParseError(f"expected NAME:TYPE in --var, got {binding!r}")
            self.ctx = self.ctx.extend(name.strip(), parse_type(ty))
        # Typed free variables shadow demo programs of the same name.
        self.builtins: Mapping[str, tm.Term] = (
            {} if args.no_builtins else {k: v for k, v in PROGRAMS.items() if k not in self.ctx}
        )

    def parse(self, text: str) -> tm.Term:
        return parse_term(text, builtins=self.builtins)

    def show(self, t: tm.Term) -> str:
        return show_term(t, self.unicode)

    def type_of(self, t: tm.Term):
        ctx = tm.close_context(t, self.ctx)
        return TypeChecker().check(ctx, t)

    def comparator(self) -> Comparator:
        return Comparator(self.config.equality, reducer=self.reducer)

    def evaluate(self, t: tm.Term, reducer: Optional[Reducer] = None):
        """Normal form of ``t`` and its readback."""
        ctx = tm.close_context(t, self.ctx)
        trace = (reducer or self.reducer).normalize(t, Fuel(self.config.reducer.fuel), ctx)
        return trace, self.comparator().readback(trace.final, ctx)

    def text(self, message: str) -> None:
        self.out.print(message, markup=False, highlight=False, soft_wrap=True)

    def json(self, payload: str) -> None:
        self.out.out(payload, highlight=False)

    def event(self, kind: str, report: BaseModel) -> None:
        if self.events is not None:
            self.events.record(kind, report)


def _fail(err: Console, message: str) -> None:
    err.print(message, markup=False, highlight=False, soft_wrap=True)


def read_term_source(args: argparse.Namespace) -> str:
    if getattr(args, "file", None):
        with open(args.file) as f:
            return f.read()
    if args.term is None or args.term == "-":
        return sys.stdin.read()
    return args.term


# ---- commands ----


def cmd_check(s: Session) -> int:
    t = s.parse(read_term_source(s.args))
    ty = s.type_of(t)
    if s.args.format == "sexpr":
        s.text(type_to_sexpr(ty))
    else:
        s.text(show_type(ty, s.unicode))
    return consts.EXIT_OK


def _normalize(s: Session, t: tm.Term, reducer: Reducer) -> int:
    ty = s.type_of(t)
    trace, value = s.evaluate(t, reducer)
    shown = trace.final if s.args.raw else value
    report = NormalizeReport(
        term=s.show(t),
        type=show_type(ty, s.unicode),
        normal_form=s.show(trace.final),
        value=s.show(value),
        steps=len(trace),
        trace=[
            StepRecord(n=i + 1, rule=st.rule, path="/".join(st.path) or "ε",
                       before=s.show(st.before), after=s.show(st.after))
            for i, st in enumerate(trace.steps)
        ]
        if s.config.logging.trace
        else [],
    )
    s.event("reduction", report)
    if s.args.format == "json":
        s.json(report.model_dump_json(indent=2))
        return consts.EXIT_OK
    if s.config.logging.trace and trace.steps:
        s.text(trace.render(s.unicode))
    s.text(term_to_sexpr(shown) if s.args.format == "sexpr" else s.show(shown))
    return consts.EXIT_OK


def cmd_norm(s: Session) -> int:
    return _normalize(s, s.parse(read_term_source(s.args)), s.reducer)


def cmd_discrete(s: Session) -> int:
    t = s.parse(read_term_source(s.args))
    dc.check_discrete(t)
    if s.args.x is not None or s.args.delta is not None:
        if s.args.x is None or s.args.delta is None:
            raise ParseError("--x and --delta go together")
        check = dc.check_derive(t, s.parse(s.args.x), s.parse(s.args.delta), s.config.equality, s.ctx)
        return _emit_check(s, check)
    reducer = dc.DiscreteReducer(
        check_preservation=s.config.reducer.check_preservation,
        trace_log=s.config.logging.trace,
    )
    return _normalize(s, t, reducer)


def cmd_eq(s: Session) -> int:
    t1, t2 = s.parse(s.args.lhs), s.parse(s.args.rhs)
    cfg = s.config.equality
    try:
        result = s.comparator().check(t1, t2, s.ctx)
    except FuelExhausted as e:
        _fail(s.err, f"equality undefined: {e}")
        return consts.EXIT_UNDEFINED
    witness = None
    if result.witness is not None:
        w = result.witness
        witness = WitnessReport(
            reason=w.reason,
            substitution={k: s.show(v) for k, v in w.substitution.items()},
            lhs_nf=s.show(w.lhs_nf) if w.lhs_nf is not None else None,
            rhs_nf=s.show(w.rhs_nf) if w.rhs_nf is not None else None,
            path="/".join(w.path) or "ε",
        )
    report = EqReport(
        lhs=s.show(t1),
        rhs=s.show(t2),
        equal=result.equal,
        trials=result.trials,
        seed=cfg.seed,
        lhs_nf=s.show(result.lhs_nf) if result.lhs_nf is not None else None,
        rhs_nf=s.show(result.rhs_nf) if result.rhs_nf is not None else None,
        witness=witness,
    )
    s.event("equality", report)
    if s.args.format == "json":
        s.json(report.model_dump_json(indent=2))
    elif result.equal:
        s.text(f"equal ({result.trials} trial{'s' if result.trials != 1 else ''}, seed {cfg.seed})")
    else:
        s.text("not equal")
        s.text(result.witness.describe())
    return consts.EXIT_OK


def _emit_check(s: Session, check: th.TheoremCheck) -> int:
    report = check.report()
    s.event("theorem", report)
    if s.args.format == "json":
        s.json(report.model_dump_json(indent=2))
    else:
        s.text(f"{report.theorem}: {report.verdict}")
        s.text(f"  lhs: {report.lhs_nf or report.lhs}")
        s.text(f"  rhs: {report.rhs_nf or report.rhs}")
        for name, value in report.extra.items():
            s.text(f"  {name}: {value}")
        if check.result is not None and check.result.witness is not None:
            s.text(check.result.witness.describe())
        if report.detail:
            s.text(f"  {report.detail}")
    return consts.EXIT_UNDEFINED if report.verdict == "inconclusive" else consts.EXIT_OK


def cmd_nl(s: Session) -> int:
    t, t1, t2 = s.parse(s.args.t), s.parse(s.args.from_), s.parse(s.args.to)
    # The integration variable ranges over the type of the bounds.
    s.ctx = s.ctx.extend(s.args.y, s.type_of(t1))
    return _emit_check(s, th.check_newton_leibniz(t, s.args.y, t1, t2, s.config.equality, s.ctx))


def cmd_chain(s: Session) -> int:
    f, g = s.parse(s.args.f), s.parse(s.args.g)
    t1, t = s.parse(s.args.at), s.parse(s.args.t)
    return _emit_check(s, th.check_chain_rule(f, g, t1, t, s.config.equality, s.ctx))


def cmd_taylor(s: Session) -> int:
    f, t0, t = s.parse(s.args.f), s.parse(s.args.at), s.parse(s.args.wrt)
    if s.args.expect is not None or s.args.exact:
        expected = s.parse(s.args.expect) if s.args.expect is not None else None
        check = th.check_taylor(f, t0, t, s.args.order, expected, s.config.equality, s.ctx)
        check.extra = {k: _readback(s, v) for k, v in check.extra.items()}
        return _emit_check(s, check)
    expansion = th.taylor_expansion(f, t0, t, s.args.order, s.ctx, s.reducer)
    ty = s.type_of(expansion.term)
    trace, value = s.evaluate(expansion.term)
    report = NormalizeReport(
        term=s.show(expansion.term),
        type=show_type(ty, s.unicode),
        normal_form=s.show(trace.final),
        value=s.show(value),
        steps=len(trace),
    )
    s.event("reduction", report)
    if s.args.format == "json":
        s.json(report.model_dump_json(indent=2))
    else:
        s.text(s.show(value))
    return consts.EXIT_OK


def cmd_ad(s: Session) -> int:
    f, point = s.parse(s.args.f), s.parse(s.args.at)
    fuel = s.config.reducer.fuel
    gradient = _readback(s, th.ad_gradient(f, point, s.ctx, fuel))
    ty = s.type_of(point)
    units = []
    if isinstance(ty, Base) or (isinstance(ty, Product) and all(isinstance(c, Base) for c in ty.components)):
        units = th.basis(ty)
    directional = [_readback(s, th.ad_directional(f, point, e, s.ctx, fuel)) for e in units]
    report = GradientReport(
        function=s.show(f),
        point=s.show(point),
        gradient=s.show(gradient),
        directional=[s.show(d) for d in directional],
    )
    s.event("gradient", report)
    if s.args.format == "json":
        s.json(report.model_dump_json(indent=2))
    else:
        s.text(report.gradient)
        for e, d in zip(units, report.directional):
            s.text(f"  * {s.show(e)} = {d}")
    return consts.EXIT_OK


def cmd_inc(s: Session) -> int:
    f, x, delta = s.parse(s.args.f), s.parse(s.args.x), s.parse(s.args.delta)
    check = th.check_incremental(f, x, delta, s.config.equality, s.ctx)
    check.extra = {k: _readback(s, v) for k, v in check.extra.items()}
    return _emit_check(s, check)


def _readback(s: Session, t: tm.Term) -> tm.Term:
    ctx = tm.close_context(t, s.ctx)
    if not s.reducer.is_normal_form(t, ctx):
        t = s.reducer.normalize(t, Fuel(s.config.reducer.fuel), ctx).final
    return s.comparator().readback(t, ctx)


def cmd_verify(s: Session) -> int:
    names = SUITES if s.args.suite == "all" else (s.args.suite,)
    summaries = run_suites(
        names,
        cases=s.args.cases,
        seed=s.config.equality.seed,
        fuel=s.config.reducer.fuel,
        trials=s.config.equality.trials,
        events=s.events,
        property_cases=s.config.suite.cases,
    )
    if s.args.format == "json":
        s.json(json.dumps([summary.model_dump() for summary in summaries], indent=2))
    else:
        table = Table(title=f"diffcalc verification (seed {s.config.equality.seed})")
        table.add_column("suite")
        table.add_column("cases", justify="right")
        table.add_column("failures", justify="right")
        table.add_column("inconclusive", justify="right")
        table.add_column("elapsed (s)", justify="right")
        for summary in summaries:
            style = None if summary.passed else "red"
            table.add_row(
                summary.suite,
                str(summary.cases),
                str(summary.failures),
                str(summary.inconclusive),
                f"{summary.elapsed:.2f}",
                style=style,
            )
        s.out.print(table)
        for summary in summaries:
            for label in summary.failed_cases:
                s.text(f"FAILED {summary.suite}: {label}")
    return consts.EXIT_OK if all(summary.passed for summary in summaries) else consts.EXIT_ERROR


# ---- parser ----


def _common() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    config_utils.add_args(parent)
    parent.add_argument(
        "--var",
        action="append",
        metavar="NAME:TYPE",
        help="Type a free variable, e.g. --var 'x:(R,R)'. Untyped free variables are R.",
    )
    parent.add_argument("--unicode", action="store_true", help="Print λ ⊕ ⊖ → ∂ ∫ Δ.")
    parent.add_argument(
        "--no-builtins",
        action="store_true",
        help="Do not resolve names of the demo programs (f, g, sqr, magSqr, ...).",
    )
    return parent


def _term_source(p: argparse.ArgumentParser) -> None:
    p.add_argument("term", nargs="?", help="Term text; read from stdin when omitted or '-'.")
    p.add_argument("--file", help="Read the term from a file.")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diffcalc",
        description="Interpreter and theorem checker for an analytical differential lambda calculus.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common()
    report_formats = dict(choices=("text", "json"), default="text")

    p = sub.add_parser("check", parents=[common], help="Typecheck a term and print its type.")
    _term_source(p)
    p.add_argument("--format", choices=("text", "sexpr"), default="text")
    p.set_defaults(handler=cmd_check)

    p = sub.add_parser("norm", parents=[common], help="Normalize a term.")
    _term_source(p)
    p.add_argument("--format", choices=("text", "sexpr", "json"), default="text")
    p.add_argument("--raw", action="store_true", help="Print the normal form without base readback.")
    p.set_defaults(handler=cmd_norm)

    p = sub.add_parser("eq", parents=[common], help="Decide equality of two terms.")
    p.add_argument("lhs")
    p.add_argument("rhs")
    p.add_argument("--format", **report_formats)
    p.set_defaults(handler=cmd_eq)

    p = sub.add_parser("nl", parents=[common], help="Check the Newton-Leibniz identity.")
    p.add_argument("--t", required=True, help="Integrand body.")
    p.add_argument("--y", required=True, help="Variable of t being differentiated.")
    p.add_argument("--from", dest="from_", required=True, help="Lower bound.")
    p.add_argument("--to", required=True, help="Upper bound.")
    p.add_argument("--format", choices=("text", "json"), default="json")
    p.set_defaults(handler=cmd_nl)

    p = sub.add_parser("chain", parents=[common], help="Check the chain rule for f after g.")
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--at", required=True, help="Point of differentiation.")
    p.add_argument("--t", required=True, help="Direction multiplied onto both sides.")
    p.add_argument("--format", choices=("text", "json"), default="json")
    p.set_defaults(handler=cmd_chain)

    p = sub.add_parser("taylor", parents=[common], help="Taylor-expand a function.")
    p.add_argument("--f", required=True)
    p.add_argument("--at", required=True, help="Expansion center.")
    p.add_argument("--wrt", required=True, help="Point the expansion is evaluated at.")
    p.add_argument("--order", type=int, default=2)
    p.add_argument("--expect", help="Compare the expansion with this term.")
    p.add_argument("--exact", action="store_true", help="Compare the expansion with f applied to --wrt.")
    p.add_argument("--format", **report_formats)
    p.set_defaults(handler=cmd_taylor)

    p = sub.add_parser("ad", parents=[common], help="Gradient by differentiation at a point.")
    p.add_argument("--f", required=True)
    p.add_argument("--at", required=True)
    p.add_argument("--format", **report_formats)
    p.set_defaults(handler=cmd_ad)

    p = sub.add_parser("inc", parents=[common], help="Incremental change of f at x by delta.")
    p.add_argument("--f", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--delta", required=True)
    p.add_argument("--format", choices=("text", "json"), default="json")
    p.set_defaults(handler=cmd_inc)

    p = sub.add_parser("discrete", parents=[common], help="Normalize a discrete program.")
    _term_source(p)
    p.add_argument("--format", choices=("text", "sexpr", "json"), default="text")
    p.add_argument("--raw", action="store_true", help="Print the normal form without base readback.")
    p.add_argument("--x", help="With --delta, check the defining equation of Derive at x.")
    p.add_argument("--delta")
    p.set_defaults(handler=cmd_discrete)

    p = sub.add_parser("verify", parents=[common], help="Run the property suites.")
    p.add_argument("--suite", choices=SUITES + ("all",), default="all")
    p.add_argument("--cases", type=int, default=None, help="Cases per property.")
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.set_defaults(handler=cmd_verify)

    return parser


_EXIT_CODES: Dict[type, int] = {
    FuelExhausted: consts.EXIT_FUEL,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    out, err = Console(), Console(stderr=True)
    try:
        session = Session(args, out, err)
    except (ParseError, ValueError) as e:
        _fail(err, f"configuration error: {e}")
        return consts.EXIT_ERROR
    setup_logging(session.config.logging.debug, session.config.logging.trace)
    handler: Callable[[Session], int] = args.handler
    try:
        return handler(session)
    except TypeCheckError as e:
        _fail(err, f"type error ({e.kind}) {e}")
        return consts.EXIT_ERROR
    except ParseError as e:
        _fail(err, str(e))
        return consts.EXIT_ERROR
    except DiffcalcError as e:
        _fail(err, f"{type(e).__name__}: {e}")
        return _EXIT_CODES.get(type(e), consts.EXIT_ERROR)
    except OSError as e:
        _fail(err, str(e))
        return consts.EXIT_ERROR
    except ValueError as e:
        _fail(err, f"configuration error: {e}")
        return consts.EXIT_ERROR
    except Exception as e:
        logger.debug("unexpected failure", exc_info=True)
        _fail(err, f"internal error: {e}")
        return consts.EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
