import numpy as np
import pytest

from diffcalc.base import consts
from diffcalc.base import terms as tm
from diffcalc.base.errors import DiffcalcError
from diffcalc.programs import PROGRAMS
from diffcalc.syntax.parser import parse_term
from diffcalc.utils.logging import setup_events_logger
from diffcalc.validator import oracle
from diffcalc.validator.suites import (
    METATHEORY_PROPERTIES,
    SUITES,
    THEOREM_PROPERTIES,
    Tally,
    discrete,
    metatheory,
    roundtrip,
    run_suites,
    theorems,
)


def test_metatheory():
    summaries = metatheory(cases=4, seed=3)
    assert [s.suite for s in summaries] == [f"metatheory.{p}" for p in METATHEORY_PROPERTIES]
    assert all(s.passed for s in summaries), [s.failed_cases for s in summaries]
    assert summaries[0].cases == 4


def test_theorems():
    summaries = theorems(cases=1, seed=3, trials=2)
    assert len(summaries) == 8
    assert summaries[0].suite == "theorems.newton_leibniz"
    assert all(s.failures == 0 for s in summaries), [s.failed_cases for s in summaries]


def test_discrete():
    summaries = discrete(cases=2, seed=3, trials=2)
    assert [s.suite for s in summaries] == ["discrete.defining_equation", "discrete.analytical_agreement"]
    assert all(s.failures == 0 for s in summaries)


def test_roundtrip():
    (summary,) = roundtrip(cases=10, seed=3)
    assert summary.cases == 10
    assert summary.passed, summary.failed_cases


def test_run_suites_writes_events(tmp_path):
    events = setup_events_logger(str(tmp_path), 1024 * 1024)
    summaries = run_suites(["roundtrip"], cases=3, seed=5, events=events)
    events.flush()
    assert [s.suite for s in summaries] == ["roundtrip"]
    assert summaries[0].seed == 5
    line = (tmp_path / "events.log").read_text().splitlines()[-1]
    assert "| EVENT | suite |" in line
    assert '"suite":"roundtrip"' in line


def test_unknown_suite():
    assert "roundtrip" in SUITES
    with pytest.raises(ValueError):
        run_suites(["nonsense"], cases=1)


def test_tally_scores_outcomes():
    def broken():
        raise DiffcalcError("boom")

    tally = Tally("demo", seed=1)
    tally.run("ok", lambda: True)
    tally.run("bad", lambda: False)
    tally.run("unknown", lambda: None)
    tally.run("raises", broken)
    summary = tally.summary()
    assert (summary.cases, summary.failures, summary.inconclusive) == (4, 2, 1)
    assert summary.failed_cases == ["bad", "raises DiffcalcError: boom"]
    assert not summary.passed


def test_compiled_function_matches_the_interpreter():
    fn = oracle.CompiledFunction(PROGRAMS["f"])
    assert np.allclose(fn([2.0, 3.0]), [5.0, 6.0, 3.0])
    assert np.allclose(oracle.value_of(parse_term("(1 (+) 2, 3 * 4)")), [3.0, 12.0])


def test_finite_differences_and_quadrature():
    jac = oracle.jacobian(oracle.CompiledFunction(PROGRAMS["jacobianf"]), [1.0, 2.0])
    assert np.allclose(jac, [[2.0, 0.0], [2.0, 2.0]], atol=1e-6)
    assert oracle.adaptive_simpson(lambda s: s * s, 0.0, 1.0) == pytest.approx(1 / 3)
    assert oracle.adaptive_simpson(np.cos, 1.0, 1.0) == 0.0
    total = oracle.staircase_integral(lambda p: np.array([[2 * p[0], 1.0]]), [0.0, 0.0], [2.0, 3.0])
    assert np.allclose(total, [7.0])


def test_flatten_and_close():
    t = tm.Tuple((tm.num(1), tm.Tuple((tm.num(2), tm.num(3)))))
    ty = parse_term("\\x:(R,(R,R)). x").annot
    assert oracle.flatten(t, ty) == [tm.num(1), tm.num(2), tm.num(3)]
    assert oracle.close([1.0, 2.0], [1.0, 2.0 + 1e-12], 1e-9)
    assert not oracle.close([1.0], [1.0, 2.0], 1e-9)


def test_single_property_case_counts():
    summaries = run_suites(["theorems"], cases=1, seed=3, trials=2, property_cases={"theorems.taylor": 2})
    counts = {s.suite: s.cases for s in summaries}
    assert counts["theorems.taylor"] == 2
    assert counts["theorems.chain_rule"] == 1
    assert [s.suite for s in summaries] == [f"theorems.{p}" for p in THEOREM_PROPERTIES]


def test_default_property_counts_name_real_properties():
    assert set(consts.PROPERTY_CASES) <= {f"theorems.{p}" for p in THEOREM_PROPERTIES}
    assert consts.PROPERTY_CASES["theorems.chain_rule"] < consts.THEOREM_CASES


def test_unknown_property_case_count():
    with pytest.raises(ValueError, match="unknown properties theorems.nonsense"):
        run_suites(["theorems"], cases=1, property_cases={"theorems.nonsense": 3})
