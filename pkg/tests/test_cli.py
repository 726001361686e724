import io
import json

import pytest

from diffcalc.cli import build_parser, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out.strip(), err


@pytest.mark.parametrize(
    "term, expected",
    [("f", "(R,R)->(R,R,R)"), ("3 (+) 4", "R"), ("\\x:(R,R). pi1 x", "(R,R)->R")],
)
def test_check(capsys, term, expected):
    assert run(capsys, "check", term)[:2] == (0, expected)


def test_check_sexpr_and_unicode(capsys):
    assert run(capsys, "check", "\\x:R. x", "--format", "sexpr")[1] == "(arrow R R)"
    assert run(capsys, "check", "\\x:R. x", "--unicode")[1] == "R→R"


def test_check_type_error(capsys):
    code, out, err = run(capsys, "check", "inl 0 as R+R (+) inl 0 as R+R")
    assert code == 1
    assert out == ""
    assert "type error (NotAddable)" in err


def test_check_parse_error(capsys):
    code, _, err = run(capsys, "check", "(1, 2")
    assert code == 1
    assert "parse error" in err


def test_typed_variables_and_builtins(capsys):
    assert run(capsys, "check", "f", "--no-builtins")[1] == "R"
    assert run(capsys, "check", "f", "--var", "f:R->R")[1] == "R->R"
    assert run(capsys, "check", "pi2 p", "--var", "p:(R,R)")[1] == "R"
    code, _, err = run(capsys, "check", "x", "--var", "x")
    assert code == 1
    assert "configuration error" in err


def test_term_from_stdin_and_file(capsys, monkeypatch, tmp_path):
    monkeypatch.setattr("sys.stdin", io.StringIO("3 (+) 4"))
    assert run(capsys, "check")[1] == "R"
    source = tmp_path / "term.dc"
    source.write_text("(1, 2)")
    assert run(capsys, "check", "--file", str(source))[1] == "(R,R)"


def test_norm_matrix(capsys):
    assert run(capsys, "norm", "((1,4),(2,5),(3,6)) * (7,8,9)")[:2] == (0, "(50, 122)")


def test_norm_raw_keeps_unreduced_arithmetic(capsys):
    code, out, _ = run(capsys, "norm", "((1,4),(2,5),(3,6)) * (7,8,9)", "--raw")
    assert code == 0
    assert out != "(50, 122)"
    assert "(+)" in out


def test_norm_json_with_trace(capsys):
    code, out, _ = run(capsys, "norm", "(\\x:R. x * x) 3", "--format", "json", "--trace")
    report = json.loads(out)
    assert code == 0
    assert report["type"] == "R"
    assert report["value"] == "9"
    assert report["steps"] == len(report["trace"]) == 1
    assert report["trace"][0]["rule"] == "Beta"
    assert report["trace"][0]["path"] == "ε"


def test_norm_fuel_exhausted(capsys):
    code, _, err = run(capsys, "norm", "fix (\\f:R->R. f)", "--fuel", "50")
    assert code == 2
    assert "fuel exhausted after 50 steps" in err


def test_invalid_fuel_is_a_configuration_error(capsys):
    assert run(capsys, "norm", "1", "--fuel", "0")[0] == 1


def test_eq(capsys):
    code, out, _ = run(capsys, "eq", "pi1 x (+) pi2 x", "pi2 x (+) pi1 x", "--var", "x:(R,R)")
    assert (code, out) == (0, "equal (1 trial, seed 1337)")


def test_eq_not_equal(capsys):
    code, out, _ = run(capsys, "eq", "x * x", "x (+) x")
    assert code == 0
    assert out.startswith("not equal")
    report = json.loads(run(capsys, "eq", "x * x", "x (+) x", "--format", "json")[1])
    assert report["equal"] is False
    assert report["witness"]["reason"] == "normal forms differ"


def test_eq_undefined(capsys):
    code, _, err = run(capsys, "eq", "fix (\\f:R->R. f) 1", "1", "--fuel", "50")
    assert code == 3
    assert "equality undefined" in err


def test_newton_leibniz(capsys):
    code, out, _ = run(capsys, "nl", "--t", "f y", "--y", "y", "--from", "(0, 0)", "--to", "(2, 3)")
    report = json.loads(out)
    assert code == 0
    assert report["theorem"] == "newton_leibniz"
    assert report["verdict"] == "true"


def test_chain_rule(capsys):
    code, out, _ = run(capsys, "chain", "--f", "f", "--g", "g", "--at", "(r3, r4)", "--t", "(r1, r2)")
    assert code == 0
    assert json.loads(out)["verdict"] == "true"


def test_ad(capsys):
    code, out, _ = run(capsys, "ad", "--f", "magSqr", "--at", "(a, b)", "--format", "json")
    report = json.loads(out)
    assert code == 0
    assert report["directional"] == ["2 * a", "2 * b"]
    assert "2 * a" in report["gradient"]


def test_taylor(capsys):
    assert run(capsys, "taylor", "--f", "sqr", "--at", "1", "--wrt", "x")[1] == "x * x"
    code, out, _ = run(
        capsys, "taylor", "--f", "taylorf", "--at", "(0, 0)", "--wrt", "(c1, c2)", "--exact", "--format", "json"
    )
    report = json.loads(out)
    assert code == 0
    assert report["verdict"] == "true"
    assert "partial_2" in report["extra"]


def test_taylor_mismatch_still_exits_zero(capsys):
    code, out, _ = run(capsys, "taylor", "--f", "sqr", "--at", "0", "--wrt", "x", "--order", "1", "--exact")
    assert code == 0
    assert out.startswith("taylor: false")


def test_incremental(capsys):
    code, out, _ = run(capsys, "inc", "--f", "average", "--x", "(x1, x2)", "--delta", "(d, 0)")
    report = json.loads(out)
    assert code == 0
    assert report["verdict"] == "true"
    assert report["extra"]["increment"] == "1/2 * d"


def test_discrete(capsys):
    assert run(capsys, "discrete", "Delta{y * y ; y @ 2 , 3}")[:2] == (0, "21")
    code, out, _ = run(capsys, "discrete", "\\x:R. x * x", "--x", "a", "--delta", "d")
    assert code == 0
    assert out.startswith("discrete_derive: true")


def test_discrete_rejects_analytical_terms(capsys):
    code, _, err = run(capsys, "discrete", "D{x ; x @ 1}")
    assert code == 1
    assert "NotDiscrete" in err
    assert run(capsys, "discrete", "\\x:R. x", "--x", "1")[0] == 1


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "roundtrip", "--cases", "4", "--format", "json", "--seed", "2")
    summaries = json.loads(out)
    assert code == 0
    assert [s["suite"] for s in summaries] == ["roundtrip"]
    assert summaries[0]["cases"] == 4
    assert summaries[0]["seed"] == 2


def test_subcommand_required():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])


def test_events_log_records_each_command(capsys, tmp_path):
    logs = str(tmp_path / "logs")
    assert run(capsys, "norm", "D{x * x ; x @ 3}", "--logging.logging_dir", logs)[0] == 0
    assert run(capsys, "eq", "2 * 3", "6", "--logging.logging_dir", logs)[0] == 0
    assert run(capsys, "ad", "--f", "magSqr", "--at", "(1, 2)", "--logging.logging_dir", logs)[0] == 0
    lines = (tmp_path / "logs" / "events.log").read_text().splitlines()
    kinds = [line.split(" | ")[2] for line in lines]
    assert kinds[-3:] == ["reduction", "equality", "gradient"]
    reduction = json.loads(lines[-3].split(" | ", 3)[3])
    assert reduction["value"] == "6"
    assert json.loads(lines[-2].split(" | ", 3)[3])["equal"] is True


def test_no_events_without_a_logging_directory(capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert run(capsys, "norm", "1 (+) 2")[0] == 0
    assert not (tmp_path / "events.log").exists()


def test_verify_rejects_unknown_property_counts(capsys):
    code, _, err = run(capsys, "verify", "--suite", "theorems", "--suite.cases", "theorems.nonsense=2")
    assert code == 1
    assert "unknown properties theorems.nonsense" in err
