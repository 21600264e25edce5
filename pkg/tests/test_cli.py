"""The command-line interface, run in process.

Exit code contract: 0 pass, 1 failed check or counterexample, 2 unknown
verdict, 3 usage and load errors.  Every ``--json`` payload must validate
against the bundled report schema.
"""

import json

import jsonschema
import pytest

from lawbench.cli import run, schema_path

from conftest import example

UNDECIDED = """signature { op ca/0; op cb/0; op g/1; op h/1; }
outputs rational;
alphabet { t }
theory generic {
  eq ca-is-cb: ca = cb;
  eq pad-g: g(v) = g(g(v));
  eq pad-h: h(v) = h(h(v));
}
rules simple {
  rule ca =>
    out = 0;
    next(t') = g(ca);
  rule cb =>
    out = 0;
    next(t') = h(cb);
  rule g(o=a, d=x) =>
    out = 0;
    next(t') = g(x);
  rule h(o=a, d=x) =>
    out = 0;
    next(t') = h(x);
}
"""


@pytest.fixture
def undecided_file(tmp_path):
    path = tmp_path / "undecided.dsl"
    path.write_text(UNDECIDED)
    return str(path)


def test_check_preservation_exit_codes(capsys, undecided_file):
    assert run(["check-preservation", example("stream.dsl")]) == 0
    assert run(["check-preservation", example("cfg.dsl")]) == 0
    assert run(["check-preservation", example("three-zeros.dsl")]) == 1
    assert run(["check-preservation", example("convolution.dsl")]) == 1
    assert run(["check-preservation", undecided_file]) == 2
    out = capsys.readouterr().out
    assert "times-comm" in out and "zeros" in out


def test_run_command(capsys):
    code = run(["run", example("stream.dsl"),
                "--state", "ones * ones", "--word", "tt"])
    assert code == 0
    assert capsys.readouterr().out.splitlines()[0] == "output 3"


def test_stream_command(capsys):
    code = run(["stream", example("stream.dsl"),
                "--state", "ones * ones", "--n", "5"])
    assert code == 0
    assert capsys.readouterr().out.strip() == "1 2 3 4 5"


def test_cfg_member_exit_codes(capsys):
    assert run(["cfg-member", example("cfg.dsl"), "--word", "ab"]) == 0
    assert capsys.readouterr().out.strip() == "1"
    assert run(["cfg-member", example("cfg.dsl"), "--word", "ba"]) == 1
    assert capsys.readouterr().out.strip() == "0"
    assert run(["cfg-member", example("cfg.dsl")]) == 0  # empty word


def test_cfg_equiv_exit_codes(capsys):
    assert run(["cfg-equiv", example("cfg.dsl"),
                "--left", "S", "--right", "S"]) == 0
    assert capsys.readouterr().out.strip() == "Equivalent"
    assert run(["cfg-equiv", example("cfg.dsl"),
                "--left", "S", "--right", "1", "--maxlen", "3"]) == 1
    assert capsys.readouterr().out.strip() == "Counterexample(ab)"


def test_quotient_commute_command(capsys):
    code = run(["quotient-commute", example("stream.dsl"),
                "--max-size", "3", "--depth", "3"])
    assert code == 0
    assert "0 violations" in capsys.readouterr().out


def test_algebra_check_command(capsys):
    code = run(["algebra-check", example("stream.dsl"),
                "--outer", "[2] * ones", "--horizon", "5"])
    assert code == 0
    out = capsys.readouterr().out
    assert out.startswith("agree")
    assert "2 2 2 2 2" in out


def test_usage_and_load_errors(capsys):
    cases = (
        ["cfg-member", example("cfg.dsl"), "--word", "xz"],
        ["run", example("stream.dsl"), "--state", "ones", "--word", "q"],
        ["check-preservation", "/no/such/file.dsl"],
        ["run", example("three-zeros.dsl"), "--state", "n1"],
        ["cfg-member", example("stream.dsl"), "--word", "t"],
        ["stream", example("stream.dsl"), "--state", "nope"],
        ["check-preservation", example("stream.dsl"), "--bogus"],
        ["no-such-command", example("stream.dsl")],
    )
    for argv in cases:
        assert run(argv) == 3, argv
        captured = capsys.readouterr()
        assert captured.err.startswith("error:"), argv
        assert captured.out == "", argv


SCHEMA = json.loads(schema_path().read_text())

JSON_INVOCATIONS = (
    ["check-preservation", example("stream.dsl")],
    ["check-preservation", example("stream.dsl"), "--trace"],
    ["check-preservation", example("three-zeros.dsl")],
    ["check-preservation", example("cfg.dsl")],
    ["run", example("stream.dsl"), "--state", "ones", "--word", "t"],
    ["stream", example("stream.dsl"), "--state", "X", "--n", "4"],
    ["cfg-member", example("cfg.dsl"), "--word", "aabb"],
    ["cfg-equiv", example("cfg.dsl"), "--left", "S", "--right", "1"],
    ["quotient-commute", example("stream.dsl"),
     "--max-size", "2", "--depth", "2"],
    ["algebra-check", example("stream.dsl"), "--outer", "ones + ones"],
)


def test_json_reports_validate_against_the_schema(capsys):
    for argv in JSON_INVOCATIONS:
        run(argv + ["--json"])
        payload = json.loads(capsys.readouterr().out)
        jsonschema.validate(payload, SCHEMA)


def test_json_reports_are_deterministic(capsys):
    argv = ["check-preservation", example("stream.dsl"), "--trace", "--json"]
    run(argv)
    first = capsys.readouterr().out
    run(argv)
    assert capsys.readouterr().out == first


def test_trace_includes_both_one_step_results(capsys):
    run(["check-preservation", example("stream.dsl"), "--trace", "--json"])
    payload = json.loads(capsys.readouterr().out)
    by_name = {r["scheme"]: r for r in payload["results"]}
    trace = by_name["distrib"]["trace"]
    assert trace["lhs_step"]["next"]["t"] == \
        "d_v * [b_u + b_w] + d_v * X * (d_u + d_w) + [b_v] * (d_u + d_w)"
    assert trace["rhs_step"]["next"]["t"] == \
        "(d_v * [b_u] + d_v * X * d_u + [b_v] * d_u)" \
        " + d_v * [b_w] + d_v * X * d_w + [b_v] * d_w"
    assert trace["lhs_normal"] == trace["rhs_normal"]