"""Loading workbench files: frozen shapes for the bundled examples,
round trips through the pretty printer, and positioned diagnostics."""

from fractions import Fraction

import pytest

from lawbench.dsl import load, loads, term_from_string
from lawbench.errors import ArityMismatch, ParseError
from lawbench.terms import App, Const, Var

from conftest import EXAMPLES, example

BUNDLED = ("stream", "convolution", "three-zeros", "cfg", "balanced")


def test_bundled_stream_file():
    wb = load(example("stream.dsl"))
    assert wb.signature.ops == (("X", 0), ("+", 2), ("*", 2))
    (fam,) = wb.signature.families
    assert fam.name == "c"
    assert fam.samples == (0, 1, 2, 3)
    assert wb.outputs == "rational"
    assert wb.alphabet == ("t",)
    assert wb.theory.kind == "commutative-semiring"
    assert len(wb.theory.schemes) == 10
    assert len(wb.law.spec.rules) == 4
    assert wb.law.spec.format == "simple"
    assert wb.system.variables == ("ones",)
    assert wb.grammar is None


def test_bundled_convolution_file():
    wb = load(example("convolution.dsl"))
    assert wb.law.spec.format == "gsos"
    assert len(wb.law.spec.rules) == 4
    assert wb.system.variables == ("ones",)


def test_bundled_three_zeros_file():
    wb = load(example("three-zeros.dsl"))
    assert wb.signature.ops == (("n1", 0), ("n2", 0), ("n3", 0))
    assert wb.theory.kind == "generic"
    assert [s.name for s in wb.theory.schemes] == ["zeros"]
    assert len(wb.law.spec.rules) == 3
    assert wb.system is None and wb.grammar is None


def test_bundled_grammar_files():
    wb = load(example("cfg.dsl"))
    assert wb.outputs == "bool"
    assert wb.alphabet == ("a", "b")
    assert wb.theory.kind == "idempotent-semiring"
    assert len(wb.theory.schemes) == 11
    assert wb.grammar.nonterminals == ("S", "B")
    assert wb.grammar.start == Var("S")
    assert wb.grammar.empty == {"S": 1, "B": 0}
    assert load(example("balanced.dsl")).grammar.nonterminals == ("S", "R")


def test_every_bundled_file_round_trips():
    for name in BUNDLED:
        wb = load(str(EXAMPLES / f"{name}.dsl"))
        assert loads(wb.pretty()) == wb, name


MINIMAL = """signature { op f/2; op k/0; }
outputs rational;
alphabet { t }
"""


def fails_at(text: str, where: str, *needles: str):
    with pytest.raises(ParseError) as err:
        loads(text)
    message = str(err.value)
    assert message.startswith(where), message
    for needle in needles:
        assert needle in message, message


def test_scheme_arity_error_points_at_the_offender():
    text = MINIMAL + "theory generic {\n  eq bad: f(v, v, v) = v;\n}\n"
    with pytest.raises(ArityMismatch) as err:
        loads(text)
    assert str(err.value).startswith("5:11")
    assert "arity 2" in str(err.value)


def test_binder_must_not_shadow_a_letter():
    text = MINIMAL + (
        "rules simple {\n"
        "  rule k =>\n    out = 0;\n    next(t) = k;\n"
        "}\n"
    )
    fails_at(text, "7:10", "shadows an alphabet letter")


def test_section_level_diagnostics():
    fails_at("outputs rational;\noutputs bool;\n", "2:1", "duplicate section")
    fails_at("mystery { }\n", "1:1", "unknown section")
    fails_at("signature { op f/2;\n", "2:1", "unclosed")
    fails_at("theory generic { }\n", "1:1", "needs a signature")
    fails_at(MINIMAL + "theory sensible;\n", "4:1", "unknown theory")
    fails_at("alphabet { t, t }\n", "1:17", "duplicate alphabet letter")
    fails_at("signature { op f/-1; }\n", "1:18", "arity")
    fails_at("signature { family c samples 1/0; }\n", "1:32", "zero denominator")


PRELUDE = MINIMAL + (
    "rules simple {\n"
    "  rule f(o=a, d=x; o=b, d=y) =>\n"
    "    out = a + b;\n"
    "    next(t') = x;\n"
    "  rule k =>\n"
    "    out = 0;\n"
    "    next(t') = k;\n"
    "}\n"
)


def test_rule_and_system_diagnostics():
    fails_at(
        MINIMAL
        + "rules simple {\n  rule k =>\n    out = 0;\n"
          "    next(t') = case o { 0 => k; 1 => k; };\n}\n",
        "7:16", "case splits need Boolean outputs")
    fails_at(
        PRELUDE
        + "system {\n  var p: out = 1; next(t) = p;\n"
          "  var p: out = 0; next(t) = p;\n}\n",
        "14:7", "defined twice")
    fails_at(
        PRELUDE + "system {\n  var p: out = 1; next(x) = p;\n}\n",
        "13:24", "not an alphabet letter")
    fails_at(
        PRELUDE + "system {\n  var p: out = 1;\n}\n",
        "14:1", "lacks next(t)")


def test_grammar_diagnostics():
    head = ("signature { op +/2; op */2; op 0/0; op 1/0; }\n"
            "outputs bool;\nalphabet { a }\n")
    fails_at(head + "grammar {\n  S: empty=2;\n  S -a-> eps;\n}\n",
             "5:12", "0 or 1")
    fails_at(head + "grammar {\n  S: empty=1;\n  S: empty=1;\n  S -a-> eps;\n}\n",
             "6:3", "duplicate empty-word bit")
    fails_at(head + "grammar {\n  S -a-> eps;\n  start S;\n  start S\n}\n",
             "7:3", "duplicate start")


def test_term_from_string():
    wb = load(example("stream.dsl"))
    sig = wb.signature
    term = term_from_string("[1/2] * X + v", sig, ("v",))
    assert term == App("+", (App("*", (Const("c", Fraction(1, 2)), App("X"))),
                             Var("v")))
    assert term_from_string("[2/4]", sig) == Const("c", Fraction(1, 2))
    with pytest.raises(ParseError) as err:
        term_from_string("[2] * s", sig, ("v",))
    assert "unknown name 's'" in str(err.value)
    with pytest.raises(ParseError):
        term_from_string("v + ", sig, ("v",))
    with pytest.raises(ParseError):
        term_from_string("(v", sig, ("v",))
    with pytest.raises(ParseError):
        term_from_string("v v", sig, ("v",))