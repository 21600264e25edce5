"""Command-line entry points.

Every command reads one workbench file and exits 0 when the check passes,
1 on a failed check or counterexample, 2 when a verdict is Unknown, and 3
on usage or load errors.  ``--json`` replaces the human-readable output
with a structured report; the shape of every report is pinned by the
bundled ``schema/report.schema.json``.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources

from .cfg import equiv_upto, member
from .dsl import Workbench, load, term_from_string
from .errors import LawbenchError, MissingSection
from .preservation import Verdict, check_preservation
from .solver import (
    CorecSystem,
    induced_algebra_check,
    quotient_commute_check,
    stream_prefix,
    unfold,
)
from .terms import format_term


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="lawbench",
                     description="distributive-law workbench")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    def cmd(name, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.add_argument("file", help="workbench file")
        p.add_argument("--json", action="store_true", dest="as_json",
                       help="emit a machine-readable report")
        return p

    p = cmd("check-preservation",
            help="do the rules preserve every equation scheme?")
    p.add_argument("--trace", action="store_true",
                   help="include both one-step results per scheme")

    p = cmd("run", help="unfold a state along a word")
    p.add_argument("--state", required=True, help="term over the system")
    p.add_argument("--word", default="", help="letters, e.g. ab or x,y")

    p = cmd("stream", help="the first n outputs of a one-letter system")
    p.add_argument("--state", required=True)
    p.add_argument("--n", type=int, default=10)

    p = cmd("cfg-member", help="does the grammar generate the word?")
    p.add_argument("--word", default="")

    p = cmd("cfg-equiv", help="bounded equivalence of two expressions")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--maxlen", type=int, default=6)

    p = cmd("quotient-commute",
            help="plain and normalised unfolding must agree")
    p.add_argument("--max-size", type=int, default=4, dest="max_size")
    p.add_argument("--depth", type=int, default=4)

    p = cmd("algebra-check",
            help="behaviour of a composite against composed behaviours")
    p.add_argument("--outer", required=True)
    p.add_argument("--horizon", type=int, default=5)

    return parser


def _system(wb: Workbench) -> CorecSystem:
    if wb.system is not None:
        return wb.system
    if wb.grammar is not None:
        from .cfg import to_corec

        return to_corec(wb.grammar)
    raise MissingSection("this command needs a system or grammar block")


def _grammar(wb: Workbench):
    if wb.grammar is None:
        raise MissingSection("this command needs a grammar block")
    return wb.grammar


def _parse_word(text: str, alphabet: tuple[str, ...]) -> tuple[str, ...]:
    if not text:
        return ()
    parts = text.split(",") if "," in text else None
    if parts is None:
        if all(len(a) == 1 for a in alphabet):
            parts = list(text)
        else:
            parts = [text]
    for letter in parts:
        if letter not in alphabet:
            raise _UsageError(f"letter {letter!r} is not in the alphabet "
                              f"{list(alphabet)}")
    return tuple(parts)


def _cmd_check_preservation(wb: Workbench, ns) -> tuple[int, dict, str]:
    if wb.theory is None or wb.law is None:
        raise MissingSection("check-preservation needs theory and rules blocks")
    report = check_preservation(wb.theory, wb.law)
    code = {Verdict.HOLDS: 0, Verdict.FAILS: 1, Verdict.UNKNOWN: 2}[report.verdict]
    return code, report.to_json(trace=ns.trace), report.text(trace=ns.trace)


def _cmd_run(wb: Workbench, ns) -> tuple[int, dict, str]:
    sys_ = _system(wb)
    state = term_from_string(ns.state, sys_.law.signature, sys_.variables)
    word = _parse_word(ns.word, sys_.law.alphabet)
    output, final = unfold(sys_, state, word)
    payload = {
        "command": "run",
        "word": list(word),
        "output": str(output),
        "state": format_term(final),
    }
    text = f"output {output}\nstate {format_term(final)}"
    return 0, payload, text


def _cmd_stream(wb: Workbench, ns) -> tuple[int, dict, str]:
    sys_ = _system(wb)
    state = term_from_string(ns.state, sys_.law.signature, sys_.variables)
    values = stream_prefix(sys_, state, ns.n)
    payload = {
        "command": "stream",
        "n": ns.n,
        "values": [str(v) for v in values],
    }
    return 0, payload, " ".join(str(v) for v in values)


def _cmd_cfg_member(wb: Workbench, ns) -> tuple[int, dict, str]:
    grammar = _grammar(wb)
    word = _parse_word(ns.word, grammar.alphabet)
    bit = member(grammar, word)
    payload = {"command": "cfg-member", "word": list(word), "member": bit}
    return (0 if bit else 1), payload, str(bit)


def _cmd_cfg_equiv(wb: Workbench, ns) -> tuple[int, dict, str]:
    grammar = _grammar(wb)
    from .cfg import cfg_signature

    left = term_from_string(ns.left, cfg_signature(), grammar.nonterminals)
    right = term_from_string(ns.right, cfg_signature(), grammar.nonterminals)
    result = equiv_upto(grammar, left, right, ns.maxlen)
    payload = {
        "command": "cfg-equiv",
        "maxlen": ns.maxlen,
        "equivalent": result.equivalent,
        "counterexample": (None if result.counterexample is None
                           else list(result.counterexample)),
    }
    return (0 if result.equivalent else 1), payload, str(result)


def _cmd_quotient_commute(wb: Workbench, ns) -> tuple[int, dict, str]:
    sys_ = _system(wb)
    if sys_.theory is None:
        raise MissingSection("quotient-commute needs a theory block")
    report = quotient_commute_check(sys_, ns.max_size, ns.depth)
    payload = {
        "command": "quotient-commute",
        "checked": report.checked,
        "ok": report.ok,
        "violations": [
            {"term": v.term, "word": v.word, "kind": v.kind,
             "plain": v.plain, "quotient": v.quotient}
            for v in report.violations
        ],
    }
    lines = [f"checked {report.checked} term/word pairs; "
             f"{len(report.violations)} violations"]
    for v in report.violations:
        lines.append(f"  {v.term} @ {v.word or 'eps'}: {v.kind} "
                     f"{v.plain} vs {v.quotient}")
    return (0 if report.ok else 1), payload, "\n".join(lines)


def _fmt_side(side) -> list[str]:
    if isinstance(side, list) and side and isinstance(side[0], tuple):
        return ["".join(w) for w in side]
    if isinstance(side, list):
        return [str(v) for v in side]
    return [str(side)]


def _cmd_algebra_check(wb: Workbench, ns) -> tuple[int, dict, str]:
    sys_ = _system(wb)
    if sys_.theory is None:
        raise MissingSection("algebra-check needs a theory block")
    outer = term_from_string(ns.outer, sys_.law.signature, sys_.variables)
    report = induced_algebra_check(sys_, outer, horizon=ns.horizon)
    operational = _fmt_side(report.operational)
    induced = _fmt_side(report.induced)
    payload = {
        "command": "algebra-check",
        "outer": format_term(outer),
        "horizon": ns.horizon,
        "ok": report.ok,
        "operational": operational,
        "induced": induced,
    }
    text = (f"{'agree' if report.ok else 'DISAGREE'}\n"
            f"operational {' '.join(operational) or '(empty)'}\n"
            f"induced     {' '.join(induced) or '(empty)'}")
    return (0 if report.ok else 1), payload, text


_COMMANDS = {
    "check-preservation": _cmd_check_preservation,
    "run": _cmd_run,
    "stream": _cmd_stream,
    "cfg-member": _cmd_cfg_member,
    "cfg-equiv": _cmd_cfg_equiv,
    "quotient-commute": _cmd_quotient_commute,
    "algebra-check": _cmd_algebra_check,
}


def schema_path():
    """Filesystem path of the bundled JSON report schema."""
    return resources.files("lawbench") / "schema" / "report.schema.json"


def run(argv=None) -> int:
    try:
        ns = _build_parser().parse_args(argv)
        wb = load(ns.file)
        code, payload, text = _COMMANDS[ns.command](wb, ns)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except LawbenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    if ns.as_json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(run())
