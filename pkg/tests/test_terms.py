"""Free terms: substitution is a monad, enumeration is complete."""

import itertools
from fractions import Fraction

import hypothesis.strategies as st
import pytest
from hypothesis import given

from lawbench.errors import ArityMismatch, SignatureMismatch, UnboundVariable
from lawbench.polynomials import Poly
from lawbench.terms import (
    App,
    Const,
    ConstantFamily,
    Signature,
    Var,
    enumerate_terms,
    format_term,
    positions,
    replace_at,
    substitute,
    subterm_at,
    term_size,
    variables,
)

# ---------------------------------------------------------------- oracles

SIG = Signature(
    (("+", 2), ("*", 2), ("X", 0)),
    (ConstantFamily("c", samples=(Fraction(0), Fraction(1))),),
)


def brute_force_terms(signature, names, max_size):
    """All terms up to max_size by blunt recursion over node counts.

    Written independently of enumerate_terms: builds sets, no ordering,
    no composition tricks.
    """
    leaves = set()
    for v in names:
        leaves.add(Var(v))
    for sym, k in signature.ops:
        if k == 0:
            leaves.add(App(sym))
    for fam in signature.families:
        for s in fam.samples:
            leaves.add(Const(fam.name, s))

    def of_size(n):
        if n == 1:
            return set(leaves)
        out = set()
        for sym, k in signature.ops:
            if k == 0:
                continue
            for sizes in itertools.product(range(1, n), repeat=k):
                if sum(sizes) != n - 1:
                    continue
                pools = [of_size(s) for s in sizes]
                for args in itertools.product(*pools):
                    out.add(App(sym, args))
        return out

    everything = set()
    for n in range(1, max_size + 1):
        everything |= of_size(n)
    return everything


small_terms = list(enumerate_terms(SIG, {"v", "u"}, 4))


def term_strategy(names, depth=3):
    leaf = st.one_of(
        st.sampled_from([Var(n) for n in names]),
        st.just(App("X")),
        st.sampled_from([Const("c", 0), Const("c", 1)]),
    )
    return st.recursive(
        leaf,
        lambda sub: st.builds(
            App, st.sampled_from(["+", "*"]), st.tuples(sub, sub)
        ),
        max_leaves=2 ** depth,
    )


# ------------------------------------------------------------------ tests


def test_substitution_left_unit():
    # substituting into a bare variable just looks it up
    mapping = {"v": App("+", (Var("a"), Var("b")))}
    assert substitute(Var("v"), mapping) == mapping["v"]


def test_substitution_right_unit_on_all_small_terms():
    for t in enumerate_terms(SIG, {"v", "u", "w"}, 6):
        identity = {x: Var(x) for x in variables(t)}
        assert substitute(t, identity) == t


def test_substitution_associativity_on_all_small_terms():
    f = {"v": App("*", (Var("p"), Var("q"))), "u": Var("p"), "w": App("X")}
    g = {"p": App("+", (Var("r"), App("X"))), "q": Var("r")}
    for t in enumerate_terms(SIG, {"v", "u", "w"}, 6):
        composed = {x: substitute(f[x], g) for x in f}
        lhs = substitute(substitute(t, f), g)
        assert lhs == substitute(t, composed)


@given(term_strategy(["v", "u"]), term_strategy(["p"]), term_strategy(["p"]))
def test_substitution_associativity_random(t, s1, s2):
    f = {"v": s1, "u": s2}
    g = {"p": App("X")}
    composed = {x: substitute(f[x], g) for x in f}
    assert substitute(substitute(t, f), g) == substitute(t, composed)


def test_substitute_requires_total_mapping():
    with pytest.raises(UnboundVariable):
        substitute(App("+", (Var("v"), Var("u"))), {"v": App("X")})


def test_substitute_validates_against_signature():
    bad = {"v": App("+", (Var("a"),))}  # arity violation smuggled in
    with pytest.raises(SignatureMismatch):
        substitute(Var("v"), bad, signature=SIG)


def test_enumeration_matches_brute_force():
    got = list(enumerate_terms(SIG, {"v", "u"}, 4))
    assert len(got) == len(set(got)), "enumeration emitted a duplicate"
    assert set(got) == brute_force_terms(SIG, {"v", "u"}, 4)


def test_enumeration_is_ordered_by_size():
    sizes = [term_size(t) for t in small_terms]
    assert sizes == sorted(sizes)


def test_variables_first_occurrence_order():
    t = App("+", (Var("b"), App("*", (Var("a"), Var("b")))))
    assert variables(t) == ("b", "a")


def test_signature_validate_reports_arity():
    with pytest.raises(ArityMismatch):
        SIG.validate(App("+", (Var("v"),)))


def test_constant_poly_index_collapses():
    assert Const("c", Poly.const(2)) == Const("c", Fraction(2))
    assert Const("c", 2).index == Fraction(2)
    sym = Const("c", Poly.atom("a"))
    assert isinstance(sym.index, Poly)


def test_positions_and_replace_roundtrip():
    t = App("+", (App("X"), App("*", (Var("v"), Const("c", 1)))))
    for pos in positions(t):
        assert replace_at(t, pos, subterm_at(t, pos)) == t
    assert replace_at(t, (1, 0), App("X")) == App(
        "+", (App("X"), App("*", (App("X"), Const("c", 1))))
    )


def test_format_term_minimal_parentheses():
    t = App("+", (Var("v"), App("+", (Var("u"), Var("w")))))
    assert format_term(t) == "v + u + w"
    t2 = App("+", (App("+", (Var("v"), Var("u"))), Var("w")))
    assert format_term(t2) == "(v + u) + w"
    t3 = App("*", (Var("v"), App("+", (Var("u"), Var("w")))))
    assert format_term(t3) == "v * (u + w)"
    assert format_term(Const("c", Fraction(1, 2))) == "[1/2]"
