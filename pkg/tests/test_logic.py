import random
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from lnmodel.arithmetic import q_axioms
from lnmodel.generators import SMALL_SIGNATURES, random_formula
from lnmodel.logic import (
    ARITHMETIC,
    And,
    App,
    ArityMismatch,
    Atom,
    Const,
    Eq,
    Exists,
    Forall,
    Not,
    Or,
    Signature,
    SyntaxError_,
    UndeclaredSymbol,
    Var,
    depth,
    enumerate_formulas,
    free_vars,
    length,
    numeral,
    parse_formula,
    parse_term,
    render_formula,
    subformula_bound,
    subformulas,
)

PC = Signature(relations=(("P", 1),), constants=("c",))


def test_parse_q1_shape():
    f = parse_formula("forall x. !(0 = S(x))")
    assert f == Forall("x", Not(Eq(Const("0"), App("S", (Var("x"),)))))


def test_parse_atomic_equality():
    f = parse_formula("0 = 0")
    assert f == Eq(Const("0"), Const("0"))
    assert depth(f) == 0


def test_implication_is_desugared():
    f = parse_formula("P(c) -> P(c)", PC)
    p = Atom("P", (Const("c"),))
    assert f == Or(Not(p), p)


def test_implication_associates_right():
    f = parse_formula("P(c) -> P(c) -> P(c)", PC)
    p = Atom("P", (Const("c"),))
    assert f == Or(Not(p), Or(Not(p), p))


def test_bounded_quantifiers():
    e = parse_formula("exists y < S(0). y = y")
    assert e == Exists("y", And(Atom("<", (Var("y"), numeral(1))), Eq(Var("y"), Var("y"))))
    a = parse_formula("forall y < 0. y = y")
    assert a == Forall("y", Or(Not(Atom("<", (Var("y"), Const("0")))), Eq(Var("y"), Var("y"))))


def test_numerals_and_precedence():
    assert parse_term("2") == numeral(2)
    t = parse_term("x+y*z")
    assert t == App("+", (Var("x"), App("*", (Var("y"), Var("z")))))


def test_syntax_error_reports_position():
    with pytest.raises(SyntaxError_) as info:
        parse_formula("x = ")
    assert info.value.pos == 4


def test_undeclared_symbol():
    with pytest.raises(UndeclaredSymbol):
        parse_formula("Q(x)")


def test_arity_mismatch():
    with pytest.raises(ArityMismatch):
        parse_formula("S(x, x) = 0")


def test_q_axiom_depths():
    assert [depth(f) for f in q_axioms()] == [1, 2, 2, 1, 2, 1, 2]


def test_lengths():
    assert length(parse_formula("0 = 0")) == 3
    # forall x ! = 0 S x
    assert length(q_axioms()[0]) == 7


def test_negation_adds_one_token():
    f = q_axioms()[6]
    assert length(Not(f)) == length(f) + 1


def test_render_examples():
    q = q_axioms()
    assert render_formula(q[3]) == "forall x. x+0 = x"
    assert render_formula(q[6]) == "forall x. forall y. x*S(y) = x*y+x"
    assert parse_formula(render_formula(q[3])) == q[3]
    zero = parse_formula("0 = 0")
    assert parse_formula(render_formula(zero)) == zero


def test_subformulas_small_cases():
    p = Atom("P", (Const("c"),))
    q = Atom("P", (Var("x"),))
    assert subformulas(p) == {p}
    assert subformulas(And(p, q)) == {And(p, q), p, q}


def test_subformula_count_q7():
    # x*S(y) = x*y+x, its universal closure in y, and the outer closure
    q7 = q_axioms()[6]
    assert len(subformulas(q7)) == 3


def test_enumeration_prefix_and_first():
    assert enumerate_formulas(ARITHMETIC, 0) == []
    first = enumerate_formulas(ARITHMETIC, 5)
    assert [render_formula(f) for f in first] == ["0 < x", "0 = x", "x < 0", "x < x", "x = 0"]
    longer = enumerate_formulas(ARITHMETIC, 40)
    assert longer[:5] == first
    assert len(set(longer)) == 40
    assert all(free_vars(f) == {"x"} for f in longer)
    assert [length(f) for f in longer] == sorted(length(f) for f in longer)


def formulas():
    def build(seed, sig_index, nfree):
        rng = random.Random(seed)
        sig = (SMALL_SIGNATURES + (ARITHMETIC,))[sig_index]
        free = ["x", "y"][:nfree]
        return sig, random_formula(rng, sig, free, max_length=16, max_depth=3)

    return st.builds(build, st.integers(0, 10**9), st.integers(0, len(SMALL_SIGNATURES)), st.integers(0, 2))


@settings(max_examples=500, deadline=None)
@given(formulas())
def test_render_parse_round_trip(case):
    sig, f = case
    assert parse_formula(render_formula(f), sig) == f


@settings(max_examples=300, deadline=None)
@given(formulas())
def test_measures(case):
    _, f = case
    assert 0 <= depth(f) <= length(f)
    assert len(subformulas(f)) <= subformula_bound(f) == comb(length(f), 2)
    if isinstance(f, (And, Or)):
        assert depth(f) == depth(f.left) + depth(f.right)
    assert depth(Exists("z", f)) == depth(f) + 1
