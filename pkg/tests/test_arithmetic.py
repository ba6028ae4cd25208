import itertools

import pytest

from lnmodel.arithmetic import (
    NotSquareIncreasing,
    check_q,
    enlarge_with_constants,
    first_primes,
    lnp,
    make_sq_models,
    pa_pf,
    prime_code_psi,
    q_axioms,
    validate_sq_inc,
)
from lnmodel.fulfillment import LnModel
from lnmodel.logic import (
    ARITHMETIC,
    Eq,
    Not,
    Var,
    depth,
    enumerate_formulas,
    free_vars,
    numeral,
    parse_formula,
    render_formula,
    subformulas,
)
from lnmodel.structures import PartialStructure, make_segment, satisfies


def test_validate_sq_inc():
    assert validate_sq_inc((2, 5, 26, 677))
    assert not validate_sq_inc((2, 4))
    assert validate_sq_inc(())
    assert validate_sq_inc((7,))
    assert not validate_sq_inc((5, 3))


def test_make_sq_models():
    assert len(make_sq_models((2, 5, 26))) == 3
    v = make_sq_models((2, 5, 26, 677, 458330))
    assert [s.n for s in v] == [2, 5, 26, 677, 458330]
    with pytest.raises(NotSquareIncreasing):
        make_sq_models((3, 8))
    with pytest.raises(NotSquareIncreasing):
        make_sq_models(())


def test_sq_models_are_chains():
    for ms in [(2, 5, 26), (3, 10, 101, 10202), (2, 5, 30, 901)]:
        v = make_sq_models(ms)
        LnModel(v.levels)


def test_q_axioms_profile():
    q = q_axioms()
    assert len(q) == 7
    assert render_formula(q[3]) == "forall x. x+0 = x"
    assert [depth(f) for f in q] == [1, 2, 2, 1, 2, 1, 2]
    assert render_formula(q[0]) == "forall x. !(0 = S(x))"


@pytest.mark.parametrize("ms", [(2, 5, 26), (2, 5, 26, 677), (3, 10, 101)])
def test_check_q(ms):
    r = check_q(make_sq_models(ms))
    assert r.all_true
    assert r.hypothesis_met
    assert len(r.verdicts) == 8


def test_check_q_flags_hypothesis():
    r = check_q(LnModel([make_segment(m) for m in (1, 2, 5)]))
    assert not r.hypothesis_met
    assert any("m0" in note for note in r.notes)
    short = check_q(LnModel([make_segment(m) for m in (2, 3)]))
    assert short.verdicts["q7"].status == "undefined"
    assert not short.hypothesis_met


def test_lnp_template():
    f = parse_formula("x = x")
    g = lnp(f)
    assert parse_formula(render_formula(g)) == g
    assert not free_vars(g)
    assert render_formula(g) == (
        "!(exists x. x = x) | (exists x. forall y. (x = x) & (!(y = y) | ((x < y) | (x = y))))"
    )


def test_lnp_depth():
    # the template copies f three times: under the premise, the conclusion and the y-instance
    for f in enumerate_formulas(ARITHMETIC, 60):
        assert depth(lnp(f)) == 3 * depth(f) + 3


def test_lnp_fresh_variable():
    f = parse_formula("exists y. y = x")
    g = lnp(f)
    assert parse_formula(render_formula(g)) == g
    assert not free_vars(g)


def test_lnp_rejects():
    with pytest.raises(ValueError):
        lnp(parse_formula("0 = 0"))
    with pytest.raises(ValueError):
        lnp(parse_formula("x = y"))


def test_pa_pf():
    k = 5
    axioms = pa_pf(k)
    assert len(axioms) == 7 + k
    assert all(not free_vars(f) for f in axioms)


def test_first_primes():
    assert first_primes(3) == [2, 3, 5]
    assert first_primes(8) == [2, 3, 5, 7, 11, 13, 17, 19]


def test_prime_code_psi_expansion():
    psi = prime_code_psi([parse_formula("x = x")], cap=2)
    assert free_vars(psi) == {"x"}
    assert parse_formula(render_formula(psi)) == psi
    eqs = {render_formula(g) for g in subformulas(psi) if isinstance(g, Eq) and g.left == Var("x")}
    assert eqs == {"x = S(0)", "x = S(S(0))", "x = S(S(0))*S(S(0))"}
    with pytest.raises(ValueError):
        prime_code_psi([parse_formula("x = x")] * 3, cap=20)
    with pytest.raises(ValueError):
        prime_code_psi([], cap=1)


def z4():
    dom = range(4)
    pairs = list(itertools.product(dom, repeat=2))
    return PartialStructure(
        ARITHMETIC,
        dom,
        {"0": 0},
        {"<": [(a, b) for a, b in pairs if a < b]},
        {
            "S": {(a,): (a + 1) % 4 for a in dom},
            "+": {(a, b): (a + b) % 4 for a, b in pairs},
            "*": {(a, b): (a * b) % 4 for a, b in pairs},
        },
    )


def test_psi_one_without_witnesses():
    m = z4()
    nothing = Not(Eq(Var("x"), Var("x")))
    psi = prime_code_psi([nothing], cap=2)
    assert satisfies(m, psi, {"x": 1}) is True
    # powers of 2 up to the cap are 1, 2 and 0 modulo 4
    assert satisfies(m, psi, {"x": 3}) is False
    two = prime_code_psi([nothing, nothing], cap=1)
    assert satisfies(m, two, {"x": 1}) is True


def test_enlarge_with_constants():
    assert enlarge_with_constants(ARITHMETIC, 0) == ARITHMETIC
    sig = enlarge_with_constants(ARITHMETIC, 4)
    assert sig.size == ARITHMETIC.size + 4
    m5 = make_segment(5, sig)
    assert m5.const("c_3") == 3
    f = parse_formula("c_3 = S(S(S(0)))", sig)
    assert make_sq_models((5, 26), sig).fulfills(f).is_true
    with pytest.raises(ValueError):
        enlarge_with_constants(sig, 2)


def test_numeral():
    assert render_formula(Eq(numeral(3), numeral(3))) == "S(S(S(0))) = S(S(S(0)))"
