import itertools
import random

import pytest

from lnmodel.arithmetic import make_sq_models
from lnmodel.fulfillment import LnModel
from lnmodel.logic import Signature, parse_formula
from lnmodel.ramsey import (
    BOUND_EXCEEDED,
    FOUND,
    NONE,
    BcpInstance,
    ChainColoring,
    ColoringPrecondition,
    ConstantRule,
    GuardExceeded,
    NameRule,
    PairRule,
    TableRule,
    TupleColoring,
    all_colorings,
    chain_key,
    chains_over,
    check_bcp_instance,
    completeness_probe,
    enumerate_ln_models,
    find_homog_subseq,
    find_homogeneous,
    homogeneous_oracle,
    is_bounded_coloring,
    is_homogeneous,
    is_homogeneous_chain,
    min_witness,
    ordered_family,
    ordered_structure,
    pair_coloring,
    ph_number,
    relational_chain_count,
    sq_inc_homogeneous,
    sq_inc_oracle,
)
from lnmodel.structures import PartialStructure

ORD = Signature(relations=(("<", 2),), constants=("0", "c_1"))
PC = Signature(relations=(("P", 1),), constants=("c",))


def valid(p, h, k):
    return h is not None and len(h) >= k and len(h) > min(h) and is_homogeneous(p, h)


def test_find_homogeneous_examples():
    p = TupleColoring.constant(1, 3)
    assert valid(p, [1, 2], 2)
    assert valid(p, find_homogeneous(p, 2), 2)
    big = TupleColoring.constant(2, 20)
    for k in range(1, 8):
        h = find_homogeneous(big, k)
        assert valid(big, h, k)
        assert valid(big, list(range(k, 2 * k + 1)), k)


def test_adversarial_coloring_has_no_set():
    found = 0
    for p in all_colorings(2, 2, 5):
        if homogeneous_oracle(p, 3) is None:
            assert find_homogeneous(p, 3) is None
            found += 1
    assert found > 0


def test_find_homogeneous_matches_oracle_small():
    for N in range(0, 6):
        for p in all_colorings(1, 2, N):
            for k in range(4):
                assert (find_homogeneous(p, k) is None) == (homogeneous_oracle(p, k) is None)
    rng = random.Random(2)
    for _ in range(100):
        N = rng.randint(2, 6)
        p = TupleColoring.from_function(2, 2, N, lambda t: rng.randrange(2))
        k = rng.randint(0, 4)
        got = find_homogeneous(p, k)
        assert (got is None) == (homogeneous_oracle(p, k) is None)
        if got is not None:
            assert valid(p, got, k)


def test_coloring_validation():
    with pytest.raises(ValueError):
        TupleColoring(1, 2, 2, {(0,): 0})
    with pytest.raises(ValueError):
        TupleColoring(1, 2, 1, {(0,): 5})


def test_ph_numbers():
    assert ph_number(1, 1, 1) == 1
    assert ph_number(1, 2, 2) == 3
    assert ph_number(1, 3, 2) == 5
    assert ph_number(2, 2, 2) == 2
    for k in range(1, 3):
        assert ph_number(1, k, 2) <= ph_number(1, k + 1, 2)
    with pytest.raises(GuardExceeded):
        ph_number(2, 4, 2, guard=1000)


def test_sq_inc_homogeneous():
    p = TupleColoring.constant(1, 30, sq_inc=True)
    assert sq_inc_homogeneous(p, 0, 1) == [2, 5, 26]
    assert sq_inc_homogeneous(p, 0, 30) is None
    rng = random.Random(4)
    for _ in range(60):
        N = rng.randint(3, 12)
        p = TupleColoring.from_function(1, 2, N, lambda t: rng.randrange(2), sq_inc=True)
        k, m = rng.randint(0, 1), rng.randint(0, 2)
        assert (sq_inc_homogeneous(p, k, m) is None) == (sq_inc_oracle(p, k, m) is None)


def test_min_witness():
    v = make_sq_models((2, 5, 26))
    assert min_witness(v, parse_formula("x = x")) == 0
    assert min_witness(v, parse_formula("0 < x")) == 1
    assert min_witness(v, parse_formula("0 < x"), order="top") == 1
    assert min_witness(v, parse_formula("!(x = x)")) is None


def test_pair_coloring():
    phi = parse_formula("0 < x")
    assert pair_coloring(make_sq_models((2, 5, 26, 677)), phi) == 0
    m = make_sq_models((2, 5, 26, 677))
    a, b, c = (ordered_structure(ORD, range(k)) for k in (2, 3, 5))
    dup = LnModel([a, b, b, c])
    assert pair_coloring(dup, parse_formula("x = x", ORD)) == 0
    # the universal range is the second level, M_5 on one side and M_26 on the other
    sensitive = parse_formula("forall y. y < 5 | x = 1")
    assert pair_coloring(m, sensitive) == 1
    with pytest.raises(ColoringPrecondition):
        pair_coloring(make_sq_models((2, 5)), phi)
    with pytest.raises(ColoringPrecondition):
        pair_coloring(m, parse_formula("!(x = x)"))


def test_ordered_family():
    fam = ordered_family(ORD, 4)
    assert len(fam) == 4
    assert all({0, 1} <= set(s.elements()) for s in fam)
    assert ordered_family(ORD, 1) == []


def test_bounded_colorings():
    phi = parse_formula("0 < x", ORD)
    fam = ordered_family(ORD, 5)
    pair = is_bounded_coloring(ChainColoring(3, phi, 2, 5, PairRule()), fam, 5)
    assert pair.ok and pair.checked_chains > 0
    const = is_bounded_coloring(ChainColoring(3, phi, 1, 5, ConstantRule()), fam, 4)
    assert const.ok
    names = is_bounded_coloring(ChainColoring(3, phi, 2, 5, NameRule()), fam, 4)
    assert not names.ok and names.counterexamples


def test_table_rule():
    phi = parse_formula("0 < x", ORD)
    fam = ordered_family(ORD, 4)
    chain = next(chains_over(fam, 3, strict=True))
    rule = TableRule({chain_key(chain): 1}, default=0)
    c = ChainColoring(3, phi, 2, 4, rule)
    assert c.color(LnModel(chain)) == 1
    with pytest.raises(ValueError):
        ChainColoring(3, parse_formula("0 = 0", ORD), 2, 4, rule)


def brute_force_homog(c, family, k, m):
    """Every strict chain of length exactly max(k, n, |A_0| + m + 1)."""
    for length in range(1, len(family) + 1):
        for chain in chains_over(family, length, strict=True):
            if length == max(k, c.n, len(chain[0]) + m + 1) and is_homogeneous_chain(c, chain) is not None:
                return chain
    return None


def test_find_homog_subseq():
    phi = parse_formula("0 < x", ORD)
    fam = ordered_family(ORD, 6)
    const = ChainColoring(3, phi, 1, 6, ConstantRule())
    out = find_homog_subseq(const, fam, 4, 1)
    assert out.status == FOUND and len(out.chain) >= 4
    assert is_homogeneous_chain(const, out.chain) == 0
    assert find_homog_subseq(const, fam, 3, 50).status == NONE
    assert find_homog_subseq(const, fam, 4, 1, bound=2).status == BOUND_EXCEEDED
    pair = ChainColoring(3, phi, 2, 6, PairRule())
    for k, m in [(3, 0), (4, 1), (5, 1), (5, 2)]:
        got = find_homog_subseq(pair, fam, k, m)
        expected = brute_force_homog(pair, fam, k, m)
        assert (got.status == FOUND) == (expected is not None)
        if got.status == FOUND:
            assert is_homogeneous_chain(pair, got.chain) == got.color


def test_check_bcp_instance():
    phi = parse_formula("0 < x", ORD)
    b = BcpInstance(r=1, n=3, sig=ORD, phi=phi, j=0, m=1, k=4, N=6)
    report = check_bcp_instance(b, lambda N: ordered_family(ORD, N))
    assert report.status == FOUND
    tiny = BcpInstance(r=1, n=3, sig=ORD, phi=phi, j=0, m=1, k=4, N=3)
    assert check_bcp_instance(tiny, lambda N: ordered_family(ORD, N)).status == "counterexample"
    with pytest.raises(GuardExceeded):
        check_bcp_instance(BcpInstance(r=1, n=3, sig=ORD, phi=phi, j=0, m=1, k=4), lambda N: [])
    with pytest.raises(ValueError):
        BcpInstance(r=1, n=3, sig=ORD, phi=phi, j=0, m=3, k=4)


def test_enumeration_counts():
    assert len(list(enumerate_ln_models(PC, 1, [0]))) == 2
    assert list(enumerate_ln_models(PC, 2, [])) == []
    for n in (1, 2, 3):
        for u in ([0], [0, 1], [0, 1, 2]):
            if n == 3 and len(u) == 3:
                continue
            assert len(list(enumerate_ln_models(PC, n, u))) == relational_chain_count(PC, n, u)
    rel = Signature(relations=(("R", 2),))
    assert len(list(enumerate_ln_models(rel, 2, [0, 1]))) == relational_chain_count(rel, 2, [0, 1])
    with pytest.raises(GuardExceeded):
        list(enumerate_ln_models(PC, 1, range(9)))


def test_enumeration_is_exact():
    seen = set()
    for v in enumerate_ln_models(PC, 2, [0, 1]):
        LnModel(v.levels)
        key = chain_key(v)
        assert key not in seen
        seen.add(key)


def test_completeness_probes():
    valid_ = completeness_probe(parse_formula("forall x. x = x", PC), 3, PC, [0, 1])
    assert valid_.sound and valid_.true == 28
    contra = completeness_probe(parse_formula("P(c) & !P(c)", PC), 3, PC, [0, 1])
    assert contra.true == 0 and contra.false == 28
    some = completeness_probe(parse_formula("exists x. P(x)", PC), 3, PC, [0, 1])
    assert (some.true, some.false) == (18, 10)
    m = PartialStructure(PC, [0], {"c": 0}, {"P": [(0,)]})
    assert LnModel([m, m, m]).fulfills(parse_formula("exists x. P(x)", PC)).is_true
    with pytest.raises(ValueError):
        completeness_probe(parse_formula("exists x. exists y. P(x)", PC), 2, PC, [0])


def test_chains_over_strict():
    fam = ordered_family(ORD, 4)
    loose = list(chains_over(fam, 2))
    strict = list(chains_over(fam, 2, strict=True))
    assert len(strict) < len(loose)
    assert all(a != b for a, b in strict)
    assert all(set(a.elements()) <= set(b.elements()) for a, b in itertools.chain(loose, strict))
