"""Shrinking a chain while preserving fulfillment of the subformulas of a sentence.

``f_collapse`` grows a universe ``U`` to a fixpoint and takes ``B_l = U ∩ A_l``
at every level.  The closure steps are:

* one application of every function symbol to tuples from ``B_l``;
* every subterm value of a term of the sentence that is defined in ``A_l``
  under an assignment from ``B_l``;
* the least existential witness and the least universal counterexample for
  every quantified subformula, every parameter tuple from ``U`` and every
  suffix of the chain;
* both minimal fulfilling elements whenever deleting the second versus the
  third index of a subsequence changes them.

The result is then renamed onto an initial segment of the naturals.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb

from .fulfillment import ChainViolation, LnModel, Verdict, is_isomorphic_chain, transport
from .logic import (
    Exists,
    Forall,
    Formula,
    depth,
    formula_terms,
    free_vars,
    length,
    subformulas,
    subterms,
    term_vars,
)
from .structures import PartialStructure, Structure, eval_term


class CollapsePrecondition(ValueError):
    pass


@dataclass(frozen=True)
class ColParams:
    i: int
    j: int
    k: int
    l: int

    def __post_init__(self):
        if min(self.i, self.j, self.k, self.l) < 0:
            raise ValueError("Col parameters must be nonnegative")


def col_bound(i: int, j: int, k: int, l: int, cap: int | None = None) -> int:
    """Upper bound on the size of level ``i`` of a collapse.

    ``j`` is the largest function arity, ``k`` the length of the sentence and
    ``l`` the size of the signature.  The exact value explodes after a few
    levels, so with ``cap`` the arithmetic saturates at ``cap + 1``, which is
    enough to decide ``size <= Col``.
    """
    ColParams(i, j, k, l)
    top = None if cap is None else cap + 1

    def sat(x):
        return x if top is None else min(x, top)

    def power(x, e):
        if top is not None and x > 1 and e * (x.bit_length() - 1) > top.bit_length():
            return top
        return sat(x**e)

    c = max(l, 1)
    pairs = comb(k, 2)
    for step in range(i):
        star = sat(c + power(c, j) * l)
        star2 = sat(star + pairs * power(star, k))
        subsets = sum(comb(step, m) for m in range(step))
        c = sat(star + pairs * power(star, k) + subsets * power(star2, k) * pairs * 2)
    return c


def describe_bound(x: int):
    """JSON-friendly form: the integer itself, or its bit length once it is huge."""
    return x if x <= 2**53 else f">2^{x.bit_length() - 2}"


# ------------------------------------------------------------------ building


def induced(s: Structure, universe) -> PartialStructure:
    """Restriction of ``s`` to ``universe``; a function is defined iff its value stays inside."""
    u = sorted(set(universe))
    uset = set(u)
    sig = s.sig
    rels = {}
    for r, arity in sig.relations:
        rels[r] = [t for t in itertools.product(u, repeat=arity) if s.holds(r, t)]
    funcs = {}
    for fn, arity in sig.functions:
        tab = {}
        for t in itertools.product(u, repeat=arity):
            val = s.apply(fn, t)
            if val is not None and val in uset:
                tab[t] = val
        funcs[fn] = tab
    return PartialStructure(sig, u, {c: s.const(c) for c in sig.constants}, rels, funcs)


def _levels(v: LnModel, universe, bottom=None) -> list[list[int]]:
    out = [sorted(x for x in universe if x in level) for level in v.levels]
    if bottom is not None:
        out[0] = sorted(bottom)
    return out


def _assignments(names, pool):
    names = sorted(names)
    for values in itertools.product(pool, repeat=len(names)):
        yield dict(zip(names, values))


def min_fulfilling(v: LnModel, f: Formula) -> int | None:
    """Least element of the top model fulfilling the one-variable formula ``f``."""
    (x,) = free_vars(f)
    for b in v.top.elements():
        if v.fulfills(f, {x: b}).is_true:
            return b
    return None


def deletion_pairs(n: int):
    """Index tuples ``i_0 < ... < i_m`` (``m >= 2``) with the two deleted variants."""
    for size in range(3, n + 1):
        for idx in itertools.combinations(range(n), size):
            yield idx, idx[:2] + idx[3:], idx[:1] + idx[2:]


def discrepancy_witnesses(v: LnModel, f: Formula) -> dict:
    """Map (index tuple, subformula) to the two differing minimal elements."""
    unary = sorted((g for g in subformulas(f) if len(free_vars(g)) == 1), key=lambda g: (length(g), repr(g)))
    out = {}
    for idx, drop2, drop1 in deletion_pairs(len(v)):
        a = v.subsequence(drop2)
        b = v.subsequence(drop1)
        for g in unary:
            x1, x2 = min_fulfilling(a, g), min_fulfilling(b, g)
            if x1 != x2:
                out[(idx, g)] = (x1, x2)
    return out


def _close(v: LnModel, f: Formula, universe: set, bottom=None) -> set:
    """One round of every closure step."""
    new = set(universe)
    levels = _levels(v, universe, bottom)
    n = len(v)
    sig = v.sig
    for l in range(n - 1):
        for fn, arity in sig.functions:
            for t in itertools.product(levels[l], repeat=arity):
                val = v[l + 1].apply(fn, t)
                if val is not None:
                    new.add(val)
    terms = formula_terms(f)
    for l in range(n):
        for t in terms:
            for a in _assignments(term_vars(t), levels[l]):
                if eval_term(v[l], t, a) is None:
                    continue
                for s in subterms(t):
                    new.add(eval_term(v[l], s, a))
    pool = sorted(universe)
    quantified = [g for g in subformulas(f) if isinstance(g, (Exists, Forall))]
    for start in range(n):
        for g in quantified:
            for a in _assignments(free_vars(g), pool):
                key = tuple(sorted(a.items()))
                i, _ = v._least_index(start, g, key)
                if i is None:
                    continue
                if isinstance(g, Exists):
                    w = v._witness(start, i, g, a)
                else:
                    w = v._counterexample(start, g, a)
                if w is not None:
                    new.add(w)
    return new


@dataclass
class CollapseResult:
    """A collapsed chain with the chosen universes and the renaming."""

    collapsed: LnModel
    universes: list[list[int]]
    renaming: dict[int, int]
    renamed: LnModel
    report: dict = field(default_factory=dict)

    @property
    def universe(self) -> list[int]:
        return sorted(self.renaming)

    def to_json(self) -> dict:
        return {
            "universes": self.universes,
            "renaming": [[a, b] for a, b in sorted(self.renaming.items())],
            "report": self.report,
        }


def result_from_universe(v: LnModel, universe, bottom=None) -> CollapseResult:
    """Assemble the chain ``U ∩ A_l`` for an arbitrary universe, validating nothing.

    ``bottom`` overrides the level-0 universe.
    """
    universes = _levels(v, universe, bottom)
    collapsed = LnModel([induced(level, u) for level, u in zip(v.levels, universes)], check=False)
    renaming = {x: k for k, x in enumerate(sorted(set(universe)))}
    return CollapseResult(collapsed, universes, renaming, transport(collapsed, renaming))


def f_collapse(v: LnModel, f: Formula, seed_bottom: bool = False) -> CollapseResult:
    """Collapse ``v`` for the sentence ``f``.

    By default every level is ``U ∩ A_l``, which makes verdict equivalence
    exact but lets level 0 grow past the constants.  With ``seed_bottom``
    level 0 is only the seed (constants, or the least element of ``A_0``),
    matching the size bound for level 0 at the price of occasional verdict
    mismatches for parameters that sit in ``A_0`` but enter ``B`` later.
    """
    if free_vars(f):
        raise CollapsePrecondition("f_collapse needs a sentence")
    if depth(f) > len(v) - 2:
        raise CollapsePrecondition(f"depth {depth(f)} exceeds n - 2 = {len(v) - 2}")
    if not v.fulfills(f).defined:
        raise CollapsePrecondition("fulfillment of the sentence is undefined on this chain")
    consts = v.sig.constants
    seed = {v[0].const(c) for c in consts} if consts else {min(v[0].elements())}
    bottom = seed if seed_bottom else None
    universe = set(seed)
    for pair in discrepancy_witnesses(v, f).values():
        universe.update(x for x in pair if x is not None)
    while True:
        grown = _close(v, f, universe, bottom)
        if grown == universe:
            break
        universe = grown
    return result_from_universe(v, universe, bottom)


# ---------------------------------------------------------------- auditing


def verify_collapse(v: LnModel, r: CollapseResult, f: Formula, suffixes: bool = True) -> dict:
    """Re-check every condition independently; the report lists violations."""
    sig = v.sig
    n = len(v)
    k = length(f)
    b = r.collapsed
    failures: list[str] = []

    c1 = len(r.universes[0]) <= max(sig.size, 1)
    if not c1:
        failures.append(f"condition 1: |B_0| = {len(r.universes[0])} > {max(sig.size, 1)}")

    sizes = [len(u) for u in r.universes]
    bounds = [col_bound(i, sig.max_arity, k, sig.size, cap=2**64) for i in range(n)]
    c2 = all(s <= cap for s, cap in zip(sizes, bounds))
    if not c2:
        failures.append(f"condition 2: sizes {sizes} exceed bounds")

    c3 = all(x in level for u, level in zip(r.universes, v.levels) for x in u)
    c3 = c3 and all(b[l].elements() == u for l, u in enumerate(r.universes))
    if not c3:
        failures.append("condition 3: a collapsed level is not inside the original level")

    pool = sorted(set(itertools.chain.from_iterable(r.universes)))
    mismatches = []
    starts = range(n) if suffixes else [0]
    for g in sorted(subformulas(f), key=lambda g: (length(g), repr(g))):
        for a in _assignments(free_vars(g), pool):
            for s in starts:
                x, y = v.fulfills(g, a, start=s), b.fulfills(g, a, start=s)
                if x != y:
                    mismatches.append((s, g, a, x, y))
    c4 = not mismatches
    if not c4:
        s, g, a, x, y = mismatches[0]
        failures.append(f"condition 4: {len(mismatches)} mismatches, first at start {s}: {g} {a} {x} vs {y}")

    missing = []
    for (idx, g), pair in discrepancy_witnesses(v, f).items():
        for x in pair:
            if x is not None and (x not in pool or x not in r.universes[idx[-1]]):
                missing.append((idx, g, x))
    c5 = not missing
    if not c5:
        failures.append(f"condition 5: {len(missing)} discrepancy witnesses missing, first {missing[0]}")

    try:
        LnModel(b.levels)
        chain = True
    except ChainViolation as e:
        chain = False
        failures.append(f"collapsed levels {e.index} and {e.index + 1} do not form a chain")

    iso = is_isomorphic_chain(b, r.renamed) is not None
    if not iso:
        failures.append("renamed chain is not isomorphic to the collapsed chain")

    return {
        "conditions": {"1": c1, "2": c2, "3": c3, "4": c4, "5": c5},
        "is_chain": chain,
        "renaming_isomorphic": iso,
        "sizes": sizes,
        "bounds": [describe_bound(x) for x in bounds],
        "failures": failures,
        "ok": not failures,
    }


def verdict_table(v: LnModel, f: Formula, pool) -> dict:
    """Verdicts of every subformula on every tuple from ``pool`` (full chain)."""
    out: dict[tuple, Verdict] = {}
    for g in subformulas(f):
        for a in _assignments(free_vars(g), sorted(pool)):
            out[(g, tuple(sorted(a.items())))] = v.fulfills(g, a)
    return out
