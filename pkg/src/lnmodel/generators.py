"""Seeded random signatures, chains, formulas and assignments for test suites."""

from __future__ import annotations

import itertools
import random

from .fulfillment import LnModel
from .logic import (
    And,
    App,
    Atom,
    Const,
    Eq,
    Exists,
    Forall,
    Formula,
    Not,
    Or,
    Signature,
    Term,
    Var,
    free_vars,
    length,
)
from .structures import PartialStructure

SMALL_SIGNATURES = (
    Signature(relations=(("P", 1),), constants=("c",)),
    Signature(relations=(("P", 1), ("R", 2)), constants=("c",)),
    Signature(relations=(("R", 2),), functions=(("f", 1),), constants=("c",)),
    Signature(relations=(("P", 1),), functions=(("f", 1),), constants=("c", "d")),
    Signature(relations=(("P", 1), ("R", 2))),
)


def random_chain(rng: random.Random, sig: Signature, n: int, max_domain: int = 4) -> LnModel:
    """Nested domains inside ``range(max_domain)`` with restricted interpretations.

    Function values for a tuple first available at level ``l`` are placed in
    level ``l + 1`` (or left undefined at the top), which is exactly what the
    chain condition requires.
    """
    universe = list(range(max_domain))
    top_size = rng.randint(1, max_domain)
    top = sorted(rng.sample(universe, top_size))
    sizes = sorted(rng.randint(1, top_size) for _ in range(n - 1)) + [top_size]
    order = top[:]
    rng.shuffle(order)
    domains = [frozenset(order[:s]) for s in sizes]
    level_of = {x: min(l for l, d in enumerate(domains) if x in d) for x in top}

    consts = {c: rng.choice(sorted(domains[0])) for c in sig.constants}
    rels = {}
    for r, arity in sig.relations:
        rels[r] = {t for t in itertools.product(top, repeat=arity) if rng.random() < 0.4}
    graph = {}
    for fn, arity in sig.functions:
        tab = {}
        for t in itertools.product(top, repeat=arity):
            lvl = max(level_of[x] for x in t)
            if lvl + 1 < n:
                tab[t] = rng.choice(sorted(domains[lvl + 1]))
            elif rng.random() < 0.6:
                tab[t] = rng.choice(top)
        graph[fn] = tab
    levels = []
    for d in domains:
        levels.append(
            PartialStructure(
                sig,
                d,
                consts,
                {r: [t for t in ts if all(x in d for x in t)] for r, ts in rels.items()},
                {fn: {t: v for t, v in tab.items() if v in d and all(x in d for x in t)} for fn, tab in graph.items()},
            )
        )
    return LnModel(levels)


def random_term(rng: random.Random, sig: Signature, scope: list[str], size: int) -> Term:
    leaves = [Var(v) for v in scope] + [Const(c) for c in sig.constants]
    unary = [(f, a) for f, a in sig.functions if a <= size - 1]
    if size <= 1 or not unary or rng.random() < 0.5:
        return rng.choice(leaves)
    fn, arity = rng.choice(unary)
    budget = size - 1
    args = []
    for k in range(arity):
        part = max(1, budget // (arity - k))
        args.append(random_term(rng, sig, scope, part))
        budget -= part
    return App(fn, tuple(args))


def random_formula(
    rng: random.Random,
    sig: Signature,
    free: list[str],
    max_length: int = 14,
    max_depth: int = 2,
) -> Formula:
    """A formula with free variables among ``free``; token length <= ``max_length``."""
    counter = itertools.count()

    def atom(scope, budget):
        if not scope and not sig.constants:
            raise _Retry
        choices = [r for r in sig.relations if r[1] + 1 <= budget]
        if choices and rng.random() < 0.6:
            r, arity = rng.choice(choices)
            return Atom(r, tuple(random_term(rng, sig, scope, 1 if budget < 4 else 2) for _ in range(arity)))
        return Eq(random_term(rng, sig, scope, 1), random_term(rng, sig, scope, 2 if budget >= 4 else 1))

    def build(scope, budget, quants):
        kind = rng.random()
        if budget >= 3 and quants > 0 and kind < 0.35:
            var = f"v{next(counter)}"
            q = Exists if rng.random() < 0.5 else Forall
            return q(var, build(scope + [var], budget - 2, quants - 1))
        if budget >= 7 and kind < 0.65:
            left_budget = rng.randint(3, budget - 4)
            cls = And if rng.random() < 0.5 else Or
            lq = rng.randint(0, quants)
            return cls(build(scope, left_budget, lq), build(scope, budget - 1 - left_budget, quants - lq))
        if budget >= 4 and kind < 0.8:
            return Not(build(scope, budget - 1, quants))
        return atom(scope, budget)

    while True:
        try:
            f = build(list(free), max_length, max_depth)
        except _Retry:
            continue
        if length(f) <= max_length and (free or sig.constants or _has_quantifier(f)):
            return f


class _Retry(Exception):
    pass


def _has_quantifier(f):
    return isinstance(f, (Exists, Forall)) or any(
        _has_quantifier(getattr(f, k)) for k in ("body", "left", "right") if hasattr(f, k)
    )


def random_sentence(rng: random.Random, sig: Signature, max_length: int = 14, max_depth: int = 2) -> Formula:
    while True:
        f = random_formula(rng, sig, [], max_length, max_depth)
        if not free_vars(f):
            return f


def collapse_instance(rng: random.Random, max_domain: int = 4):
    """A random chain and sentence meeting the collapse preconditions."""
    from .logic import depth

    while True:
        sig = rng.choice(SMALL_SIGNATURES)
        n = rng.randint(3, 5)
        v = random_chain(rng, sig, n, max_domain)
        f = random_sentence(rng, sig, 14, min(2, n - 2))
        if depth(f) <= n - 2 and v.fulfills(f).defined:
            return v, f


def case_rng(seed: int, index: int) -> random.Random:
    """Independent stream per (seed, case) so sharding never changes a case."""
    return random.Random(seed * 1_000_003 + index)


def end_extension_case(rng: random.Random):
    """A chain, its one-level end extension, a formula and an assignment.

    Returns None when the draw misses the preconditions: depth below
    ``n - 1`` and every instantiated term defined in ``A_0``.
    """
    from .logic import depth, instantiable_terms
    from .structures import eval_term

    sig = rng.choice(SMALL_SIGNATURES)
    n = rng.randint(2, 4)
    big = random_chain(rng, sig, n + 1)
    v = big.slice(0, n - 1)
    f = random_formula(rng, sig, ["x"] if rng.random() < 0.6 else [], 14, 2)
    if depth(f) >= n - 1:
        return None
    a = {x: rng.choice(sorted(v[0].elements())) for x in free_vars(f)}
    if any(eval_term(v[0], t, a) is None for t in instantiable_terms(f)):
        return None
    return v, big, f, a
