"""Finite partial structures.

Two representations share one interface: :class:`PartialStructure` stores
explicit tables, :class:`Segment` is the arithmetic structure on
``{0, ..., n-1}`` whose operations are defined exactly when the true result
stays below ``n``.  Segments compute definedness on demand, so chains with
levels of size 10**6 cost nothing to build.
"""

from __future__ import annotations

import itertools
import re
from typing import Iterable, Mapping

from .logic import (
    ARITHMETIC,
    ATOMIC,
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
    atom_terms,
)


class UnassignedVariable(KeyError):
    pass


class SignatureMismatch(ValueError):
    pass


class Structure:
    """Common read-only interface of partial structures."""

    sig: Signature

    def __contains__(self, x) -> bool:
        raise NotImplementedError

    def elements(self) -> list[int]:
        """Universe in ascending numeric order."""
        raise NotImplementedError

    def __len__(self) -> int:
        raise NotImplementedError

    def const(self, name: str) -> int:
        raise NotImplementedError

    def apply(self, fn: str, args: tuple) -> int | None:
        raise NotImplementedError

    def holds(self, rel: str, args: tuple) -> bool:
        raise NotImplementedError

    def materialize(self) -> "PartialStructure":
        raise NotImplementedError


class PartialStructure(Structure):
    def __init__(
        self,
        sig: Signature,
        domain: Iterable[int],
        constants: Mapping[str, int] | None = None,
        relations: Mapping[str, Iterable[tuple]] | None = None,
        functions: Mapping[str, Mapping[tuple, int]] | None = None,
    ):
        self.sig = sig
        self.domain = frozenset(domain)
        if not self.domain:
            raise ValueError("empty domains are not allowed")
        self.constants = dict(constants or {})
        self.relations = {name: frozenset(tuple(t) for t in (relations or {}).get(name, ())) for name, _ in sig.relations}
        self.functions = {
            name: {tuple(k): v for k, v in (functions or {}).get(name, {}).items()} for name, _ in sig.functions
        }
        self._check()
        self._elements = sorted(self.domain)
        self._key = None

    def _check(self):
        for c in self.sig.constants:
            if c not in self.constants:
                raise ValueError(f"constant {c!r} is not interpreted")
            if self.constants[c] not in self.domain:
                raise ValueError(f"constant {c!r} lies outside the domain")
        for name, arity in self.sig.relations:
            for t in self.relations[name]:
                if len(t) != arity or not all(x in self.domain for x in t):
                    raise ValueError(f"relation {name!r} has a bad tuple {t}")
        for name, arity in self.sig.functions:
            for args, value in self.functions[name].items():
                if len(args) != arity or not all(x in self.domain for x in args):
                    raise ValueError(f"function {name!r} has a bad argument tuple {args}")
                if value not in self.domain:
                    raise ValueError(f"function {name!r} maps {args} outside the domain")

    def __contains__(self, x):
        return x in self.domain

    def elements(self):
        return self._elements

    def __len__(self):
        return len(self.domain)

    def const(self, name):
        return self.constants[name]

    def apply(self, fn, args):
        return self.functions[fn].get(tuple(args))

    def holds(self, rel, args):
        return tuple(args) in self.relations[rel]

    def materialize(self):
        return self

    def key(self) -> tuple:
        """Canonical hashable description (used for dedup and JSON keys)."""
        if self._key is None:
            self._key = (
                tuple(self._elements),
                tuple(sorted(self.constants.items())),
                tuple((r, tuple(sorted(self.relations[r]))) for r, _ in self.sig.relations),
                tuple((f, tuple(sorted(self.functions[f].items()))) for f, _ in self.sig.functions),
            )
        return self._key

    def __eq__(self, other):
        if isinstance(other, Segment):
            other = other.materialize()
        return isinstance(other, PartialStructure) and self.sig == other.sig and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"PartialStructure(domain={self._elements})"

    def relabel(self, mapping: Mapping[int, int]) -> "PartialStructure":
        return PartialStructure(
            self.sig,
            [mapping[x] for x in self.domain],
            {c: mapping[v] for c, v in self.constants.items()},
            {r: [tuple(mapping[x] for x in t) for t in ts] for r, ts in self.relations.items()},
            {f: {tuple(mapping[x] for x in k): mapping[v] for k, v in tab.items()} for f, tab in self.functions.items()},
        )

    def restrict(self, universe: Iterable[int]) -> "PartialStructure":
        """Induced partial substructure: functions defined iff the value stays inside."""
        u = frozenset(universe)
        return PartialStructure(
            self.sig,
            u,
            self.constants,
            {r: [t for t in ts if all(x in u for x in t)] for r, ts in self.relations.items()},
            {f: {k: v for k, v in tab.items() if v in u and all(x in u for x in k)} for f, tab in self.functions.items()},
        )


_INDEXED_CONSTANT = re.compile(r"c_(\d+)$")


class Segment(Structure):
    """The arithmetic structure ``M_n``.

    Any extra constants of the form ``c_<a>`` are interpreted as ``a``.
    """

    def __init__(self, n: int, sig: Signature = ARITHMETIC):
        if n < 1:
            raise ValueError("M_n needs n >= 1 (0 must be interpreted)")
        if not sig.is_arithmetic:
            raise ValueError("segments need the arithmetic base signature")
        extra_fns = {f for f, _ in sig.functions} - {"S", "+", "*"}
        extra_rels = {r for r, _ in sig.relations} - {"<"}
        if extra_fns or extra_rels:
            raise ValueError(f"segments cannot interpret extra symbols {sorted(extra_fns | extra_rels)}")
        self.n = n
        self.sig = sig
        self._consts = {"0": 0}
        for c in sig.constants:
            if c == "0":
                continue
            m = _INDEXED_CONSTANT.match(c)
            if not m:
                raise ValueError(f"segments cannot interpret constant {c!r}")
            if int(m.group(1)) >= n:
                raise ValueError(f"constant {c!r} does not fit in M_{n}")
            self._consts[c] = int(m.group(1))

    def __contains__(self, x):
        return isinstance(x, int) and 0 <= x < self.n

    def elements(self):
        return range(self.n)

    def __len__(self):
        return self.n

    def const(self, name):
        return self._consts[name]

    def apply(self, fn, args):
        if fn == "S":
            v = args[0] + 1
        elif fn == "+":
            v = args[0] + args[1]
        elif fn == "*":
            v = args[0] * args[1]
        else:
            raise KeyError(fn)
        return v if v < self.n else None

    def holds(self, rel, args):
        return args[0] < args[1]

    def materialize(self):
        dom = range(self.n)
        funs = {}
        for fn, arity in self.sig.functions:
            tab = {}
            for args in itertools.product(dom, repeat=arity):
                v = self.apply(fn, args)
                if v is not None:
                    tab[args] = v
            funs[fn] = tab
        rels = {"<": [(a, b) for a in dom for b in dom if a < b]}
        return PartialStructure(self.sig, dom, dict(self._consts), rels, funs)

    def __eq__(self, other):
        if isinstance(other, Segment):
            return self.n == other.n and self.sig == other.sig
        if isinstance(other, PartialStructure):
            return other == self
        return NotImplemented

    def __hash__(self):
        return hash(("segment", self.n, self.sig))

    def __repr__(self):
        return f"Segment({self.n})"


def make_segment(n: int, sig: Signature = ARITHMETIC) -> Segment:
    return Segment(n, sig)


# ---------------------------------------------------------------- evaluation


def eval_term(s: Structure, t: Term, a: Mapping[str, int]) -> int | None:
    """Value of ``t`` in ``s`` under ``a``; ``None`` when undefined.

    Undefinedness is strict: it propagates through every enclosing
    application.  A variable missing from ``a`` raises.
    """
    if isinstance(t, Var):
        if t.name not in a:
            raise UnassignedVariable(t.name)
        v = a[t.name]
        return v if v in s else None
    if isinstance(t, Const):
        return s.const(t.name)
    args = []
    for sub in t.args:
        v = eval_term(s, sub, a)
        if v is None:
            return None
        args.append(v)
    return s.apply(t.fn, tuple(args))


def satisfies_atomic(s: Structure, f: Formula, a: Mapping[str, int]) -> bool | None:
    """Atomic satisfaction; ``None`` if some term is undefined."""
    values = []
    for t in atom_terms(f):
        v = eval_term(s, t, a)
        if v is None:
            return None
        values.append(v)
    if isinstance(f, Eq):
        return values[0] == values[1]
    return s.holds(f.rel, tuple(values))


def satisfies(s: Structure, f: Formula, a: Mapping[str, int] | None = None) -> bool | None:
    """Classical satisfaction, for debugging only.

    A quantifier counts as satisfied only if every instance is defined; any
    undefined instance makes the whole formula undefined.
    """
    a = dict(a or {})
    if isinstance(f, ATOMIC):
        return satisfies_atomic(s, f, a)
    if isinstance(f, Not):
        v = satisfies(s, f.body, a)
        return None if v is None else not v
    if isinstance(f, (And, Or)):
        l, r = satisfies(s, f.left, a), satisfies(s, f.right, a)
        if l is None or r is None:
            return None
        return (l and r) if isinstance(f, And) else (l or r)
    results = []
    for b in s.elements():
        v = satisfies(s, f.body, {**a, f.var: b})
        if v is None:
            return None
        results.append(v)
    return any(results) if isinstance(f, Exists) else all(results)


# ---------------------------------------------------------------- relations


def _segment_fits(m: int, n: int) -> bool:
    """Every S, +, * value on {0..m-1} is below n."""
    top = m - 1
    return max(top + 1, 2 * top, top * top) < n


def is_substructure(a: Structure, b: Structure) -> bool:
    """Substructure in the strong sense: functions of ``b`` are total on ``a``."""
    if a.sig != b.sig:
        raise SignatureMismatch("structures have different signatures")
    if isinstance(a, Segment) and isinstance(b, Segment):
        return a.n <= b.n and _segment_fits(a.n, b.n)
    elems = a.elements()
    if len(a) > len(b) or any(x not in b for x in elems):
        return False
    for c in a.sig.constants:
        if a.const(c) != b.const(c):
            return False
    if isinstance(a, Segment) and isinstance(b, PartialStructure):
        a = a.materialize()
    for rel, arity in a.sig.relations:
        if isinstance(a, PartialStructure):
            if any(not b.holds(rel, t) for t in a.relations[rel]):
                return False
            if isinstance(b, PartialStructure):
                dom = a.domain
                if any(all(x in dom for x in t) and t not in a.relations[rel] for t in b.relations[rel]):
                    return False
                continue
        for t in itertools.product(elems, repeat=arity):
            if a.holds(rel, t) != b.holds(rel, t):
                return False
    for fn, arity in a.sig.functions:
        for t in itertools.product(elems, repeat=arity):
            vb = b.apply(fn, t)
            if vb is None:
                return False
            va = a.apply(fn, t)
            if va is not None and va != vb:
                return False
    return True


def is_total(s: Structure) -> bool:
    if isinstance(s, Segment):
        return _segment_fits(s.n, s.n)
    for fn, arity in s.sig.functions:
        for t in itertools.product(s.elements(), repeat=arity):
            if s.apply(fn, t) is None:
                return False
    return True


def is_isomorphic(a: Structure, b: Structure) -> dict[int, int] | None:
    """A bijection preserving constants, relations and partial-function graphs."""
    if a.sig != b.sig:
        raise SignatureMismatch("structures have different signatures")
    if len(a) != len(b):
        return None
    a, b = a.materialize(), b.materialize()
    sig = a.sig
    fixed = {}
    for c in sig.constants:
        x, y = a.const(c), b.const(c)
        if fixed.get(x, y) != y:
            return None
        fixed[x] = y
    if len(set(fixed.values())) != len(fixed):
        return None
    order = [x for x in a.elements() if x not in fixed]
    free_targets = [y for y in b.elements() if y not in set(fixed.values())]

    def consistent(g):
        for rel, ts in a.relations.items():
            for t in ts:
                if all(x in g for x in t) and tuple(g[x] for x in t) not in b.relations[rel]:
                    return False
        inv = {v: k for k, v in g.items()}
        for rel, ts in b.relations.items():
            for t in ts:
                if all(y in inv for y in t) and tuple(inv[y] for y in t) not in a.relations[rel]:
                    return False
        for fn, tab in a.functions.items():
            btab = b.functions[fn]
            for args, v in tab.items():
                if v in g and all(x in g for x in args) and btab.get(tuple(g[x] for x in args)) != g[v]:
                    return False
            for args in itertools.product(list(g), repeat=dict(sig.functions)[fn]):
                if args not in tab and tuple(g[x] for x in args) in btab:
                    return False
        return True

    if not consistent(fixed):
        return None

    def search(i, g, used):
        if i == len(order):
            return dict(g)
        x = order[i]
        for y in free_targets:
            if y in used:
                continue
            g[x] = y
            if consistent(g):
                found = search(i + 1, g, used | {y})
                if found is not None:
                    return found
            del g[x]
        return None

    return search(0, dict(fixed), frozenset(fixed.values()))
