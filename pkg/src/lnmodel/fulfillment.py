"""(L, n)-models and the fulfillment relation.

A chain ``A_0 ⊆ ... ⊆ A_{n-1}`` fulfills ``φ(ā)`` relative to the least
index ``i`` such that the parameters ``ā`` lie in ``A_i`` and every
instantiated term of ``φ`` is defined in ``A_{i+1}``.  Indices are bounded
by ``i <= n - dp(φ) - 1`` and ``i <= n - 2`` so that ``A_{i+1}`` exists.  Existential witnesses come from ``A_{i+1}`` and
are checked on the suffix ``A_{i+1}, ..., A_{n-1}``; universal instances range
over ``A_j`` for ``j`` up to ``n - dp(φ) - 1`` and are checked on the whole
chain.  An instance whose own preamble fails never counts as fulfilled.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence

from .logic import (
    ATOMIC,
    And,
    Eq,
    Exists,
    Forall,
    Formula,
    Not,
    Or,
    Signature,
    depth,
    free_vars,
    instantiable_terms,
)
from .logic import App, Const, Term, Var
from .structures import (
    PartialStructure,
    Segment,
    Structure,
    eval_term,
    is_isomorphic,
    is_substructure,
    satisfies,
    satisfies_atomic,
)

NO_ELIGIBLE_INDEX = "no-eligible-index"
PARAMETER_IN_TOP = "parameter-in-top-model"
TERM_UNDEFINED = "term-undefined"

@lru_cache(maxsize=None)
def _nat_height(t: Term):
    """Compile ``t`` to ``a -> (value, largest subterm value)`` over the naturals.

    On arithmetic segments a term is defined in ``M_m`` exactly when that
    height is below ``m``, because every subterm value must fit.
    """
    if isinstance(t, Var):
        name = t.name

        def var(a):
            x = a[name]
            return x, x

        return var
    if isinstance(t, Const):
        value = 0 if t.name == "0" else int(t.name.split("_", 1)[1])
        pair = (value, value)
        return lambda a: pair
    if t.fn == "S":
        g = _nat_height(t.args[0])

        def succ(a):
            x, h = g(a)
            return x + 1, (x + 1 if x + 1 > h else h)

        return succ
    g1, g2 = _nat_height(t.args[0]), _nat_height(t.args[1])
    if t.fn == "+":

        def add(a):
            (x, hx), (y, hy) = g1(a), g2(a)
            v = x + y
            return v, max(v, hx, hy)

        return add
    if t.fn != "*":
        raise KeyError(t.fn)

    def mul(a):
        (x, hx), (y, hy) = g1(a), g2(a)
        v = x * y
        return v, max(v, hx, hy)

    return mul


@lru_cache(maxsize=None)
def _segment_qf(f: Formula):
    """Compile a quantifier-free ``f`` to ``a -> (truth over the naturals, term height)``."""
    if isinstance(f, ATOMIC):
        left, right = (_nat_height(t) for t in (f.args if not isinstance(f, Eq) else (f.left, f.right)))
        is_eq = isinstance(f, Eq)

        def atom(a):
            (x, hx), (y, hy) = left(a), right(a)
            return (x == y) if is_eq else (x < y), max(hx, hy)

        return atom
    if isinstance(f, Not):
        body = _segment_qf(f.body)

        def neg(a):
            t, h = body(a)
            return not t, h

        return neg
    left, right = _segment_qf(f.left), _segment_qf(f.right)
    conj = isinstance(f, And)

    def both(a):
        (p, hp), (q, hq) = left(a), right(a)
        return (p and q) if conj else (p or q), max(hp, hq)

    return both


class ChainViolation(ValueError):
    def __init__(self, index: int):
        super().__init__(f"level {index} is not a substructure of level {index + 1}")
        self.index = index


@dataclass(frozen=True)
class Verdict:
    status: str  # "true" | "false" | "undefined"
    reason: str | None = None

    @property
    def defined(self) -> bool:
        return self.status != "undefined"

    @property
    def is_true(self) -> bool:
        return self.status == "true"

    def negate(self) -> "Verdict":
        if not self.defined:
            return self
        return FALSE if self.is_true else TRUE

    def to_json(self) -> dict:
        return {"verdict": self.status, "reason": self.reason}

    def __repr__(self):
        return f"Verdict({self.status}{', ' + self.reason if self.reason else ''})"


TRUE = Verdict("true")
FALSE = Verdict("false")


def _bool(b: bool) -> Verdict:
    return TRUE if b else FALSE


class LnModel:
    """An immutable chain of partial structures over one signature."""

    def __init__(self, levels: Sequence[Structure], *, check: bool = True):
        levels = tuple(levels)
        if not levels:
            raise ValueError("an (L,n)-model needs at least one level")
        sig = levels[0].sig
        if any(s.sig != sig for s in levels):
            raise ValueError("all levels must share one signature")
        if check:
            for i in range(len(levels) - 1):
                if not is_substructure(levels[i], levels[i + 1]):
                    raise ChainViolation(i)
        self.levels = levels
        self.sig: Signature = sig
        self._memo: dict = {}
        self._index_memo: dict = {}
        # plain arithmetic segments allow the closed-form definedness test
        self._sizes = [m.n for m in levels] if all(isinstance(m, Segment) for m in levels) else None

    def __len__(self):
        return len(self.levels)

    def __getitem__(self, i):
        return self.levels[i]

    def __iter__(self):
        return iter(self.levels)

    @property
    def top(self) -> Structure:
        return self.levels[-1]

    def __eq__(self, other):
        return isinstance(other, LnModel) and self.levels == other.levels

    def __hash__(self):
        return hash(self.levels)

    def __repr__(self):
        return f"LnModel({list(self.levels)})"

    def slice(self, i: int, j: int) -> "LnModel":
        if not 0 <= i <= j < len(self):
            raise IndexError(f"slice [{i}, {j}] out of range for length {len(self)}")
        return LnModel(self.levels[i : j + 1], check=False)

    def subsequence(self, indices: Sequence[int]) -> "LnModel":
        """Levels at strictly increasing ``indices`` (still a chain by transitivity)."""
        if any(b <= a for a, b in zip(indices, indices[1:])):
            raise ValueError("indices must be strictly increasing")
        return LnModel([self.levels[i] for i in indices], check=False)

    def end_extend(self, top: Structure) -> "LnModel":
        if not is_substructure(self.top, top):
            raise ChainViolation(len(self) - 1)
        return LnModel(self.levels + (top,), check=False)

    # ------------------------------------------------------------ evaluator

    def _least_index(self, start: int, f: Formula, key: tuple):
        memo_key = (start, f, key)
        hit = self._index_memo.get(memo_key)
        if hit is not None:
            return hit
        a = dict(key)
        n = len(self.levels) - start
        hi = min(n - depth(f) - 1, n - 2)
        result: tuple = (None, NO_ELIGIBLE_INDEX)
        if hi >= 0 and self._sizes is not None:
            result = self._segment_index(start, hi, f, a)
        elif hi >= 0:
            terms = instantiable_terms(f)
            for i in range(hi + 1):
                if any(x not in self.levels[start + i] for x in a.values()):
                    continue
                level = self.levels[start + i + 1]
                if all(eval_term(level, t, a) is not None for t in terms):
                    result = (i, None)
                    break
            else:
                if any(x not in self.levels[start + hi] for x in a.values()):
                    result = (None, PARAMETER_IN_TOP)
                else:
                    result = (None, TERM_UNDEFINED)
        self._index_memo[memo_key] = result
        return result

    def _segment_verdict(self, start: int, f: Formula, a: Mapping[str, int]) -> Verdict:
        # quantifier-free on arithmetic segments: no memo, everything over the naturals
        sizes = self._sizes
        n = len(sizes) - start
        hi = min(n - 1, n - 2)
        if hi < 0:
            return Verdict("undefined", NO_ELIGIBLE_INDEX)
        truth, height = _segment_qf(f)(a)
        top = max((a[v] for v in free_vars(f)), default=-1)
        # sizes increase, so some i <= hi works iff i = hi admits the terms
        if top < sizes[start + hi] and height < sizes[start + hi + 1]:
            return TRUE if truth else FALSE
        if top >= sizes[start + hi]:
            return Verdict("undefined", PARAMETER_IN_TOP)
        return Verdict("undefined", TERM_UNDEFINED)

    def _segment_index(self, start: int, hi: int, f: Formula, a: dict) -> tuple:
        sizes = self._sizes
        top = max(a.values(), default=-1)
        height = max((_nat_height(t)(a)[1] for t in instantiable_terms(f)), default=-1)
        for i in range(hi + 1):
            if top < sizes[start + i] and height < sizes[start + i + 1]:
                return (i, None)
        if top >= sizes[start + hi]:
            return (None, PARAMETER_IN_TOP)
        return (None, TERM_UNDEFINED)

    def _verdict(self, start: int, f: Formula, a: Mapping[str, int]) -> Verdict:
        if self._sizes is not None and depth(f) == 0:
            return self._segment_verdict(start, f, a)
        key = tuple(sorted((v, a[v]) for v in free_vars(f)))
        memo_key = (start, f, key)
        hit = self._memo.get(memo_key)
        if hit is not None:
            return hit
        i, reason = self._least_index(start, f, key)
        if i is None:
            out = Verdict("undefined", reason)
        elif depth(f) == 0:
            # every term is defined in A_{i+1}, so each subformula is defined
            # and the connectives act classically on the top level
            out = _bool(satisfies(self.levels[-1], f, dict(key)))
        else:
            out = self._evaluate(start, i, f, dict(key))
        self._memo[memo_key] = out
        return out

    def _evaluate(self, start: int, i: int, f: Formula, a: dict) -> Verdict:
        if isinstance(f, ATOMIC):
            v = satisfies_atomic(self.levels[-1], f, a)
            return Verdict("undefined", TERM_UNDEFINED) if v is None else _bool(v)
        if isinstance(f, Not):
            return self._verdict(start, f.body, a).negate()
        if isinstance(f, (And, Or)):
            left = self._verdict(start, f.left, a)
            right = self._verdict(start, f.right, a)
            if isinstance(f, And):
                return _bool(left.is_true and right.is_true)
            return _bool(left.is_true or right.is_true)
        if isinstance(f, Exists):
            return _bool(self._witness(start, i, f, a) is not None)
        return _bool(self._counterexample(start, f, a) is None)

    def _witness(self, start: int, i: int, f: Exists, a: dict):
        """Least b in A_{i+1} whose instance the suffix from i+1 fulfills."""
        s = start + i + 1
        for b in self.levels[s].elements():
            if self._verdict(s, f.body, {**a, f.var: b}).is_true:
                return b
        return None

    def universal_level(self, start: int, f: Formula) -> int:
        """Absolute index of the last level a universal quantifier ranges over."""
        n = len(self.levels) - start
        return start + n - depth(f) - 1

    def _counterexample(self, start: int, f: Forall, a: dict):
        """Least b in the universal range whose instance is not fulfilled."""
        if self._sizes is not None and depth(f.body) == 0:
            return self._segment_counterexample(start, f, a)
        for b in self.levels[self.universal_level(start, f)].elements():
            if not self._verdict(start, f.body, {**a, f.var: b}).is_true:
                return b
        return None

    def _segment_counterexample(self, start: int, f: Forall, a: dict):
        """The loop above, inlined for a quantifier-free body on segments."""
        sizes = self._sizes
        param_bound, term_bound = sizes[-2], sizes[-1]
        body = _segment_qf(f.body)
        fv = free_vars(f.body)
        base = max((a[v] for v in fv if v != f.var), default=-1)
        uses_var = f.var in fv
        env = dict(a)
        for b in range(sizes[self.universal_level(start, f)]):
            env[f.var] = b
            truth, height = body(env)
            top = b if uses_var and b > base else base
            if not (truth and top < param_bound and height < term_bound):
                return b
        return None

    # ------------------------------------------------------------ public

    def fulfills(self, f: Formula, a: Mapping[str, int] | None = None, start: int = 0) -> Verdict:
        a = dict(a or {})
        missing = free_vars(f) - set(a)
        if missing:
            raise KeyError(f"unassigned free variables: {sorted(missing)}")
        return self._verdict(start, f, a)

    def least_term_index(self, f: Formula, a: Mapping[str, int] | None = None, start: int = 0) -> int | None:
        a = dict(a or {})
        key = tuple(sorted((v, a[v]) for v in free_vars(f)))
        return self._least_index(start, f, key)[0]

    def trace(self, f: Formula, a: Mapping[str, int] | None = None) -> dict:
        """Verdict plus the chosen index and top-level witness or counterexample."""
        a = dict(a or {})
        verdict = self.fulfills(f, a)
        out = {"verdict": verdict.to_json(), "index": self.least_term_index(f, a)}
        i = out["index"]
        if i is not None and isinstance(f, Exists):
            out["witness"] = self._witness(0, i, f, a)
        if i is not None and isinstance(f, Forall):
            out["range_level"] = self.universal_level(0, f)
            out["counterexample"] = self._counterexample(0, f, a)
        return out


def new_ln_model(ms: Sequence[Structure]) -> LnModel:
    return LnModel(ms)


def slice_model(v: LnModel, i: int, j: int) -> LnModel:
    return v.slice(i, j)


def end_extend(v: LnModel, top: Structure) -> LnModel:
    return v.end_extend(top)


def least_term_index(v: LnModel, f: Formula, a: Mapping[str, int] | None = None) -> int | None:
    return v.least_term_index(f, a)


def fulfills(v: LnModel, f: Formula, a: Mapping[str, int] | None = None) -> Verdict:
    return v.fulfills(f, a)


def chain_universe(v: LnModel) -> list[int]:
    return list(v.top.elements())


def is_isomorphic_chain(v: LnModel, w: LnModel) -> dict[int, int] | None:
    """Level-respecting isomorphism of chains.

    Each level and each level's function graphs become marker relations on
    the top universe; a relational isomorphism of the decorated tops is then
    exactly a bijection restricting to isomorphisms at every level.
    """
    if len(v) != len(w) or v.sig != w.sig:
        return None
    return is_isomorphic(_decorate(v), _decorate(w))


def _decorate(v: LnModel) -> PartialStructure:
    sig = v.sig
    rels = []
    tables: dict[str, list] = {}
    for i, level in enumerate(v.levels):
        lvl = level.materialize()
        rels.append((f"level{i}", 1))
        tables[f"level{i}"] = [(x,) for x in lvl.elements()]
        for r, arity in sig.relations:
            name = f"{r}@{i}"
            rels.append((name, arity))
            tables[name] = list(lvl.relations[r])
        for fn, arity in sig.functions:
            name = f"{fn}@{i}"
            rels.append((name, arity + 1))
            tables[name] = [k + (val,) for k, val in lvl.functions[fn].items()]
    top = v.top.materialize()
    dsig = Signature(relations=tuple(rels), constants=sig.constants)
    return PartialStructure(dsig, top.elements(), top.constants, tables)


def transport(v: LnModel, g: Mapping[int, int]) -> LnModel:
    """Image of an explicit chain under a bijection of its universe."""
    return LnModel([lvl.materialize().relabel(g) for lvl in v.levels], check=False)


def index_tuples(n: int, length: int):
    return itertools.combinations(range(n), length)
