"""First-order syntax over finite signatures.

Terms and formulas are frozen dataclasses, so they hash structurally and can
be used as dictionary keys by the evaluators.  Implication, ``<=``, ``!=``
and bounded quantifiers are sugar: the parser rewrites them into the core
connectives (``!``, ``&``, ``|``, ``exists``, ``forall``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Iterator, Union


class SyntaxError_(ValueError):
    """Malformed formula text; ``pos`` is the character offset."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


class UndeclaredSymbol(ValueError):
    pass


class ArityMismatch(ValueError):
    pass


# ---------------------------------------------------------------- signature


@dataclass(frozen=True)
class Signature:
    relations: tuple[tuple[str, int], ...] = ()
    functions: tuple[tuple[str, int], ...] = ()
    constants: tuple[str, ...] = ()

    def __post_init__(self):
        names = [n for n, _ in self.relations] + [n for n, _ in self.functions] + list(self.constants)
        if len(names) != len(set(names)):
            raise ValueError(f"duplicate symbol names in signature: {names}")
        for name, arity in self.relations + self.functions:
            if arity < 1:
                raise ValueError(f"symbol {name!r} must have arity >= 1")

    @property
    def size(self) -> int:
        """|L|: constants + relations + functions (equality not counted)."""
        return len(self.relations) + len(self.functions) + len(self.constants)

    @property
    def max_arity(self) -> int:
        return max((a for _, a in self.functions), default=0)

    @property
    def is_arithmetic(self) -> bool:
        rel = dict(self.relations)
        fun = dict(self.functions)
        return (
            rel.get("<") == 2
            and fun.get("S") == 1
            and fun.get("+") == 2
            and fun.get("*") == 2
            and "0" in self.constants
        )

    def relation_arity(self, name: str) -> int | None:
        return dict(self.relations).get(name)

    def function_arity(self, name: str) -> int | None:
        return dict(self.functions).get(name)

    def extend(self, relations=(), functions=(), constants=()) -> "Signature":
        return Signature(
            self.relations + tuple(relations),
            self.functions + tuple(functions),
            self.constants + tuple(constants),
        )


ARITHMETIC = Signature(relations=(("<", 2),), functions=(("S", 1), ("+", 2), ("*", 2)), constants=("0",))


# -------------------------------------------------------------------- terms


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class App:
    fn: str
    args: tuple


Term = Union[Var, Const, App]


def numeral(k: int) -> Term:
    t: Term = Const("0")
    for _ in range(k):
        t = App("S", (t,))
    return t


# ----------------------------------------------------------------- formulas


@dataclass(frozen=True)
class Atom:
    rel: str
    args: tuple


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


Formula = Union[Atom, Eq, Not, And, Or, Exists, Forall]
QUANTIFIERS = (Exists, Forall)
ATOMIC = (Atom, Eq)


def _install_cached_hash(cls):
    # nodes are keys of every memo table; the generated hash walks the whole tree
    plain = cls.__hash__

    def __hash__(self):
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = plain(self)
            object.__setattr__(self, "_hash", h)
            return h

    cls.__hash__ = __hash__


for _cls in (Var, Const, App, Atom, Eq, Not, And, Or, Exists, Forall):
    _install_cached_hash(_cls)


def implies(a: Formula, b: Formula) -> Formula:
    return Or(Not(a), b)


def less(a: Term, b: Term) -> Formula:
    return Atom("<", (a, b))


def leq(a: Term, b: Term) -> Formula:
    return Or(less(a, b), Eq(a, b))


def neq(a: Term, b: Term) -> Formula:
    return Not(Eq(a, b))


# ---------------------------------------------------------- term utilities


def term_vars(t: Term) -> frozenset[str]:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, Const):
        return frozenset()
    out: frozenset[str] = frozenset()
    for a in t.args:
        out |= term_vars(a)
    return out


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, App):
        for a in t.args:
            yield from subterms(a)


def atom_terms(f: Formula) -> tuple:
    if isinstance(f, Eq):
        return (f.left, f.right)
    return f.args


@lru_cache(maxsize=None)
def free_vars(f: Formula) -> frozenset[str]:
    if isinstance(f, ATOMIC):
        out: frozenset[str] = frozenset()
        for t in atom_terms(f):
            out |= term_vars(t)
        return out
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, (And, Or)):
        return free_vars(f.left) | free_vars(f.right)
    return free_vars(f.body) - {f.var}


@lru_cache(maxsize=None)
def formula_terms(f: Formula) -> frozenset:
    """Every term occurrence (including subterms) appearing in ``f``."""
    if isinstance(f, ATOMIC):
        return frozenset(s for t in atom_terms(f) for s in subterms(t))
    if isinstance(f, Not):
        return formula_terms(f.body)
    if isinstance(f, (And, Or)):
        return formula_terms(f.left) | formula_terms(f.right)
    return formula_terms(f.body)


@lru_cache(maxsize=None)
def instantiable_terms(f: Formula) -> tuple:
    """Terms of ``f`` whose variables are all free in ``f``.

    These are the terms that become closed once the free variables are
    assigned; sorted by size so evaluation can stop at the first failure.
    """
    fv = free_vars(f)
    ts = [t for t in formula_terms(f) if term_vars(t) <= fv]
    return tuple(sorted(ts, key=lambda t: (term_length(t), render_term(t))))


def substitute(f: Formula, var: str, t: Term) -> Formula:
    """Capture-naive substitution of ``t`` for free occurrences of ``var``."""

    def sub_t(s: Term) -> Term:
        if isinstance(s, Var):
            return t if s.name == var else s
        if isinstance(s, Const):
            return s
        return App(s.fn, tuple(sub_t(a) for a in s.args))

    if isinstance(f, Atom):
        return Atom(f.rel, tuple(sub_t(a) for a in f.args))
    if isinstance(f, Eq):
        return Eq(sub_t(f.left), sub_t(f.right))
    if isinstance(f, Not):
        return Not(substitute(f.body, var, t))
    if isinstance(f, (And, Or)):
        return type(f)(substitute(f.left, var, t), substitute(f.right, var, t))
    if f.var == var:
        return f
    return type(f)(f.var, substitute(f.body, var, t))


def rename_var(f: Formula, old: str, new: str) -> Formula:
    """Rename every occurrence (free and bound) of variable ``old``."""
    if isinstance(f, ATOMIC):
        return substitute(f, old, Var(new))
    if isinstance(f, Not):
        return Not(rename_var(f.body, old, new))
    if isinstance(f, (And, Or)):
        return type(f)(rename_var(f.left, old, new), rename_var(f.right, old, new))
    var = new if f.var == old else f.var
    return type(f)(var, rename_var(f.body, old, new))


def all_vars(f: Formula) -> frozenset[str]:
    if isinstance(f, QUANTIFIERS):
        return all_vars(f.body) | {f.var}
    if isinstance(f, Not):
        return all_vars(f.body)
    if isinstance(f, (And, Or)):
        return all_vars(f.left) | all_vars(f.right)
    return free_vars(f)


def conjunction(fs) -> Formula:
    fs = list(fs)
    out = fs[0]
    for g in fs[1:]:
        out = And(out, g)
    return out


def disjunction(fs) -> Formula:
    fs = list(fs)
    out = fs[0]
    for g in fs[1:]:
        out = Or(out, g)
    return out


# ------------------------------------------------------------------ measures


@lru_cache(maxsize=None)
def depth(f: Formula) -> int:
    """Number of quantifier occurrences (not alternations)."""
    if isinstance(f, ATOMIC):
        return 0
    if isinstance(f, Not):
        return depth(f.body)
    if isinstance(f, (And, Or)):
        return depth(f.left) + depth(f.right)
    return 1 + depth(f.body)


def term_length(t: Term) -> int:
    if isinstance(t, App):
        return 1 + sum(term_length(a) for a in t.args)
    return 1


@lru_cache(maxsize=None)
def length(f: Formula) -> int:
    """Token count of the parenthesis-free prefix serialization."""
    if isinstance(f, ATOMIC):
        return 1 + sum(term_length(t) for t in atom_terms(f))
    if isinstance(f, Not):
        return 1 + length(f.body)
    if isinstance(f, (And, Or)):
        return 1 + length(f.left) + length(f.right)
    return 2 + length(f.body)


def prefix_tokens(f: Formula) -> list[str]:
    """The prefix serialization whose token count is :func:`length`."""

    def term_tokens(t):
        if isinstance(t, Var):
            return [t.name]
        if isinstance(t, Const):
            return [t.name]
        return [t.fn] + [tok for a in t.args for tok in term_tokens(a)]

    if isinstance(f, Atom):
        return [f.rel] + [tok for a in f.args for tok in term_tokens(a)]
    if isinstance(f, Eq):
        return ["="] + term_tokens(f.left) + term_tokens(f.right)
    if isinstance(f, Not):
        return ["!"] + prefix_tokens(f.body)
    if isinstance(f, (And, Or)):
        op = "&" if isinstance(f, And) else "|"
        return [op] + prefix_tokens(f.left) + prefix_tokens(f.right)
    q = "forall" if isinstance(f, Forall) else "exists"
    return [q, f.var] + prefix_tokens(f.body)


def subformulas(f: Formula) -> frozenset:
    out = {f}
    if isinstance(f, Not) or isinstance(f, QUANTIFIERS):
        out |= subformulas(f.body)
    elif isinstance(f, (And, Or)):
        out |= subformulas(f.left) | subformulas(f.right)
    return frozenset(out)


def subformula_bound(f: Formula) -> int:
    return comb(length(f), 2)


# ----------------------------------------------------------------- rendering

_INFIX = {"+": 1, "*": 2}


def render_term(t: Term, prec: int = 0) -> str:
    if isinstance(t, (Var, Const)):
        return t.name
    if t.fn in _INFIX and len(t.args) == 2:
        p = _INFIX[t.fn]
        left = render_term(t.args[0], p)
        right = render_term(t.args[1], p + 1)
        s = f"{left}{t.fn}{right}"
        return f"({s})" if p < prec else s
    return f"{t.fn}({','.join(render_term(a) for a in t.args)})"


def render_formula(f: Formula) -> str:
    """Canonical text; reparses to a structurally identical AST."""
    if isinstance(f, Eq):
        return f"{render_term(f.left)} = {render_term(f.right)}"
    if isinstance(f, Atom):
        if f.rel == "<" and len(f.args) == 2:
            return f"{render_term(f.args[0])} < {render_term(f.args[1])}"
        return f"{f.rel}({','.join(render_term(a) for a in f.args)})"
    if isinstance(f, Not):
        return "!" + _operand(f.body)
    if isinstance(f, (And, Or)):
        op = "&" if isinstance(f, And) else "|"
        return f"{_operand(f.left)} {op} {_operand(f.right)}"
    q = "forall" if isinstance(f, Forall) else "exists"
    return f"{q} {f.var}. {render_formula(f.body)}"


def _operand(f: Formula) -> str:
    s = render_formula(f)
    if isinstance(f, Atom) and not (f.rel == "<" and len(f.args) == 2):
        return s
    if isinstance(f, Not):
        return s
    return f"({s})"


# ------------------------------------------------------------------- parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>->|<=|!=|[()!&|=<+*,.]))"
)
_VARIABLE = re.compile(r"[a-z][A-Za-z0-9_]*$")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise SyntaxError_(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        out.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    out.append(("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, sig: Signature):
        self.toks = _tokenize(text)
        self.i = 0
        self.sig = sig

    def peek(self, k=0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def take(self, value=None):
        tok = self.toks[self.i]
        if value is not None and tok[1] != value:
            raise SyntaxError_(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok[2])
        self.i += 1
        return tok

    def formula(self) -> Formula:
        kind, val, _ = self.peek()
        if kind == "ident" and val in ("forall", "exists"):
            return self.quantified()
        left = self.disjunction()
        if self.peek()[1] == "->":
            self.take()
            return implies(left, self.formula())
        return left

    def quantified(self) -> Formula:
        q = self.take()[1]
        kind, name, pos = self.take()
        if kind != "ident" or not _VARIABLE.match(name) or self._is_symbol(name):
            raise SyntaxError_(f"expected a variable after {q!r}", pos)
        bound = None
        if self.peek()[1] == "<":
            self.take()
            bound = self.term()
        self.take(".")
        body = self.formula()
        if bound is None:
            return Forall(name, body) if q == "forall" else Exists(name, body)
        guard = less(Var(name), bound)
        if q == "forall":
            return Forall(name, implies(guard, body))
        return Exists(name, And(guard, body))

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.peek()[1] == "|":
            self.take()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.unary()
        while self.peek()[1] == "&":
            self.take()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        kind, val, pos = self.peek()
        if val == "!":
            self.take()
            return Not(self.unary())
        if kind == "ident" and val in ("forall", "exists"):
            return self.quantified()
        if val == "(":
            save = self.i
            try:
                self.take("(")
                f = self.formula()
                self.take(")")
                if self.peek()[1] not in ("=", "<", "<=", "!=", "+", "*"):
                    return f
            except (SyntaxError_, UndeclaredSymbol):
                pass
            self.i = save
        if kind == "ident" and self.sig.relation_arity(val) is not None and self.peek(1)[1] == "(":
            return self.relation_atom()
        return self.comparison()

    def relation_atom(self) -> Formula:
        _, name, pos = self.take()
        self.take("(")
        args = self._args()
        arity = self.sig.relation_arity(name)
        if arity != len(args):
            raise ArityMismatch(f"relation {name!r} expects {arity} arguments, got {len(args)} (position {pos})")
        return Atom(name, tuple(args))

    def comparison(self) -> Formula:
        left = self.term()
        kind, op, pos = self.take()
        if op not in ("=", "<", "<=", "!="):
            raise SyntaxError_(f"expected a comparison, found {op or 'end of input'!r}", pos)
        right = self.term()
        if op == "=":
            return Eq(left, right)
        if op == "!=":
            return neq(left, right)
        if self.sig.relation_arity("<") != 2:
            raise UndeclaredSymbol(f"relation '<' is not declared (position {pos})")
        return less(left, right) if op == "<" else leq(left, right)

    def term(self) -> Term:
        t = self.product()
        while self.peek()[1] == "+":
            _, _, pos = self.take()
            t = self._binary("+", t, self.product(), pos)
        return t

    def product(self) -> Term:
        t = self.primary()
        while self.peek()[1] == "*":
            _, _, pos = self.take()
            t = self._binary("*", t, self.primary(), pos)
        return t

    def _binary(self, fn, a, b, pos) -> Term:
        if self.sig.function_arity(fn) != 2:
            raise UndeclaredSymbol(f"function {fn!r} is not declared (position {pos})")
        return App(fn, (a, b))

    def primary(self) -> Term:
        kind, val, pos = self.take()
        if kind == "num":
            if val == "0" and "0" in self.sig.constants:
                return Const("0")
            if "0" not in self.sig.constants or self.sig.function_arity("S") != 1:
                raise UndeclaredSymbol(f"numeral {val} needs constant 0 and function S (position {pos})")
            return numeral(int(val))
        if val == "(":
            t = self.term()
            self.take(")")
            return t
        if kind != "ident":
            raise SyntaxError_(f"expected a term, found {val or 'end of input'!r}", pos)
        if self.peek()[1] == "(":
            arity = self.sig.function_arity(val)
            if arity is None:
                raise UndeclaredSymbol(f"function {val!r} is not declared (position {pos})")
            self.take("(")
            args = self._args()
            if len(args) != arity:
                raise ArityMismatch(f"function {val!r} expects {arity} arguments, got {len(args)} (position {pos})")
            return App(val, tuple(args))
        if val in self.sig.constants:
            return Const(val)
        if _VARIABLE.match(val) and not self._is_symbol(val):
            return Var(val)
        raise UndeclaredSymbol(f"symbol {val!r} is not declared (position {pos})")

    def _args(self) -> list:
        args = [self.term()]
        while self.peek()[1] == ",":
            self.take()
            args.append(self.term())
        self.take(")")
        return args

    def _is_symbol(self, name):
        return (
            name in ("forall", "exists")
            or name in self.sig.constants
            or self.sig.relation_arity(name) is not None
            or self.sig.function_arity(name) is not None
        )


def parse_formula(text: str, sig: Signature = ARITHMETIC) -> Formula:
    p = _Parser(text, sig)
    f = p.formula()
    kind, val, pos = p.peek()
    if kind != "eof":
        raise SyntaxError_(f"unexpected {val!r}", pos)
    return f


def parse_term(text: str, sig: Signature = ARITHMETIC) -> Term:
    p = _Parser(text, sig)
    t = p.term()
    kind, val, pos = p.peek()
    if kind != "eof":
        raise SyntaxError_(f"unexpected {val!r}", pos)
    return t


# --------------------------------------------------------------- enumeration


def _terms_of_size(sig: Signature, size: int, scope: tuple[str, ...]) -> list[Term]:
    return list(_terms_cached(sig, size, scope))


@lru_cache(maxsize=None)
def _terms_cached(sig: Signature, size: int, scope: tuple[str, ...]) -> tuple:
    out: list[Term] = []
    if size == 1:
        out += [Var(v) for v in scope]
        out += [Const(c) for c in sig.constants]
        return tuple(out)
    for fn, arity in sig.functions:
        for parts in _compositions(size - 1, arity):
            for args in _product([_terms_cached(sig, p, scope) for p in parts]):
                out.append(App(fn, args))
    return tuple(out)


def _compositions(total: int, k: int):
    if k == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - k + 2):
        for rest in _compositions(total - first, k - 1):
            yield (first,) + rest


def _product(pools):
    if not pools:
        yield ()
        return
    for head in pools[0]:
        for tail in _product(pools[1:]):
            yield (head,) + tail


@lru_cache(maxsize=None)
def _formulas_cached(sig: Signature, size: int, scope: tuple[str, ...]) -> tuple:
    out: list[Formula] = []
    for rel, arity in sig.relations:
        for parts in _compositions(size - 1, arity):
            for args in _product([_terms_cached(sig, p, scope) for p in parts]):
                out.append(Atom(rel, args))
    for parts in _compositions(size - 1, 2):
        for l, r in _product([_terms_cached(sig, p, scope) for p in parts]):
            out.append(Eq(l, r))
    if size >= 2:
        out += [Not(g) for g in _formulas_cached(sig, size - 1, scope)]
    for parts in _compositions(size - 1, 2):
        lefts = _formulas_cached(sig, parts[0], scope)
        rights = _formulas_cached(sig, parts[1], scope)
        out += [And(a, b) for a in lefts for b in rights]
        out += [Or(a, b) for a in lefts for b in rights]
    if size >= 3:
        bound = f"y{len(scope)}"
        inner = _formulas_cached(sig, size - 2, scope + (bound,))
        out += [Exists(bound, g) for g in inner]
        out += [Forall(bound, g) for g in inner]
    return tuple(out)


def iter_formulas(sig: Signature, free: str = "x") -> Iterator[Formula]:
    """All formulas whose only free variable is ``free``.

    Ordered by token length, then by canonical rendering.  Bound variables
    are named ``y1, y2, ...`` by nesting depth so each length class is finite.
    """
    size = 1
    while True:
        batch = [f for f in _formulas_cached(sig, size, (free,)) if free_vars(f) == {free}]
        for f in sorted(set(batch), key=render_formula):
            yield f
        size += 1
        if size > 64:
            return


def enumerate_formulas(sig: Signature, k: int, free: str = "x") -> list[Formula]:
    out = []
    if k <= 0:
        return out
    for f in iter_formulas(sig, free):
        out.append(f)
        if len(out) == k:
            break
    return out
