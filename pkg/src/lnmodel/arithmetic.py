"""Square-increasing chains, Robinson's Q, least-number instances and prime coding."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .fulfillment import LnModel, Verdict
from .logic import (
    ARITHMETIC,
    And,
    App,
    Eq,
    Exists,
    Forall,
    Formula,
    Not,
    Signature,
    Term,
    Var,
    all_vars,
    conjunction,
    disjunction,
    enumerate_formulas,
    free_vars,
    implies,
    leq,
    numeral,
    parse_formula,
    rename_var,
    substitute,
)
from .structures import Segment

Q_AXIOM_TEXT = {
    "q1": "forall x. 0 != S(x)",
    "q2": "forall x. forall y. (S(x) = S(y) -> x = y)",
    "q3": "forall x. (x != 0 -> exists y. x = S(y))",
    "q4": "forall x. x+0 = x",
    "q5": "forall x. forall y. x+S(y) = S(x+y)",
    "q6": "forall x. x*0 = 0",
    "q7": "forall x. forall y. x*S(y) = x*y+x",
}
NO_GREATEST_TEXT = "forall x. exists y. (x <= y & x != y)"


class NotSquareIncreasing(ValueError):
    pass


def validate_sq_inc(ms: Sequence[int]) -> bool:
    return all(a < b and a * a < b for a, b in zip(ms, ms[1:]))


def make_sq_models(ms: Sequence[int], sig: Signature = ARITHMETIC) -> LnModel:
    if not ms or not validate_sq_inc(ms):
        raise NotSquareIncreasing(f"{list(ms)} is not square increasing")
    extra = {f for f, _ in sig.functions} - {"S", "+", "*"}
    if extra:
        raise ValueError(f"square-increasing chains do not dominate extra functions {sorted(extra)}")
    # m_i**2 < m_{i+1} already bounds S, + and *, so the chain check is skipped
    return LnModel([Segment(m, sig) for m in ms], check=False)


def q_axioms(sig: Signature = ARITHMETIC) -> list[Formula]:
    return [parse_formula(Q_AXIOM_TEXT[f"q{i}"], sig) for i in range(1, 8)]


def no_greatest_element(sig: Signature = ARITHMETIC) -> Formula:
    return parse_formula(NO_GREATEST_TEXT, sig)


@dataclass
class QCheckReport:
    verdicts: dict[str, Verdict]
    hypothesis_met: bool
    notes: list[str] = field(default_factory=list)

    @property
    def all_true(self) -> bool:
        return all(v.is_true for v in self.verdicts.values())

    def rows(self) -> list[tuple[str, str]]:
        return [(name, v.status) for name, v in self.verdicts.items()]

    def to_json(self) -> dict:
        return {
            "verdicts": {k: v.to_json() for k, v in self.verdicts.items()},
            "all_true": self.all_true,
            "hypothesis_met": self.hypothesis_met,
            "notes": self.notes,
        }


def check_q(v: LnModel) -> QCheckReport:
    if not v.sig.is_arithmetic:
        raise ValueError("check_q needs the arithmetic base signature")
    verdicts = {}
    for name, text in Q_AXIOM_TEXT.items():
        verdicts[name] = v.fulfills(parse_formula(text, v.sig))
    verdicts["no-greatest"] = v.fulfills(no_greatest_element(v.sig))
    notes = []
    met = len(v) >= 3
    if not met:
        notes.append("chain shorter than 3")
    if all(isinstance(s, Segment) for s in v):
        ms = [s.n for s in v]
        if not validate_sq_inc(ms):
            met = False
            notes.append("sizes are not square increasing")
        if ms[0] <= 1:
            met = False
            notes.append("m0 <= 1: first level too small")
    else:
        met = False
        notes.append("levels are not arithmetic segments")
    return QCheckReport(verdicts, met, notes)


# ------------------------------------------------------------ LNP and PA^PF


def _fresh(used: set[str], stem: str) -> str:
    if stem not in used:
        return stem
    for k in itertools.count(1):
        name = f"{stem}{k}"
        if name not in used:
            return name


def lnp(f: Formula) -> Formula:
    """Least-number instance: ∃x φ(x) → ∃x ∀y (φ(x) ∧ (φ(y) → x ≤ y))."""
    fv = free_vars(f)
    if len(fv) != 1:
        raise ValueError(f"lnp needs exactly one free variable, got {sorted(fv)}")
    (x,) = fv
    y = _fresh(set(all_vars(f)) | {x}, "y")
    fy = substitute(f, x, Var(y))
    body = Forall(y, And(f, implies(fy, leq(Var(x), Var(y)))))
    return implies(Exists(x, f), Exists(x, body))


def pa_pf(k: int, sig: Signature = ARITHMETIC) -> list[Formula]:
    """Q together with the first ``k`` parameter-free least-number instances."""
    return q_axioms(sig) + [lnp(f) for f in enumerate_formulas(sig, k)]


# ------------------------------------------------------------- prime coding


def first_primes(k: int) -> list[int]:
    out: list[int] = []
    c = 2
    while len(out) < k:
        if all(c % p for p in out):
            out.append(c)
        c += 1
    return out


def _product_term(factors: list[int]) -> Term:
    if not factors:
        return numeral(1)
    t = numeral(factors[0])
    for p in factors[1:]:
        t = App("*", (t, numeral(p)))
    return t


def prime_code_psi(fs: Sequence[Formula], cap: int, max_disjuncts: int = 4096) -> Formula:
    """ψ(x) coding exponent tuples as x = p0^n0 ... p_{k-1}^n_{k-1}.

    Exponentiation is not in the language, so the equation is expanded into
    a disjunction over all exponent tuples with entries ``<= cap``.
    """
    k = len(fs)
    if k < 1:
        raise ValueError("need at least one formula")
    if cap < 0 or (cap + 1) ** k > max_disjuncts:
        raise ValueError(f"exponent cap {cap} exceeds the construction limit for k={k}")
    renamed = []
    for i, f in enumerate(fs):
        fv = free_vars(f)
        if len(fv) != 1:
            raise ValueError(f"formula {i} must have exactly one free variable")
        g = f
        for var in sorted(all_vars(f)):
            g = rename_var(g, var, f"{var}_{i}")
        renamed.append((g, f"{next(iter(fv))}_{i}"))
    ns = [f"n{i}" for i in range(k)]
    primes = first_primes(k)
    x = Var("x")
    cases = []
    for exps in itertools.product(range(cap + 1), repeat=k):
        factors = [p for p, e in zip(primes, exps) for _ in range(e)]
        eqs = [Eq(Var(n), numeral(e)) for n, e in zip(ns, exps)]
        cases.append(conjunction(eqs + [Eq(x, _product_term(factors))]))
    clauses = []
    for i, (g, var) in enumerate(renamed):
        clauses.append(implies(Exists(var, g), substitute(g, var, Var(ns[i]))))
    body = conjunction([disjunction(cases)] + clauses)
    for n in reversed(ns):
        body = Exists(n, body)
    return body


def enlarge_with_constants(sig: Signature, bound: int) -> Signature:
    """Add constants ``c_0 .. c_{bound-1}``; segments interpret ``c_a`` as ``a``."""
    new = [f"c_{a}" for a in range(bound)]
    clash = set(new) & (set(sig.constants) | {r for r, _ in sig.relations} | {f for f, _ in sig.functions})
    if clash:
        raise ValueError(f"constant names already in use: {sorted(clash)}")
    return sig.extend(constants=new)
