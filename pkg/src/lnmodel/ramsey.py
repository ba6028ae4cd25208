"""Colorings, homogeneous-set searches and exhaustive chain enumeration.

Searches that are "exhaustive within a bound" always say which of the two
happened: the space was fully explored (``none``) or the bound ran out
(``bound-exceeded``).  Nothing is ever concluded from a timeout.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .collapse import CollapsePrecondition, col_bound, f_collapse
from .fulfillment import LnModel
from .logic import Exists, Formula, Signature, free_vars, length
from .structures import PartialStructure, Structure, is_substructure

FOUND = "found"
NONE = "none"
BOUND_EXCEEDED = "bound-exceeded"


class GuardExceeded(RuntimeError):
    """A desk-scale search limit was hit before the search finished."""


class ColoringPrecondition(ValueError):
    pass


# ------------------------------------------------------------ tuple colorings


def is_square_increasing(xs: Sequence[int]) -> bool:
    return all(a * a < b for a, b in zip(xs, xs[1:]))


@dataclass
class TupleColoring:
    """A coloring of the ``e``-subsets of ``{0, ..., N-1}`` in ``r`` colors.

    With ``sq_inc`` only the square-increasing subsets are colored.
    """

    e: int
    r: int
    N: int
    table: dict[tuple, int]
    sq_inc: bool = False

    def __post_init__(self):
        expected = set(self.domain())
        if set(self.table) != expected:
            raise ValueError("coloring table must cover exactly the colored tuples")
        if any(not 0 <= c < self.r for c in self.table.values()):
            raise ValueError(f"colors must lie in range({self.r})")

    def domain(self) -> Iterator[tuple]:
        for t in itertools.combinations(range(self.N), self.e):
            if not self.sq_inc or is_square_increasing(t):
                yield t

    def __call__(self, t: Iterable[int]) -> int:
        return self.table[tuple(sorted(t))]

    @classmethod
    def from_function(cls, e, r, N, fn: Callable[[tuple], int], sq_inc=False) -> "TupleColoring":
        keys = [t for t in itertools.combinations(range(N), e) if not sq_inc or is_square_increasing(t)]
        return cls(e, r, N, {t: fn(t) for t in keys}, sq_inc)

    @classmethod
    def constant(cls, e, N, color=0, r=1, sq_inc=False) -> "TupleColoring":
        return cls.from_function(e, r, N, lambda t: color, sq_inc)


def is_homogeneous(p: TupleColoring, h: Iterable[int]) -> bool:
    colors = {p(t) for t in itertools.combinations(sorted(h), p.e)}
    return len(colors) <= 1


def _extend_homogeneous(p: TupleColoring, chosen: list, color, candidates: list, size: int, step=None):
    """Depth-first completion of ``chosen`` to ``size`` elements, keeping one color."""
    if len(chosen) == size:
        return list(chosen)
    for pos, c in enumerate(candidates):
        if step is not None and not step(chosen[-1], c):
            continue
        if len(candidates) - pos < size - len(chosen) and step is None:
            break
        new_color = color
        ok = True
        for rest in itertools.combinations(chosen, p.e - 1):
            col = p(rest + (c,))
            if new_color is None:
                new_color = col
            elif col != new_color:
                ok = False
                break
        if not ok:
            continue
        found = _extend_homogeneous(p, chosen + [c], new_color, candidates[pos + 1 :], size, step)
        if found is not None:
            return found
    return None


def _start_color(p: TupleColoring, a: int):
    return p((a,)) if p.e == 1 else None


def find_homogeneous(p: TupleColoring, k: int) -> list[int] | None:
    """Homogeneous ``H`` with ``|H| >= k`` and ``|H| > min(H)``, or None if none exists.

    Any valid set contains one whose size is exactly ``max(k, min + 1)``, so
    the search only builds sets of that size, trying smaller minima first.
    """
    for a in range(p.N):
        size = max(k, a + 1)
        if a + size > p.N:
            continue
        found = _extend_homogeneous(p, [a], _start_color(p, a), list(range(a + 1, p.N)), size)
        if found is not None:
            return found
    return None


def homogeneous_oracle(p: TupleColoring, k: int) -> list[int] | None:
    """Plain enumeration of every nonempty subset; used to cross-check the search."""
    for size in range(1, p.N + 1):
        for h in itertools.combinations(range(p.N), size):
            if size >= k and size > h[0] and is_homogeneous(p, h):
                return list(h)
    return None


def all_colorings(e: int, r: int, N: int, sq_inc=False) -> Iterator[TupleColoring]:
    keys = [t for t in itertools.combinations(range(N), e) if not sq_inc or is_square_increasing(t)]
    for colors in itertools.product(range(r), repeat=len(keys)):
        yield TupleColoring(e, r, N, dict(zip(keys, colors)), sq_inc)


def ph_number(e: int, k: int, r: int, guard: int = 1 << 20, start: int = 0) -> int:
    """Least ``N`` such that every ``r``-coloring of ``[N]^e`` has a valid homogeneous set.

    ``guard`` caps the total number of colorings examined.
    """
    if e < 1 or r < 1:
        raise ValueError("need e >= 1 and r >= 1")
    spent = 0
    for N in itertools.count(start):
        count = r ** len(list(itertools.combinations(range(N), e)))
        spent += count
        if spent > guard:
            raise GuardExceeded(f"ph_number({e}, {k}, {r}) needs more than {guard} colorings (reached N={N})")
        if all(find_homogeneous(p, k) is not None for p in all_colorings(e, r, N)):
            return N
    raise AssertionError("unreachable")


def sq_inc_homogeneous(p: TupleColoring, k: int, m: int) -> list[int] | None:
    """Square-increasing homogeneous ``H`` above ``m`` with ``|H| > min(H) + k``."""
    for a in range(m + 1, p.N):
        size = a + k + 1
        found = _extend_homogeneous(
            p, [a], _start_color(p, a), list(range(a + 1, p.N)), size, step=lambda x, y: x * x < y
        )
        if found is not None:
            return found
    return None


def sq_inc_oracle(p: TupleColoring, k: int, m: int) -> list[int] | None:
    for size in range(1, p.N + 1):
        for h in itertools.combinations(range(m + 1, p.N), size):
            if is_square_increasing(h) and size > h[0] + k and is_homogeneous(p, h):
                return list(h)
    return None


# ------------------------------------------------------- witnesses on chains


def min_witness(v: LnModel, phi: Formula, order: str = "numeric") -> int | None:
    """Least ``b`` in the first level with ``v`` fulfilling ``phi(b)``.

    ``order="top"`` uses the ``<`` of the top model instead of the numeric
    order of the elements.
    """
    fv = free_vars(phi)
    if len(fv) != 1:
        raise ValueError("min_witness needs exactly one free variable")
    (x,) = fv
    hits = [b for b in v[0].elements() if v.fulfills(phi, {x: b}).is_true]
    if not hits or order == "numeric":
        return hits[0] if hits else None
    if order != "top":
        raise ValueError(f"unknown order {order!r}")
    if v.sig.relation_arity("<") != 2:
        raise ValueError("the top model has no binary '<'")
    top = v.top
    least = [c for c in hits if all(c == d or top.holds("<", (c, d)) for d in hits)]
    if len(least) != 1:
        raise ValueError("'<' does not linearly order the witnesses")
    return least[0]


def pair_coloring(v: LnModel, phi: Formula, order: str = "numeric") -> int:
    """0 when deleting level 1 or level 2 gives the same least witness, else 1."""
    if len(v) < 3:
        raise ColoringPrecondition("pair coloring needs a chain of length at least 3")
    keep1 = v.subsequence([0, 1] + list(range(3, len(v))))
    keep2 = v.subsequence([0, 2] + list(range(3, len(v))))
    a, b = min_witness(keep2, phi, order), min_witness(keep1, phi, order)
    if a is None or b is None:
        raise ColoringPrecondition("a deleted-level subchain has no witness in its first level")
    return 0 if a == b else 1


def least_witness_coloring(ms: Sequence[int], phi: Formula) -> int | None:
    """The least-witness coloring of a square-increasing sequence."""
    from .arithmetic import make_sq_models

    return min_witness(make_sq_models(ms), phi)


def sq_pair_coloring(ms: Sequence[int], phi: Formula) -> int:
    """Pair coloring of a square-increasing sequence via its segment chain."""
    from .arithmetic import make_sq_models

    return pair_coloring(make_sq_models(ms), phi)


# ------------------------------------------------------------ chain colorings


def chain_key(levels: Iterable[Structure]) -> tuple:
    return tuple(s.materialize().key() for s in levels)


@dataclass(frozen=True)
class ConstantRule:
    color: int = 0

    def __call__(self, v: LnModel, phi: Formula) -> int:
        return self.color


@dataclass(frozen=True)
class PairRule:
    order: str = "numeric"

    def __call__(self, v: LnModel, phi: Formula) -> int:
        return pair_coloring(v, phi, self.order)


@dataclass(frozen=True)
class TableRule:
    table: Mapping[tuple, int]
    default: int | None = None

    def __call__(self, v: LnModel, phi: Formula) -> int:
        key = chain_key(v)
        if key in self.table:
            return self.table[key]
        if self.default is None:
            raise ColoringPrecondition("chain missing from the coloring table")
        return self.default


@dataclass(frozen=True)
class NameRule:
    """Colors by the raw name of the largest element; renaming changes it."""

    def __call__(self, v: LnModel, phi: Formula) -> int:
        return max(v.top.elements()) % 2


@dataclass
class ChainColoring:
    """A coloring of length-``n`` chains whose top universe lies in ``range(N)``."""

    n: int
    phi: Formula
    r: int
    N: int
    rule: Callable[[LnModel, Formula], int]
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if len(free_vars(self.phi)) != 1:
            raise ValueError("the coloring formula needs exactly one free variable")

    def in_domain(self, v: LnModel) -> bool:
        if len(v) != self.n or any(x < 0 or x >= self.N for x in v.top.elements()):
            return False
        (x,) = free_vars(self.phi)
        return any(v.fulfills(self.phi, {x: b}).is_true for b in v.top.elements())

    def color(self, v: LnModel) -> int | None:
        """The color, or None outside the domain or where the rule is undefined."""
        key = tuple(v.levels)
        if key in self._cache:
            return self._cache[key]
        out = None
        if self.in_domain(v):
            try:
                out = self.rule(v, self.phi)
            except ColoringPrecondition:
                out = None
        self._cache[key] = out
        return out


def _constant_values(sig: Signature) -> dict[str, int]:
    return {c: 0 if c == "0" else int(c.split("_", 1)[1]) for c in sig.constants}


def ordered_structure(sig: Signature, universe: Iterable[int]) -> PartialStructure:
    """Restriction of the natural order to ``universe``.

    Constants ``0`` and ``c_<a>`` denote the numbers themselves.
    """
    u = sorted(set(universe))
    consts = _constant_values(sig)
    rels = {r: [] for r, _ in sig.relations}
    if "<" in rels:
        rels["<"] = [(a, b) for a in u for b in u if a < b]
    return PartialStructure(sig, u, consts, rels, {})


def ordered_family(sig: Signature, N: int) -> list[PartialStructure]:
    """Every ordered structure whose universe lies in ``range(N)`` and holds the constants."""
    need = set(_constant_values(sig).values())
    rest = [x for x in range(N) if x not in need]
    out = []
    if any(x >= N for x in need):
        return out
    for size in range(len(rest) + 1):
        for extra in itertools.combinations(rest, size):
            universe = need | set(extra)
            if universe:
                out.append(ordered_structure(sig, universe))
    return out


def chains_over(family: Sequence[Structure], k: int, strict: bool = False) -> Iterator[tuple]:
    """All length-``k`` chains of family members under the substructure relation."""
    ups = _Links(family, list(range(len(family))), strict)

    def grow(chain):
        if len(chain) == k:
            yield tuple(family[i] for i in chain)
            return
        for j in ups[chain[-1]]:
            yield from grow(chain + [j])

    for i in range(len(family)):
        yield from grow([i])


@dataclass
class BoundednessReport:
    ok: bool
    checked_chains: int
    skipped: int
    domain_errors: list = field(default_factory=list)
    range_errors: list = field(default_factory=list)
    counterexamples: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "checked_chains": self.checked_chains,
            "skipped": self.skipped,
            "domain_errors": len(self.domain_errors),
            "range_errors": len(self.range_errors),
            "counterexamples": [repr(c) for c in self.counterexamples[:5]],
            "counterexample_count": len(self.counterexamples),
        }


def is_bounded_coloring(
    c: ChainColoring,
    family: Sequence[Structure],
    k_max: int,
    max_counterexamples: int = 20,
) -> BoundednessReport:
    """Exhaustive audit of domain, range and collapse invariance over ``family``.

    Every chain of length ``c.n .. k_max`` built from ``family`` is checked;
    chains whose sub-``n``-tuples are all colored are collapsed for
    ``∃x φ(x)`` and every sub-``n``-tuple is recolored on the renamed collapse.
    """
    (x,) = free_vars(c.phi)
    target = Exists(x, c.phi)
    domain_errors, range_errors, bad = [], [], []
    checked = skipped = 0
    for chain in chains_over(family, c.n):
        v = LnModel(chain, check=False)
        expected = all(s.elements() and max(s.elements()) < c.N for s in chain) and any(
            v.fulfills(c.phi, {x: b}).is_true for b in v.top.elements()
        )
        if c.in_domain(v) != expected:
            domain_errors.append(chain)
        col = c.color(v)
        if expected and (col is None or not 0 <= col < c.r):
            range_errors.append(chain)
    for k in range(c.n, k_max + 1):
        for chain in chains_over(family, k):
            v = LnModel(chain, check=False)
            subs = list(itertools.combinations(range(k), c.n))
            colors = [c.color(v.subsequence(s)) for s in subs]
            if any(col is None for col in colors):
                continue
            try:
                r = f_collapse(v, target)
            except CollapsePrecondition:
                skipped += 1
                continue
            checked += 1
            w = r.renamed
            for s, col in zip(subs, colors):
                other = c.color(w.subsequence(s))
                if other != col:
                    bad.append((k, s, col, other, chain_key(chain)))
                    break
            if len(bad) >= max_counterexamples:
                break
    ok = not (domain_errors or range_errors or bad)
    return BoundednessReport(ok, checked, skipped, domain_errors, range_errors, bad)


# ---------------------------------------------------- homogeneous sequences


@dataclass
class SearchOutcome:
    status: str
    chain: list | None = None
    color: int | None = None
    nodes: int = 0

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "color": self.color,
            "chain": None if self.chain is None else [sorted(s.elements()) for s in self.chain],
            "nodes": self.nodes,
        }


class _Links:
    """Lazily computed superstructures of each family member, in search order."""

    def __init__(self, family, order, strict):
        self.family = family
        self.order = order
        self.strict = strict
        self.universes = [frozenset(s.elements()) for s in family]
        self.memo = {}

    def __getitem__(self, i):
        if i not in self.memo:
            fam, u = self.family, self.universes
            self.memo[i] = [
                j
                for j in self.order
                if u[i] <= u[j]
                and not (self.strict and fam[j] == fam[i])
                and is_substructure(fam[i], fam[j])
            ]
        return self.memo[i]


def find_homog_subseq(
    c: ChainColoring,
    family: Sequence[Structure],
    k: int,
    m: int,
    bound: int = 100_000,
    strict: bool = True,
) -> SearchOutcome:
    """Chain from ``family`` of length ``>= k`` with ``|A_0| + m < length``, homogeneous for ``c``.

    A homogeneous chain stays homogeneous when truncated, so only chains of
    the minimal admissible length are built.  With ``strict`` the structures
    must be pairwise distinct.
    """
    order = sorted(range(len(family)), key=lambda i: (len(family[i]), sorted(family[i].elements())))
    ups = _Links(family, order, strict)
    nodes = 0

    def grow(chain, color, target):
        nonlocal nodes
        nodes += 1
        if nodes > bound:
            raise GuardExceeded
        if len(chain) == target:
            return chain, color
        for j in ups[chain[-1]]:
            new = chain + [j]
            col = color
            ok = True
            if len(new) >= c.n:
                for rest in itertools.combinations(range(len(new) - 1), c.n - 1):
                    sub = LnModel([family[new[t]] for t in rest] + [family[j]], check=False)
                    got = c.color(sub)
                    if got is None or (col is not None and got != col):
                        ok = False
                        break
                    col = got
            if ok:
                found = grow(new, col, target)
                if found is not None:
                    return found
        return None

    try:
        for i in order:
            target = max(k, len(family[i]) + m + 1, c.n)
            found = grow([i], None, target)
            if found is not None:
                chain, color = found
                return SearchOutcome(FOUND, [family[t] for t in chain], color, nodes)
    except GuardExceeded:
        return SearchOutcome(BOUND_EXCEEDED, nodes=nodes)
    return SearchOutcome(NONE, nodes=nodes)


def is_homogeneous_chain(c: ChainColoring, chain: Sequence[Structure]) -> int | None:
    """The constant color of every length-``n`` subsequence, or None."""
    v = LnModel(chain, check=False)
    colors = {c.color(v.subsequence(s)) for s in itertools.combinations(range(len(chain)), c.n)}
    if len(colors) != 1 or None in colors:
        return None
    return colors.pop()


@dataclass
class BcpInstance:
    r: int
    n: int
    sig: Signature
    phi: Formula
    j: int
    m: int
    k: int
    N: int | None = None

    def __post_init__(self):
        if self.k < self.n or self.k < self.sig.size + self.m:
            raise ValueError("need k >= n and k >= |L| + m")
        if self.j != self.sig.max_arity:
            raise ValueError("j must be the largest function arity of the signature")

    def default_n(self, cap: int) -> int:
        (x,) = free_vars(self.phi)
        return col_bound(self.k, self.j, length(Exists(x, self.phi)), self.sig.size, cap=cap) + 1


@dataclass
class BcpReport:
    status: str
    N: int
    outcomes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"status": self.status, "N": self.N, "outcomes": [o.to_json() for o in self.outcomes]}


def check_bcp_instance(
    b: BcpInstance,
    family_of: Callable[[int], Sequence[Structure]],
    colorings: Sequence[ChainColoring] | None = None,
    cap: int = 64,
    bound: int = 100_000,
    strict: bool = True,
) -> BcpReport:
    """Search a homogeneous chain for each supplied coloring on the instance's ``N``.

    ``N`` defaults to the collapse bound plus one; past ``cap`` the instance
    is refused.  Without colorings the single constant coloring is checked.
    """
    N = b.N if b.N is not None else b.default_n(cap)
    if N > cap:
        if b.N is None:
            raise GuardExceeded(f"default N = Col + 1 is above the desk cap {cap}")
        raise GuardExceeded(f"N = {N} exceeds the desk cap {cap}")
    family = family_of(N)
    if colorings is None:
        colorings = [ChainColoring(b.n, b.phi, b.r, N, ConstantRule(0))]
    outcomes = []
    status = FOUND
    for c in colorings:
        out = find_homog_subseq(c, family, b.k, b.m, bound, strict)
        outcomes.append(out)
        if out.status == NONE:
            status = "counterexample"
        elif out.status == BOUND_EXCEEDED and status == FOUND:
            status = BOUND_EXCEEDED
    return BcpReport(status, N, outcomes)


# ------------------------------------------------------ chain enumeration


def structures_on(sig: Signature, domain: Sequence[int]) -> Iterator[PartialStructure]:
    """Every partial structure with exactly this domain."""
    d = sorted(domain)
    const_choices = itertools.product(d, repeat=len(sig.constants))
    rel_spaces = [list(itertools.product(d, repeat=a)) for _, a in sig.relations]
    fn_spaces = [list(itertools.product(d, repeat=a)) for _, a in sig.functions]
    for consts in const_choices:
        cmap = dict(zip(sig.constants, consts))
        for rel_bits in itertools.product(*[range(2 ** len(s)) for s in rel_spaces]):
            rels = {
                name: [t for pos, t in enumerate(space) if bits >> pos & 1]
                for (name, _), space, bits in zip(sig.relations, rel_spaces, rel_bits)
            }
            for fn_vals in itertools.product(
                *[itertools.product([None] + d, repeat=len(s)) for s in fn_spaces]
            ):
                funcs = {
                    name: {t: val for t, val in zip(space, vals) if val is not None}
                    for (name, _), space, vals in zip(sig.functions, fn_spaces, fn_vals)
                }
                yield PartialStructure(sig, d, cmap, rels, funcs)


def enumerate_ln_models(sig: Signature, n: int, universe: Iterable[int], cap: int = 6) -> Iterator[LnModel]:
    """Every chain of ``n`` partial structures on nonempty subsets of ``universe``."""
    u = sorted(set(universe))
    if len(u) > cap:
        raise GuardExceeded(f"universe of size {len(u)} exceeds cap {cap}")
    family = []
    for size in range(1, len(u) + 1):
        for d in itertools.combinations(u, size):
            family.extend(structures_on(sig, d))
    ups = {i: [j for j, t in enumerate(family) if is_substructure(s, t)] for i, s in enumerate(family)}

    def grow(chain):
        if len(chain) == n:
            yield LnModel([family[i] for i in chain], check=False)
            return
        for j in ups[chain[-1]]:
            yield from grow(chain + [j])

    if n < 1:
        return
    for i in range(len(family)):
        yield from grow([i])


def relational_chain_count(sig: Signature, n: int, universe: Iterable[int]) -> int:
    """Closed-form count of chains for a signature without function symbols."""
    if sig.functions:
        raise ValueError("the product formula covers relational signatures only")
    u = sorted(set(universe))
    subsets = [frozenset(d) for size in range(1, len(u) + 1) for d in itertools.combinations(u, size)]
    total = 0

    def walk(chain):
        nonlocal total
        if len(chain) == n:
            top = len(chain[-1])
            weight = len(chain[0]) ** len(sig.constants)
            for _, a in sig.relations:
                weight *= 2 ** (top**a)
            total += weight
            return
        for d in subsets:
            if chain[-1] <= d:
                walk(chain + [d])

    if n >= 1:
        for d in subsets:
            walk([d])
    return total


@dataclass
class ProbeReport:
    total: int
    true: int
    false: int
    undefined: int
    first_false: LnModel | None = None
    first_true: LnModel | None = None

    @property
    def sound(self) -> bool:
        """No chain returns a defined False verdict."""
        return self.false == 0

    def to_json(self) -> dict:
        def levels(v):
            return None if v is None else [sorted(s.elements()) for s in v]

        return {
            "total": self.total,
            "true": self.true,
            "false": self.false,
            "undefined": self.undefined,
            "all_defined_true": self.false == 0,
            "first_false": levels(self.first_false),
            "first_true": levels(self.first_true),
        }


def completeness_probe(phi: Formula, n: int, sig: Signature, universe: Iterable[int], cap: int = 6) -> ProbeReport:
    """Fulfillment of the sentence ``phi`` on every chain over ``universe``."""
    from .logic import depth

    if depth(phi) >= n:
        raise ValueError("need dp(phi) < n")
    counts = {"true": 0, "false": 0, "undefined": 0}
    first = {"true": None, "false": None}
    total = 0
    for v in enumerate_ln_models(sig, n, universe, cap):
        total += 1
        status = v.fulfills(phi).status
        counts[status] += 1
        if status in first and first[status] is None:
            first[status] = v
    return ProbeReport(total, counts["true"], counts["false"], counts["undefined"], first["false"], first["true"])
