"""Command-line front end.

Every command prints a short human summary and, with ``--out DIR``, writes
``DIR/<command>.json``.  Reports never contain timings or host details so
that equal arguments give byte-identical files for any ``--workers``.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .arithmetic import NotSquareIncreasing, check_q, make_sq_models
from .collapse import CollapsePrecondition, describe_bound, f_collapse, verify_collapse
from .fulfillment import LnModel
from .generators import case_rng, collapse_instance
from .io import SCHEMA_VERSION, chain_from_json, chain_to_json, dumps, load_json, signature_from_json, signature_to_json
from .logic import ARITHMETIC, Signature, SyntaxError_, UndeclaredSymbol, ArityMismatch, length, parse_formula, render_formula
from .ramsey import (
    BcpInstance,
    ChainColoring,
    ConstantRule,
    GuardExceeded,
    NameRule,
    PairRule,
    check_bcp_instance,
    completeness_probe,
    enumerate_ln_models,
    ordered_family,
    ph_number,
)

EXIT_TRUE, EXIT_FALSE, EXIT_INPUT, EXIT_UNDEFINED, EXIT_CAP = 0, 1, 2, 3, 4

INPUT_ERRORS = (ValueError, KeyError, SyntaxError_, UndeclaredSymbol, ArityMismatch, OSError, json.JSONDecodeError)


class InputError(Exception):
    pass


# ------------------------------------------------------------------ helpers


def _sig(args) -> Signature:
    if not args.sig or args.sig == "arithmetic":
        return ARITHMETIC
    text = args.sig
    data = json.loads(text) if text.lstrip().startswith("{") else load_json(text)
    return signature_from_json(data)


def _segments(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError as e:
        raise InputError(f"bad segment list {text!r}") from e


def _chain(args, sig: Signature) -> LnModel:
    if args.segments:
        return make_sq_models(_segments(args.segments), sig)
    if args.chain:
        return chain_from_json(load_json(args.chain), sig)
    raise InputError("give --segments or --chain")


def _assignment(text: str | None) -> dict[str, int]:
    out = {}
    for part in (text or "").split(","):
        if part.strip():
            name, _, value = part.partition("=")
            out[name.strip()] = int(value)
    return out


def _report(command: str, config: dict, result: dict) -> dict:
    return {"schema": SCHEMA_VERSION, "version": __version__, "command": command, "config": config, "result": result}


def _emit(args, report: dict) -> None:
    if args.out:
        path = Path(args.out) / f"{report['command']}.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(dumps(report), encoding="utf-8")
        print(f"report: {path}")


def _cache_dir() -> Path | None:
    d = os.environ.get("FULFILLMENT_LAB_CACHE")
    return Path(d) if d else None


def _cached(kind: str, key: dict, compute):
    """Memoize a JSON-able result on disk when FULFILLMENT_LAB_CACHE is set."""
    d = _cache_dir()
    if d is None:
        return compute()
    digest = hashlib.sha256(dumps([kind, key]).encode()).hexdigest()[:20]
    path = d / f"{kind}-{digest}.json"
    if path.exists():
        return json.loads(path.read_text(encoding="utf-8"))
    value = compute()
    d.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(value), encoding="utf-8")
    return value


# ----------------------------------------------------------------- commands


def cmd_fulfill(args) -> int:
    sig = _sig(args)
    if not args.formula:
        raise InputError("--formula is required")
    f = parse_formula(args.formula, sig)
    v = _chain(args, sig)
    a = _assignment(args.assign)
    trace = v.trace(f, a)
    print(f"{render_formula(f)}  on  {len(v)} levels  ->  {trace['verdict']['verdict']}")
    for key in ("index", "witness", "range_level", "counterexample"):
        if key in trace:
            print(f"  {key}: {trace[key]}")
    config = {"formula": render_formula(f), "assignment": a, "chain": chain_to_json(v)}
    _emit(args, _report("fulfill", config, trace))
    status = trace["verdict"]["verdict"]
    return {"true": EXIT_TRUE, "false": EXIT_FALSE}.get(status, EXIT_UNDEFINED)


def cmd_qcheck(args) -> int:
    ms = _segments(args.segments or "")
    try:
        v = make_sq_models(ms)
    except NotSquareIncreasing as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    rep = check_q(v)
    for name, status in rep.rows():
        print(f"  {name:<12} {status}")
    if rep.notes:
        print("  notes: " + "; ".join(rep.notes))
    _emit(args, _report("qcheck", {"segments": ms}, rep.to_json()))
    return EXIT_TRUE if rep.all_true else EXIT_FALSE


def _collapse_case(seed: int, index: int) -> dict:
    v, f = collapse_instance(case_rng(seed, index))
    r = f_collapse(v, f)
    rep = verify_collapse(v, r, f)
    return {
        "case": index,
        "formula": render_formula(f),
        "levels": [len(s) for s in v],
        "universes": r.universes,
        "ok": rep["ok"],
        "conditions": rep["conditions"],
        "sizes": rep["sizes"],
        "failures": rep["failures"],
    }


def _run_cases(fn, seed: int, count: int, workers: int) -> list[dict]:
    if workers <= 1:
        rows = [fn(seed, i) for i in range(count)]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(fn, [seed] * count, range(count), chunksize=max(1, count // (4 * workers))))
    return sorted(rows, key=lambda row: row["case"])


def cmd_collapse(args) -> int:
    if args.suite:
        rows = _run_cases(_collapse_case, args.seed, args.suite, args.workers)
        passed = sum(row["ok"] for row in rows)
        print(f"collapse suite: {passed}/{len(rows)} instances pass every condition")
        result = {"passed": passed, "total": len(rows), "cases": rows}
        _emit(args, _report("collapse", {"seed": args.seed, "suite": args.suite}, result))
        return EXIT_TRUE if passed == len(rows) else EXIT_FALSE
    sig = _sig(args)
    if not args.formula:
        raise InputError("--formula is required")
    f = parse_formula(args.formula, sig)
    v = _chain(args, sig)
    try:
        r = f_collapse(v, f, seed_bottom=args.seed_bottom)
    except CollapsePrecondition as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    rep = verify_collapse(v, r, f)
    r.report = rep
    print(f"{'level':>5} {'|A_i|':>8} {'|B_i|':>6}  Col bound")
    for i, (s, b) in enumerate(zip(v, rep["sizes"])):
        print(f"{i:>5} {len(s):>8} {b:>6}  {rep['bounds'][i]}")
    for line in rep["failures"]:
        print(f"  FAIL {line}")
    config = {"formula": render_formula(f), "chain": chain_to_json(v), "seed_bottom": args.seed_bottom}
    out = r.to_json()
    out["renamed"] = chain_to_json(r.renamed)
    _emit(args, _report("collapse", config, out))
    return EXIT_TRUE if rep["ok"] else EXIT_FALSE


def cmd_probe(args) -> int:
    sig = _sig(args)
    f = parse_formula(args.formula, sig)
    universe = list(range(args.universe))
    try:
        rep = completeness_probe(f, args.n, sig, universe, cap=args.cap)
    except GuardExceeded as e:
        print(f"cap exceeded: {e}", file=sys.stderr)
        return EXIT_CAP
    out = rep.to_json()
    print(f"{out['total']} chains: {out['true']} true, {out['false']} false, {out['undefined']} undefined")
    if out["false"] == 0:
        print("no defined-False verdict")
    if out["true"] == 0:
        print("no fulfilling chain")
    config = {"formula": render_formula(f), "n": args.n, "universe": args.universe, "signature": signature_to_json(sig)}
    _emit(args, _report("probe", config, out))
    return EXIT_TRUE


def cmd_enumerate(args) -> int:
    sig = _sig(args)
    try:
        chains = [chain_to_json(v)["levels"] for v in enumerate_ln_models(sig, args.n, range(args.universe), args.cap)]
    except GuardExceeded as e:
        print(f"cap exceeded: {e}", file=sys.stderr)
        return EXIT_CAP
    print(f"{len(chains)} chains of length {args.n} over a universe of size {args.universe}")
    config = {"n": args.n, "universe": args.universe, "signature": signature_to_json(sig)}
    _emit(args, _report("enumerate", config, {"count": len(chains), "chains": chains}))
    return EXIT_TRUE


def cmd_ph(args) -> int:
    key = {"e": args.e, "k": args.k, "r": args.r, "guard": args.cap}
    try:
        value = _cached("ph", key, lambda: ph_number(args.e, args.k, args.r, guard=args.cap))
    except GuardExceeded as e:
        print(f"cap exceeded: {e}", file=sys.stderr)
        return EXIT_CAP
    print(f"least N for e={args.e}, k={args.k}, r={args.r}: {value}")
    _emit(args, _report("ph", key, {"N": value}))
    return EXIT_TRUE


RULES = {"pair": PairRule, "constant": ConstantRule, "name": NameRule}


def cmd_bcp(args) -> int:
    sig = _sig(args) if args.sig else Signature(relations=(("<", 2),), constants=("0", "c_1"))
    f = parse_formula(args.formula or "0 < x", sig)
    n = args.n
    try:
        inst = BcpInstance(r=2, n=n, sig=sig, phi=f, j=sig.max_arity, m=args.m, k=args.k, N=args.N)
        coloring = None
        N = inst.N if inst.N is not None else inst.default_n(args.cap)
        if N > args.cap:
            if inst.N is None:
                raise GuardExceeded(f"default N = Col(k, j, |φ|, |L|) + 1 is above the desk cap {args.cap}")
            raise GuardExceeded(f"N = {describe_bound(N)} exceeds the desk cap {args.cap}")
        coloring = ChainColoring(n, f, 2, N, RULES[args.coloring]())
        rep = check_bcp_instance(
            inst, lambda size: ordered_family(sig, size), [coloring], cap=args.cap, bound=args.bound
        )
    except GuardExceeded as e:
        print(f"cap exceeded: {e}", file=sys.stderr)
        return EXIT_CAP
    out = rep.to_json()
    first = rep.outcomes[0]
    print(f"N={rep.N}: {rep.status}; color {first.color}; length {len(first.chain) if first.chain else 0}")
    config = {
        "formula": render_formula(f),
        "n": n,
        "k": args.k,
        "m": args.m,
        "N": args.N,
        "coloring": args.coloring,
        "signature": signature_to_json(sig),
    }
    _emit(args, _report("bcp", config, out))
    if rep.status == "found":
        return EXIT_TRUE
    return EXIT_CAP if rep.status == "bound-exceeded" else EXIT_FALSE


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lnmodel", description="Fulfillment over finite chains of partial structures")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, formula=True):
        sp.add_argument("--sig", help="signature JSON file or inline JSON; default arithmetic")
        if formula:
            sp.add_argument("--formula", help="formula text")
        sp.add_argument("--out", help="directory for the JSON report")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--cap", type=int, default=64)

    sp = sub.add_parser("fulfill", help="evaluate a formula on a chain")
    common(sp)
    sp.add_argument("--segments", help="comma-separated square-increasing sizes")
    sp.add_argument("--chain", help="chain JSON file")
    sp.add_argument("--assign", help="parameters such as x=3,y=1")
    sp.set_defaults(fn=cmd_fulfill)

    sp = sub.add_parser("qcheck", help="Robinson axioms on a square-increasing chain")
    common(sp, formula=False)
    sp.add_argument("--segments", required=True)
    sp.set_defaults(fn=cmd_qcheck)

    sp = sub.add_parser("collapse", help="collapse a chain, or audit a random suite")
    common(sp)
    sp.add_argument("--segments")
    sp.add_argument("--chain")
    sp.add_argument("--suite", type=int, default=0, help="number of random instances")
    sp.add_argument("--seed-bottom", action="store_true", help="keep level 0 down to the constants")
    sp.set_defaults(fn=cmd_collapse)

    sp = sub.add_parser("probe", help="fulfillment on every chain over a small universe")
    common(sp)
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--universe", type=int, default=2)
    sp.set_defaults(fn=cmd_probe, cap=6)

    sp = sub.add_parser("enumerate", help="list every chain over a small universe")
    common(sp, formula=False)
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--universe", type=int, default=1)
    sp.set_defaults(fn=cmd_enumerate, cap=6)

    sp = sub.add_parser("ph", help="least N for the large homogeneous set principle")
    common(sp, formula=False)
    sp.add_argument("--e", type=int, default=1)
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--r", type=int, default=2)
    sp.set_defaults(fn=cmd_ph, cap=1 << 20)

    sp = sub.add_parser("bcp", help="homogeneous chain search for a chain coloring")
    common(sp)
    sp.add_argument("--n", type=int, default=3, help="length of colored chains")
    sp.add_argument("--k", type=int, default=12)
    sp.add_argument("--m", type=int, default=5)
    sp.add_argument("--N", type=int, default=None, help="universe bound; default Col + 1")
    sp.add_argument("--coloring", choices=sorted(RULES), default="pair")
    sp.add_argument("--bound", type=int, default=100_000)
    sp.set_defaults(fn=cmd_bcp)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    started = time.perf_counter()
    try:
        code = args.fn(args)
    except (InputError, *INPUT_ERRORS) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    print(f"elapsed {time.perf_counter() - started:.2f}s")
    return code


if __name__ == "__main__":
    sys.exit(main())
