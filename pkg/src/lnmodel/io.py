"""JSON forms of signatures, structures, chains and reports."""

from __future__ import annotations

import json
from pathlib import Path

from .fulfillment import LnModel
from .logic import ARITHMETIC, Signature
from .structures import PartialStructure, Segment, Structure

SCHEMA_VERSION = 1


def signature_to_json(sig: Signature) -> dict:
    return {
        "relations": [[r, a] for r, a in sig.relations],
        "functions": [[f, a] for f, a in sig.functions],
        "constants": list(sig.constants),
    }


def signature_from_json(d) -> Signature:
    if d == "arithmetic":
        return ARITHMETIC
    return Signature(
        relations=tuple((r, int(a)) for r, a in d.get("relations", [])),
        functions=tuple((f, int(a)) for f, a in d.get("functions", [])),
        constants=tuple(d.get("constants", [])),
    )


def structure_to_json(s: Structure) -> dict:
    if isinstance(s, Segment):
        return {"segment": s.n}
    m = s.materialize()
    return {
        "domain": m.elements(),
        "constants": dict(sorted(m.constants.items())),
        "relations": {r: sorted(list(t) for t in ts) for r, ts in sorted(m.relations.items())},
        "functions": {
            f: sorted([list(k), v] for k, v in tab.items()) for f, tab in sorted(m.functions.items())
        },
    }


def structure_from_json(d: dict, sig: Signature) -> Structure:
    if "segment" in d:
        return Segment(int(d["segment"]), sig)
    return PartialStructure(
        sig,
        d["domain"],
        d.get("constants", {}),
        {r: [tuple(t) for t in ts] for r, ts in d.get("relations", {}).items()},
        {f: {tuple(k): v for k, v in pairs} for f, pairs in d.get("functions", {}).items()},
    )


def chain_to_json(v: LnModel) -> dict:
    if all(isinstance(s, Segment) for s in v):
        return {"signature": signature_to_json(v.sig), "segments": [s.n for s in v]}
    return {"signature": signature_to_json(v.sig), "levels": [structure_to_json(s) for s in v]}


def chain_from_json(d, sig: Signature | None = None) -> LnModel:
    """Accepts ``{"segments": [...]}``, ``{"levels": [...]}`` or a bare list of levels."""
    if isinstance(d, list):
        d = {"levels": d}
    if sig is None:
        sig = signature_from_json(d.get("signature", "arithmetic"))
    if "segments" in d:
        return LnModel([Segment(int(m), sig) for m in d["segments"]])
    return LnModel([structure_from_json(s, sig) for s in d["levels"]])


def dumps(obj) -> str:
    """Canonical serialization: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def load_json(path: str | Path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def write_json(path: str | Path, obj) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(dumps(obj), encoding="utf-8")
