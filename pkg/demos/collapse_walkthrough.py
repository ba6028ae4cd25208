"""Collapse one random chain and show what survives at each level."""

from lnmodel.collapse import f_collapse, verify_collapse
from lnmodel.generators import case_rng, collapse_instance
from lnmodel.logic import render_formula

v, f = collapse_instance(case_rng(7, 4))
print("sentence:", render_formula(f))
r = f_collapse(v, f)
rep = verify_collapse(v, r, f)
for i, (level, kept) in enumerate(zip(v, r.universes)):
    print(f"level {i}: {sorted(level.elements())} -> {kept}")
print("conditions:", rep["conditions"])

# dropping a kept element breaks verdict equivalence
from lnmodel.collapse import result_from_universe

smaller = result_from_universe(v, set(r.universe) - {2})
print("without 2:", verify_collapse(v, smaller, f)["failures"][:2])
