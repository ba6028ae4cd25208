"""Homogeneous sets for tuple colorings and homogeneous chains for the pair coloring."""

from lnmodel.logic import Signature, parse_formula
from lnmodel.ramsey import ChainColoring, PairRule, find_homog_subseq, ordered_family, ph_number

for e, k in [(1, 2), (1, 3), (2, 2)]:
    print(f"least N for e={e}, k={k}, two colors: {ph_number(e, k, 2)}")

sig = Signature(relations=(("<", 2),), constants=("0", "c_1"))
phi = parse_formula("0 < x", sig)
c = ChainColoring(3, phi, 2, 14, PairRule())
out = find_homog_subseq(c, ordered_family(sig, 14), 12, 5)
print(out.status, "color", out.color)
for s in out.chain or []:
    print("  ", sorted(s.elements()))
