"""Robinson axioms on chains of arithmetic segments."""

from lnmodel.arithmetic import check_q, make_sq_models
from lnmodel.fulfillment import LnModel
from lnmodel.structures import make_segment

chains = [make_sq_models(ms) for ms in [(2, 5, 26), (2, 5, 26, 677), (3, 10, 101, 10202)]]
# not square increasing, but still a chain; q7 comes out undefined here
chains.append(LnModel([make_segment(2), make_segment(3)]))

for v in chains:
    r = check_q(v)
    cells = " ".join(f"{name}={x.status}" for name, x in r.verdicts.items())
    print(f"{[s.n for s in v]}: {cells}")
    for note in r.notes:
        print(f"  note: {note}")
