"""Witnesses for an order-2 scheme.

``abc.hors`` takes ``a``, ``b`` and ``c`` as arguments to a higher-order
non-terminal and produces ``a(b(c), a(b(b(c)), ...))``.  When the
automaton accepts, the checker returns Eve's winning strategy restricted
to reachable vertices.  The witness is plain JSON and is re-checked by a
validator that only looks at typing rules and cycle colors.
"""

import json
from pathlib import Path

from horsck import Witness, check, parse_automaton, parse_scheme, validate_witness

CORPUS = Path(__file__).resolve().parent.parent / "corpus"
scheme = parse_scheme((CORPUS / "abc.hors").read_text())

for name in ["abc_safe.apt", "abc_buchi_a.apt", "abc_no_c_under_b.apt"]:
    aut = parse_automaton((CORPUS / name).read_text())
    v = check(scheme, aut)
    print(f"{name:24s} {'accepted' if v.accepted else 'rejected'}")
    if v.witness is None:
        continue
    data = v.witness.to_json()
    for vert in v.witness.vertices()[:4]:
        print("   ", vert)
    back = Witness.from_json(json.loads(json.dumps(data)), scheme)
    errs = validate_witness(back, scheme, aut, v.state)
    print(f"    witness: {len(json.dumps(data))} bytes, "
          f"max cycle color {data['cycles_max_color']}, errors {errs or 'none'}")
