"""Cross-checking the checker on random instances.

Order-0 schemes denote regular trees, so acceptance can be decided
directly on the finite graph of non-terminals.  Here we draw random
schemes and automata and compare the two answers, counting how many
were accepted along the way.
"""

import random
import sys
from pathlib import Path

from horsck import check, regular_oracle

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))
from corpus_gen import random_automaton, random_order0_scheme  # noqa: E402

rng = random.Random(0)
agree = accepted = 0
N = 200
for _ in range(N):
    s, aut = random_order0_scheme(rng), random_automaton(rng)
    v = check(s, aut)
    agree += v.accepted == regular_oracle(s, aut, aut.initial)
    accepted += v.accepted

print(f"{agree}/{N} agree with the regular-tree oracle ({accepted} accepted)")
