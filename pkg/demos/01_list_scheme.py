"""A first run: the order-1 list scheme.

The scheme generates the infinite tree

    if(Nil, if(data(Nil), if(data(data(Nil)), ...)))

and the automaton insists that every ``if`` spawns a copy in state q1 on
its second child.  Following q1 leads to a branch that visits the odd
state forever, so the tree is rejected.  The demo prints the tree prefix,
the typing the checker assigns to ``if``, and the size of the game.
"""

from pathlib import Path

from horsck import check, expand_value_tree, parse_automaton, parse_scheme, terminal_types
from horsck.automata import tree_term
from horsck.coltypes import pretty

CORPUS = Path(__file__).resolve().parent.parent / "corpus"

scheme = parse_scheme((CORPUS / "lists.hors").read_text())
aut = parse_automaton((CORPUS / "lists.apt").read_text())

for d in range(1, 5):
    print(f"depth {d}: {tree_term(expand_value_tree(scheme, d))}")

# one minimal typing per (terminal, state); the boxes carry the colors
for q in aut.states:
    for t in terminal_types("if", q, aut):
        print(f"if : {pretty(t)}")

v = check(scheme, aut)
print("accepted" if v.accepted else "rejected", v.stats)

# dropping the odd color turns it into a safety question, which holds
safe = parse_automaton((CORPUS / "lists_safe.apt").read_text())
print("all-zero colors:", "accepted" if check(scheme, safe).accepted else "rejected")
