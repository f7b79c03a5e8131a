"""Seeded generators for random schemes, automata, trees and games."""

from __future__ import annotations

import random

from horsck.automata import FALSE, TRUE, And, Atom, Automaton, Node, Or
from horsck.parity import ParityGame
from horsck.syntax import (O, Kind, NonTerminal, Rule, Scheme, Terminal, Var, apply)

SIGMA = {"a": 2, "b": 1, "c": 0}


def random_formula(rng: random.Random, arity: int, states, depth: int = 2):
    r = rng.random()
    if arity == 0 or depth == 0:
        if arity == 0:
            return TRUE if r < 0.75 else FALSE
        if r < 0.1:
            return TRUE
        if r < 0.2:
            return FALSE
        return Atom(rng.randint(1, arity), rng.choice(states))
    if r < 0.1:
        return TRUE
    if r < 0.15:
        return FALSE
    if r < 0.45:
        return Atom(rng.randint(1, arity), rng.choice(states))
    if r < 0.75:
        return And(random_formula(rng, arity, states, depth - 1),
                   random_formula(rng, arity, states, depth - 1))
    return Or(random_formula(rng, arity, states, depth - 1),
              random_formula(rng, arity, states, depth - 1))


def random_automaton(rng: random.Random, sigma=SIGMA, n_states=None, max_color=2,
                     colors=True) -> Automaton:
    n = n_states or rng.randint(1, 2)
    states = tuple(f"q{i}" for i in range(n))
    trans = {}
    for q in states:
        for a, ar in sigma.items():
            if rng.random() < 0.9:
                trans[(q, a)] = random_formula(rng, ar, states)
    coloring = {q: (rng.randint(0, max_color) if colors else 0) for q in states}
    return Automaton(states, trans, coloring, states[0])


# ---- order-0 schemes


def _ground_term(rng, nts, depth):
    if depth == 0 or rng.random() < 0.3:
        return NonTerminal(rng.choice(nts)) if rng.random() < 0.6 else Terminal("c")
    a = rng.choice(["a", "b", "a", "b", "c"])
    args = [_ground_term(rng, nts, depth - 1) for _ in range(SIGMA[a])]
    return apply(Terminal(a), args)


def random_order0_scheme(rng: random.Random, max_nts: int = 3) -> Scheme:
    nts = ["S", "T", "U"][: rng.randint(1, max_nts)]
    rules = {}
    for f in nts:
        rules[f] = Rule((), _ground_term(rng, nts, 2))
    return Scheme(dict(SIGMA), {f: O for f in nts}, "S", rules)


# ---- higher-order schemes


K1 = Kind((O,))
K2 = Kind((O, O))
KH = Kind((K1, O))  # (o -> o) -> o
KH2 = Kind((K1, O, O))  # (o -> o) -> o -> o


def _term_of_kind(rng, want: Kind, env: dict[str, Kind], depth: int):
    """Random term of kind ``want`` built from names in ``env``."""
    heads = [(x, k) for x, k in env.items()
             if k.args[len(k.args) - len(want.args):] == want.args and len(k.args) >= len(want.args)]
    if depth <= 0:
        leaves = [(x, k) for x, k in heads if len(k.args) == len(want.args)]
        if leaves:
            heads = leaves
    if not heads:
        return None
    for _ in range(8):
        x, k = rng.choice(heads)
        n = len(k.args) - len(want.args)
        args = []
        ok = True
        for ak in k.args[:n]:
            a = _term_of_kind(rng, ak, env, depth - 1)
            if a is None:
                ok = False
                break
            args.append(a)
        if ok:
            head = Var(x) if x.islower() and x not in SIGMA else (
                Terminal(x) if x in SIGMA else NonTerminal(x))
            return apply(head, args)
    return None


def random_ho_scheme(rng: random.Random, max_order: int = 2) -> Scheme:
    kinds_pool = [O, K1, K2] + ([KH, KH2] if max_order >= 2 else [])
    nts = {"S": O}
    for name in ["F", "G", "H"][: rng.randint(1, 3)]:
        nts[name] = rng.choice(kinds_pool[1:])
    for _ in range(50):
        rules = {}
        ok = True
        for f, k in nts.items():
            params = tuple(["x", "y", "z"][i] for i in range(k.arity))
            env = {a: Kind((O,) * n) for a, n in SIGMA.items()}
            env.update(nts)
            env.update(zip(params, k.args))
            body = _term_of_kind(rng, O, env, 3)
            if body is None:
                ok = False
                break
            rules[f] = Rule(params, body)
        if ok:
            s = Scheme(dict(SIGMA), dict(nts), "S", rules)
            s.validate()
            return s
    raise RuntimeError("could not generate a scheme")


# ---- trees and games


def random_tree(rng: random.Random, depth: int) -> Node:
    if depth <= 1:
        return Node("c")
    a = rng.choice(["a", "b", "c"])
    return Node(a, tuple(random_tree(rng, depth - 1) for _ in range(SIGMA[a])))


def random_game(rng: random.Random, max_vertices: int = 8, max_colors: int = 4) -> ParityGame:
    n = rng.randint(1, max_vertices)
    owner = [rng.randint(0, 1) for _ in range(n)]
    color = [rng.randrange(max_colors) for _ in range(n)]
    succ = []
    for _ in range(n):
        k = rng.choice([0, 1, 1, 2, 2, 3])
        succ.append(sorted(set(rng.randrange(n) for _ in range(k))))
    return ParityGame.from_lists(owner, color, succ, 0)
