"""Alternating parity tree automata, value-tree expansion and two oracles.

Automaton file format::

    states: q0 q1
    initial: q0
    colors:  q0 : 0   q1 : 1
    delta:
      q0 if -> (2,q0) /\\ (2,q1)
      q1 if -> (1,q1) /\\ (2,q0)
      q0 Nil -> true

``/\\`` binds tighter than ``\\/``.  A missing transition means ``false``.
The divergence leaf is the nullary terminal ``_|_``; its transitions may be
declared like any other and default to ``false``.  When ``colors:`` is
omitted every state gets color 0 (an ATA).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, Mapping, Union

from .syntax import (NonTerminal, ParseError, Scheme, Term, Terminal, TokenStream,
                     split_sections, spine, substitute, apply as apply_term)

OMEGA = "_|_"
DEFAULT_FUEL = 10_000

Atom_ = tuple  # (direction, state)


# --------------------------------------------------------------------------
# positive boolean formulas


@dataclass(frozen=True)
class PTrue:
    def __str__(self):
        return "true"


@dataclass(frozen=True)
class PFalse:
    def __str__(self):
        return "false"


@dataclass(frozen=True)
class Atom:
    direction: int
    state: str

    def __str__(self):
        return f"({self.direction},{self.state})"


@dataclass(frozen=True)
class And:
    left: "Pbf"
    right: "Pbf"

    def __str__(self):
        return f"{_wrap(self.left, Or)} /\\ {_wrap(self.right, Or)}"


@dataclass(frozen=True)
class Or:
    left: "Pbf"
    right: "Pbf"

    def __str__(self):
        return f"{self.left} \\/ {self.right}"


Pbf = Union[PTrue, PFalse, Atom, And, Or]
TRUE = PTrue()
FALSE = PFalse()


def _wrap(p, cls):
    return f"({p})" if isinstance(p, cls) else str(p)


def conj(parts: Iterable[Pbf]) -> Pbf:
    parts = list(parts)
    if not parts:
        return TRUE
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(parts: Iterable[Pbf]) -> Pbf:
    parts = list(parts)
    if not parts:
        return FALSE
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def dnf(phi: Pbf) -> FrozenSet[FrozenSet[tuple[int, str]]]:
    """Disjuncts of the disjunctive normal form, each a set of (direction, state)."""
    if isinstance(phi, PTrue):
        return frozenset([frozenset()])
    if isinstance(phi, PFalse):
        return frozenset()
    if isinstance(phi, Atom):
        return frozenset([frozenset([(phi.direction, phi.state)])])
    if isinstance(phi, Or):
        return dnf(phi.left) | dnf(phi.right)
    left, right = dnf(phi.left), dnf(phi.right)
    return frozenset(a | b for a in left for b in right)


def minimal_sets(sets: Iterable[frozenset]) -> list[frozenset]:
    """Inclusion-minimal members, in a deterministic order."""
    uniq = sorted(set(sets), key=lambda s: (len(s), sorted(s)))
    out: list[frozenset] = []
    for s in uniq:
        if not any(m <= s for m in out):
            out.append(s)
    return out


def satisfies(atoms: Iterable[tuple[int, str]], phi: Pbf) -> bool:
    """Evaluate ``phi`` under the valuation that makes exactly ``atoms`` true."""
    atoms = atoms if isinstance(atoms, (set, frozenset)) else set(atoms)
    return _sat(atoms, phi)


def _sat(atoms, phi) -> bool:
    if isinstance(phi, PTrue):
        return True
    if isinstance(phi, PFalse):
        return False
    if isinstance(phi, Atom):
        return (phi.direction, phi.state) in atoms
    if isinstance(phi, And):
        return _sat(atoms, phi.left) and _sat(atoms, phi.right)
    return _sat(atoms, phi.left) or _sat(atoms, phi.right)


def formula_atoms(phi: Pbf) -> set[tuple[int, str]]:
    if isinstance(phi, Atom):
        return {(phi.direction, phi.state)}
    if isinstance(phi, (And, Or)):
        return formula_atoms(phi.left) | formula_atoms(phi.right)
    return set()


# --------------------------------------------------------------------------
# automata


@dataclass(frozen=True, eq=False)
class Automaton:
    states: tuple[str, ...]
    transitions: Mapping[tuple[str, str], Pbf]
    coloring: Mapping[str, int]
    initial: str
    _dnf_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if not self.states:
            raise ValueError("automaton needs at least one state")
        if self.initial not in self.states:
            raise ValueError(f"initial state {self.initial!r} is not a state")
        missing = [q for q in self.states if q not in self.coloring]
        if missing:
            raise ValueError(f"no color for state {missing[0]!r}")
        for (q, _a), phi in self.transitions.items():
            if q not in self.states:
                raise ValueError(f"transition from unknown state {q!r}")
            for _d, p in formula_atoms(phi):
                if p not in self.states:
                    raise ValueError(f"unknown state {p!r} in transition")

    def delta(self, q: str, a: str) -> Pbf:
        return self.transitions.get((q, a), FALSE)

    def dnf(self, q: str, a: str):
        key = (q, a)
        if key not in self._dnf_cache:
            self._dnf_cache[key] = dnf(self.delta(q, a))
        return self._dnf_cache[key]

    def color(self, q: str) -> int:
        return self.coloring[q]

    @property
    def is_ata(self) -> bool:
        return all(c == 0 for c in self.coloring.values())

    def with_initial(self, q: str) -> "Automaton":
        return Automaton(self.states, self.transitions, self.coloring, q)

    def check_signature(self, terminals: Mapping[str, int]) -> None:
        """Raise ``ValueError`` if a transition mentions an unknown terminal
        or a direction outside its arity."""
        for (q, a), phi in self.transitions.items():
            if a == OMEGA:
                arity = 0
            elif a not in terminals:
                raise ValueError(f"transition for unknown terminal {a!r}")
            else:
                arity = terminals[a]
            for d, _p in formula_atoms(phi):
                if not 1 <= d <= arity:
                    raise ValueError(f"direction {d} out of range for {a} (arity {arity})")

    def __str__(self) -> str:
        return print_automaton(self)


def print_automaton(aut: Automaton) -> str:
    lines = ["states: " + " ".join(aut.states),
             f"initial: {aut.initial}",
             "colors: " + "  ".join(f"{q} : {aut.coloring[q]}" for q in aut.states),
             "delta:"]
    for (q, a), phi in aut.transitions.items():
        lines.append(f"  {q} {a} -> {phi}")
    return "\n".join(lines) + "\n"


def _parse_pbf(ts: TokenStream) -> Pbf:
    left = _parse_conj(ts)
    while ts.peek() is not None and ts.peek().kind == "or":
        ts.next()
        left = Or(left, _parse_conj(ts))
    return left


def _parse_conj(ts: TokenStream) -> Pbf:
    left = _parse_pbf_atom(ts)
    while ts.peek() is not None and ts.peek().kind == "and":
        ts.next()
        left = And(left, _parse_pbf_atom(ts))
    return left


def _parse_pbf_atom(ts: TokenStream) -> Pbf:
    t = ts.next()
    if t.text == "true":
        return TRUE
    if t.text == "false":
        return FALSE
    if t.text != "(":
        raise ParseError(f"unexpected {t.text!r} in formula", t.line, t.col)
    nxt = ts.peek()
    if nxt is not None and nxt.kind == "num":
        d = ts.next()
        ts.expect(",")
        q = ts.expect_kind("name", "state")
        ts.expect(")")
        if int(d.text) < 1:
            raise ParseError("directions start at 1", d.line, d.col)
        return Atom(int(d.text), q.text)
    inner = _parse_pbf(ts)
    ts.expect(")")
    return inner


def parse_pbf(text: str) -> Pbf:
    from .syntax import tokenize_line
    ts = TokenStream(tokenize_line(text, 1), 1)
    phi = _parse_pbf(ts)
    if not ts.at_end():
        t = ts.next()
        raise ParseError(f"unexpected {t.text!r}", t.line, t.col)
    return phi


def parse_automaton(text: str) -> Automaton:
    secs = split_sections(text, ("states", "initial", "colors", "delta"))
    for required in ("states", "initial"):
        if required not in secs:
            raise ParseError(f"missing section {required!r}", 1, 1)
    states: list[str] = []
    for _, toks in secs["states"]:
        for t in toks:
            if t.kind != "name":
                raise ParseError(f"expected a state name, found {t.text!r}", t.line, t.col)
            if t.text in states:
                raise ParseError(f"duplicate state {t.text}", t.line, t.col)
            states.append(t.text)
    if not states:
        raise ParseError("no states declared", 1, 1)
    init = [t for _, toks in secs["initial"] for t in toks]
    if len(init) != 1:
        raise ParseError("initial section must name exactly one state", 1, 1)
    if init[0].text not in states:
        raise ParseError(f"unknown state {init[0].text!r}", init[0].line, init[0].col)

    coloring: dict[str, int] = {}
    if "colors" in secs:
        toks = [t for _, ts_ in secs["colors"] for t in ts_]
        ts = TokenStream(toks, toks[-1].line if toks else 1)
        while not ts.at_end():
            q = ts.expect_kind("name", "state")
            ts.expect(":")
            n = ts.expect_kind("num", "color")
            if q.text not in states:
                raise ParseError(f"unknown state {q.text!r}", q.line, q.col)
            coloring[q.text] = int(n.text)
        missing = [q for q in states if q not in coloring]
        if missing:
            raise ParseError(f"no color for state {missing[0]!r}", 1, 1)
    else:
        coloring = {q: 0 for q in states}

    transitions: dict[tuple[str, str], Pbf] = {}
    for lineno, toks in secs.get("delta", []):
        ts = TokenStream(toks, lineno)
        q = ts.expect_kind("name", "state")
        if q.text not in states:
            raise ParseError(f"unknown state {q.text!r}", q.line, q.col)
        a = ts.next()
        if a.kind not in ("name", "omega"):
            raise ParseError(f"expected a terminal, found {a.text!r}", a.line, a.col)
        ts.expect("->")
        phi = _parse_pbf(ts)
        if not ts.at_end():
            t = ts.next()
            raise ParseError(f"unexpected {t.text!r}", t.line, t.col)
        for _d, p in formula_atoms(phi):
            if p not in states:
                raise ParseError(f"unknown state {p!r}", lineno, 1)
        if (q.text, a.text) in transitions:
            raise ParseError(f"duplicate transition for ({q.text}, {a.text})", q.line, q.col)
        transitions[(q.text, a.text)] = phi
    return Automaton(tuple(states), transitions, coloring, init[0].text)


def productivity_automaton(scheme: Scheme) -> Automaton:
    """One state that follows every direction; accepts exactly the trees
    without a divergence leaf."""
    trans = {("q", a): conj(Atom(i, "q") for i in range(1, n + 1))
             for a, n in scheme.terminals.items()}
    return Automaton(("q",), trans, {"q": 0}, "q")


# --------------------------------------------------------------------------
# trees


@dataclass(frozen=True)
class Node:
    label: str
    children: tuple["Tree", ...] = ()


@dataclass(frozen=True)
class _Unexplored:
    def __repr__(self):
        return "Unexplored"


@dataclass(frozen=True)
class _Omega:
    def __repr__(self):
        return "Omega"


UNEXPLORED = _Unexplored()
OMEGA_LEAF = _Omega()
Tree = Union[Node, _Unexplored, _Omega]


def _label(t: Tree) -> str:
    if isinstance(t, Node):
        return t.label
    return "?" if t is UNEXPLORED else OMEGA


def tree_text(t: Tree, indent: str = "  ") -> str:
    """Indented rendering, one node per line; ``?`` and ``_|_`` for the
    frontier and divergence."""
    out: list[str] = []

    def go(n, lvl):
        out.append(indent * lvl + _label(n))
        if isinstance(n, Node):
            for c in n.children:
                go(c, lvl + 1)

    go(t, 0)
    return "\n".join(out) + "\n"


def tree_term(t: Tree) -> str:
    """Compact rendering such as ``a(b(?), a(?, ?))``."""
    if isinstance(t, Node) and t.children:
        return f"{t.label}(" + ", ".join(tree_term(c) for c in t.children) + ")"
    return _label(t)


def tree_dot(t: Tree) -> str:
    lines = ["digraph tree {", "  node [shape=plaintext];"]
    counter = itertools.count()

    def go(n) -> int:
        i = next(counter)
        lines.append(f'  n{i} [label="{_label(n)}"];')
        if isinstance(n, Node):
            for c in n.children:
                j = go(c)
                lines.append(f"  n{i} -> n{j};")
        return i

    go(t)
    lines.append("}")
    return "\n".join(lines) + "\n"


def parse_tree_term(text: str) -> Tree:
    """Inverse of ``tree_term``."""
    from .syntax import tokenize_line
    ts = TokenStream(tokenize_line(text.replace("?", " QMARK "), 1), 1)

    def go() -> Tree:
        t = ts.next()
        if t.kind == "omega":
            return OMEGA_LEAF
        if t.text == "QMARK":
            return UNEXPLORED
        if t.kind != "name":
            raise ParseError(f"unexpected {t.text!r}", t.line, t.col)
        kids = []
        if ts.peek() is not None and ts.peek().text == "(":
            ts.next()
            kids.append(go())
            while ts.peek() is not None and ts.peek().text == ",":
                ts.next()
                kids.append(go())
            ts.expect(")")
        return Node(t.text, tuple(kids))

    tree = go()
    if not ts.at_end():
        raise ParseError("trailing input in tree", 1, 1)
    return tree


def tree_height(t: Tree) -> int:
    """Number of levels; a leaf has height 1."""
    if isinstance(t, Node) and t.children:
        return 1 + max(tree_height(c) for c in t.children)
    return 1


def is_finite_tree(t: Tree) -> bool:
    if isinstance(t, Node):
        return all(is_finite_tree(c) for c in t.children)
    return False


def truncate(t: Tree, depth: int) -> Tree:
    """Replace every node at level ``depth`` by ``UNEXPLORED``."""
    if depth == 0:
        return UNEXPLORED
    if isinstance(t, Node):
        return Node(t.label, tuple(truncate(c, depth - 1) for c in t.children))
    return t


def refines(prefix: Tree, t: Tree) -> bool:
    """True iff ``t`` agrees with ``prefix`` wherever ``prefix`` is explored."""
    if prefix is UNEXPLORED:
        return True
    if isinstance(prefix, Node):
        return (isinstance(t, Node) and t.label == prefix.label
                and len(t.children) == len(prefix.children)
                and all(refines(p, c) for p, c in zip(prefix.children, t.children)))
    return prefix == t


# --------------------------------------------------------------------------
# value-tree expansion


class _OutOfFuel(Exception):
    pass


def head_normalize(scheme: Scheme, term: Term, fuel: int) -> tuple[str, list[Term]] | None:
    """Rewrite the head of a ground term until a terminal surfaces.

    Returns ``(terminal, args)`` or ``None`` when ``fuel`` rewriting steps do
    not suffice.
    """
    for _ in range(fuel + 1):
        head, args = spine(term)
        if isinstance(head, Terminal):
            return head.name, args
        if not isinstance(head, NonTerminal):
            raise ValueError(f"free variable {head} in ground term")
        rule = scheme.rules[head.name]
        n = len(rule.params)
        body = substitute(rule.body, dict(zip(rule.params, args[:n])))
        term = apply_term(body, args[n:])
    return None


def expand_value_tree(scheme: Scheme, depth: int, fuel: int = DEFAULT_FUEL) -> Tree:
    """The value tree cut at ``depth`` levels (levels ``0..depth-1`` are
    expanded, level ``depth`` is ``UNEXPLORED``).  Positions that need more
    than ``fuel`` head rewriting steps become ``OMEGA_LEAF``."""
    if depth < 0:
        raise ValueError("depth must be non-negative")

    def go(term: Term, d: int) -> Tree:
        if d == 0:
            return UNEXPLORED
        hn = head_normalize(scheme, term, fuel)
        if hn is None:
            return OMEGA_LEAF
        a, args = hn
        return Node(a, tuple(go(u, d - 1) for u in args))

    return go(NonTerminal(scheme.start), depth)


# --------------------------------------------------------------------------
# bounded run search


def bounded_run_exists(tree: Tree, automaton: Automaton, state: str, depth: int) -> bool:
    """Does a run-tree prefix from ``state`` exist on the first ``depth``
    levels of ``tree``?  Colors are ignored."""
    memo: dict = {}

    def run(t: Tree, q: str, d: int) -> bool:
        if d == 0:
            return True
        if t is UNEXPLORED:
            raise ValueError("depth exceeds the explored prefix")
        if t is OMEGA_LEAF:
            return satisfies((), automaton.delta(q, OMEGA))
        key = (id(t), q, d)
        if key in memo:
            return memo[key]
        phi = automaton.delta(q, t.label)
        res = _eval(phi, lambda i, p: run(t.children[i - 1], p, d - 1)
                    if i <= len(t.children) else False)
        memo[key] = res
        return res

    return run(tree, state, depth)


def _eval(phi: Pbf, atom) -> bool:
    if isinstance(phi, PTrue):
        return True
    if isinstance(phi, PFalse):
        return False
    if isinstance(phi, Atom):
        return atom(phi.direction, phi.state)
    if isinstance(phi, And):
        return _eval(phi.left, atom) and _eval(phi.right, atom)
    return _eval(phi.left, atom) or _eval(phi.right, atom)


# --------------------------------------------------------------------------
# regular oracle for order-0 schemes


def _order0_graph(scheme: Scheme):
    """Finite graph of the (regular) value tree of an order-0 scheme.

    Positions are subterms of rule bodies whose head is a terminal; a
    non-terminal chain is followed statically and a chain that loops
    becomes the divergence leaf.
    """
    for f, k in scheme.nonterminals.items():
        if k.args:
            raise ValueError(f"regular oracle needs an order-0 scheme ({f} has kind {k})")

    def resolve(t: Term) -> Term | None:
        seen = set()
        while True:
            head, args = spine(t)
            if isinstance(head, Terminal):
                return t
            if head.name in seen:
                return None
            seen.add(head.name)
            t = scheme.rules[head.name].body

    return resolve


def regular_oracle(scheme: Scheme, automaton: Automaton, state: str) -> bool:
    """Exact acceptance for order-0 schemes via the product parity game,
    solved with the naive solver."""
    from .parity import ParityGame, solve_naive, EVE, ADAM

    resolve = _order0_graph(scheme)
    game = ParityGame()
    omega_pos = ("omega",)

    def pos_of(t: Term):
        r = resolve(t)
        return omega_pos if r is None else r

    todo = []

    def state_vertex(pos, q):
        key = ("S", pos, q)
        if key not in game.index:
            game.add(key, EVE, automaton.color(q))
            todo.append(key)
        return game.index[key]

    root = state_vertex(pos_of(NonTerminal(scheme.start)), state)
    game.initial = root
    while todo:
        key = todo.pop()
        _, pos, q = key
        v = game.index[key]
        if pos == omega_pos:
            label, children = OMEGA, []
        else:
            head, children = spine(pos)
            label = head.name
        for i, disjunct in enumerate(sorted(automaton.dnf(q, label), key=sorted)):
            ckey = ("C", pos, q, i)
            if ckey not in game.index:
                game.add(ckey, ADAM, 0)
            c = game.index[ckey]
            game.add_edge(v, c)
            for d, p in sorted(disjunct):
                if d > len(children):
                    raise ValueError(f"direction {d} out of range for {label}")
                game.add_edge(c, state_vertex(pos_of(children[d - 1]), p))
    eve, _adam = solve_naive(game)
    return root in eve
