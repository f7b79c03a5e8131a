"""Relational interpretation of finite trees and an alternating fixpoint
combinator on finite lattices.

A transition ``delta(q, a)`` is read as a set of relation points
``(bag_1, ..., bag_n, q)``: one multiset of states per argument.  A finite
tree is accepted from ``q0`` iff such points compose, bottom-up, into
``q0``; the multiset of points used is the witness ``u``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Mapping, Union

from .automata import Automaton, Node, Tree, minimal_sets
from .syntax import Kind


# --------------------------------------------------------------------------
# relation points


@dataclass(frozen=True)
class Base:
    state: str


@dataclass(frozen=True)
class Pair:
    left: "RelValue"
    right: "RelValue"


@dataclass(frozen=True)
class Bag:
    """Finite multiset, kept as a sorted tuple."""

    items: tuple["RelValue", ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(sorted(self.items, key=repr)))


@dataclass(frozen=True)
class Fun:
    args: tuple[Bag, ...]
    result: Base


RelValue = Union[Base, Pair, Bag, Fun]


def well_sorted(v: RelValue, kind: Kind) -> bool:
    """Is ``v`` a point of the interpretation of ``kind``?  Ground kinds
    hold states; ``k1 -> ... -> kn -> o`` holds one bag per argument plus a
    state."""
    if not kind.args:
        return isinstance(v, Base)
    if not isinstance(v, Fun) or len(v.args) != kind.arity:
        return False
    return all(all(well_sorted(x, k) for x in bag.items) for bag, k in zip(v.args, kind.args))


@dataclass(frozen=True, order=True)
class DeltaElement:
    terminal: str
    bags: tuple[tuple[str, ...], ...]  # one sorted multiset of states per direction
    result: str

    def atoms(self) -> set[tuple[int, str]]:
        return {(i + 1, q) for i, bag in enumerate(self.bags) for q in bag}

    def as_value(self) -> Fun:
        return Fun(tuple(Bag(tuple(Base(q) for q in b)) for b in self.bags), Base(self.result))

    def __str__(self):
        bags = ", ".join("{|" + ",".join(b) + "|}" for b in self.bags)
        return f"{self.terminal}: ({bags}{', ' if bags else ''}{self.result})"


def _arities(automaton: Automaton) -> dict[str, int]:
    out: dict[str, int] = {}
    for (q, a) in automaton.transitions:
        n = max((d for D in automaton.dnf(q, a) for d, _ in D), default=0)
        out[a] = max(out.get(a, 0), n)
    return out


def interp_delta(automaton: Automaton, arities: Mapping[str, int] | None = None) -> set[DeltaElement]:
    """One element per minimal disjunct of every transition."""
    ar = _arities(automaton)
    if arities:
        ar.update(arities)
    out = set()
    for (q, a) in automaton.transitions:
        n = ar.get(a, 0)
        for D in minimal_sets(automaton.dnf(q, a)):
            bags = tuple(tuple(sorted(p for d, p in D if d == i)) for i in range(1, n + 1))
            out.add(DeltaElement(a, bags, q))
    return out


def interp_term_witness(tree: Tree, automaton: Automaton, q0: str,
                        arities: Mapping[str, int] | None = None) -> tuple[DeltaElement, ...] | None:
    """A multiset (sorted tuple) of elements composing to ``q0`` over
    ``tree``, or ``None``."""
    if not isinstance(tree, Node):
        raise ValueError("relational interpretation needs a finite tree")
    ar = dict(arities or {})

    def arity(n: Node) -> int:
        return ar.setdefault(n.label, len(n.children))

    def collect(n: Node):
        if not isinstance(n, Node):
            raise ValueError("relational interpretation needs a finite tree")
        arity(n)
        for c in n.children:
            collect(c)

    collect(tree)
    elements = interp_delta(automaton, ar)
    by_terminal: dict[str, list[DeltaElement]] = {}
    for e in sorted(elements):
        by_terminal.setdefault(e.terminal, []).append(e)

    def go(n: Node) -> dict[str, tuple[DeltaElement, ...]]:
        kids = [go(c) for c in n.children]
        out: dict[str, tuple[DeltaElement, ...]] = {}
        for e in by_terminal.get(n.label, []):
            if e.result in out or len(e.bags) != len(kids):
                continue
            used: list[DeltaElement] = [e]
            for bag, kid in zip(e.bags, kids):
                if not all(q in kid for q in bag):
                    break
                for q in bag:
                    used.extend(kid[q])
            else:
                out[e.result] = tuple(sorted(used))
        return out

    return go(tree).get(q0)


def interp_term(tree: Tree, automaton: Automaton, q0: str) -> bool:
    return interp_term_witness(tree, automaton, q0) is not None


# --------------------------------------------------------------------------
# finite lattices


class MonotonicityError(Exception):
    pass


class Lattice:
    """Finite lattice given by its carrier and order; joins and meets are
    tabulated (and the lattice laws checked) at construction."""

    def __init__(self, elements: Iterable[Hashable], leq: Callable[[Hashable, Hashable], bool]):
        self.elements = list(elements)
        self._leq = leq
        els = self.elements
        self._join = {}
        self._meet = {}
        for a in els:
            for b in els:
                ubs = [c for c in els if leq(a, c) and leq(b, c)]
                lbs = [c for c in els if leq(c, a) and leq(c, b)]
                j = [c for c in ubs if all(leq(c, u) for u in ubs)]
                m = [c for c in lbs if all(leq(lo, c) for lo in lbs)]
                if len(j) != 1 or len(m) != 1:
                    raise ValueError(f"not a lattice: {a!r}, {b!r} lack a unique join or meet")
                self._join[a, b] = j[0]
                self._meet[a, b] = m[0]
        bots = [c for c in els if all(leq(c, x) for x in els)]
        tops = [c for c in els if all(leq(x, c) for x in els)]
        if len(bots) != 1 or len(tops) != 1:
            raise ValueError("lattice needs a bottom and a top")
        self.bottom = bots[0]
        self.top = tops[0]

    def leq(self, a, b) -> bool:
        return self._leq(a, b)

    def join(self, a, b):
        return self._join[a, b]

    def meet(self, a, b):
        return self._meet[a, b]

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    @classmethod
    def chain(cls, height: int) -> "Lattice":
        """``0 < 1 < ... < height``."""
        return cls(range(height + 1), lambda a, b: a <= b)

    @classmethod
    def powerset(cls, n: int) -> "Lattice":
        base = range(n)
        els = [frozenset(c) for r in range(n + 1) for c in itertools.combinations(base, r)]
        return cls(els, lambda a, b: a <= b)


def alt_fixpoint(f: Callable[[tuple], Hashable], n: int, lattice: Lattice,
                 sample_checks: int = 0, rng: random.Random | None = None):
    """``nu x_n. mu x_{n-1}. ... nu x_0. f(x_0, ..., x_n)``.

    Variables with even index take greatest fixpoints, odd ones least.  Each
    stage is a Kleene iteration from top or bottom; an iteration that fails
    to move monotonically raises ``MonotonicityError``.  With
    ``sample_checks`` > 0, ``f`` is also spot-checked for monotonicity on
    random comparable argument pairs.
    """
    if n < 0 or n % 2:
        raise ValueError("n must be a non-negative even number")
    L = lattice
    if sample_checks:
        _spot_check(f, n, L, sample_checks, rng or random.Random(0))

    def solve(i: int, outer: tuple):
        greatest = i % 2 == 0

        def body(x):
            if i == 0:
                return f((x,) + outer)
            return solve(i - 1, (x,) + outer)

        x = L.top if greatest else L.bottom
        while True:
            y = body(x)
            if y == x:
                return x
            if greatest and not L.leq(y, x):
                raise MonotonicityError(f"greatest fixpoint iteration rose from {x!r} to {y!r}")
            if not greatest and not L.leq(x, y):
                raise MonotonicityError(f"least fixpoint iteration fell from {x!r} to {y!r}")
            x = y

    return solve(n, ())


def _spot_check(f, n, L, count, rng):
    els = L.elements
    for _ in range(count):
        xs = [rng.choice(els) for _ in range(n + 1)]
        i = rng.randrange(n + 1)
        bigger = [e for e in els if L.leq(xs[i], e)]
        ys = list(xs)
        ys[i] = rng.choice(bigger)
        if not L.leq(f(tuple(xs)), f(tuple(ys))):
            raise MonotonicityError(f"f is not monotone in argument {i} at {tuple(xs)!r}")
