"""Colors, colored intersection types and typing contexts.

A color is either the neutral color ``EPS`` or ``Level(k)``.  Types are
``State(q)`` or ``Arrow(tau, theta)`` where ``tau`` is an ``ISet``, a set of
(color, type) pairs.  Sets are idempotent and kept in a canonical order so
that equal sets print and hash identically.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .syntax import Kind, ParseError, TokenStream, tokenize_line


class KindClash(Exception):
    pass


@dataclass(frozen=True)
class Color:
    """``Color(None)`` is the neutral color; ``Color(k)`` is level ``k``."""

    level: int | None

    def sort_key(self) -> int:
        return -1 if self.level is None else self.level

    def __lt__(self, other):  # ε below every level
        return self.sort_key() < other.sort_key()

    def __le__(self, other):
        return self.sort_key() <= other.sort_key()

    def __gt__(self, other):
        return self.sort_key() > other.sort_key()

    def __ge__(self, other):
        return self.sort_key() >= other.sort_key()

    @property
    def is_neutral(self) -> bool:
        return self.level is None

    def __str__(self) -> str:
        return "eps" if self.level is None else str(self.level)

    def __repr__(self) -> str:
        return "EPS" if self.level is None else f"Level({self.level})"


EPS = Color(None)


def Level(k: int) -> Color:
    if k < 0:
        raise ValueError("color levels are natural numbers")
    return Color(k)


def colmax(m1: Color, m2: Color) -> Color:
    if m1.level is None:
        return m2
    if m2.level is None:
        return m1
    return m1 if m1.level >= m2.level else m2


def color_universe(coloring: Mapping[str, int]) -> tuple[Color, ...]:
    """``EPS`` followed by the distinct state colors."""
    return (EPS,) + tuple(Level(k) for k in sorted(set(coloring.values())))


# --------------------------------------------------------------------------
# types


@dataclass(frozen=True)
class State:
    q: str

    def __str__(self):
        return self.q


@dataclass(frozen=True)
class Arrow:
    arg: "ISet"
    res: "ITy"

    def __str__(self):
        return f"{self.arg} -> {self.res}"


ITy = Union[State, Arrow]


def _pair_key(p: tuple[Color, ITy]):
    return (p[0].sort_key(), type_str(p[1]))


class ISet:
    """Canonical finite set of (color, type) pairs."""

    __slots__ = ("items", "_hash", "_set")

    def __init__(self, pairs: Iterable[tuple[Color, ITy]] = ()):
        self._set = frozenset(pairs)
        self.items: tuple[tuple[Color, ITy], ...] = tuple(sorted(self._set, key=_pair_key))
        self._hash = hash(self._set)

    def __iter__(self) -> Iterator[tuple[Color, ITy]]:
        return iter(self.items)

    def __len__(self) -> int:
        return len(self.items)

    def __bool__(self) -> bool:
        return bool(self.items)

    def __contains__(self, pair) -> bool:
        return pair in self._set

    def __eq__(self, other) -> bool:
        return isinstance(other, ISet) and self._set == other._set

    def __hash__(self) -> int:
        return self._hash

    def __le__(self, other: "ISet") -> bool:
        return self._set <= other._set

    def __or__(self, other: "ISet") -> "ISet":
        if not other:
            return self
        if not self:
            return other
        return ISet(self._set | other._set)

    def types(self) -> list[ITy]:
        out = []
        for _m, t in self.items:
            if t not in out:
                out.append(t)
        return out

    def __str__(self) -> str:
        return "(/\\" + "".join(f" [{m}]{_elem_str(t)}" for m, t in self.items) + ")"

    def __repr__(self) -> str:
        return f"ISet({str(self)})"


EMPTY = ISet()


def _elem_str(t: ITy) -> str:
    return f"({t})" if isinstance(t, Arrow) else str(t)


@lru_cache(maxsize=None)
def type_str(t: ITy) -> str:
    return str(t)


def iset(*pairs: tuple[Color, ITy]) -> ISet:
    return ISet(pairs)


def arrows(args: Sequence[ISet], res: ITy) -> ITy:
    for a in reversed(args):
        res = Arrow(a, res)
    return res


def split_arrows(t: ITy, k: int) -> tuple[list[ISet], ITy] | None:
    """``(tau1..tauk, rest)`` for ``t = tau1 -> ... -> tauk -> rest``."""
    out = []
    for _ in range(k):
        if not isinstance(t, Arrow):
            return None
        out.append(t.arg)
        t = t.res
    return out, t


def uncurry(t: ITy) -> tuple[list[ISet], str]:
    args = []
    while isinstance(t, Arrow):
        args.append(t.arg)
        t = t.res
    return args, t.q


def box_apply(m: Color, tau: ISet) -> ISet:
    if m.is_neutral or not tau:
        return tau
    return ISet((colmax(m, mi), t) for mi, t in tau)


def refines(t: ITy, kind: Kind) -> bool:
    """``t :: kind``; an empty set refines every kind."""
    if isinstance(t, State):
        return not kind.args
    if not kind.args:
        return False
    return (all(refines(u, kind.args[0]) for _m, u in t.arg)
            and refines(t.res, kind.result()))


def _compatible(t1: ITy, t2: ITy) -> bool:
    """Could ``t1`` and ``t2`` refine the same kind?"""
    if isinstance(t1, State) or isinstance(t2, State):
        return isinstance(t1, State) and isinstance(t2, State)
    if t1.arg and t2.arg and not _compatible(t1.arg.items[0][1], t2.arg.items[0][1]):
        return False
    return _compatible(t1.res, t2.res)


# --------------------------------------------------------------------------
# contexts


class Ctx:
    """Finite map from names to non-empty ISets (empty bindings are dropped)."""

    __slots__ = ("items", "_hash", "_map")

    def __init__(self, bindings: Mapping[str, ISet] | Iterable[tuple[str, ISet]] = ()):
        if isinstance(bindings, Mapping):
            bindings = bindings.items()
        self.items: tuple[tuple[str, ISet], ...] = tuple(
            sorted(((x, s) for x, s in bindings if s), key=lambda b: b[0]))
        self._map = dict(self.items)
        self._hash = hash(self.items)

    @classmethod
    def single(cls, name: str, m: Color, t: ITy) -> "Ctx":
        return cls([(name, ISet([(m, t)]))])

    def get(self, name: str) -> ISet:
        return self._map.get(name, EMPTY)

    def __getitem__(self, name: str) -> ISet:
        return self._map[name]

    def __contains__(self, name: str) -> bool:
        return name in self._map

    def names(self) -> list[str]:
        return [x for x, _ in self.items]

    def __iter__(self):
        return iter(self.items)

    def __len__(self) -> int:
        return len(self.items)

    def __bool__(self) -> bool:
        return bool(self.items)

    def __eq__(self, other) -> bool:
        return isinstance(other, Ctx) and self.items == other.items

    def __hash__(self) -> int:
        return self._hash

    def __le__(self, other: "Ctx") -> bool:
        """Pointwise inclusion."""
        return all(s <= other.get(x) for x, s in self.items)

    def __add__(self, other: "Ctx") -> "Ctx":
        return ctx_add(self, other)

    def restrict(self, keep) -> "Ctx":
        return Ctx([(x, s) for x, s in self.items if x in keep])

    def drop(self, names) -> "Ctx":
        return Ctx([(x, s) for x, s in self.items if x not in names])

    def box(self, m: Color) -> "Ctx":
        if m.is_neutral:
            return self
        return Ctx([(x, box_apply(m, s)) for x, s in self.items])

    def sort_key(self):
        return tuple((x, str(s)) for x, s in self.items)

    def __str__(self) -> str:
        if not self.items:
            return "{}"
        return "{" + ", ".join(f"{x} : {s}" for x, s in self.items) + "}"

    def __repr__(self) -> str:
        return f"Ctx({self})"


EMPTY_CTX = Ctx()


def ctx_add(d1: Ctx, d2: Ctx) -> Ctx:
    if not d2:
        return d1
    if not d1:
        return d2
    merged = dict(d1.items)
    for x, s in d2.items:
        if x in merged:
            a, b = merged[x], s
            if not _compatible(a.items[0][1], b.items[0][1]):
                raise KindClash(f"bindings for {x} refine different kinds")
            merged[x] = a | b
        else:
            merged[x] = s
    return Ctx(merged)


def minimal_contexts(ctxs: Iterable[Ctx], tick=None) -> list[Ctx]:
    """Contexts that are minimal under pointwise inclusion, canonical order.

    ``tick(n)``, if given, is charged for the ``n`` comparisons of each step.
    """
    uniq = sorted(set(ctxs), key=lambda c: (sum(len(s) for _, s in c), c.sort_key()))
    out: list[Ctx] = []
    for c in uniq:
        if tick is not None:
            tick(len(out) + 1)
        if not any(m <= c for m in out):
            out.append(c)
    return sorted(out, key=Ctx.sort_key)


# --------------------------------------------------------------------------
# refinement enumeration


def _powerset(xs: Sequence) -> Iterator[tuple]:
    return itertools.chain.from_iterable(itertools.combinations(xs, r) for r in range(len(xs) + 1))


@lru_cache(maxsize=None)
def _refinements(kind: Kind, states: tuple[str, ...], colors: tuple[Color, ...]) -> tuple[ITy, ...]:
    if not kind.args:
        return tuple(State(q) for q in states)
    args = _refinements(kind.args[0], states, colors)
    rests = _refinements(kind.result(), states, colors)
    pairs = [(m, t) for m in colors for t in args]
    sets = [ISet(ps) for ps in _powerset(pairs)]
    return tuple(Arrow(s, r) for s in sets for r in rests)


def refinements(kind: Kind, states: Iterable[str], colors: Iterable[Color]) -> list[ITy]:
    """Every type refining ``kind`` over the given states and colors."""
    states = tuple(sorted(set(states)))
    colors = tuple(sorted(set(colors), key=Color.sort_key))
    if not states:
        raise ValueError("need at least one state")
    return list(_refinements(kind, states, colors))


def count_refinements(kind: Kind, n_states: int, n_colors: int) -> int:
    if not kind.args:
        return n_states
    return 2 ** (n_colors * count_refinements(kind.args[0], n_states, n_colors)) * \
        count_refinements(kind.result(), n_states, n_colors)


# --------------------------------------------------------------------------
# pretty printing and parsing


_SUB = str.maketrans("0123456789", "₀₁₂₃₄₅₆₇₈₉")


def _color_sub(m: Color) -> str:
    return "ε" if m.is_neutral else str(m.level).translate(_SUB)


def pretty(t: ITy | ISet) -> str:
    """Mathematical rendering, e.g. ``∅ → (□₀ q0 ∧ □₁ q1) → q0``."""
    if isinstance(t, ISet):
        if not t:
            return "∅"
        parts = [f"□{_color_sub(m)} {_pretty_atom(u)}" for m, u in t]
        return parts[0] if len(parts) == 1 else "(" + " ∧ ".join(parts) + ")"
    if isinstance(t, State):
        return t.q
    arg = pretty(t.arg)
    return f"{arg} → {pretty(t.res)}"


def _pretty_atom(t: ITy) -> str:
    return f"({pretty(t)})" if isinstance(t, Arrow) else pretty(t)


def parse_type(text: str) -> ITy:
    """Inverse of ``str`` on types: ``(/\\ [0]q0 [eps]q1) -> q0``."""
    ts = TokenStream(tokenize_line(text.replace("[", " ( ").replace("]", " ) "), 1), 1)
    t = _parse_ty(ts)
    if not ts.at_end():
        tok = ts.next()
        raise ParseError(f"unexpected {tok.text!r}", tok.line, tok.col)
    return t


def _parse_ty(ts: TokenStream) -> ITy:
    tok = ts.peek()
    if tok is None:
        raise ParseError("unexpected end of type", 1, 1)
    if tok.kind == "name":
        ts.next()
        return State(tok.text)
    ts.expect("(")
    nxt = ts.peek()
    if nxt is not None and nxt.kind == "and":
        ts.next()
        pairs = []
        while ts.peek() is not None and ts.peek().text == "(":
            ts.next()
            c = ts.next()
            ts.expect(")")
            m = EPS if c.text == "eps" else Level(int(c.text))
            pairs.append((m, _parse_elem(ts)))
        ts.expect(")")
        s = ISet(pairs)
        ts.expect("->")
        return Arrow(s, _parse_ty(ts))
    inner = _parse_ty(ts)
    ts.expect(")")
    return inner


def _parse_elem(ts: TokenStream) -> ITy:
    tok = ts.peek()
    if tok is not None and tok.kind == "name":
        ts.next()
        return State(tok.text)
    ts.expect("(")
    t = _parse_ty(ts)
    ts.expect(")")
    return t
