"""Finite max-parity games and two independent solvers.

Player 0 (Eve) wins a play whose highest color seen infinitely often is
even; a player who cannot move loses.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Hashable

EVE, ADAM = 0, 1

DEFAULT_NAIVE_LIMIT = 200_000


class GameTooLarge(Exception):
    pass


@dataclass
class ParityGame:
    owner: list[int] = field(default_factory=list)
    color: list[int] = field(default_factory=list)
    succ: list[list[int]] = field(default_factory=list)
    payload: list[Any] = field(default_factory=list)
    index: dict[Hashable, int] = field(default_factory=dict)
    initial: int = 0
    meta: dict = field(default_factory=dict)

    def add(self, payload: Hashable, owner: int, color: int) -> int:
        if payload in self.index:
            return self.index[payload]
        v = len(self.owner)
        self.owner.append(owner)
        self.color.append(color)
        self.succ.append([])
        self.payload.append(payload)
        self.index[payload] = v
        return v

    def add_edge(self, u: int, v: int) -> None:
        if v not in self.succ[u]:
            self.succ[u].append(v)

    def __len__(self) -> int:
        return len(self.owner)

    @property
    def n_edges(self) -> int:
        return sum(len(s) for s in self.succ)

    @classmethod
    def from_lists(cls, owner, color, succ, initial=0) -> "ParityGame":
        g = cls()
        for v, (o, c) in enumerate(zip(owner, color)):
            g.add(v, o, c)
        for u, vs in enumerate(succ):
            for v in vs:
                g.add_edge(u, v)
        g.initial = initial
        return g


# --------------------------------------------------------------------------
# Zielonka


def _attractor(game: ParityGame, pred, player: int, target: set[int], arena: set[int]):
    """Attractor of ``target`` for ``player`` inside ``arena``, with the
    attracting moves of ``player``."""
    attr = set(target)
    strat: dict[int, int] = {}
    count = {v: sum(1 for w in game.succ[v] if w in arena) for v in arena}
    queue = list(target)
    while queue:
        w = queue.pop()
        for v in pred[w]:
            if v not in arena or v in attr:
                continue
            if game.owner[v] == player:
                attr.add(v)
                strat[v] = w
                queue.append(v)
            else:
                count[v] -= 1
                if count[v] == 0:
                    attr.add(v)
                    queue.append(v)
    return attr, strat


def solve_zielonka(game: ParityGame):
    """Return ``(regions, strategies)``: ``regions[p]`` is the set of vertices
    won by player ``p``; ``strategies[p]`` maps each of ``p``'s vertices in
    that region (that has a move) to a winning successor."""
    n = len(game)
    # dead ends: send them to a sink that the other player wins
    succ = [list(s) for s in game.succ]
    owner = list(game.owner)
    color = list(game.color)
    sinks = {}
    for v in range(n):
        if not succ[v]:
            loser = owner[v]
            if loser not in sinks:
                s = len(owner)
                owner.append(EVE)
                color.append(1 if loser == EVE else 0)
                succ.append([s])
                sinks[loser] = s
            succ[v].append(sinks[loser])
    g = ParityGame(owner, color, succ)
    pred: list[list[int]] = [[] for _ in owner]
    for u, vs in enumerate(succ):
        for v in vs:
            pred[v].append(u)

    regions, strats = _zielonka(g, pred, set(range(len(owner))))
    sinkset = set(sinks.values())
    out_regions = (regions[0] - sinkset, regions[1] - sinkset)
    out_strats = ({}, {})
    for p in (EVE, ADAM):
        for v, w in strats[p].items():
            if v < n and w < n and game.owner[v] == p:
                out_strats[p][v] = w
    return out_regions, out_strats


def _zielonka(g: ParityGame, pred, arena: set[int]):
    if not arena:
        return (set(), set()), ({}, {})
    d = max(g.color[v] for v in arena)
    p = d % 2
    top = {v for v in arena if g.color[v] == d}
    a, a_strat = _attractor(g, pred, p, top, arena)
    (w0, w1), (s0, s1) = _zielonka(g, pred, arena - a)
    sub_w = (w0, w1)
    sub_s = (s0, s1)
    if not sub_w[1 - p]:
        strat_p = dict(sub_s[p])
        strat_p.update(a_strat)
        for v in top:
            if g.owner[v] == p:
                strat_p[v] = next(w for w in g.succ[v] if w in arena)
        regions = [set(), set()]
        regions[p] = set(arena)
        strats: list[dict] = [{}, {}]
        strats[p] = strat_p
        return tuple(regions), tuple(strats)
    b, b_strat = _attractor(g, pred, 1 - p, sub_w[1 - p], arena)
    (x0, x1), (t0, t1) = _zielonka(g, pred, arena - b)
    sub2_w = (x0, x1)
    sub2_s = (t0, t1)
    regions = [set(), set()]
    strats = [{}, {}]
    regions[p] = set(sub2_w[p])
    strats[p] = dict(sub2_s[p])
    regions[1 - p] = set(sub2_w[1 - p]) | b
    s = dict(sub2_s[1 - p])
    s.update(sub_s[1 - p])
    s.update(b_strat)
    strats[1 - p] = s
    return tuple(regions), tuple(strats)


# --------------------------------------------------------------------------
# naive solver: lazy positional-strategy enumeration plus cycle analysis


def _sccs(nodes: list[int], edges: dict[int, list[int]]) -> list[list[int]]:
    """Tarjan's algorithm, iterative."""
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    out: list[list[int]] = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, 0)]
        while work:
            v, i = work.pop()
            if i == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack.add(v)
            es = edges.get(v, ())
            if i < len(es):
                work.append((v, i + 1))
                w = es[i]
                if w not in index:
                    work.append((w, 0))
                elif w in on_stack:
                    low[v] = min(low[v], index[w])
                continue
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                out.append(comp)
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
    return out


def _has_bad_cycle(nodes: list[int], edges: dict[int, list[int]], color, player: int) -> bool:
    """Is there a cycle whose highest color has the opponent's parity?"""
    bad_colors = sorted({color[v] for v in nodes if color[v] % 2 != player}, reverse=True)
    for c in bad_colors:
        sub = [v for v in nodes if color[v] <= c]
        subset = set(sub)
        sub_edges = {v: [w for w in edges.get(v, ()) if w in subset] for v in sub}
        for comp in _sccs(sub, sub_edges):
            if not any(color[v] == c for v in comp):
                continue
            if len(comp) > 1:
                return True
            v = comp[0]
            if v in sub_edges[v]:
                return True
    return False


class _Budget:
    def __init__(self, limit: int):
        self.left = limit

    def spend(self):
        self.left -= 1
        if self.left < 0:
            raise GameTooLarge("naive solver exceeded its strategy budget")


def _wins_from(game: ParityGame, start: int, player: int, budget: _Budget) -> bool:
    """Does ``player`` have a positional strategy winning every play from
    ``start``?  Strategies are assigned only on vertices they reach."""
    strategy: dict[int, int] = {}

    def reach():
        seen = {start}
        order = [start]
        edges: dict[int, list[int]] = {}
        pending = []
        i = 0
        while i < len(order):
            v = order[i]
            i += 1
            if game.owner[v] == player:
                if v in strategy:
                    es = [strategy[v]]
                else:
                    pending.append(v)
                    es = []
            else:
                es = list(game.succ[v])
            edges[v] = es
            for w in es:
                if w not in seen:
                    seen.add(w)
                    order.append(w)
        return order, edges, pending

    def search() -> bool:
        budget.spend()
        order, edges, pending = reach()
        for v in pending:
            if not game.succ[v]:
                return False
        if _has_bad_cycle(order, edges, game.color, player):
            return False
        if not pending:
            return True
        v = pending[0]
        for w in game.succ[v]:
            strategy[v] = w
            if search():
                return True
        del strategy[v]
        return False

    return search()


def solve_naive(game: ParityGame, limit: int = DEFAULT_NAIVE_LIMIT):
    """Winning regions ``(eve, adam)`` by searching each player's positional
    strategies vertex by vertex.  Raises ``AssertionError`` if both or neither
    player wins somewhere (determinacy is a theorem, so that means a bug)."""
    budget = _Budget(limit)
    eve, adam = set(), set()
    for v in range(len(game)):
        e = _wins_from(game, v, EVE, budget)
        a = _wins_from(game, v, ADAM, budget)
        if e == a:
            raise AssertionError(f"naive solver: determinacy violated at vertex {v}")
        (eve if e else adam).add(v)
    return eve, adam


def solve_naive_from(game: ParityGame, v: int, limit: int = DEFAULT_NAIVE_LIMIT) -> bool:
    """Does Eve win from ``v``?  Only searches Eve's side."""
    return _wins_from(game, v, EVE, _Budget(limit))
