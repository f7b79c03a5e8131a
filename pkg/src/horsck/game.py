"""The typing game and the model-checking entry point.

Eve vertices are colored typings ``(F, m, theta)``: Eve must justify that
``F``'s rule has type ``theta``.  She answers with a context of non-terminal
typings from which the rule body is derivable; Adam then challenges one
binding of that context.  Eve wins iff the automaton accepts the value tree.
"""

from __future__ import annotations

import json
import time
from collections import deque
from dataclasses import dataclass, field

from .automata import Automaton
from .coltypes import EPS, Color, Ctx, ITy, State, pretty
from .config import Limits
from .parity import ADAM, EVE, GameTooLarge, ParityGame, solve_zielonka
from .proofsearch import Derivation, TypeSearch, derivation_from_json, derivation_to_json
from .syntax import Scheme
from .validate import cycles_max_color, encode_color, witness_errors


class WitnessError(Exception):
    """A witness produced by the checker failed validation."""


@dataclass(frozen=True)
class EveVertex:
    nonterminal: str
    color: Color
    type: ITy

    def label(self) -> str:
        return f"{self.nonterminal} : □{_csub(self.color)} {pretty(self.type)}"

    def __str__(self):
        return f"{self.nonterminal} : [{self.color}]{self.type}"


@dataclass(frozen=True)
class AdamVertex:
    context: Ctx

    def label(self) -> str:
        if not self.context:
            return "∅"
        return ", ".join(f"{x} : {pretty(s)}" for x, s in self.context)

    def __str__(self):
        return str(self.context)


def _csub(m: Color) -> str:
    from .coltypes import _color_sub
    return _color_sub(m)


def encode(m: Color) -> int:
    """Parity color of a vertex carrying ``m``: levels shift by 2, the
    neutral color becomes 1."""
    return encode_color(m)


def build_game(scheme: Scheme, automaton: Automaton, q0: str | None = None, prune: bool = True,
               heads: str = "tight", limits: Limits | None = None) -> ParityGame:
    """Reachable part of the game from ``(start, eps, q0)``.

    The derivation behind each Eve move is kept in
    ``game.meta["derivations"][(eve, adam)]``.
    """
    limits = limits or Limits()
    q0 = automaton.initial if q0 is None else q0
    if q0 not in automaton.states:
        raise ValueError(f"{q0!r} is not a state of the automaton")
    search = TypeSearch(scheme, automaton, prune=prune, heads=heads,
                        step_limit=limits.search_steps)
    g = ParityGame()
    derivs: dict[tuple[int, int], Derivation] = {}
    g.meta = {"derivations": derivs, "scheme": scheme, "automaton": automaton, "state": q0,
              "search": search}
    init = EveVertex(scheme.start, EPS, State(q0))
    g.initial = g.add(init, EVE, encode(EPS))
    queue = deque([init])
    while queue:
        v = queue.popleft()
        vi = g.index[v]
        for ctx, d in search.enumerate_contexts(v.nonterminal, v.type).items():
            a = AdamVertex(ctx)
            fresh = a not in g.index
            ai = g.add(a, ADAM, encode(EPS))
            g.add_edge(vi, ai)
            derivs[(vi, ai)] = d
            if not fresh:
                continue
            for name, s in ctx:
                for m, t in s:
                    e = EveVertex(name, m, t)
                    if e not in g.index:
                        g.add(e, EVE, encode(m))
                        queue.append(e)
                    g.add_edge(ai, g.index[e])
            if len(g) > limits.max_vertices:
                raise GameTooLarge(f"game exceeds {limits.max_vertices} vertices")
    return g


# --------------------------------------------------------------------------
# witnesses


@dataclass
class Witness:
    """Eve's choice of derivation for every typing she can be asked about."""

    initial: EveVertex
    derivations: dict[EveVertex, Derivation]

    def vertices(self) -> list[EveVertex]:
        order = []
        seen = set()
        stack = [self.initial]
        while stack:
            v = stack.pop(0)
            if v in seen or v not in self.derivations:
                continue
            seen.add(v)
            order.append(v)
            for x, s in self.derivations[v].judgement.context:
                for m, t in s:
                    stack.append(EveVertex(x, m, t))
        order += sorted((v for v in self.derivations if v not in seen), key=str)
        return order

    def graph(self):
        import networkx as nx
        gr = nx.DiGraph()
        for v, d in self.derivations.items():
            gr.add_node(("E", v), color=encode(v.color))
            gr.add_node(("A", v), color=encode(EPS))
            gr.add_edge(("E", v), ("A", v))
            for x, s in d.judgement.context:
                for m, t in s:
                    gr.add_edge(("A", v), ("E", EveVertex(x, m, t)))
        return gr

    def cycles_max_color(self) -> int | None:
        return cycles_max_color(self.graph())

    def to_json(self) -> dict:
        vs = self.vertices()
        ids = {v: i for i, v in enumerate(vs)}
        vertices = []
        for v in vs:
            ctx = self.derivations[v].judgement.context
            succ = sorted({ids[EveVertex(x, m, t)] for x, s in ctx for m, t in s
                           if EveVertex(x, m, t) in ids})
            vertices.append({"id": ids[v], "nonterminal": v.nonterminal, "color": str(v.color),
                             "type": str(v.type), "context": {x: str(s) for x, s in ctx},
                             "successors": succ})
        return {"initial": ids.get(self.initial, 0),
                "vertices": vertices,
                "derivations": {str(ids[v]): derivation_to_json(self.derivations[v]) for v in vs},
                "cycles_max_color": self.cycles_max_color()}

    @classmethod
    def from_json(cls, data: dict, scheme: Scheme) -> "Witness":
        from .coltypes import parse_type
        from .proofsearch import _parse_color
        byid = {}
        for entry in data["vertices"]:
            byid[entry["id"]] = EveVertex(entry["nonterminal"], _parse_color(entry["color"]),
                                          parse_type(entry["type"]))
        derivs = {byid[int(i)]: derivation_from_json(d, scheme)
                  for i, d in data["derivations"].items()}
        return cls(byid[data["initial"]], derivs)


def validate_witness(witness: Witness, scheme: Scheme, automaton: Automaton,
                     state: str | None = None) -> list[str]:
    """Problems with ``witness`` (empty list when valid)."""
    state = automaton.initial if state is None else state
    return witness_errors(witness, scheme, automaton, state)


def extract_witness(game: ParityGame, eve_strategy: dict[int, int]) -> Witness:
    meta = game.meta
    derivs = meta["derivations"]
    chosen: dict[EveVertex, Derivation] = {}
    stack = [game.initial]
    while stack:
        v = stack.pop()
        ev = game.payload[v]
        if ev in chosen:
            continue
        if v not in eve_strategy:
            raise WitnessError(f"strategy has no move at {ev}")
        a = eve_strategy[v]
        chosen[ev] = derivs[(v, a)]
        stack.extend(game.succ[a])
    w = Witness(game.payload[game.initial], chosen)
    errs = validate_witness(w, meta["scheme"], meta["automaton"], meta["state"])
    if errs:
        raise WitnessError("; ".join(errs[:5]))
    return w


# --------------------------------------------------------------------------
# checking


@dataclass
class Verdict:
    accepted: bool
    state: str
    witness: Witness | None = None
    stats: dict = field(default_factory=dict)

    def to_json(self, timing: bool = True) -> dict:
        stats = dict(self.stats)
        if not timing:
            stats = {k: v for k, v in stats.items() if not k.endswith("_seconds")}
        return {"accepted": self.accepted, "state": self.state, "stats": stats,
                "witness": self.witness.to_json() if self.witness else None}


def check(scheme: Scheme, automaton: Automaton, q0: str | None = None, prune: bool = True,
          heads: str = "tight", limits: Limits | None = None) -> Verdict:
    """Decide whether the automaton accepts the value tree from ``q0``.

    When accepted, the verdict carries a validated witness.
    """
    q0 = automaton.initial if q0 is None else q0
    t0 = time.perf_counter()
    game = build_game(scheme, automaton, q0, prune=prune, heads=heads, limits=limits)
    t1 = time.perf_counter()
    regions, strategies = solve_zielonka(game)
    t2 = time.perf_counter()
    accepted = game.initial in regions[EVE]
    witness = extract_witness(game, strategies[EVE]) if accepted else None
    n_eve = sum(1 for o in game.owner if o == EVE)
    stats = {"eve_vertices": n_eve, "adam_vertices": len(game) - n_eve, "edges": game.n_edges,
             "colors": sorted(set(game.color)), "build_seconds": round(t1 - t0, 6),
             "solve_seconds": round(t2 - t1, 6)}
    return Verdict(accepted, q0, witness, stats)


# --------------------------------------------------------------------------
# export


def game_to_json(game: ParityGame) -> dict:
    vertices = []
    for v in range(len(game)):
        p = game.payload[v]
        entry = {"id": v, "owner": "eve" if game.owner[v] == EVE else "adam",
                 "color": game.color[v], "label": str(p)}
        vertices.append(entry)
    edges = [[u, w] for u in range(len(game)) for w in game.succ[u]]
    return {"initial": game.initial, "vertices": vertices, "edges": edges}


def game_to_dot(game: ParityGame) -> str:
    lines = ["digraph game {"]
    for v in range(len(game)):
        p = game.payload[v]
        shape = "ellipse" if game.owner[v] == EVE else "box"
        label = p.label() if hasattr(p, "label") else str(p)
        label = label.replace("\\", "\\\\").replace('"', '\\"')
        extra = ", penwidth=2" if v == game.initial else ""
        lines.append(f'  v{v} [shape={shape}, label="{label}\\ncolor {game.color[v]}"{extra}];')
    for u in range(len(game)):
        for w in game.succ[u]:
            lines.append(f"  v{u} -> v{w};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def game_json_text(game: ParityGame) -> str:
    return json.dumps(game_to_json(game), indent=2, ensure_ascii=False)
