"""Independent checkers for derivations and witnesses.

Nothing here calls the proof search or the solvers: each derivation node is
re-checked against its typing rule and the witness graph is checked for
odd cycles with networkx.
"""

from __future__ import annotations

import networkx as nx

from .automata import Automaton, OMEGA, satisfies
from .coltypes import (EPS, Arrow, Ctx, ISet, Level, State, box_apply, refines)
from .proofsearch import Derivation, Lam
from .syntax import App, Kind, KindError, NonTerminal, Scheme, Terminal, Var, kind_of


class InvalidDerivation(Exception):
    pass


def _term_kind(term, scheme: Scheme, params: dict[str, Kind]) -> Kind:
    if isinstance(term, Lam):
        if term.param not in params:
            raise InvalidDerivation(f"unknown parameter {term.param}")
        inner = _term_kind(term.body, scheme, params)
        return Kind((params[term.param],) + inner.args)
    return kind_of(term, scheme.env(params))


def check_derivation(d: Derivation, scheme: Scheme, automaton: Automaton,
                     params: dict[str, Kind]) -> None:
    """Raise ``InvalidDerivation`` unless every node follows from its
    premises.  ``params`` gives the kinds of the rule parameters in scope."""
    j = d.judgement
    where = f"{d.rule} node for {j.term}"
    try:
        k = _term_kind(j.term, scheme, params)
    except KindError as e:
        raise InvalidDerivation(f"{where}: {e}") from None
    if k != j.kind:
        raise InvalidDerivation(f"{where}: term has kind {k}, judgement says {j.kind}")
    if not refines(j.type, j.kind):
        raise InvalidDerivation(f"{where}: type {j.type} does not refine {j.kind}")
    for x, s in j.context:
        kx = scheme.nonterminals.get(x, params.get(x))
        if kx is None:
            raise InvalidDerivation(f"{where}: context binds unknown name {x}")
        for _m, t in s:
            if not refines(t, kx):
                raise InvalidDerivation(f"{where}: binding of {x} does not refine {kx}")

    if d.rule == "Axiom":
        if d.premises or not isinstance(j.term, (Var, NonTerminal)):
            raise InvalidDerivation(f"{where}: malformed axiom")
        if j.context != Ctx([(j.term.name, ISet([(EPS, j.type)]))]):
            raise InvalidDerivation(f"{where}: axiom context must be {j.term.name} : [eps]{j.type}")
        return

    if d.rule == "Delta":
        if d.premises or not isinstance(j.term, Terminal):
            raise InvalidDerivation(f"{where}: malformed terminal rule")
        if j.context:
            raise InvalidDerivation(f"{where}: terminal rule needs an empty context")
        t = j.type
        atoms = set()
        i = 0
        while isinstance(t, Arrow):
            i += 1
            for m, u in t.arg:
                if not isinstance(u, State) or m != Level(automaton.color(u.q)):
                    raise InvalidDerivation(f"{where}: argument {i} demand {m},{u} is not a colored state")
                atoms.add((i, u.q))
            t = t.res
        arity = 0 if j.term.name == OMEGA else scheme.terminals[j.term.name]
        if i != arity:
            raise InvalidDerivation(f"{where}: wrong number of arguments")
        if not satisfies(atoms, automaton.delta(t.q, j.term.name)):
            raise InvalidDerivation(f"{where}: atoms {sorted(atoms)} do not satisfy the transition")
        return

    if d.rule == "App":
        if not isinstance(j.term, App) or not d.premises:
            raise InvalidDerivation(f"{where}: malformed application")
        fun = d.premises[0]
        args = d.premises[1:]
        if len(args) != len(d.colors):
            raise InvalidDerivation(f"{where}: premise colors do not match premises")
        if fun.judgement.term != j.term.fun:
            raise InvalidDerivation(f"{where}: function premise is for the wrong term")
        ft = fun.judgement.type
        if not isinstance(ft, Arrow) or ft.res != j.type:
            raise InvalidDerivation(f"{where}: function premise has type {ft}")
        demanded = sorted(((m, p.judgement.type) for m, p in zip(d.colors, args)), key=str)
        if len(set(demanded)) != len(demanded) or set(demanded) != set(ft.arg):
            raise InvalidDerivation(f"{where}: argument premises do not match {ft.arg}")
        ctx = fun.judgement.context
        for m, p in zip(d.colors, args):
            if p.judgement.term != j.term.arg:
                raise InvalidDerivation(f"{where}: argument premise is for the wrong term")
            boxed = Ctx([(x, box_apply(m, s)) for x, s in p.judgement.context])
            ctx = _union(ctx, boxed)
        if ctx != j.context:
            raise InvalidDerivation(f"{where}: context {j.context} should be {ctx}")
        for p in d.premises:
            check_derivation(p, scheme, automaton, params)
        return

    if d.rule == "Lambda":
        if not isinstance(j.term, Lam) or len(d.premises) != 1:
            raise InvalidDerivation(f"{where}: malformed abstraction")
        (body,) = d.premises
        x = j.term.param
        t = j.type
        if not isinstance(t, Arrow) or body.judgement.type != t.res:
            raise InvalidDerivation(f"{where}: type mismatch with premise")
        if body.judgement.term != j.term.body:
            raise InvalidDerivation(f"{where}: premise is for the wrong term")
        if not body.judgement.context.get(x) <= t.arg:
            raise InvalidDerivation(f"{where}: uses of {x} exceed the declared set {t.arg}")
        expected = Ctx([(y, s) for y, s in body.judgement.context if y != x])
        if expected != j.context:
            raise InvalidDerivation(f"{where}: context should be {expected}")
        check_derivation(body, scheme, automaton, params)
        return

    raise InvalidDerivation(f"unknown rule {d.rule!r}")


def _union(a: Ctx, b: Ctx) -> Ctx:
    m = {x: set(s) for x, s in a}
    for x, s in b:
        m.setdefault(x, set()).update(s)
    return Ctx([(x, ISet(s)) for x, s in m.items()])


def rule_term(scheme: Scheme, f: str):
    rule = scheme.rules[f]
    t = rule.body
    for x in reversed(rule.params):
        t = Lam(x, t)
    return t


def encode_color(m) -> int:
    return 1 if m.is_neutral else m.level + 2


def witness_errors(witness, scheme: Scheme, automaton: Automaton, state: str) -> list[str]:
    """All problems found in ``witness``; empty when it certifies acceptance."""
    from .game import EveVertex

    errors: list[str] = []
    expected_init = EveVertex(scheme.start, EPS, State(state))
    if witness.initial != expected_init:
        errors.append(f"initial vertex {witness.initial} should be {expected_init}")
    if witness.initial not in witness.derivations:
        errors.append("no derivation for the initial vertex")
    graph = nx.DiGraph()
    for v, d in witness.derivations.items():
        f = v.nonterminal
        if f not in scheme.nonterminals:
            errors.append(f"unknown non-terminal {f}")
            continue
        j = d.judgement
        if j.term != rule_term(scheme, f):
            errors.append(f"derivation for {f} is not about its rule")
        if j.type != v.type:
            errors.append(f"derivation for {f} proves {j.type}, vertex has {v.type}")
        if j.kind != scheme.nonterminals[f]:
            errors.append(f"derivation for {f} has kind {j.kind}")
        for x in j.context.names():
            if x not in scheme.nonterminals:
                errors.append(f"context of {f} binds non-non-terminal {x}")
        try:
            check_derivation(d, scheme, automaton, scheme.param_kinds(f))
        except InvalidDerivation as e:
            errors.append(f"{f} : {v.type}: {e}")
        graph.add_node(("E", v), color=encode_color(v.color))
        graph.add_node(("A", v), color=1)
        graph.add_edge(("E", v), ("A", v))
        for g, s in j.context:
            for m, t in s:
                w = EveVertex(g, m, t)
                if w not in witness.derivations:
                    errors.append(f"binding {g} : [{m}]{t} has no derivation")
                    continue
                graph.add_edge(("A", v), ("E", w))
    if not errors:
        bad = odd_cycle_color(graph)
        if bad is not None:
            errors.append(f"a cycle has odd maximal color {bad}")
    return errors


def odd_cycle_color(graph: nx.DiGraph) -> int | None:
    """Highest odd color that is the maximum of some cycle, else ``None``."""
    colors = nx.get_node_attributes(graph, "color")
    for c in sorted({c for c in colors.values() if c % 2 == 1}, reverse=True):
        sub = graph.subgraph([v for v, k in colors.items() if k <= c])
        for comp in nx.strongly_connected_components(sub):
            if not any(colors[v] == c for v in comp):
                continue
            if len(comp) > 1 or any(sub.has_edge(v, v) for v in comp):
                return c
    return None


def cycles_max_color(graph: nx.DiGraph) -> int | None:
    """Highest color lying on any cycle."""
    colors = nx.get_node_attributes(graph, "color")
    best = None
    for comp in nx.strongly_connected_components(graph):
        v = next(iter(comp))
        if len(comp) > 1 or graph.has_edge(v, v):
            c = max(colors[u] for u in comp)
            best = c if best is None else max(best, c)
    return best
