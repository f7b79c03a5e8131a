"""Proof search for colored intersection typings of rule bodies.

Judgements have the shape ``Delta |- t : theta :: kind``.  Derivations are
built from four rules:

* ``Axiom``  ``x : {(eps, theta)} |- x : theta``
* ``Delta``  a terminal typed by a set of atoms satisfying its transition
* ``App``    ``Delta + box(m1, Delta1) + ... |- t u : theta`` from
  ``t : {(m1, theta1), ...} -> theta`` and ``u : theta_j``
* ``Lambda`` discharges a rule parameter whose uses are included in the
  declared set

Bodies are searched by decomposing ``t = h t1 ... tk`` and choosing a type
for the head.  Heads that are terminals or bound parameters have finitely
many candidate types.  For non-terminal heads the search uses *tight*
argument demands: the sets of uses the head's own body makes of its first
``k`` parameters, computed as a least fixpoint (``TypeSearch.tight``).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Any, Iterable, Mapping, Sequence, Union

from .automata import Automaton, minimal_sets, satisfies
from .coltypes import (EMPTY, EMPTY_CTX, EPS, Arrow, Color, Ctx, ISet, ITy, Level, State,
                       arrows, color_universe, count_refinements, minimal_contexts, parse_type,
                       refinements, split_arrows)
from .syntax import (App, Kind, NonTerminal, ParseError, Scheme, Term, Terminal, Var,
                     kind_of, spine, terminal_kind, tokenize_line, TokenStream)


class SearchLimit(Exception):
    """Raised when a search exceeds a configured size guard."""


EXHAUSTIVE_LIMIT = 5000


# --------------------------------------------------------------------------
# derivations


@dataclass(frozen=True)
class Lam:
    """Abstraction over one rule parameter; only appears in Lambda judgements."""

    param: str
    body: Union[Term, "Lam"]

    def __str__(self):
        return f"\\{self.param}. {self.body}"


@dataclass(frozen=True)
class Judgement:
    context: Ctx
    term: Any
    type: ITy
    kind: Kind

    def __str__(self):
        return f"{self.context} |- {self.term} : {self.type} :: {self.kind}"


@dataclass(frozen=True, eq=False)
class Derivation:
    rule: str  # "Axiom" | "Delta" | "App" | "Lambda"
    judgement: Judgement
    premises: tuple["Derivation", ...] = ()
    colors: tuple[Color, ...] = ()  # App only: color of each argument premise

    @property
    def context(self) -> Ctx:
        return self.judgement.context

    def __eq__(self, other):
        if not isinstance(other, Derivation):
            return NotImplemented
        return derivation_to_json(self) == derivation_to_json(other)

    __hash__ = None  # type: ignore[assignment]

    def size(self) -> int:
        return 1 + sum(p.size() for p in self.premises)

    def text(self, indent: str = "  ") -> str:
        lines: list[str] = []

        def go(d: Derivation, lvl: int):
            extra = ""
            if d.colors:
                extra = "   [colors " + " ".join(str(m) for m in d.colors) + "]"
            lines.append(f"{indent * lvl}{d.rule}  {d.judgement}{extra}")
            for p in d.premises:
                go(p, lvl + 1)

        go(self, 0)
        return "\n".join(lines) + "\n"


def derivation_to_json(d: Derivation) -> dict:
    j = d.judgement
    return {
        "rule": d.rule,
        "context": {x: str(s) for x, s in j.context},
        "term": str(j.term),
        "type": str(j.type),
        "kind": str(j.kind),
        "colors": [str(m) for m in d.colors],
        "premises": [derivation_to_json(p) for p in d.premises],
    }


def parse_iset(text: str) -> ISet:
    t = parse_type(f"{text} -> _")
    assert isinstance(t, Arrow)
    return t.arg


def _parse_color(text: str) -> Color:
    return EPS if text == "eps" else Level(int(text))


def parse_any_term(text: str, scheme: Scheme):
    """Parse a judgement term; names outside the scheme are parameters and a
    leading ``\\x.`` is an abstraction."""
    text = text.strip()
    if text.startswith("\\"):
        head, _, rest = text[1:].partition(".")
        return Lam(head.strip(), parse_any_term(rest, scheme))
    from .syntax import _parse_term

    ts = TokenStream(tokenize_line(text, 1), 1)

    def classify(t):
        if t.text in scheme.nonterminals:
            return NonTerminal(t.text)
        if t.text in scheme.terminals:
            return Terminal(t.text)
        return Var(t.text)

    term = _parse_term(ts, classify)
    if not ts.at_end():
        raise ParseError("trailing input in term", 1, 1)
    return term


def derivation_from_json(data: Mapping, scheme: Scheme) -> Derivation:
    from .syntax import parse_kind

    ctx = Ctx([(x, parse_iset(s)) for x, s in data["context"].items()])
    j = Judgement(ctx, parse_any_term(data["term"], scheme), parse_type(data["type"]),
                  parse_kind(data["kind"]))
    return Derivation(data["rule"], j,
                      tuple(derivation_from_json(p, scheme) for p in data["premises"]),
                      tuple(_parse_color(c) for c in data["colors"]))


def derivation_json_text(d: Derivation) -> str:
    return json.dumps(derivation_to_json(d), indent=2)


# --------------------------------------------------------------------------
# terminal typings


def _atom_set_type(atoms: Iterable[tuple[int, str]], lo: int, hi: int, res: ITy,
                   aut: Automaton) -> ITy:
    """Arrow type whose argument ``i`` (``lo <= i <= hi``) demands the states
    paired with direction ``i`` in ``atoms``, each boxed with its color."""
    atoms = list(atoms)
    sets = [ISet((Level(aut.color(p)), State(p)) for d, p in atoms if d == i)
            for i in range(lo, hi + 1)]
    return arrows(sets, res)


def terminal_types(a: str, q: str, automaton: Automaton, arity: int | None = None,
                   minimal: bool = True) -> list[ITy]:
    """Types of terminal ``a`` at state ``q``, one per minimal satisfying
    atom set (or per satisfying set when ``minimal`` is off)."""
    if arity is None:
        arity = max((d for D in automaton.dnf(q, a) for d, _ in D), default=0)
    if minimal:
        sets = minimal_sets(automaton.dnf(q, a))
    else:
        universe = [(d, p) for d in range(1, arity + 1) for p in automaton.states]
        phi = automaton.delta(q, a)
        sets = [frozenset(c) for r in range(len(universe) + 1)
                for c in itertools.combinations(universe, r) if satisfies(set(c), phi)]
    return [_atom_set_type(s, 1, arity, State(q), automaton) for s in sets]


# --------------------------------------------------------------------------
# search


BOUND, COLLECTED = "bound", "collected"


class _Body:
    """Memoised search over the subterms of one rule body under fixed
    parameter bindings."""

    def __init__(self, search: "TypeSearch", env: Mapping[str, tuple], kinds: Mapping[str, Kind],
                 derivations: bool, prune: bool | None = None):
        self.s = search
        self.prune = search.prune if prune is None else prune
        self.env = env
        self.kinds = kinds
        self.derivations = derivations
        self.memo: dict = {}

    def kind(self, t: Term) -> Kind:
        return kind_of(t, self.kinds)

    def heads(self, head: Term, k: int, goal: ITy):
        s = self.s
        hk = self.kind(head)
        if isinstance(head, Terminal):
            for ty in s.terminal_heads(head.name, k, goal):
                d = Derivation("Delta", Judgement(EMPTY_CTX, head, ty, hk)) if self.derivations else None
                yield ty, d, EMPTY_CTX
            return
        if head.name in self.env:
            mode, info = self.env[head.name]
            if mode == BOUND:
                cands = [t for t in info.types() if _suffix_is(t, k, goal)]
            elif k == 0:
                cands = [goal]
            else:
                cands = [t for t in s.pool(hk) if _suffix_is(t, k, goal)]
        else:
            cands = [goal] if k == 0 else s.nonterminal_heads(head.name, k, goal)
        for ty in cands:
            ctx = Ctx.single(head.name, EPS, ty)
            d = Derivation("Axiom", Judgement(ctx, head, ty, hk)) if self.derivations else None
            yield ty, d, ctx

    def infer(self, term: Term, goal: ITy) -> dict[Ctx, Derivation | None]:
        key = (term, goal)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        s = self.s
        head, args = spine(term)
        out: dict[Ctx, Derivation | None] = {}
        for hty, hder, hctx in self.heads(head, len(args), goal):
            partial = {hctx: hder}
            t_cur: Term = head
            ty_cur = hty
            k_cur = self.kind(head)
            for arg in args:
                assert isinstance(ty_cur, Arrow)
                sigma, res = ty_cur.arg, ty_cur.res
                t_next = App(t_cur, arg)
                k_next = k_cur.result()
                reqs = []
                for m, th in sigma:
                    sub = self.infer(arg, th)
                    if not sub:
                        reqs = None
                        break
                    reqs.append((m, sub))
                if reqs is None:
                    partial = {}
                    break
                combos = [(c, d, ()) for c, d in partial.items()]
                for m, sub in reqs:
                    new: dict[Ctx, tuple] = {}
                    for c, fd, ads in combos:
                        s.tick(len(sub))
                        for c2, d2 in sub.items():
                            c3 = c + c2.box(m)
                            if c3 not in new:
                                new[c3] = (fd, ads + (d2,))
                    if self.prune:
                        keep = minimal_contexts(new, s.tick)
                        combos = [(c, *new[c]) for c in keep]
                    else:
                        combos = [(c, fd, ads) for c, (fd, ads) in new.items()]
                colors = tuple(m for m, _ in reqs)
                partial = {}
                for c, fd, ads in combos:
                    if c in partial:
                        continue
                    if self.derivations:
                        partial[c] = Derivation("App", Judgement(c, t_next, res, k_next),
                                                (fd,) + ads, colors)
                    else:
                        partial[c] = None
                if not partial:
                    break
                t_cur, ty_cur, k_cur = t_next, res, k_next
            for c, d in partial.items():
                if c not in out:
                    out[c] = d
        if self.prune and len(out) > 1:
            keep = minimal_contexts(out, s.tick)
            out = {c: out[c] for c in keep}
        self.memo[key] = out
        return out


def _suffix_is(t: ITy, k: int, goal: ITy) -> bool:
    sp = split_arrows(t, k)
    return sp is not None and sp[1] == goal


def _prefix_key(prefix: tuple[ISet, ...]):
    return tuple(str(s) for s in prefix)


class TypeSearch:
    """Typing search for one scheme and automaton.

    ``heads`` selects how non-terminal heads applied to arguments are typed:
    ``"tight"`` (default) uses the tight-demand fixpoint; ``"exhaustive"``
    tries every demand vector over all refinements (small kinds only, see
    ``EXHAUSTIVE_LIMIT``).
    """

    def __init__(self, scheme: Scheme, automaton: Automaton, prune: bool = True,
                 heads: str = "tight", step_limit: int | None = None):
        if heads not in ("tight", "exhaustive"):
            raise ValueError(f"unknown head mode {heads!r}")
        self.scheme = scheme
        self.aut = automaton
        self.prune = prune
        self.heads = heads
        self.colors = color_universe(automaton.coloring)
        self.steps = 0
        self.step_limit = step_limit
        self._ctx_cache: dict = {}
        self._term_cache: dict = {}
        self._exh_cache: dict = {}
        self._tt_final: dict = {}
        self._tt_cur: dict | None = None
        self._tt_grew = False
        self._pool_cache: dict = {}

    def tick(self, n: int = 1) -> None:
        self.steps += n
        if self.step_limit is not None and self.steps > self.step_limit:
            raise SearchLimit("type search exceeded its step limit")

    # ---- terminals

    def terminal_heads(self, a: str, k: int, goal: ITy) -> list[ITy]:
        """Types ``sigma1 -> ... -> sigmak -> goal`` for terminal ``a``."""
        key = (a, k, goal)
        hit = self._term_cache.get(key)
        if hit is not None:
            return hit
        out: list[ITy] = []
        n = self.scheme.terminals.get(a, 0)
        sp = split_arrows(goal, n - k) if k <= n else None
        if sp is not None and isinstance(sp[1], State):
            suffix, res = sp
            fixed = set()
            ok = True
            for j, tau in enumerate(suffix):
                for m, t in tau:
                    if not isinstance(t, State) or m != Level(self.aut.color(t.q)):
                        ok = False
                    else:
                        fixed.add((k + 1 + j, t.q))
            if ok:
                q = res.q
                cands = [frozenset(x for x in D if x[0] <= k) for D in self.aut.dnf(q, a)
                         if all(x[0] <= k or x in fixed for x in D)]
                prefixes = minimal_sets(cands)
                out = [_atom_set_type(P, 1, k, goal, self.aut) for P in prefixes]
        self._term_cache[key] = out
        return out

    # ---- non-terminal heads

    def nonterminal_heads(self, g: str, k: int, goal: ITy) -> list[ITy]:
        if self.heads == "exhaustive":
            return self._exhaustive_heads(g, k, goal)
        return [arrows(p, goal) for p in self.tight(g, k, goal)]

    def _exhaustive_heads(self, g: str, k: int, goal: ITy) -> list[ITy]:
        """Every demand vector over all refinements of the argument kinds."""
        kind = self.scheme.nonterminals[g]
        key = (tuple(kind.args[:k]), goal)
        hit = self._exh_cache.get(key)
        if hit is not None:
            return hit
        per_arg = []
        total = 1
        for ak in kind.args[:k]:
            n_pairs = len(self.colors) * count_refinements(ak, len(self.aut.states), len(self.colors))
            total *= 2 ** n_pairs
            if total > EXHAUSTIVE_LIMIT:
                raise SearchLimit(f"exhaustive head enumeration for {g} is too large")
            pairs = [(m, t) for m in self.colors
                     for t in refinements(ak, self.aut.states, self.colors)]
            per_arg.append([ISet(c) for r in range(len(pairs) + 1)
                            for c in itertools.combinations(pairs, r)])
        out = [arrows(list(p), goal) for p in itertools.product(*per_arg)]
        self._exh_cache[key] = out
        return out

    def tight(self, g: str, k: int, goal: ITy) -> list[tuple[ISet, ...]]:
        """Tight demand vectors for the first ``k`` arguments of ``g`` at
        ``goal`` (a type for ``g`` applied to ``k`` arguments)."""
        key = (g, k, goal)
        hit = self._tt_final.get(key)
        if hit is not None:
            return hit
        seed = (EMPTY,) * k
        if self._tt_cur is not None:
            if key not in self._tt_cur:
                self._tt_cur[key] = {seed}
                self._tt_grew = True
            return sorted(self._tt_cur[key], key=_prefix_key)
        self._tt_cur = {key: {seed}}
        self._pool_cache = {}
        try:
            while True:
                changed = False
                self._tt_grew = False
                for kk in list(self._tt_cur):
                    new = self._tight_step(kk)
                    if not new <= self._tt_cur[kk]:
                        self._tt_cur[kk] |= new
                        changed = True
                self._pool_cache = {}
                if not changed and not self._tt_grew:
                    break
            for kk, v in self._tt_cur.items():
                self._tt_final[kk] = sorted(v, key=_prefix_key)
        finally:
            self._tt_cur = None
            self._pool_cache = {}
        return self._tt_final[key]

    def _tight_step(self, key) -> set[tuple[ISet, ...]]:
        g, k, goal = key
        rule = self.scheme.rules[g]
        kind = self.scheme.nonterminals[g]
        n = kind.arity
        sp = split_arrows(goal, n - k)
        if sp is None or not isinstance(sp[1], State):
            return set()
        bound_sets, res = sp
        env: dict[str, tuple] = {}
        for i, x in enumerate(rule.params):
            if i < k:
                env[x] = (COLLECTED, kind.args[i])
            else:
                env[x] = (BOUND, bound_sets[i - k])
        # candidates are the same with or without pruning, so always prune here
        body = _Body(self, env, self.scheme.env(self.scheme.param_kinds(g)), derivations=False,
                     prune=True)
        out = set()
        for c in body.infer(rule.body, res):
            if all(c.get(x) <= env[x][1] for x in rule.params[k:]):
                out.add(tuple(c.get(x) for x in rule.params[:k]))
        return out

    def pool(self, kind: Kind) -> list[ITy]:
        """Candidate types for a collected parameter of ``kind`` used in head
        position: tight types of every terminal or non-terminal partial
        application of that kind."""
        hit = self._pool_cache.get(kind)
        if hit is not None:
            return hit
        m = kind.arity
        out: set[ITy] = set()
        for a, n in self.scheme.terminals.items():
            if n < m or kind != terminal_kind(m):
                continue
            for q in self.aut.states:
                for t in terminal_types(a, q, self.aut, n):
                    out.add(split_arrows(t, n - m)[1])
        for g, gk in self.scheme.nonterminals.items():
            n = gk.arity
            if n < m or gk.result(n - m) != kind:
                continue
            for q in self.aut.states:
                for p in self.tight(g, n, State(q)):
                    out.add(arrows(p[n - m:], State(q)))
        res = sorted(out, key=str)
        self._pool_cache[kind] = res
        return res

    # ---- public entry points

    def search_body(self, f: str, theta: ITy) -> dict[Ctx, Derivation]:
        """Derivations of ``Delta |- body(f) : result`` for every context,
        with the parameters bound by the argument sets of ``theta``."""
        rule = self.scheme.rules[f]
        kind = self.scheme.nonterminals[f]
        sp = split_arrows(theta, kind.arity)
        if sp is None or not isinstance(sp[1], State):
            raise ValueError(f"type {theta} does not refine the kind of {f}")
        sets, res = sp
        env = {x: (BOUND, s) for x, s in zip(rule.params, sets)}
        body = _Body(self, env, self.scheme.env(self.scheme.param_kinds(f)), derivations=True)
        return body.infer(rule.body, res)

    def enumerate_contexts(self, f: str, theta: ITy) -> dict[Ctx, Derivation]:
        """Non-terminal contexts ``Delta`` with ``Delta |- R(f) : theta``,
        each mapped to its first derivation (canonical order)."""
        key = (f, theta)
        hit = self._ctx_cache.get(key)
        if hit is not None:
            return hit
        rule = self.scheme.rules[f]
        kind = self.scheme.nonterminals[f]
        sets, res = split_arrows(theta, kind.arity)
        found = self.search_body(f, theta)
        out: dict[Ctx, Derivation] = {}
        for c in sorted(found, key=Ctx.sort_key):
            if not all(c.get(x) <= s for x, s in zip(rule.params, sets)):
                continue
            nt = c.drop(rule.params)
            if nt in out:
                continue
            out[nt] = _wrap_lambdas(found[c], rule.params, sets, kind)
        if self.prune and len(out) > 1:
            keep = minimal_contexts(out, self.tick)
            out = {c: out[c] for c in keep}
        out = {c: out[c] for c in sorted(out, key=Ctx.sort_key)}
        self._ctx_cache[key] = out
        return out


def _wrap_lambdas(d: Derivation, params: Sequence[str], sets: Sequence[ISet], kind: Kind) -> Derivation:
    cur = d
    for i in reversed(range(len(params))):
        j = cur.judgement
        x = params[i]
        ctx = j.context.drop([x])
        k = Kind((kind.args[i],) + j.kind.args)
        cur = Derivation("Lambda", Judgement(ctx, Lam(x, j.term), Arrow(sets[i], j.type), k), (cur,))
    return cur


def enumerate_contexts(f: str, theta: ITy, scheme: Scheme, automaton: Automaton,
                       prune: bool = True) -> list[Ctx]:
    return list(TypeSearch(scheme, automaton, prune).enumerate_contexts(f, theta))


# --------------------------------------------------------------------------
# single judgements


def _infer_param_kinds(term: Term, kind: Kind, scheme: Scheme, known: dict[str, Kind]) -> dict[str, Kind]:
    """Recover parameter kinds from their occurrences in ``term``."""
    known = dict(known)
    env = scheme.env()

    def try_kind(t: Term) -> Kind | None:
        try:
            return kind_of(t, {**env, **known})
        except Exception:
            return None

    def walk(t: Term, expected: Kind | None) -> bool:
        head, args = spine(t)
        grew = False
        if isinstance(head, Var) and head.name not in known:
            aks = [try_kind(a) for a in args]
            if expected is not None and all(ak is not None for ak in aks):
                known[head.name] = Kind(tuple(aks) + expected.args)
                grew = True
        hk = known.get(head.name) if isinstance(head, Var) else env.get(head.name)
        for i, a in enumerate(args):
            ak = hk.args[i] if hk is not None and i < len(hk.args) else None
            grew |= walk(a, ak)
        return grew

    while walk(term, kind):
        pass
    return known


def typecheck(judgement: Judgement, scheme: Scheme, automaton: Automaton,
              params: Mapping[str, Kind] | None = None) -> Derivation | None:
    """A derivation of the judgement's term at its type, or ``None``.

    Parameters (names outside the scheme) are checked against the
    judgement's context: every use must be included in the declared set.
    Non-terminals bound in the context are constrained the same way;
    other non-terminals get their usual search candidates.
    """
    term = judgement.term
    ctx = judgement.context
    var_names = {t.name for t in _leaves(term) if isinstance(t, Var)}
    var_names |= {x for x in ctx.names() if x not in scheme.nonterminals}
    kinds = _infer_param_kinds(term, judgement.kind, scheme, dict(params or {}))
    missing = [x for x in var_names if x not in kinds]
    if missing:
        raise ValueError(f"cannot determine the kind of parameter {missing[0]!r}")
    search = TypeSearch(scheme, automaton, prune=True)
    env = {x: (BOUND, ctx.get(x)) for x in var_names | set(ctx.names())}
    body = _Body(search, env, scheme.env(kinds), derivations=True)
    found = body.infer(term, judgement.type)
    for c in sorted(found, key=Ctx.sort_key):
        if all(c.get(x) <= s for x, s in ctx):
            return found[c]
    return None


def _leaves(t: Term):
    if isinstance(t, App):
        yield from _leaves(t.fun)
        yield from _leaves(t.arg)
    else:
        yield t
