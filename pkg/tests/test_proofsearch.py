import random

import pytest
from hypothesis import given, settings, strategies as st

from horsck.automata import satisfies
from horsck.coltypes import (EMPTY, EPS, Arrow, Ctx, ISet, Level, State, color_universe, colmax,
                             pretty, refinements)
from horsck.config import Limits
from horsck.game import build_game, check
from horsck.proofsearch import (Judgement, SearchLimit, TypeSearch, derivation_from_json,
                                derivation_to_json, enumerate_contexts, terminal_types, typecheck)
from horsck.syntax import O, App, Kind, Scheme, Terminal, Var, apply, arrow_kind
from horsck.validate import InvalidDerivation, check_derivation
import horsck.proofsearch as proofsearch

from corpus_gen import SIGMA, random_automaton, random_ho_scheme

K1 = arrow_kind([O])
PARAMS = {"x": O, "f": K1}
PLAIN = Scheme(dict(SIGMA), {"S": O}, "S", {})


def test_if_typing(lists):
    _, aut = lists
    (t,) = terminal_types("if", "q0", aut)
    assert pretty(t) == "∅ → (□₀ q0 ∧ □₁ q1) → q0"
    assert str(t) == "(/\\) -> (/\\ [0]q0 [1]q1) -> q0"


def test_terminal_types_nonminimal(lists):
    _, aut = lists
    many = terminal_types("if", "q0", aut, minimal=False)
    assert len(many) == 4  # (2,q0),(2,q1) forced; (1,q0),(1,q1) free
    assert terminal_types("if", "q0", aut)[0] in many


def test_enumerate_contexts_lists(lists):
    s, aut = lists
    ctxs = enumerate_contexts("S", State("q0"), s, aut)
    # L used at an empty demand, or demanding q1 of its argument
    assert [str(c) for c in ctxs] == ["{L : (/\\ [eps]((/\\ [1]q1) -> q0))}",
                                      "{L : (/\\ [eps]((/\\) -> q0))}"]


def test_contexts_validate(lists):
    s, aut = lists
    search = TypeSearch(s, aut)
    for q in aut.states:
        for ctx, d in search.enumerate_contexts("S", State(q)).items():
            check_derivation(d, s, aut, {})
            assert d.judgement.context == ctx
    theta = Arrow(ISet([(Level(0), State("q0"))]), State("q0"))
    for ctx, d in search.enumerate_contexts("L", theta).items():
        check_derivation(d, s, aut, s.param_kinds("L"))


def test_validator_rejects_tampering(lists):
    s, aut = lists
    d = next(iter(TypeSearch(s, aut).enumerate_contexts("S", State("q0")).values()))
    data = derivation_to_json(d)
    back = derivation_from_json(data, s)
    assert back == d
    data["type"] = "q1"
    with pytest.raises(InvalidDerivation):
        check_derivation(derivation_from_json(data, s), s, aut, {})


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_prune_is_subset(seed):
    rng = random.Random(seed)
    s = random_ho_scheme(rng, max_order=1)
    aut = random_automaton(rng)
    on = TypeSearch(s, aut, prune=True)
    off = TypeSearch(s, aut, prune=False, step_limit=20_000)
    for q in aut.states:
        pruned = on.enumerate_contexts("S", State(q))
        try:
            full = off.enumerate_contexts("S", State(q))
        except SearchLimit:
            return  # the unpruned context set can be exponential
        assert set(pruned) <= set(full)
        for c in full:
            assert any(p <= c for p in pruned)
        for c, d in list(pruned.items()) + list(full.items()):
            check_derivation(d, s, aut, {})


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_game_derivations_validate(seed):
    rng = random.Random(seed)
    s = random_ho_scheme(rng)
    aut = random_automaton(rng)
    g = build_game(s, aut)
    for (_e, _a), d in g.meta["derivations"].items():
        f = g.payload[_e].nonterminal
        check_derivation(d, s, aut, s.param_kinds(f))


# ---- typecheck against brute-force derivability


def _all_types(kind, aut):
    return refinements(kind, aut.states, color_universe(aut.coloring))


def _delta_ok(t, a, aut):
    atoms, i = set(), 0
    while isinstance(t, Arrow):
        i += 1
        for m, u in t.arg:
            if not isinstance(u, State) or m != Level(aut.color(u.q)):
                return False
            atoms.add((i, u.q))
        t = t.res
    return satisfies(atoms, aut.delta(t.q, a))


def _unbox(m, ctx, colors):
    """Largest context whose ``m``-box is included in ``ctx``."""
    return Ctx({x: ISet((m2, t) for m2 in colors for (m1, t) in s if colmax(m, m2) == m1)
                for x, s in ctx})


def derivable(term, theta, ctx, aut, memo):
    """Is ``term : theta`` derivable from some context included in ``ctx``?
    Tries every refinement for the function part of each application."""
    key = (term, theta, ctx)
    if key in memo:
        return memo[key]
    colors = color_universe(aut.coloring)
    if isinstance(term, Var):
        res = (EPS, theta) in ctx.get(term.name)
    elif isinstance(term, Terminal):
        res = _delta_ok(theta, term.name, aut)
    else:
        fk = Kind((O,) + _kind_args(term.fun))
        res = False
        for t in _all_types(fk, aut):
            if t.res != theta:
                continue
            if all(derivable(term.arg, th, _unbox(m, ctx, colors), aut, memo) for m, th in t.arg) and \
                    derivable(term.fun, t, ctx, aut, memo):
                res = True
                break
    memo[key] = res
    return res


def _kind_args(fun):
    """Argument kinds of an applicative head over a, b, f (all ground)."""
    n = 0
    while isinstance(fun, App):
        fun, n = fun.fun, n + 1
    total = SIGMA.get(fun.name, 1) if not isinstance(fun, Var) else 1
    return (O,) * (total - n - 1)


def random_term(rng, size):
    """Ground-kind term over a, b, c, x : o and f : o -> o."""
    if size <= 1:
        return rng.choice([Terminal("c"), Var("x")])
    head = rng.choice(["a", "b", "f"])
    if head == "a":
        left = rng.randint(1, size - 2) if size > 2 else 1
        return apply(Terminal("a"), [random_term(rng, left), random_term(rng, max(1, size - 1 - left))])
    return App(Var("f") if head == "f" else Terminal("b"), random_term(rng, size - 1))


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 10**6))
def test_typecheck_matches_brute_force(seed):
    rng = random.Random(seed)
    aut = random_automaton(rng, colors=True, max_color=1)
    term = random_term(rng, rng.randint(1, 5))
    xs = [(m, State(q)) for m in color_universe(aut.coloring) for q in aut.states]
    fs = [(m, t) for m in color_universe(aut.coloring) for t in _all_types(K1, aut)]
    ctx = Ctx({"x": ISet(rng.sample(xs, rng.randint(0, len(xs)))),
               "f": ISet(rng.sample(fs, rng.randint(0, min(4, len(fs)))))})
    q = rng.choice(aut.states)
    d = typecheck(Judgement(ctx, term, State(q), O), PLAIN, aut, PARAMS)
    expected = derivable(term, State(q), ctx, aut, {})
    assert (d is not None) == expected
    if d is not None:
        check_derivation(d, PLAIN, aut, PARAMS)
        assert d.judgement.context <= ctx


def test_typecheck_nonterminal_bound_in_context(lists):
    s, aut = lists
    from horsck.proofsearch import parse_any_term
    term = parse_any_term("L Nil", s)
    good = Arrow(ISet([(Level(0), State("q0"))]), State("q0"))
    ctx = Ctx({"L": ISet([(EPS, good)])})
    d = typecheck(Judgement(ctx, term, State("q0"), O), s, aut)
    assert d is not None
    check_derivation(d, s, aut, {})
    narrow = Ctx({"L": ISet([(EPS, Arrow(EMPTY, State("q1")))])})
    assert typecheck(Judgement(narrow, term, State("q0"), O), s, aut) is None


# ---- tight heads vs exhaustive heads


@pytest.mark.parametrize("seed", range(12))
def test_tight_matches_exhaustive(seed, monkeypatch):
    monkeypatch.setattr(proofsearch, "EXHAUSTIVE_LIMIT", 300)
    rng = random.Random(1000 + seed)
    for _ in range(5):
        s = random_ho_scheme(rng, max_order=1)
        aut = random_automaton(rng, n_states=1)
        try:
            e = check(s, aut, heads="exhaustive", limits=Limits(search_steps=100_000))
        except SearchLimit:
            continue
        assert check(s, aut).accepted == e.accepted
