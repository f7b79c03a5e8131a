import pytest
from hypothesis import given, settings, strategies as st

from horsck.coltypes import (EMPTY, EMPTY_CTX, EPS, Arrow, Ctx, ISet, KindClash, Level, State,
                             box_apply, colmax, count_refinements, ctx_add, minimal_contexts,
                             parse_type, pretty, refinements, refines)
from horsck.syntax import O, arrow_kind

K1 = arrow_kind([O])
KH = arrow_kind([K1])
STATES = ("q0", "q1")
COLORS = (EPS, Level(0), Level(1), Level(2))

colors = st.sampled_from(COLORS)
ground = st.sampled_from([State(q) for q in STATES])
k1_types = st.sampled_from(refinements(K1, STATES, COLORS[:2]))
isets = st.sets(st.tuples(colors, ground), max_size=4).map(ISet)
k1_isets = st.sets(st.tuples(colors, k1_types), max_size=3).map(ISet)


@given(colors, colors, colors)
def test_colmax_laws(a, b, c):
    assert colmax(a, colmax(b, c)) == colmax(colmax(a, b), c)
    assert colmax(a, b) == colmax(b, a)
    assert colmax(a, EPS) == a == colmax(EPS, a)


def test_eps_sorts_first():
    assert sorted([Level(1), EPS, Level(0)]) == [EPS, Level(0), Level(1)]
    with pytest.raises(ValueError):
        Level(-1)


@given(colors, colors, st.one_of(isets, k1_isets))
def test_box_composition(m1, m2, tau):
    assert box_apply(m1, box_apply(m2, tau)) == box_apply(colmax(m1, m2), tau)


@given(st.one_of(isets, k1_isets))
def test_box_eps_identity(tau):
    assert box_apply(EPS, tau) == tau


@given(colors, isets, isets)
def test_box_distributes_over_union(m, t1, t2):
    assert box_apply(m, t1 | t2) == box_apply(m, t1) | box_apply(m, t2)


@given(isets)
def test_iset_canonical(tau):
    again = ISet(reversed(tau.items))
    assert again == tau and hash(again) == hash(tau) and str(again) == str(tau)
    assert tau | tau == tau


SMALL = [(k, nq, nc) for k in (O, K1, arrow_kind([O, O]), KH)
         for nq, nc in ((1, 1), (2, 1), (1, 2), (2, 2)) if not (k == KH and nq * nc > 2)]


@pytest.mark.parametrize("kind, nq, ncol", SMALL)
def test_refinement_count(kind, nq, ncol):
    rs = refinements(kind, STATES[:nq], COLORS[:ncol])
    assert len(rs) == count_refinements(kind, nq, ncol) == len(set(rs))
    assert all(refines(t, kind) for t in rs)


def test_refinement_count_ground():
    assert count_refinements(O, 3, 4) == 3


@given(st.one_of(ground, k1_types))
def test_type_roundtrip(t):
    assert parse_type(str(t)) == t


def test_type_syntax():
    t = Arrow(EMPTY, Arrow(ISet([(Level(0), State("q0")), (Level(1), State("q1"))]), State("q0")))
    assert str(t) == "(/\\) -> (/\\ [0]q0 [1]q1) -> q0"
    assert pretty(t) == "∅ → (□₀ q0 ∧ □₁ q1) → q0"
    assert parse_type(str(t)) == t


def test_ctx_drops_empty_and_orders():
    c = Ctx({"y": ISet([(EPS, State("q0"))]), "x": EMPTY})
    assert c.names() == ["y"]
    assert Ctx({"b": ISet([(EPS, State("q0"))]), "a": ISet([(EPS, State("q1"))])}).names() == ["a", "b"]
    assert not EMPTY_CTX


@given(st.dictionaries(st.sampled_from("xyz"), isets), st.dictionaries(st.sampled_from("xyz"), isets))
def test_ctx_add_is_pointwise_union(d1, d2):
    c1, c2 = Ctx(d1), Ctx(d2)
    s = ctx_add(c1, c2)
    assert s == ctx_add(c2, c1)
    assert c1 <= s and c2 <= s
    for x in "xyz":
        assert s.get(x) == c1.get(x) | c2.get(x)


def test_ctx_add_kind_clash():
    a = Ctx.single("x", EPS, State("q0"))
    b = Ctx.single("x", EPS, Arrow(EMPTY, State("q0")))
    with pytest.raises(KindClash):
        ctx_add(a, b)


@given(colors, st.dictionaries(st.sampled_from("xy"), isets))
def test_ctx_box(m, d):
    c = Ctx(d)
    boxed = c.box(m)
    for x, s in c:
        assert boxed[x] == box_apply(m, s)


@settings(max_examples=50)
@given(st.lists(st.dictionaries(st.sampled_from("xy"), isets), max_size=6))
def test_minimal_contexts(ds):
    cs = [Ctx(d) for d in ds]
    mins = minimal_contexts(cs)
    for c in cs:
        assert any(m <= c for m in mins)
    for m in mins:
        assert not any(o <= m and o != m for o in mins)
    assert minimal_contexts(reversed(cs)) == mins
