"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run standalone with ``python tests/test_acceptance.py`` or through pytest.
"""

from __future__ import annotations

import json
import random
import sys
import time
from functools import lru_cache
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from horsck.automata import (bounded_run_exists, expand_value_tree, parse_tree_term,
                             regular_oracle, refines, tree_term, tree_text)
from horsck.coltypes import EPS, ISet, Level, State, box_apply, colmax, pretty, refinements
from horsck.game import Witness, check, validate_witness
from horsck.parity import solve_naive, solve_zielonka
from horsck.proofsearch import terminal_types
from horsck.relsem import Lattice, alt_fixpoint, interp_term_witness
from horsck.syntax import O, arrow_kind

from conftest import load
from corpus_gen import (SIGMA, random_automaton, random_game, random_ho_scheme,
                        random_order0_scheme, random_tree)
from oracles import exhaustive_regions, run_tree_exists, tarski_fixpoint
from test_relsem import random_monotone

RESULTS: dict[int, str] = {}


def report(n: int, title: str, ok: bool, detail: str) -> None:
    line = f"criterion {n} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    RESULTS[n] = line
    print(line)


# ---------------------------------------------------------------------------
# shared corpora


@lru_cache(maxsize=None)
def order0_corpus():
    """600 seeded order-0 instances: <= 3 non-terminals, arities <= 2,
    |Q| <= 2, colors in {0, 1, 2}."""
    rng = random.Random(20240601)
    return [(random_order0_scheme(rng), random_automaton(rng)) for _ in range(600)]


@lru_cache(maxsize=None)
def order0_results():
    t0 = time.perf_counter()
    out = []
    for s, aut in order0_corpus():
        v = check(s, aut)
        out.append((v, regular_oracle(s, aut, aut.initial)))
    return out, time.perf_counter() - t0


@lru_cache(maxsize=None)
def safety_corpus():
    """All-color-0 instances (order <= 2, |Q| <= 2) whose bounded verdict
    is already stable between depth 8 and depth 12.  Curated from the
    oracle alone, never from ``check``."""
    rng = random.Random(7)
    out = []
    seen = 0
    while len(out) < 240:
        seen += 1
        s = random_ho_scheme(rng, max_order=2)
        aut = random_automaton(rng, colors=False)
        t12 = expand_value_tree(s, 12)
        if bounded_run_exists(t12, aut, aut.initial, 8) == bounded_run_exists(t12, aut, aut.initial, 12):
            out.append((s, aut, t12))
    return out, seen


@lru_cache(maxsize=None)
def safety_results():
    corpus, _ = safety_corpus()
    return [check(s, aut) for s, aut, _ in corpus]


# ---------------------------------------------------------------------------
# criteria


def test_criterion_1_order0_equivalence():
    results, secs = order0_results()
    bad = [i for i, (v, o) in enumerate(results) if v.accepted != o]
    n_acc = sum(o for _, o in results)
    ok = not bad and len(results) >= 500 and secs < 120
    report(1, "order-0 check = regular oracle", ok,
           f"{len(results) - len(bad)}/{len(results)} agree ({n_acc} accepted), {secs:.1f}s (< 120s)")
    assert ok, f"disagreements at {bad[:10]}"


def test_criterion_2_safety_soundness():
    corpus, seen = safety_corpus()
    verdicts = safety_results()
    bad = []
    for i, ((s, aut, tree), v) in enumerate(zip(corpus, verdicts)):
        runs = [bounded_run_exists(tree, aut, aut.initial, d) for d in range(1, 9)]
        if v.accepted != all(runs):
            bad.append(i)
    orders = sum(1 for s, _, _ in corpus if s.order == 2)
    n_acc = sum(v.accepted for v in verdicts)
    ok = not bad and len(corpus) >= 200
    report(2, "safety soundness vs bounded run prefixes (d = 1..8)", ok,
           f"{len(corpus) - len(bad)}/{len(corpus)} consistent ({n_acc} accepted, {orders} order-2; "
           f"curated from {seen} generated)")
    assert ok, f"inconsistent at {bad[:10]}"


def test_criterion_3_relational_vs_run_trees():
    rng = random.Random(3)
    t0 = time.perf_counter()
    bad = 0
    n_acc = 0
    for _ in range(500):
        tree = random_tree(rng, rng.randint(1, 3))
        aut = random_automaton(rng, colors=False)
        rel = interp_term_witness(tree, aut, aut.initial, SIGMA) is not None
        brute = run_tree_exists(tree, aut, aut.initial)
        bad += rel != brute
        n_acc += brute
    secs = time.perf_counter() - t0
    ok = bad == 0 and secs < 30
    report(3, "relational composition = brute-force run-trees", ok,
           f"{500 - bad}/500 agree ({n_acc} accepted), {secs:.2f}s (< 30s)")
    assert ok


def test_criterion_4_solver_cross_validation():
    rng = random.Random(4)
    bad = 0
    small = 0
    for _ in range(1000):
        g = random_game(rng, 8, 4)
        (eve, adam), _ = solve_zielonka(g)
        if solve_naive(g) != (eve, adam):
            bad += 1
            continue
        if len(g) <= 6:
            small += 1
            bad += exhaustive_regions(g) != (eve, adam)
    ok = bad == 0
    report(4, "Zielonka = naive solver (+ exhaustive enumeration on <= 6 vertices)", ok,
           f"{1000 - bad}/1000 agree, {small} small games also enumerated")
    assert ok


def test_criterion_5_color_laws():
    rng = random.Random(5)
    colors = [EPS] + [Level(k) for k in range(4)]
    elems = [State("q0"), State("q1")] + refinements(arrow_kind([O]), ("q0", "q1"), colors[:2])[:12]

    def rand_iset():
        return ISet((rng.choice(colors), rng.choice(elems)) for _ in range(rng.randint(0, 4)))

    fails = 0
    for _ in range(1000):
        a, b, c = (rng.choice(colors) for _ in range(3))
        t1, t2 = rand_iset(), rand_iset()
        laws = [
            colmax(a, colmax(b, c)) == colmax(colmax(a, b), c),
            colmax(a, b) == colmax(b, a),
            colmax(a, EPS) == a == colmax(EPS, a),
            box_apply(a, box_apply(b, t1)) == box_apply(colmax(a, b), t1),
            box_apply(EPS, t1) == t1,
            box_apply(a, t1 | t2) == box_apply(a, t1) | box_apply(a, t2),
        ]
        fails += not all(laws)
    ok = fails == 0
    report(5, "color algebra laws", ok, f"{1000 - fails}/1000 cases satisfy all six laws")
    assert ok


def test_criterion_6_witness_integrity():
    accepted = [(s, aut, v) for (s, aut), (v, _) in zip(order0_corpus(), order0_results()[0])
                if v.accepted]
    accepted += [(s, aut, v) for (s, aut, _), v in zip(safety_corpus()[0], safety_results())
                 if v.accepted]
    bad = 0
    for s, aut, v in accepted:
        # validate what a consumer would read: the serialized witness
        data = json.loads(json.dumps(v.witness.to_json()))
        w = Witness.from_json(data, s)
        errs = validate_witness(w, s, aut, v.state)
        top = data["cycles_max_color"]
        bad += bool(errs) or (top is not None and top % 2 == 1)
    ok = bad == 0 and len(accepted) > 0
    report(6, "witness integrity", ok, f"{len(accepted) - bad}/{len(accepted)} witnesses validate")
    assert ok


def test_criterion_7_nested_fixpoint():
    rng = random.Random(7)
    bad = 0
    for _ in range(200):
        h = rng.randint(1, 4)
        n = rng.choice([0, 2, 4])
        L = Lattice.chain(h)
        f = random_monotone(rng, n + 1, h)
        bad += alt_fixpoint(f, n, L) != tarski_fixpoint(f, n, L.elements, L.leq)
    ok = bad == 0
    report(7, "alternating fixpoint = Knaster-Tarski oracle", ok, f"{200 - bad}/200 agree")
    assert ok


def test_criterion_8_pruning():
    results, _ = order0_results()
    bad = 0
    for (s, aut), (v, _) in zip(order0_corpus(), results):
        bad += check(s, aut, prune=False).accepted != v.accepted
    ok = bad == 0
    report(8, "check --no-prune = check", ok, f"{len(results) - bad}/{len(results)} agree")
    assert ok


LISTS_DRAWING = "if(Nil, if(data(Nil), if(data(data(Nil)), ?)))"
LISTS_DEPTH3 = "if\n  Nil\n  if\n    data\n      ?\n    if\n      ?\n      ?\n"
ABC_GOLDEN = {
    2: "a(b(?), a(?, ?))",
    4: "a(b(c), a(b(b(?)), a(b(?), a(?, ?))))",
    5: "a(b(c), a(b(b(c)), a(b(b(?)), a(b(?), a(?, ?)))))",
}
IF_TYPING = "∅ → (□₀ q0 ∧ □₁ q1) → q0"


def test_criterion_9_examples():
    lists = load("lists.hors")
    abc = load("abc.hors")
    checks = {
        "list scheme drawing refined by depth 6": refines(parse_tree_term(LISTS_DRAWING),
                                                       expand_value_tree(lists, 6)),
        "list scheme depth-3 text": tree_text(expand_value_tree(lists, 3)) == LISTS_DEPTH3,
    }
    for d, want in ABC_GOLDEN.items():
        checks[f"order-2 example depth {d}"] = tree_term(expand_value_tree(abc, d)) == want
    (t,) = terminal_types("if", "q0", load("lists.apt"))
    checks["if typing at q0"] = pretty(t) == IF_TYPING
    failed = [k for k, v in checks.items() if not v]
    ok = not failed
    report(9, "example goldens", ok,
           f"{len(checks) - len(failed)}/{len(checks)} match" + (f" (failed: {failed})" if failed else ""))
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
