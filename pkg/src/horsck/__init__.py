"""Higher-order model checking with colored intersection types.

Decides whether an alternating parity tree automaton accepts the value tree
of a higher-order recursion scheme by solving a typing game, and checks the
answer against independent oracles.
"""

from .automata import (Automaton, bounded_run_exists, dnf, expand_value_tree, parse_automaton,
                       regular_oracle, satisfies)
from .coltypes import EPS, Ctx, ISet, Level, box_apply, colmax, ctx_add, refinements
from .game import Verdict, Witness, build_game, check, encode, extract_witness, validate_witness
from .parity import ParityGame, solve_naive, solve_zielonka
from .proofsearch import TypeSearch, enumerate_contexts, terminal_types, typecheck
from .relsem import Lattice, alt_fixpoint, interp_delta, interp_term
from .syntax import Kind, Scheme, kind_of, order, parse_scheme

__version__ = "0.1.0"

__all__ = [
    "Automaton",
    "bounded_run_exists",
    "dnf",
    "expand_value_tree",
    "parse_automaton",
    "regular_oracle",
    "satisfies",
    "EPS",
    "Ctx",
    "ISet",
    "Level",
    "box_apply",
    "colmax",
    "ctx_add",
    "refinements",
    "Verdict",
    "Witness",
    "build_game",
    "check",
    "encode",
    "extract_witness",
    "validate_witness",
    "ParityGame",
    "solve_naive",
    "solve_zielonka",
    "TypeSearch",
    "enumerate_contexts",
    "terminal_types",
    "typecheck",
    "Lattice",
    "alt_fixpoint",
    "interp_delta",
    "interp_term",
    "Kind",
    "Scheme",
    "kind_of",
    "order",
    "parse_scheme",
]
