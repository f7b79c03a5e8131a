"""Command-line front end.

Exit codes: 0 accepted, 1 rejected, 2 parse or usage error, 3 kind error,
4 internal validation failure, 5 a size or fuel guard was exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys

from .automata import (Automaton, bounded_run_exists, expand_value_tree, is_finite_tree,
                       parse_automaton, productivity_automaton, regular_oracle, tree_dot,
                       tree_term, tree_text)
from .config import Limits
from .game import Witness, WitnessError, build_game, check, game_json_text, game_to_dot
from .parity import GameTooLarge
from .proofsearch import SearchLimit
from .relsem import interp_term_witness
from .syntax import KindError, ParseError, Scheme, parse_scheme

EXIT_ACCEPT, EXIT_REJECT, EXIT_USAGE, EXIT_KIND, EXIT_INTERNAL, EXIT_LIMIT = 0, 1, 2, 3, 4, 5


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def load_scheme(path: str) -> Scheme:
    try:
        return parse_scheme(_read(path))
    except (ParseError, KindError) as e:
        e.args = (f"{path}: {e}",)
        raise


def load_automaton(path: str, scheme: Scheme | None = None) -> Automaton:
    try:
        aut = parse_automaton(_read(path))
    except ParseError as e:
        e.args = (f"{path}: {e}",)
        raise
    except ValueError as e:
        raise UsageError(f"{path}: {e}") from None
    if scheme is not None:
        try:
            aut.check_signature(scheme.terminals)
        except ValueError as e:
            raise UsageError(f"{path}: {e}") from None
    return aut


def _state(aut: Automaton, q: str | None) -> str:
    if q is None:
        return aut.initial
    if q not in aut.states:
        raise UsageError(f"unknown state {q!r}")
    return q


def _emit(verdict_ok: bool, payload: dict, as_json: bool, text: str) -> int:
    if as_json:
        print(json.dumps(payload, indent=2, ensure_ascii=False))
    else:
        print(text)
    return EXIT_ACCEPT if verdict_ok else EXIT_REJECT


# --------------------------------------------------------------------------
# commands


def cmd_check(args, limits: Limits) -> int:
    scheme = load_scheme(args.scheme)
    aut = load_automaton(args.automaton, scheme)
    q = _state(aut, args.state)
    verdict = check(scheme, aut, q, prune=not args.no_prune, heads=args.heads, limits=limits)
    if verdict.witness is not None and args.validate_witness:
        # round-trip through JSON so the validator sees exactly what is written
        data = json.loads(json.dumps(verdict.witness.to_json()))
        from .game import validate_witness
        errs = validate_witness(Witness.from_json(data, scheme), scheme, aut, q)
        if errs:
            raise WitnessError("; ".join(errs[:5]))
    if verdict.witness is not None and args.witness:
        with open(args.witness, "w", encoding="utf-8") as fh:
            json.dump(verdict.witness.to_json(), fh, indent=2, ensure_ascii=False)
    payload = verdict.to_json()
    if not args.witness_inline:
        payload.pop("witness")
    st = verdict.stats
    text = (f"{'accepted' if verdict.accepted else 'rejected'} from state {q}  "
            f"({st['eve_vertices']} Eve / {st['adam_vertices']} Adam vertices, {st['edges']} edges)")
    return _emit(verdict.accepted, payload, args.json, text)


def cmd_check_productivity(args, limits: Limits) -> int:
    scheme = load_scheme(args.scheme)
    aut = productivity_automaton(scheme)
    verdict = check(scheme, aut, "q", limits=limits)
    payload = {"productive": verdict.accepted, "stats": verdict.stats}
    text = "productive" if verdict.accepted else "not productive (some branch diverges)"
    return _emit(verdict.accepted, payload, args.json, text)


def cmd_expand(args, limits: Limits) -> int:
    scheme = load_scheme(args.scheme)
    if args.depth < 0:
        raise UsageError("depth must be non-negative")
    fuel = args.fuel if args.fuel is not None else limits.fuel
    tree = expand_value_tree(scheme, args.depth, fuel)
    render = {"text": tree_text, "term": lambda t: tree_term(t) + "\n", "dot": tree_dot}[args.format]
    sys.stdout.write(render(tree))
    return EXIT_ACCEPT


def cmd_dump_game(args, limits: Limits) -> int:
    scheme = load_scheme(args.scheme)
    aut = load_automaton(args.automaton, scheme)
    q = _state(aut, args.state)
    game = build_game(scheme, aut, q, prune=not args.no_prune, limits=limits)
    out = game_to_dot(game) if args.format == "dot" else game_json_text(game) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return EXIT_ACCEPT


def cmd_oracle(args, limits: Limits) -> int:
    scheme = load_scheme(args.scheme)
    aut = load_automaton(args.automaton, scheme)
    q = _state(aut, args.state)
    fuel = args.fuel if args.fuel is not None else limits.fuel
    payload: dict = {"mode": args.mode, "state": q}
    if args.mode == "regular":
        if scheme.order > 0:
            raise UsageError("regular oracle needs an order-0 scheme")
        ok = regular_oracle(scheme, aut, q)
    elif args.mode == "bounded":
        tree = expand_value_tree(scheme, args.depth, fuel)
        ok = bounded_run_exists(tree, aut, q, args.depth)
        payload["depth"] = args.depth
    else:
        tree = expand_value_tree(scheme, args.depth, fuel)
        if not is_finite_tree(tree):
            raise UsageError("tree not finite at given depth/fuel")
        u = interp_term_witness(tree, aut, q, dict(scheme.terminals))
        ok = u is not None
        payload["depth"] = args.depth
        payload["witness"] = [str(e) for e in u] if u else None
    payload["accepted"] = ok
    return _emit(ok, payload, args.json, f"{args.mode} oracle: {'accepted' if ok else 'rejected'}")


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="horsck", description="Model checker for recursion schemes "
                                "against alternating parity tree automata.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="decide acceptance of the value tree")
    c.add_argument("scheme")
    c.add_argument("automaton")
    c.add_argument("--json", action="store_true", help="print the verdict as JSON")
    c.add_argument("--witness", metavar="PATH", help="write the witness as JSON")
    c.add_argument("--witness-inline", action="store_true", help="include the witness in --json output")
    c.add_argument("--no-prune", action="store_true", help="keep non-minimal contexts")
    c.add_argument("--state", help="initial state (default: the automaton's)")
    c.add_argument("--validate-witness", action="store_true",
                   help="re-validate the serialized witness")
    c.add_argument("--heads", choices=["tight", "exhaustive"], default="tight",
                   help=argparse.SUPPRESS)
    c.set_defaults(func=cmd_check)

    e = sub.add_parser("expand", help="print a prefix of the value tree")
    e.add_argument("scheme")
    e.add_argument("--depth", type=int, default=4)
    e.add_argument("--fuel", type=int)
    e.add_argument("--format", choices=["text", "term", "dot"], default="text")
    e.set_defaults(func=cmd_expand)

    d = sub.add_parser("dump-game", help="write the game as DOT or JSON")
    d.add_argument("scheme")
    d.add_argument("automaton")
    d.add_argument("--format", choices=["dot", "json"], default="dot")
    d.add_argument("--state")
    d.add_argument("--no-prune", action="store_true")
    d.add_argument("-o", "--output")
    d.set_defaults(func=cmd_dump_game)

    o = sub.add_parser("oracle", help="run an independent acceptance oracle")
    o.add_argument("scheme")
    o.add_argument("automaton")
    o.add_argument("--mode", choices=["bounded", "regular", "relational"], default="bounded")
    o.add_argument("--depth", type=int, default=6)
    o.add_argument("--fuel", type=int)
    o.add_argument("--state")
    o.add_argument("--json", action="store_true")
    o.set_defaults(func=cmd_oracle)

    cp = sub.add_parser("check-productivity", help="check that no branch of the value tree diverges")
    cp.add_argument("scheme")
    cp.add_argument("--json", action="store_true")
    cp.set_defaults(func=cmd_check_productivity)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        limits = Limits.from_env()
        return args.func(args, limits)
    except KindError as e:
        print(f"kind error: {e}", file=sys.stderr)
        return EXIT_KIND
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except WitnessError as e:
        print(f"internal error: witness validation failed: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    except (GameTooLarge, SearchLimit) as e:
        print(f"limit exceeded: {e}", file=sys.stderr)
        return EXIT_LIMIT


if __name__ == "__main__":
    sys.exit(main())
