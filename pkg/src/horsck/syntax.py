"""Kinds, applicative terms and recursion schemes.

A scheme file looks like::

    terminals:  if : 2   data : 1   Nil : 0
    nonterminals:  S : o   L : o -> o
    start: S
    rules:
      S -> L Nil
      L x -> if x (L (data x))

``o`` is the ground kind, ``->`` associates to the right, application to the
left, and ``#`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence, Union


class SchemeError(Exception):
    """Base error carrying an optional source position."""

    def __init__(self, msg: str, line: int | None = None, col: int | None = None):
        self.msg = msg
        self.line = line
        self.col = col
        if line is not None:
            msg = f"line {line}, column {col}: {msg}"
        super().__init__(msg)


class ParseError(SchemeError):
    pass


class KindError(SchemeError):
    pass


# --------------------------------------------------------------------------
# kinds


@dataclass(frozen=True)
class Kind:
    """``args[0] -> args[1] -> ... -> o``; the ground kind has no arguments."""

    args: tuple[Kind, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def order(self) -> int:
        return order(self)

    def result(self, k: int = 1) -> Kind:
        """Kind left after consuming ``k`` arguments."""
        return Kind(self.args[k:])

    def __str__(self) -> str:
        if not self.args:
            return "o"
        parts = []
        for a in self.args:
            parts.append(f"({a})" if a.args else str(a))
        return " -> ".join(parts + ["o"])


O = Kind()


def arrow_kind(args: Sequence[Kind], res: Kind = O) -> Kind:
    return Kind(tuple(args) + res.args)


def order(kind: Kind) -> int:
    if not kind.args:
        return 0
    return 1 + max(order(a) for a in kind.args)


def terminal_kind(arity: int) -> Kind:
    return Kind((O,) * arity)


# --------------------------------------------------------------------------
# terms


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class NonTerminal:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Terminal:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class App:
    fun: "Term"
    arg: "Term"

    def __str__(self):
        head, args = spine(self)
        return " ".join([str(head)] + [_atom_str(a) for a in args])


Term = Union[Var, NonTerminal, Terminal, App]


def _atom_str(t: Term) -> str:
    return f"({t})" if isinstance(t, App) else str(t)


def spine(t: Term) -> tuple[Term, list[Term]]:
    """Split ``h t1 ... tn`` into ``(h, [t1, ..., tn])``."""
    args = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fun
    args.reverse()
    return t, args


def apply(head: Term, args: Sequence[Term]) -> Term:
    for a in args:
        head = App(head, a)
    return head


def names(t: Term) -> Iterator[Term]:
    """Leaves of a term, left to right."""
    if isinstance(t, App):
        yield from names(t.fun)
        yield from names(t.arg)
    else:
        yield t


def term_size(t: Term) -> int:
    if isinstance(t, App):
        return term_size(t.fun) + term_size(t.arg)
    return 1


def kind_of(term: Term, env: Mapping[str, Kind]) -> Kind:
    """Simple kind of ``term``; ``env`` maps every free name to its kind."""
    if isinstance(term, App):
        fk = kind_of(term.fun, env)
        ak = kind_of(term.arg, env)
        if not fk.args or fk.args[0] != ak:
            raise KindError(f"kind mismatch: cannot apply {term.fun} : {fk} to {term.arg} : {ak}")
        return fk.result()
    try:
        return env[term.name]
    except KeyError:
        raise KindError(f"unbound name {term.name!r}") from None


def substitute(t: Term, sub: Mapping[str, Term]) -> Term:
    if isinstance(t, Var):
        return sub.get(t.name, t)
    if isinstance(t, App):
        return App(substitute(t.fun, sub), substitute(t.arg, sub))
    return t


# --------------------------------------------------------------------------
# schemes


@dataclass(frozen=True)
class Rule:
    params: tuple[str, ...]
    body: Term


@dataclass(frozen=True, eq=False)
class Scheme:
    terminals: Mapping[str, int]
    nonterminals: Mapping[str, Kind]
    start: str
    rules: Mapping[str, Rule] = field(default_factory=dict)

    def __eq__(self, other):
        if not isinstance(other, Scheme):
            return NotImplemented
        return (dict(self.terminals) == dict(other.terminals)
                and dict(self.nonterminals) == dict(other.nonterminals)
                and self.start == other.start
                and dict(self.rules) == dict(other.rules))

    __hash__ = None  # type: ignore[assignment]

    def env(self, params: Mapping[str, Kind] | None = None) -> dict[str, Kind]:
        env = {a: terminal_kind(n) for a, n in self.terminals.items()}
        env.update(self.nonterminals)
        if params:
            env.update(params)
        return env

    def param_kinds(self, f: str) -> dict[str, Kind]:
        return dict(zip(self.rules[f].params, self.nonterminals[f].args))

    @property
    def order(self) -> int:
        return max((order(k) for k in self.nonterminals.values()), default=0)

    def validate(self) -> None:
        """Kind-check every rule; raise ``KindError`` on the first problem."""
        overlap = set(self.terminals) & set(self.nonterminals)
        if overlap:
            raise KindError(f"name used as both terminal and non-terminal: {sorted(overlap)[0]}")
        if self.start not in self.nonterminals:
            raise KindError(f"unknown start symbol {self.start!r}")
        if self.nonterminals[self.start] != O:
            raise KindError(f"start symbol {self.start} must have kind o")
        if self.start not in self.rules:
            raise KindError("no rule for start symbol")
        for f, kind in self.nonterminals.items():
            if f not in self.rules:
                raise KindError(f"no rule for non-terminal {f}")
            rule = self.rules[f]
            if len(rule.params) != kind.arity:
                raise KindError(
                    f"arity mismatch in rule for {f}: {len(rule.params)} parameters, kind {kind}")
            k = kind_of(rule.body, self.env(self.param_kinds(f)))
            if k != O:
                raise KindError(f"body of {f} has kind {k}, expected o")

    def __str__(self) -> str:
        return print_scheme(self)


def print_scheme(s: Scheme) -> str:
    """Canonical text form; ``parse_scheme`` reads it back unchanged."""
    lines = ["terminals: " + "  ".join(f"{a} : {n}" for a, n in s.terminals.items()),
             "nonterminals: " + "  ".join(f"{f} : {k}" for f, k in s.nonterminals.items()),
             f"start: {s.start}",
             "rules:"]
    for f, rule in s.rules.items():
        lhs = " ".join((f,) + rule.params)
        lines.append(f"  {lhs} -> {rule.body}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# tokenizer shared with the automaton parser

_TOKEN = re.compile(r"\s*(?:(?P<arrow>->)|(?P<and>/\\)|(?P<or>\\/)|(?P<omega>_\|_)"
                    r"|(?P<name>[A-Za-z_][A-Za-z0-9_']*)|(?P<num>\d+)|(?P<punct>[():,]))")


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize_line(text: str, lineno: int) -> list[Token]:
    text = text.split("#", 1)[0]
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            col = pos + len(text[pos:]) - len(text[pos:].lstrip()) + 1
            raise ParseError(f"unexpected character {text[col - 1]!r}", lineno, col)
        kind = m.lastgroup
        toks.append(Token(kind, m.group(kind), lineno, m.start(kind) + 1))
        pos = m.end()
    return toks


class TokenStream:
    def __init__(self, toks: list[Token], line: int):
        self.toks = toks
        self.i = 0
        self.line = line

    def peek(self, k: int = 0) -> Token | None:
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def next(self) -> Token:
        t = self.peek()
        if t is None:
            raise ParseError("unexpected end of line", self.line, self._endcol())
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        t = self.next()
        if t.text != text:
            raise ParseError(f"expected {text!r}, found {t.text!r}", t.line, t.col)
        return t

    def expect_kind(self, kind: str, what: str) -> Token:
        t = self.next()
        if t.kind != kind:
            raise ParseError(f"expected {what}, found {t.text!r}", t.line, t.col)
        return t

    def at_end(self) -> bool:
        return self.i >= len(self.toks)

    def _endcol(self) -> int:
        if not self.toks:
            return 1
        t = self.toks[-1]
        return t.col + len(t.text)


def split_sections(text: str, names: Sequence[str]) -> dict[str, list[tuple[int, list[Token]]]]:
    """Group tokenized lines under ``name:`` section headers."""
    sections: dict[str, list[tuple[int, list[Token]]]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        toks = tokenize_line(raw, lineno)
        if not toks:
            continue
        if (len(toks) >= 2 and toks[0].kind == "name" and toks[0].text in names
                and toks[1].text == ":"):
            current = toks[0].text
            if current in sections:
                raise ParseError(f"duplicate section {current!r}", lineno, toks[0].col)
            sections[current] = []
            toks = toks[2:]
            if toks:
                sections[current].append((lineno, toks))
            continue
        if current is None:
            raise ParseError("expected a section header", lineno, toks[0].col)
        sections[current].append((lineno, toks))
    return sections


# --------------------------------------------------------------------------
# scheme parser


def _parse_kind(ts: TokenStream) -> Kind:
    t = ts.next()
    if t.text == "(":
        left = _parse_kind(ts)
        ts.expect(")")
    elif t.text == "o":
        left = O
    else:
        raise ParseError(f"expected a kind, found {t.text!r}", t.line, t.col)
    nxt = ts.peek()
    if nxt is not None and nxt.kind == "arrow":
        ts.next()
        rest = _parse_kind(ts)
        return Kind((left,) + rest.args)
    return left


def _parse_term(ts: TokenStream, classify) -> Term:
    atoms = []
    while True:
        t = ts.peek()
        if t is None or t.text == ")":
            break
        if t.text == "(":
            ts.next()
            atoms.append(_parse_term(ts, classify))
            ts.expect(")")
        elif t.kind == "name":
            ts.next()
            atoms.append(classify(t))
        else:
            raise ParseError(f"unexpected {t.text!r} in term", t.line, t.col)
    if not atoms:
        t = ts.peek()
        line, col = (t.line, t.col) if t else (ts.line, ts._endcol())
        raise ParseError("empty term", line, col)
    return apply(atoms[0], atoms[1:])


def _flatten(lines):
    toks = []
    for _, ts in lines:
        toks.extend(ts)
    return toks


def parse_scheme(text: str) -> Scheme:
    """Parse and kind-check a scheme.

    Raises ``ParseError`` for malformed text and ``KindError`` for well-formed
    text that fails kind checking.
    """
    secs = split_sections(text, ("terminals", "nonterminals", "start", "rules"))
    for required in ("terminals", "nonterminals", "start"):
        if required not in secs:
            raise ParseError(f"missing section {required!r}", 1, 1)

    terminals: dict[str, int] = {}
    toks = _flatten(secs["terminals"])
    ts = TokenStream(toks, toks[-1].line if toks else 1)
    while not ts.at_end():
        name = ts.expect_kind("name", "terminal name")
        ts.expect(":")
        n = ts.expect_kind("num", "arity")
        if name.text in terminals:
            raise ParseError(f"duplicate terminal {name.text}", name.line, name.col)
        terminals[name.text] = int(n.text)

    nonterminals: dict[str, Kind] = {}
    positions: dict[str, tuple[int, int]] = {}
    toks = _flatten(secs["nonterminals"])
    ts = TokenStream(toks, toks[-1].line if toks else 1)
    while not ts.at_end():
        name = ts.expect_kind("name", "non-terminal name")
        ts.expect(":")
        if name.text in nonterminals:
            raise ParseError(f"duplicate non-terminal {name.text}", name.line, name.col)
        if name.text in terminals:
            raise ParseError(f"name used as both terminal and non-terminal: {name.text}",
                             name.line, name.col)
        nonterminals[name.text] = _parse_kind(ts)
        positions[name.text] = (name.line, name.col)

    toks = _flatten(secs["start"])
    if len(toks) != 1 or toks[0].kind != "name":
        line = toks[0].line if toks else 1
        raise ParseError("start section must name exactly one non-terminal", line, 1)
    start_tok = toks[0]
    if start_tok.text not in nonterminals:
        raise ParseError(f"unknown symbol {start_tok.text!r}", start_tok.line, start_tok.col)
    start = start_tok.text

    rules: dict[str, Rule] = {}
    for lineno, toks in secs.get("rules", []):
        ts = TokenStream(toks, lineno)
        head = ts.expect_kind("name", "non-terminal")
        if head.text not in nonterminals:
            raise ParseError(f"unknown symbol {head.text!r}", head.line, head.col)
        if head.text in rules:
            raise ParseError(f"duplicate rule for {head.text}", head.line, head.col)
        params: list[str] = []
        while ts.peek() is not None and ts.peek().kind == "name":
            p = ts.next()
            if p.text in nonterminals or p.text in terminals:
                raise ParseError(f"parameter {p.text!r} shadows a symbol", p.line, p.col)
            if p.text in params:
                raise ParseError(f"repeated parameter {p.text!r}", p.line, p.col)
            params.append(p.text)
        ts.expect("->")
        kind = nonterminals[head.text]
        if len(params) != kind.arity:
            raise KindError(f"arity mismatch: {head.text} has kind {kind} but "
                            f"{len(params)} parameters", head.line, head.col)
        pset = set(params)

        def classify(t: Token, pset=pset) -> Term:
            if t.text in pset:
                return Var(t.text)
            if t.text in nonterminals:
                return NonTerminal(t.text)
            if t.text in terminals:
                return Terminal(t.text)
            raise ParseError(f"unknown symbol {t.text!r}", t.line, t.col)

        body = _parse_term(ts, classify)
        if not ts.at_end():
            t = ts.next()
            raise ParseError(f"unexpected {t.text!r}", t.line, t.col)
        penv = dict(zip(params, kind.args))
        env = {a: terminal_kind(n) for a, n in terminals.items()}
        env.update(nonterminals)
        env.update(penv)
        try:
            bk = kind_of(body, env)
        except KindError as e:
            raise KindError(e.msg, head.line, head.col) from None
        if bk != O:
            raise KindError(f"body of {head.text} has kind {bk}, expected o", head.line, head.col)
        rules[head.text] = Rule(tuple(params), body)

    if start not in rules:
        raise ParseError("no rule for start symbol", start_tok.line, start_tok.col)
    for f in nonterminals:
        if f not in rules:
            line, col = positions[f]
            raise ParseError(f"no rule for non-terminal {f}", line, col)
    if nonterminals[start] != O:
        raise KindError(f"start symbol {start} must have kind o", start_tok.line, start_tok.col)
    return Scheme(terminals, nonterminals, start, rules)


def parse_term(text: str, scheme: Scheme, params: Sequence[str] = ()) -> Term:
    """Parse a term in the context of ``scheme`` with the given bound variables."""
    toks = tokenize_line(text, 1)
    ts = TokenStream(toks, 1)
    pset = set(params)

    def classify(t: Token) -> Term:
        if t.text in pset:
            return Var(t.text)
        if t.text in scheme.nonterminals:
            return NonTerminal(t.text)
        if t.text in scheme.terminals:
            return Terminal(t.text)
        raise ParseError(f"unknown symbol {t.text!r}", t.line, t.col)

    term = _parse_term(ts, classify)
    if not ts.at_end():
        t = ts.next()
        raise ParseError(f"unexpected {t.text!r}", t.line, t.col)
    return term


def parse_kind(text: str) -> Kind:
    ts = TokenStream(tokenize_line(text, 1), 1)
    k = _parse_kind(ts)
    if not ts.at_end():
        t = ts.next()
        raise ParseError(f"unexpected {t.text!r}", t.line, t.col)
    return k
