"""Concrete syntax: a pure Horn-clause subset of Prolog.

::

    % comment
    :- coinductive nats/1.
    nat(0).
    nat(s(X)) :- nat(X).
    ?- nats(X).

Lowercase-initial identifiers and digit strings are function/predicate
symbols, uppercase- or underscore-initial identifiers are variables.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Optional, Tuple

from .program import Clause, Program, TypingFunction, goal_clause, render_clause
from .terms import App, ArityClash, Signature, Term, Var, render

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|%[^\n]*)
  | (?P<neck>:-)
  | (?P<query>\?-)
  | (?P<var>[A-Z_][A-Za-z0-9_']*)
  | (?P<name>[a-z][A-Za-z0-9_']*|[0-9]+)
  | (?P<punct>[(),./])
    """,
    re.VERBOSE,
)


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} at line {line}, column {column}")
        self.message = message
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> List[Token]:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1))
        for i, ch in enumerate(m.group()):
            if ch == "\n":
                line += 1
                line_start = pos + i + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def cur(self) -> Token:
        return self.toks[self.i]

    def fail(self, what: str):
        tok = self.cur
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise ParseError(f"expected {what}, found {found}", tok.line, tok.column)

    def accept(self, kind: str, text: Optional[str] = None) -> Optional[Token]:
        tok = self.cur
        if tok.kind == kind and (text is None or tok.text == text):
            self.i += 1
            return tok
        return None

    def expect(self, kind: str, text: Optional[str] = None, what: Optional[str] = None) -> Token:
        tok = self.accept(kind, text)
        if tok is None:
            self.fail(what or repr(text or kind))
        return tok

    def term(self) -> Term:
        tok = self.accept("var")
        if tok is not None:
            return Var(tok.text)
        tok = self.expect("name", what="a term")
        args = []
        if self.accept("punct", "("):
            args.append(self.term())
            while self.accept("punct", ","):
                args.append(self.term())
            self.expect("punct", ")", "',' or ')'")
        return App(tok.text, tuple(args))

    def atom(self) -> App:
        tok = self.cur
        t = self.term()
        if isinstance(t, Var):
            raise ParseError("a variable cannot be an atom", tok.line, tok.column)
        return t

    def atoms(self) -> List[App]:
        out = [self.atom()]
        while self.accept("punct", ","):
            out.append(self.atom())
        return out

    def directive(self, typing: set) -> None:
        kw = self.expect("name", what="a directive name")
        if kw.text != "coinductive":
            raise ParseError(f"unknown directive {kw.text!r}", kw.line, kw.column)
        while True:
            name = self.expect("name", what="a predicate name")
            self.expect("punct", "/", "'/'")
            ar = self.expect("name", what="an arity")
            if not ar.text.isdigit():
                raise ParseError("arity must be a natural number", ar.line, ar.column)
            typing.add((name.text, int(ar.text), name))
            if not self.accept("punct", ","):
                break
        self.expect("punct", ".", "'.'")


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.term()
    p.expect("eof", what="end of input")
    return t


def parse_clause(text: str) -> Clause:
    p = _Parser(text)
    head = p.atom()
    body = p.atoms() if p.accept("neck") else []
    p.accept("punct", ".")
    p.expect("eof", what="end of input")
    return Clause(head, tuple(body))


def parse_program(text: str) -> Tuple[Program, TypingFunction, Signature]:
    p = _Parser(text)
    clauses = []
    coinductive = set()
    sig = Signature()
    while p.cur.kind != "eof":
        if p.accept("neck"):
            p.directive(coinductive)
            continue
        start = p.cur
        head = p.atom()
        body = p.atoms() if p.accept("neck") else []
        p.expect("punct", ".", "'.' or ':-'")
        c = Clause(head, tuple(body))
        try:
            _sign(c.head, sig)
            for b in c.body:
                _sign(b, sig)
        except ArityClash as e:
            raise ParseError(str(e), start.line, start.column) from None
        clauses.append(c)
    for name, arity, tok in sorted(coinductive, key=lambda x: (x[0], x[1])):
        if sig.predicates.get(name, arity) != arity:
            raise ParseError(f"coinductive {name}/{arity} but {name} has arity {sig.predicates[name]}",
                             tok.line, tok.column)
    typing = TypingFunction(frozenset(name for name, _, _ in coinductive))
    return Program(tuple(clauses)), typing, sig


def _sign(atom: App, sig: Signature) -> None:
    sig.add_predicate(atom.functor, len(atom.args))
    stack = list(atom.args)
    while stack:
        t = stack.pop()
        if isinstance(t, App):
            sig.add_function(t.functor, len(t.args))
            stack.extend(t.args)


def parse_query(text: str) -> Clause:
    """Parse ``?- g1, ..., gn.`` (the ``?-`` and final dot are optional)."""
    p = _Parser(text)
    p.accept("query")
    if p.cur.kind == "punct" and p.cur.text == ".":
        p.fail("a goal")
    body = p.atoms()
    p.accept("punct", ".")
    p.expect("eof", what="end of input")
    return goal_clause(*body)


def format_clause(c: Clause) -> str:
    if c.is_goal:
        return "?- " + ", ".join(render(b) for b in c.body) + "."
    if not c.body:
        return render(c.head) + "."
    return render(c.head) + " :- " + ", ".join(render(b) for b in c.body) + "."


def format_program(p: Program, typing: Optional[TypingFunction] = None) -> str:
    lines = []
    if typing is not None:
        arities = p.predicates()
        for name in sorted(typing.coinductive):
            lines.append(f":- coinductive {name}/{arities.get(name, 0)}.")
    lines.extend(format_clause(c) for c in p)
    return "\n".join(lines) + "\n"


__all__ = [
    "ParseError",
    "format_clause",
    "format_program",
    "parse_clause",
    "parse_program",
    "parse_query",
    "parse_term",
    "render_clause",
    "tokenize",
]
