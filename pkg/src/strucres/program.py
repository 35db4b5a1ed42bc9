"""Clauses, programs, goal clauses and typing functions."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, Mapping, Tuple

from .terms import App, Signature, Substitution, Term, Var, render, variables

GOAL_SYMBOL = "?"
GOAL_HEAD = App(GOAL_SYMBOL)


@dataclass(frozen=True)
class Clause:
    """``head ← body``.  Viewed as a depth-1 tree: head at the root, body atom i at child i."""

    head: Term
    body: Tuple[Term, ...] = ()

    def __post_init__(self):
        if not isinstance(self.body, tuple):
            object.__setattr__(self, "body", tuple(self.body))

    @property
    def arity(self) -> int:
        return len(self.body)

    @property
    def is_goal(self) -> bool:
        return self.head == GOAL_HEAD

    @property
    def predicate(self) -> str:
        return self.head.functor

    def __getitem__(self, i):
        """Tree-function view: ``C[()]`` is the head, ``C[(i,)]`` body atom ``i``."""
        if i == ():
            return self.head
        if isinstance(i, tuple) and len(i) == 1:
            return self.body[i[0]]
        raise KeyError(i)

    def variables(self) -> Iterator[Var]:
        seen = set()
        for t in (self.head,) + self.body:
            for v in variables(t):
                if v not in seen:
                    seen.add(v)
                    yield v

    def apply(self, sigma: Substitution) -> "Clause":
        return Clause(sigma.apply(self.head), tuple(sigma.apply(b) for b in self.body))

    def rename(self, gen: int) -> "Clause":
        ren = Substitution({v: Var(v.name, gen) for v in self.variables()})
        return self.apply(ren)

    def __str__(self) -> str:
        return render_clause(self)


def render_clause(c: Clause, var_name=str, ascii: bool = False) -> str:
    arrow = "<-" if ascii else "←"
    body = ", ".join(render(b, ascii, var_name) for b in c.body)
    head = GOAL_SYMBOL if c.is_goal else render(c.head, ascii, var_name)
    return f"{head} {arrow} {body}".rstrip()


def goal_clause(*atoms: Term) -> Clause:
    return Clause(GOAL_HEAD, tuple(atoms))


@dataclass(frozen=True)
class Program:
    clauses: Tuple[Clause, ...]

    def __post_init__(self):
        if not isinstance(self.clauses, tuple):
            object.__setattr__(self, "clauses", tuple(self.clauses))

    def __len__(self) -> int:
        return len(self.clauses)

    @property
    def arity(self) -> int:
        return len(self.clauses)

    def __getitem__(self, i: int) -> Clause:
        return self.clauses[i]

    def __iter__(self):
        return iter(self.clauses)

    def predicates(self) -> Dict[str, int]:
        """Predicate symbols with arities, in order of first appearance."""
        out: Dict[str, int] = {}
        for c in self.clauses:
            for atom in (c.head,) + c.body:
                out.setdefault(atom.functor, len(atom.args))
        return out

    def signature(self) -> Signature:
        sig = Signature()
        for c in self.clauses:
            for atom in (c.head,) + c.body:
                sig.add_predicate(atom.functor, len(atom.args))
                for a in atom.args:
                    _collect_functions(a, sig)
        return sig

    def __add__(self, other: "Program") -> "Program":
        return Program(self.clauses + other.clauses)

    def __str__(self) -> str:
        from .syntax import format_program

        return format_program(self)


def _collect_functions(t: Term, sig: Signature) -> None:
    if isinstance(t, App):
        sig.add_function(t.functor, len(t.args))
        for a in t.args:
            _collect_functions(a, sig)


class Kind(enum.Enum):
    INDUCTIVE = "inductive"
    COINDUCTIVE = "coinductive"


@dataclass(frozen=True)
class TypingFunction:
    """Marks predicate symbols coinductive; everything else is inductive."""

    coinductive: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "coinductive", frozenset(self.coinductive))

    @classmethod
    def of(cls, *names: str) -> "TypingFunction":
        return cls(frozenset(names))

    def __call__(self, symbol) -> Kind:
        name = symbol.functor if isinstance(symbol, App) else symbol
        return Kind.COINDUCTIVE if name in self.coinductive else Kind.INDUCTIVE

    def is_coinductive(self, symbol) -> bool:
        return self(symbol) is Kind.COINDUCTIVE

    def mark(self, *names: str) -> "TypingFunction":
        return TypingFunction(self.coinductive | set(names))

    def as_dict(self) -> Mapping[str, Kind]:
        return {n: Kind.COINDUCTIVE for n in sorted(self.coinductive)}


INDUCTIVE_ONLY = TypingFunction()


def program(clauses: Iterable[Clause]) -> Program:
    return Program(tuple(clauses))
