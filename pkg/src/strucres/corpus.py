"""The example programs P1-P12 plus the ``bad`` and ``good`` programs.

Coinductive markings are the ones the examples are discussed with; they are
carried as ``:- coinductive`` directives and returned by :func:`typing_for`.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Dict, Tuple

from .program import Program, TypingFunction
from .syntax import parse_program

_NAT = """\
nat(0).
nat(s(X)) :- nat(X).
"""

_NATS = "nats(scons(X, Y)) :- nat(X), nats(Y).\n"

_FIBS = """\
add(0, Y, Y).
add(s(X), Y, s(Z)) :- add(X, Y, Z).
fibs(X, Y, cons(X, S)) :- add(X, Y, Z), fibs(Y, Z, S).
"""

_FROM = "from(X, scons(X, Y)) :- from(s(X), Y).\n"

SOURCES: Dict[str, str] = {
    "P1": _NAT,
    "P2": ":- coinductive nats/1.\n" + _NAT + _NATS,
    "P3": ":- coinductive fibs/3.\n" + _FIBS,
    "P4": ":- coinductive from/2.\n" + _FROM,
    "P5": ":- coinductive from/2.\nfrom(X, scons(X, Y)) :- from(s(X), Y), error(0).\n",
    "P6": """\
conn(X, Y) :- conn(X, Z), conn(Z, Y).
conn(a, b).
conn(b, c).
""",
    "P7": """\
p(c).
p(X) :- q(X).
""",
    "P8": ":- coinductive nats/1, fibs/3.\n" + _NAT + _NATS + _FIBS
          + "fibnats(X, Y) :- fibs(0, s(0), X), nats(Y).\n",
    "P9": "anySuccessor(s(X)).\n",
    "P10": ":- coinductive p/2.\np(X, f(X)) :- p(X, X).\n",
    "P11": ":- coinductive from/2.\n" + _FROM + "p(Y) :- from(0, X).\n",
    "P12": ":- coinductive zeros/1.\nzeros(scons(0, X)) :- zeros(X).\n",
    "bad": ":- coinductive bad/1.\nbad(f(X)) :- bad(f(X)).\n",
    "good": ":- coinductive good/1.\ngood(f(X)) :- good(X).\n",
}


@lru_cache(maxsize=None)
def _load(name: str) -> Tuple[Program, TypingFunction]:
    prog, typing, _ = parse_program(SOURCES[name])
    return prog, typing


def corpus() -> Dict[str, Program]:
    return {name: _load(name)[0] for name in SOURCES}


def get(name: str) -> Program:
    return _load(name)[0]


def typing_for(name: str) -> TypingFunction:
    return _load(name)[1]
