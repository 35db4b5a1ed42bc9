"""Brute-force, depth-bounded approximation of the least Herbrand model.

Used as ground truth in tests.  The universe of ground terms up to a depth
bound is enumerated explicitly, so this is only meant for small programs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

from .program import Clause, Program
from .terms import App, Signature, Term, Var, depth, is_ground, variables
from .unify import mgm

DEFAULT_UNIVERSE_CAP = 100_000


class UniverseTooLarge(RuntimeError):
    pass


class NotGround(ValueError):
    pass


@dataclass(frozen=True)
class HerbrandSlice:
    terms: FrozenSet[Term]
    iterations: int
    depth_bound: int
    fixpoint: bool = False

    def __contains__(self, g: Term) -> bool:
        return member(self, g)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(sorted(self.terms, key=lambda t: (depth(t), str(t))))


def herbrand_universe(sig: Signature, depth_bound: int, cap: int = DEFAULT_UNIVERSE_CAP) -> List[Term]:
    """Ground terms over the function symbols of ``sig`` whose depth is below ``depth_bound``.

    Constants have depth 0, so ``depth_bound = 1`` gives just the constants.
    """
    sig.check_inhabited()
    funcs = sorted(sig.functions.items())
    levels: List[Term] = [App(f) for f, n in funcs if n == 0]
    seen = set(levels)
    frontier = list(levels)
    for _ in range(1, depth_bound):
        new = []
        for f, n in funcs:
            if n == 0:
                continue
            for args in itertools.product(levels, repeat=n):
                t = App(f, args)
                if t not in seen and any(a in frontier for a in args):
                    seen.add(t)
                    new.append(t)
                    if len(seen) > cap:
                        raise UniverseTooLarge(f"more than {cap} ground terms of depth < {depth_bound}")
        if not new:
            break
        levels = levels + new
        frontier = set(new)
    return levels


def _instances(atoms: Sequence[Term], facts: Dict[str, List[Term]], theta: Dict[Var, Term]) -> Iterator[Dict[Var, Term]]:
    """Substitutions extending ``theta`` that send every atom into ``facts``."""
    if not atoms:
        yield theta
        return
    first, rest = atoms[0], atoms[1:]
    pattern = _apply(first, theta)
    for f in facts.get(first.functor, ()):
        m = mgm(pattern, f)
        if m is not None:
            yield from _instances(rest, facts, {**theta, **m})


def _apply(t: Term, theta: Dict[Var, Term]) -> Term:
    if isinstance(t, Var):
        return theta.get(t, t)
    if not t.args:
        return t
    return App(t.functor, tuple(_apply(a, theta) for a in t.args))


def forward_closure(P: Program, iterations: int, depth_bound: int,
                    cap: int = DEFAULT_UNIVERSE_CAP) -> HerbrandSlice:
    """Iterate the immediate-consequence step from the empty set.

    Grounding substitutions range over terms of depth below ``depth_bound``.
    Variables fixed by matching the body against already derived atoms may
    take larger values; head-only variables range over the bounded universe.
    Stops early at a fixpoint.
    """
    if iterations < 1 or depth_bound < 1:
        raise ValueError("iterations and depth_bound must be positive")
    universe = herbrand_universe(P.signature(), depth_bound, cap)
    universe = [u for u in universe if depth(u) < depth_bound]
    derived: set = set()
    fixpoint = False
    done = 0
    for _ in range(iterations):
        facts: Dict[str, List[Term]] = {}
        for a in derived:
            facts.setdefault(a.functor, []).append(a)
        new = set()
        for c in P:
            for theta in _instances(c.body, facts, {}):
                if any(depth(v) >= depth_bound for v in theta.values()):
                    continue
                free = [v for v in dict.fromkeys(variables(c.head)) if v not in theta]
                for values in itertools.product(universe, repeat=len(free)):
                    head = _apply(c.head, {**theta, **dict(zip(free, values))})
                    if head not in derived:
                        new.add(head)
        done += 1
        if not new:
            fixpoint = True
            break
        derived |= new
    return HerbrandSlice(frozenset(derived), done, depth_bound, fixpoint)


def member(slice: HerbrandSlice, g: Term) -> bool:
    if not is_ground(g):
        raise NotGround(f"{g} is not ground")
    return g in slice.terms
