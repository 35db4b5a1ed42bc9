"""Matching, unification (with or without occurs check) and resolvent classification."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Tuple

from .terms import App, RationalTerm, Substitution, Term, Var, VarSupply, map_vars, variables


def mgm(pattern: Term, subject: Term) -> Optional[Substitution]:
    """Most general matcher of ``pattern`` against ``subject``, or ``None``.

    Only variables of ``pattern`` are bound; variables of ``subject`` behave
    as constants.
    """
    binding: Dict[Var, Term] = {}
    stack = [(pattern, subject)]
    while stack:
        p, s = stack.pop()
        if isinstance(p, Var):
            old = binding.get(p)
            if old is None:
                binding[p] = s
            elif old != s:
                return None
        elif isinstance(s, Var) or p.functor != s.functor or len(p.args) != len(s.args):
            return None
        else:
            stack.extend(zip(p.args, s.args))
    return Substitution(binding)


def matches(pattern: Term, subject: Term) -> bool:
    return mgm(pattern, subject) is not None


class RationalBindings(Substitution):
    """A unifier whose bindings are cyclic, e.g. ``{X = scons(0, X)}``.

    Values may mention bound variables; the bindings are read as a system of
    equations rather than applied once.
    """

    def term(self, v: Var) -> RationalTerm:
        return RationalTerm(dict(self), v)

    def rational(self, t: Term) -> RationalTerm:
        """The (possibly infinite) instance of ``t`` as a rational term."""
        root = Var("_root", -1)
        eqs = dict(self)
        eqs[root] = t
        return RationalTerm(eqs, root)

    @property
    def idempotent(self) -> bool:
        return False

    def __repr__(self) -> str:
        return "{" + ", ".join(f"{v} = {t}" for v, t in self.items()) + "}"


def _older(a: Var, b: Var) -> bool:
    return (a.gen, a.name) < (b.gen, b.name)


class _Store:
    """Triangular binding store used by :func:`mgu`."""

    def __init__(self, bindings: Optional[Mapping[Var, Term]] = None):
        self.b: Dict[Var, Term] = dict(bindings or {})

    def walk(self, t: Term) -> Term:
        while isinstance(t, Var) and t in self.b:
            t = self.b[t]
        return t

    def occurs(self, v: Var, t: Term) -> bool:
        stack = [t]
        seen = set()
        while stack:
            u = self.walk(stack.pop())
            if isinstance(u, Var):
                if u == v:
                    return True
            elif id(u) not in seen:
                seen.add(id(u))
                stack.extend(u.args)
        return False

    def unify(self, t: Term, u: Term, occurs_check: bool) -> bool:
        stack = [(t, u)]
        # pairs of compound terms already identified; guarantees termination
        # when bindings are cyclic
        assumed = set()
        while stack:
            a, c = stack.pop()
            a = self.walk(a)
            c = self.walk(c)
            if a is c or a == c:
                continue
            if isinstance(a, Var) and isinstance(c, Var):
                # the younger variable is bound to the older one
                if _older(a, c):
                    self.b[c] = a
                else:
                    self.b[a] = c
                continue
            if isinstance(a, Var) or isinstance(c, Var):
                v, other = (a, c) if isinstance(a, Var) else (c, a)
                if occurs_check and self.occurs(v, other):
                    return False
                self.b[v] = other
                continue
            if a.functor != c.functor or len(a.args) != len(c.args):
                return False
            key = (id(a), id(c))
            if key in assumed:
                continue
            assumed.add(key)
            stack.extend(zip(a.args, c.args))
        return True

    def resolved(self):
        """Fully resolve the store; returns ``(bindings, cyclic)``.

        A variable whose resolution re-enters itself is left in place, which
        yields an equation system instead of an idempotent substitution.
        """
        out: Dict[Var, Term] = {}
        cyclic = False

        def go(t: Term, chain: Tuple[Var, ...]) -> Term:
            nonlocal cyclic
            if isinstance(t, Var):
                if t not in self.b:
                    return t
                if t in chain:
                    cyclic = True
                    return t
                return go(self.b[t], chain + (t,))
            if not t.args:
                return t
            return App(t.functor, tuple(go(a, chain) for a in t.args))

        for v in self.b:
            out[v] = go(self.b[v], (v,))
        return out, cyclic


def mgu(t: Term, u: Term, occurs_check: bool = True):
    """Most general unifier of ``t`` and ``u``.

    Returns an idempotent :class:`Substitution`, ``None`` when the terms do not
    unify, or (only with ``occurs_check=False``) :class:`RationalBindings` when
    the solution is cyclic.
    """
    store = _Store()
    if not store.unify(t, u, occurs_check):
        return None
    return _finish(store)


def mgu_all(pairs, occurs_check: bool = True, base: Optional[Mapping[Var, Term]] = None):
    """Simultaneous unifier of every pair in ``pairs`` (same results as :func:`mgu`)."""
    store = _Store(base)
    for a, b in pairs:
        if not store.unify(a, b, occurs_check):
            return None
    return _finish(store)


def _finish(store: _Store):
    bindings, cyclic = store.resolved()
    if cyclic:
        return RationalBindings(bindings)
    return Substitution(bindings)


class ResolventKind(enum.Enum):
    NULL = "null"
    INTERNAL = "internal"
    EXTERNAL = "external"


@dataclass(frozen=True)
class Resolvent:
    kind: ResolventKind
    theta: Optional[Substitution] = None

    def __bool__(self) -> bool:
        return self.kind is not ResolventKind.NULL


def resolvent(clause_head: Term, goal: Term) -> Resolvent:
    """Classify the resolvent of a (renamed-apart) clause head and a goal term."""
    theta = mgu(clause_head, goal, occurs_check=True)
    if theta is None:
        return Resolvent(ResolventKind.NULL)
    m = mgm(clause_head, goal)
    if m is not None:
        return Resolvent(ResolventKind.INTERNAL, m)
    return Resolvent(ResolventKind.EXTERNAL, theta)


# -- renaming --------------------------------------------------------------

def renaming(terms, gen: int) -> Substitution:
    return Substitution({v: Var(v.name, gen) for t in terms for v in variables(t)})


def rename_apart(clause, supply: VarSupply):
    """An alpha-variant of ``clause`` using one fresh generation from ``supply``."""
    return clause.rename(supply.next_gen())


def is_variant(a: Term, b: Term) -> bool:
    """``a`` and ``b`` are equal up to a bijective renaming of variables."""
    fwd: Dict[Var, Var] = {}
    bwd: Dict[Var, Var] = {}
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        if isinstance(x, Var) or isinstance(y, Var):
            if not (isinstance(x, Var) and isinstance(y, Var)):
                return False
            if fwd.setdefault(x, y) != y or bwd.setdefault(y, x) != x:
                return False
        elif x.functor != y.functor or len(x.args) != len(y.args):
            return False
        else:
            stack.extend(zip(x.args, y.args))
    return True


def is_instance(general: Term, specific: Term) -> bool:
    """``specific`` is an instance of ``general`` (variables may be shared)."""
    frozen = map_vars(specific, lambda v: App(f"\0{v}"))
    return mgm(general, frozen) is not None


def embeds(small: Term, big: Term) -> bool:
    """Homeomorphic embedding ``small ⊴ big`` (variables embed in variables)."""
    if isinstance(small, Var) and isinstance(big, Var):
        return True
    if isinstance(big, App):
        if any(embeds(small, a) for a in big.args):
            return True
        if (isinstance(small, App) and small.functor == big.functor
                and len(small.args) == len(big.args)):
            return all(embeds(s, b) for s, b in zip(small.args, big.args))
    return False
