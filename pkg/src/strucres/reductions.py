"""Small-step reductions over goal lists and the productivity semi-decision.

Three relations on goal lists: SLD-resolution (unify a goal with a clause
head and splice in the body), rewriting (the head must *match* the goal, so
goal variables are never instantiated) and substitution (unify, apply the
unifier, splice nothing).  One S-resolution step is a substitution step
followed by rewriting to normal form.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .program import Clause, Program
from .terms import ID, App, Substitution, Term, Var, VarSupply, compose, render, var_namer, variables
from .unify import embeds, is_instance, is_variant, mgm, mgu

GoalList = Tuple[Term, ...]

DEFAULT_FUEL = 10_000


class FuelExhausted(Exception):
    """A fuel budget ran out before a normal form (or tree) was reached."""

    def __init__(self, partial=None, spent: int = 0, message: str = "fuel exhausted"):
        super().__init__(message)
        self.partial = partial
        self.spent = spent


class Budget:
    def __init__(self, fuel: int):
        self.fuel = fuel
        self.spent = 0

    def spend(self, n: int = 1, partial=None) -> None:
        self.spent += n
        if self.spent > self.fuel:
            raise FuelExhausted(partial, self.spent)


def max_gen(terms) -> int:
    g = 0
    for t in terms:
        for v in variables(t):
            g = max(g, v.gen)
    return g


def supply_after(terms) -> VarSupply:
    """A supply whose generations are all above those occurring in ``terms``."""
    return VarSupply(start=max_gen(terms) + 1)


# -- single steps ----------------------------------------------------------

def sld_step(P: Program, goals: Sequence[Term], index: int,
             supply: Optional[VarSupply] = None) -> List[Tuple[Substitution, GoalList]]:
    goals = tuple(goals)
    if not 0 <= index < len(goals):
        raise IndexError(index)
    supply = supply or supply_after(goals)
    out = []
    for clause in P:
        c = clause.rename(supply.next_gen())
        sigma = mgu(goals[index], c.head, occurs_check=True)
        if sigma is None:
            continue
        new = goals[:index] + c.body + goals[index + 1:]
        out.append((sigma, tuple(sigma.apply(g) for g in new)))
    return out


def rewrite_step(P: Program, goals: Sequence[Term], index: int,
                 supply: Optional[VarSupply] = None) -> List[Tuple[Substitution, GoalList]]:
    goals = tuple(goals)
    if not 0 <= index < len(goals):
        raise IndexError(index)
    supply = supply or supply_after(goals)
    out = []
    for clause in P:
        c = clause.rename(supply.next_gen())
        theta = mgm(c.head, goals[index])
        if theta is None:
            continue
        body = tuple(theta.apply(b) for b in c.body)
        out.append((theta, goals[:index] + body + goals[index + 1:]))
    return out


def s_step(P: Program, goals: Sequence[Term],
           supply: Optional[VarSupply] = None) -> List[Tuple[Substitution, GoalList]]:
    """Substitution reductions from ``goals`` (assumed in rewriting normal form).

    One result per goal position and clause whose head unifies with the goal
    without matching it (an external resolvent).
    """
    goals = tuple(goals)
    supply = supply or supply_after(goals)
    out = []
    for i, g in enumerate(goals):
        for clause in P:
            c = clause.rename(supply.next_gen())
            sigma = mgu(g, c.head, occurs_check=True)
            if sigma is None or mgm(c.head, g) is not None:
                continue
            out.append((sigma, tuple(sigma.apply(x) for x in goals)))
    return out


def s_resolve(P: Program, goals: Sequence[Term], fuel: int = DEFAULT_FUEL,
              supply: Optional[VarSupply] = None) -> List[Tuple[Substitution, GoalList]]:
    """One S-resolution step: a substitution step followed by rewriting to normal form."""
    goals = tuple(goals)
    supply = supply or supply_after(goals)
    return [(sigma, rewrite_normal_form(P, g, fuel, supply).goals)
            for sigma, g in s_step(P, goals, supply)]


# -- rewriting normal forms ------------------------------------------------

@dataclass(frozen=True)
class NormalForm:
    goals: GoalList
    steps: int

    @property
    def success(self) -> bool:
        return not self.goals


@dataclass
class _Outcome:
    residual: GoalList
    steps: int
    empty: bool
    cut: bool


class _Rewriter:
    """Search over rewriting reductions of single atoms.

    Rewriting never instantiates goal variables, so the atoms of a goal list
    reduce independently.  Clauses are tried lowest index first; a choice
    that leads to the empty goal list is preferred, otherwise the normal form
    reached by the first applicable clause at every step is returned.  The
    search is iteratively deepened so that an infinite first choice cannot
    hide a successful later one.
    """

    def __init__(self, P: Program, budget: Budget, supply: VarSupply):
        self.P = P
        self.budget = budget
        self.supply = supply
        self.gens: Dict[tuple, int] = {}

    def _renamed(self, path: tuple, i: int) -> Clause:
        key = path + (i,)
        gen = self.gens.get(key)
        if gen is None:
            gen = self.gens[key] = self.supply.next_gen()
        return self.P[i].rename(gen)

    def atom(self, t: Term, path: tuple) -> _Outcome:
        limit = 1
        while True:
            out = self._dfs(t, path, limit)
            if out.empty or not out.cut:
                return out
            limit += 1

    def _dfs(self, t: Term, path: tuple, limit: int) -> _Outcome:
        candidates = []
        for i in range(len(self.P)):
            c = self._renamed(path, i)
            theta = mgm(c.head, t)
            if theta is not None:
                candidates.append((i, theta, c))
        if not candidates:
            return _Outcome((t,), 0, False, False)
        if limit == 0:
            return _Outcome((t,), 0, False, True)
        default = None
        cut = False
        for i, theta, c in candidates:
            self.budget.spend(1, partial=(t,))
            residual: List[Term] = []
            steps = 1
            empty = True
            sub_cut = False
            for j, b in enumerate(c.body):
                r = self._dfs(theta.apply(b), path + (i, j), limit - 1)
                residual.extend(r.residual)
                steps += r.steps
                empty = empty and r.empty
                sub_cut = sub_cut or r.cut
            if empty:
                return _Outcome((), steps, True, False)
            if default is None:
                default = _Outcome(tuple(residual), steps, False, sub_cut)
            cut = cut or sub_cut
        return _Outcome(default.residual, default.steps, False, cut)


def rewrite_normal_form(P: Program, goals: Sequence[Term], fuel: int = DEFAULT_FUEL,
                        supply: Optional[VarSupply] = None) -> NormalForm:
    """Rewrite ``goals`` to a rewriting normal form.

    Raises :class:`FuelExhausted` (with the goal list reached so far) when
    more than ``fuel`` rewriting steps are attempted.
    """
    goals = tuple(goals)
    supply = supply or supply_after(goals)
    budget = Budget(fuel)
    rw = _Rewriter(P, budget, supply)
    out: List[Term] = []
    steps = 0
    for k, g in enumerate(goals):
        try:
            r = rw.atom(g, (k,))
        except FuelExhausted as e:
            raise FuelExhausted(tuple(out) + goals[k:], budget.spent) from None
        out.extend(r.residual)
        steps += r.steps
    return NormalForm(tuple(out), steps)


def is_normal_form(P: Program, goals: Sequence[Term]) -> bool:
    return all(not rewrite_step(P, goals, i) for i in range(len(goals)))


# -- SLD derivations (used as a baseline) -----------------------------------

def sld_partial_answers(P: Program, t: Term, steps: int,
                        supply: Optional[VarSupply] = None) -> Iterator[Tuple[Substitution, GoalList]]:
    """A single SLD derivation for ``t``: leftmost goal, first unifying clause.

    Yields the composed answer restricted to the variables of ``t`` and the
    goal list after each step.  Stops early on success or failure.
    """
    supply = supply or supply_after([t])
    qvars = list(variables(t))
    goals: GoalList = (t,)
    answer = ID
    for _ in range(steps):
        if not goals:
            return
        results = sld_step(P, goals, 0, supply)
        if not results:
            return
        sigma, goals = results[0]
        answer = compose(sigma, answer)
        yield answer.restrict(qvars), goals


# -- productivity --------------------------------------------------------------

class Verdict(enum.Enum):
    PRODUCTIVE = "productive"
    NON_PRODUCTIVE = "non-productive"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class LoopWitness:
    """A rewriting reduction from ``ancestor`` reaching ``descendant``.

    ``kind`` is ``"variant"`` or ``"instance"`` when the descendant is a
    renaming or an instance of the ancestor (which proves an infinite
    rewriting reduction), and ``"embedding"`` when only a homeomorphic
    embedding was observed before fuel ran out.
    """

    kind: str
    ancestor: Term
    descendant: Term
    chain: Tuple[Tuple[Term, int], ...] = ()

    @property
    def predicate(self) -> str:
        return self.ancestor.functor if isinstance(self.ancestor, App) else "?"

    def __str__(self) -> str:
        how = {"variant": "rewrites to a variant of itself",
               "instance": "rewrites to an instance of itself",
               "embedding": "rewrites to a term embedding it"}[self.kind]
        names = var_namer(list(variables(self.ancestor)) + list(variables(self.descendant)))
        return f"{render(self.ancestor, var_name=names)} {how}: {render(self.descendant, var_name=names)}"


@dataclass(frozen=True)
class ProductivityVerdict:
    verdict: Verdict
    witness: Optional[LoopWitness] = None
    fuel_spent: int = 0

    @property
    def productive(self) -> bool:
        return self.verdict is Verdict.PRODUCTIVE

    @property
    def non_productive(self) -> bool:
        return self.verdict is Verdict.NON_PRODUCTIVE

    def __str__(self) -> str:
        if self.verdict is Verdict.PRODUCTIVE:
            return "productive"
        if self.verdict is Verdict.UNKNOWN:
            return f"unknown (fuel spent: {self.fuel_spent})"
        return f"non-productive: {self.witness.predicate} loop ({self.witness})"


class _Loop(Exception):
    def __init__(self, witness: LoopWitness):
        self.witness = witness


def productivity_start_goals(P: Program, supply: VarSupply) -> List[Term]:
    """Most general goals for every predicate, then every clause head."""
    goals: List[Term] = []
    for name, arity in P.predicates().items():
        gen = supply.next_gen()
        goals.append(App(name, tuple(Var(f"X{i + 1}", gen) for i in range(arity))))
    for c in P:
        goals.append(c.rename(supply.next_gen()).head)
    return goals


def productivity_check(P: Program, fuel: int = DEFAULT_FUEL) -> ProductivityVerdict:
    """Semi-decide whether every rewriting reduction of ``P`` is finite.

    Every rewriting reduction from the start goals is explored.  A subgoal
    that is an instance of an ancestor on its rewriting branch proves an
    infinite reduction (matching is stable under instantiation).  A
    homeomorphic embedding is only reported when fuel runs out.
    """
    supply = VarSupply(start=max(1, max_gen(a for c in P for a in (c.head,) + c.body) + 1))
    budget = Budget(fuel)
    embedding: List[LoopWitness] = []

    def explore(t: Term, chain: Tuple[Tuple[Term, int], ...]) -> None:
        for i, clause in enumerate(P):
            c = clause.rename(supply.next_gen())
            theta = mgm(c.head, t)
            if theta is None:
                continue
            budget.spend(1)
            here = chain + ((t, i),)
            for b in c.body:
                b = theta.apply(b)
                for anc, _ in here:
                    if getattr(anc, "functor", None) != getattr(b, "functor", None):
                        continue
                    if is_variant(anc, b):
                        raise _Loop(LoopWitness("variant", anc, b, here))
                    if is_instance(anc, b):
                        raise _Loop(LoopWitness("instance", anc, b, here))
                    if not embedding and embeds(anc, b):
                        embedding.append(LoopWitness("embedding", anc, b, here))
                explore(b, here)

    try:
        for g in productivity_start_goals(P, supply):
            explore(g, ())
    except _Loop as loop:
        return ProductivityVerdict(Verdict.NON_PRODUCTIVE, loop.witness, budget.spent)
    except (FuelExhausted, RecursionError):
        if embedding:
            return ProductivityVerdict(Verdict.NON_PRODUCTIVE, embedding[0], budget.spent)
        return ProductivityVerdict(Verdict.UNKNOWN, None, budget.spent)
    return ProductivityVerdict(Verdict.PRODUCTIVE, None, budget.spent)
