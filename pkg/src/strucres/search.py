"""Proof search: S-refutation, an SLD baseline, loop-detecting coinductive search
gated by productivity, lazy observation of infinite answers, and implication
at infinity.

Failures are raised as exceptions (subclasses of :class:`SearchFailure`);
successes are returned as values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from .program import Clause, Kind, Program, TypingFunction, goal_clause, INDUCTIVE_ONLY
from .reductions import (Budget, DEFAULT_FUEL, FuelExhausted, NormalForm, ProductivityVerdict,
                         productivity_check, rewrite_normal_form, sld_step, supply_after)
from .terms import (DIAMOND, ID, App, Position, RationalTerm, Substitution, Term, Var, compose,
                    depth as term_depth, is_ground, map_vars, render, truncate, variables)
from .trees import (ClauseNode, RewTree, SuccessSubtree, TermNode, TreeContext, VarNode, build_rew,
                    find_success_subtree, open_or_nodes)
from .unify import RationalBindings, mgu_all

DEFAULT_SEARCH_FUEL = 500
DEFAULT_SEARCH_TREE_FUEL = 1_000
DEFAULT_OBSERVE_TREE_FUEL = 20_000


# -- outcomes --------------------------------------------------------------------

class SearchFailure(Exception):
    """Base class of unsuccessful search outcomes."""


class Fail(SearchFailure):
    """No answer exists (or the engine refuses to give one)."""


class Exhausted(Fail):
    """The finite search space was explored without success."""


class InductiveFailure(Fail):
    """An inductive goal met during observation admits no refutation."""

    def __init__(self, goal: Term):
        super().__init__(f"inductive goal {render(goal)} has no refutation")
        self.goal = goal


class NonProductiveRejected(Fail):
    """The productivity gate found an infinite rewriting reduction."""

    def __init__(self, verdict: ProductivityVerdict):
        super().__init__(f"rejected: {verdict}")
        self.verdict = verdict


class FuelOut(SearchFailure):
    """The budget ran out; ``deepest`` is the furthest tree (or goal list) reached."""

    def __init__(self, deepest=None, message: str = "fuel exhausted"):
        super().__init__(message)
        self.deepest = deepest


@dataclass(frozen=True)
class Refutation:
    resolvents: Tuple[Substitution, ...]
    final_tree: Optional[RewTree]
    answer: Substitution
    success: Optional[SuccessSubtree] = None

    @property
    def steps(self) -> int:
        return len(self.resolvents)


@dataclass(frozen=True)
class LoopClosure:
    ancestor: Position
    descendant: Position
    ancestor_term: Term
    descendant_term: Term


@dataclass(frozen=True)
class CoinductiveAnswer:
    rational: Dict[Var, RationalTerm]
    loops: Tuple[LoopClosure, ...]
    unifier: Substitution
    resolvents: Tuple[Substitution, ...]
    final_tree: RewTree

    @property
    def loop_witness(self) -> LoopClosure:
        return self.loops[0]


@dataclass(frozen=True)
class Observation:
    depth: int
    approximation: Term
    resolvents_used: int
    residual: Tuple[Term, ...]
    answer: Dict[Var, Term]
    resolvents: Tuple[Substitution, ...] = ()
    final_tree: Optional[RewTree] = None


Evidence = Union[Refutation, CoinductiveAnswer, Observation]


@dataclass(frozen=True)
class ImpliedWitness:
    term: Term
    residual: Tuple[Term, ...]
    rewrite_steps: int
    evidence: Tuple[Tuple[Term, Evidence], ...]


def _goals(t) -> Tuple[Term, ...]:
    """A single atom or a sequence of atoms as a goal list."""
    return (t,) if isinstance(t, (Var, App)) else tuple(t)


def _query_vars(t) -> List[Var]:
    return list(dict.fromkeys(v for g in _goals(t) for v in variables(g)))


def _gate(P: Program, fuel: int) -> ProductivityVerdict:
    verdict = productivity_check(P, max(fuel, DEFAULT_FUEL))
    if verdict.non_productive:
        raise NonProductiveRejected(verdict)
    return verdict


# -- generic iterative deepening over tree transitions -----------------------------

class _TransitionSearch:
    """Iterative deepening over sequences of tree transitions.

    ``goal(tree)`` returns a result or ``None``; ``moves(tree)`` yields
    ``(position, θ)`` pairs in the order they should be tried.
    """

    def __init__(self, P: Program, fuel: int, goal: Callable, moves: Callable,
                 max_depth: Optional[int] = None):
        self.P = P
        self.budget = Budget(fuel)
        self.goal = goal
        self.moves = moves
        self.max_depth = max_depth
        self.deepest: Optional[RewTree] = None
        self.incomplete = False

    def run(self, tree: RewTree):
        self.deepest = tree
        self.incomplete = bool(tree.frontier)
        limit = 0
        while True:
            self.cut = False
            self.seen: Dict[Substitution, int] = {}
            found = self._dfs(tree, (), limit)
            if found is not None:
                return found
            if not self.cut:
                if self.incomplete:
                    raise FuelOut(self.deepest, "search space not exhausted: partial trees")
                raise Exhausted("no refutation")
            limit += 1
            if self.max_depth is not None and limit > self.max_depth:
                raise FuelOut(self.deepest, "transition depth bound reached")

    def _dfs(self, tree: RewTree, path: tuple, k: int):
        res = self.goal(tree)
        if res is not None:
            return tree, path, res
        if self.seen.get(tree.sigma, -1) >= k:
            return None
        self.seen[tree.sigma] = k
        moves = list(self.moves(tree))
        if k == 0:
            if moves:
                self.cut = True
            return None
        for _, theta in moves:
            try:
                self.budget.spend(1)
            except FuelExhausted:
                raise FuelOut(self.deepest) from None
            child = build_rew(self.P, tree.clause, compose(theta, tree.sigma), tree.fuel,
                              tree.context, partial_ok=True)
            if child.frontier:
                self.incomplete = True
            if len(path) + 1 > len(self._deepest_path):
                self.deepest = child
                self._deepest_path = path + (theta,)
            found = self._dfs(child, path + (theta,), k - 1)
            if found is not None:
                return found
        return None

    _deepest_path: tuple = ()


def _initial_tree(P: Program, goals: Sequence[Term], tree_fuel: int,
                  context: Optional[TreeContext] = None) -> RewTree:
    C = goal_clause(*goals)
    return build_rew(P, C, ID, tree_fuel, context or TreeContext.for_clause(C), partial_ok=True)


def s_refute(P: Program, t: Union[Term, Sequence[Term]], fuel: int = DEFAULT_SEARCH_FUEL,
             tree_fuel: int = DEFAULT_SEARCH_TREE_FUEL) -> Refutation:
    """Inductive S-refutation of ``t``.

    Iterative deepening on the number of tree transitions, trying open
    or-nodes leftmost-outermost.  ``fuel`` bounds the number of transitions,
    ``tree_fuel`` the size of each rewriting tree.
    """
    tree = _initial_tree(P, _goals(t), tree_fuel)
    search = _TransitionSearch(P, fuel, find_success_subtree, open_or_nodes)
    final, path, success = search.run(tree)
    return Refutation(tuple(path), final, final.sigma.restrict(_query_vars(t)), success)


# -- SLD baseline -------------------------------------------------------------------

def sld_solve(P: Program, t: Union[Term, Sequence[Term]], fuel: int = 100_000, max_depth: Optional[int] = None) -> Substitution:
    """First SLD answer for ``t`` under iterative deepening (leftmost goal, clause order).

    ``fuel`` bounds the total number of resolution steps.
    """
    goals0 = _goals(t)
    qvars = _query_vars(t)
    budget = Budget(fuel)
    limit = 1
    while True:
        supply = supply_after(goals0)
        cut = False

        def dfs(goals, answer, k):
            nonlocal cut
            if not goals:
                return answer
            if k == 0:
                cut = True
                return None
            for sigma, new in sld_step(P, goals, 0, supply):
                try:
                    budget.spend(1)
                except FuelExhausted:
                    raise FuelOut(goals) from None
                found = dfs(new, compose(sigma, answer), k - 1)
                if found is not None:
                    return found
            return None

        found = dfs(goals0, ID, limit)
        if found is not None:
            return found.restrict(qvars)
        if not cut:
            raise Exhausted("no SLD refutation")
        limit += 1
        if max_depth is not None and limit > max_depth:
            raise FuelOut(None, "SLD depth bound reached")


# -- coinductive search with loop detection --------------------------------------

def _colp_success(tree: RewTree, typing: TypingFunction):
    """A success subtree in which coinductive term nodes may close against ancestors.

    Returns ``(positions, loops, unifier)`` or ``None``.  Clause children are
    tried before loop closure; all closures of one subtree are unified
    simultaneously without occurs check.
    """
    P = tree.program
    loops: List[LoopClosure] = []
    chosen: List[Position] = []

    def consistent() -> Optional[Substitution]:
        return mgu_all([(l.ancestor_term, l.descendant_term) for l in loops], occurs_check=False)

    def solve(w: Position, ancestors: Tuple[Position, ...]) -> bool:
        if w in tree.frontier:
            return False
        t = tree.nodes[w].term
        for i in range(len(P)):
            pos = w + (i,)
            node = tree.nodes.get(pos)
            if not isinstance(node, ClauseNode):
                continue
            mark_c, mark_l = len(chosen), len(loops)
            chosen.append(pos)
            if all(solve(pos + (j,), ancestors + (w,)) for j in range(len(node.clause.body))):
                return True
            del chosen[mark_c:]
            del loops[mark_l:]
        if typing.is_coinductive(t):
            for a in reversed(ancestors):
                at = tree.nodes[a].term
                if at.functor != t.functor or not typing.is_coinductive(at):
                    continue
                loops.append(LoopClosure(a, w, at, t))
                if consistent() is not None:
                    return True
                loops.pop()
        return False

    for j in range(len(tree.root.clause.body)):
        if not solve((j,), ()):
            return None
    unifier = consistent() if loops else ID
    positions = {()} | {p for c in chosen for p in (c, c[:-1])}
    return frozenset(positions), tuple(loops), unifier


def _rational_answer(t: Term, sigma: Substitution, unifier: Substitution) -> Dict[Var, RationalTerm]:
    out = {}
    eqs = dict(unifier)
    for v in _query_vars(t):
        value = sigma.apply(v)
        if value == v:
            value = eqs.get(v, v)
            if value == v:
                continue
            out[v] = RationalTerm(eqs, v)
            continue
        out[v] = RationalTerm({**eqs, v: value}, v)
    return out


def colp_s_solve(P: Program, t: Union[Term, Sequence[Term]], typing: TypingFunction, fuel: int = DEFAULT_SEARCH_FUEL,
                 tree_fuel: int = DEFAULT_SEARCH_TREE_FUEL) -> Union[CoinductiveAnswer, Refutation]:
    """S-derivation search with coinductive loop closure, behind the productivity gate.

    Raises :class:`NonProductiveRejected` when the program is shown
    non-productive.  An ``unknown`` productivity verdict lets the search
    proceed.
    """
    _gate(P, fuel)
    tree = _initial_tree(P, _goals(t), tree_fuel)
    search = _TransitionSearch(P, fuel, lambda tr: _colp_success(tr, typing), open_or_nodes)
    final, path, (positions, loops, unifier) = search.run(tree)
    if not loops:
        success = SuccessSubtree(positions, final)
        return Refutation(tuple(path), final, final.sigma.restrict(_query_vars(t)), success)
    return CoinductiveAnswer(_rational_answer(t, final.sigma, unifier), loops, unifier,
                             tuple(path), final)


# -- lazy observation ---------------------------------------------------------------

def _shallow_vars(t: Term, n: int) -> bool:
    """``t`` has a variable at depth < n."""
    stack = [(t, 0)]
    while stack:
        u, d = stack.pop()
        if d >= n:
            continue
        if isinstance(u, Var):
            return True
        stack.extend((a, d + 1) for a in u.args)
    return False


def _current_subtree(tree: RewTree) -> List[Position]:
    """Term nodes of the rewriting subtree taking the first clause child everywhere (BFS order)."""
    P = tree.program
    out = []
    queue = [(j,) for j in range(len(tree.root.clause.body))]
    while queue:
        nxt = []
        for w in queue:
            out.append(w)
            if w in tree.frontier:
                continue
            for i in range(len(P)):
                node = tree.nodes.get(w + (i,))
                if isinstance(node, ClauseNode):
                    nxt.extend(w + (i, j) for j in range(len(node.clause.body)))
                    break
        queue = nxt
    return out


def _solved_at(tree: RewTree, w: Position) -> bool:
    P = tree.program

    def solve(u: Position) -> bool:
        if u in tree.frontier:
            return False
        for i in range(len(P)):
            node = tree.nodes.get(u + (i,))
            if isinstance(node, ClauseNode) and all(
                    solve(u + (i, j)) for j in range(len(node.clause.body))):
                return True
        return False

    return solve(w)


def _has_clause_child(tree: RewTree, w: Position) -> bool:
    return any(isinstance(tree.nodes.get(w + (i,)), ClauseNode) for i in range(len(tree.program)))


def _diamond_vars(t: Term) -> Term:
    return map_vars(t, lambda v: DIAMOND)


def observe(P: Program, t: Term, typing: TypingFunction, depth: int,
            fuel: int = DEFAULT_SEARCH_FUEL, tree_fuel: int = DEFAULT_OBSERVE_TREE_FUEL) -> Observation:
    """Run an S-derivation for ``t`` until its instance is ground above ``depth``.

    Inductive term nodes of the current rewriting subtree are refuted before
    any further coinductive expansion; an inductive node without refutation
    raises :class:`InductiveFailure`.  Coinductive or-nodes are expanded
    shallowest first, so every coinductive node is eventually expanded.
    ``fuel`` bounds the number of transitions.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    _gate(P, fuel)
    tree = _initial_tree(P, (t,), tree_fuel)
    budget = Budget(fuel)
    path: List[Substitution] = []

    def step(theta: Substitution) -> RewTree:
        try:
            budget.spend(1)
        except FuelExhausted:
            raise FuelOut(tree) from None
        path.append(theta)
        return build_rew(P, tree.clause, compose(theta, tree.sigma), tree.fuel, tree.context,
                         partial_ok=True)

    while _shallow_vars(tree.sigma.apply(t), depth):
        current = _current_subtree(tree)
        # inductive closure first
        pending = [w for w in current
                   if not typing.is_coinductive(tree.nodes[w].term) and not _solved_at(tree, w)]
        if pending:
            w = pending[0]
            if w in tree.frontier:
                raise FuelOut(tree, "rewriting tree exceeds fuel")
            scoped = _TransitionSearch(
                P, fuel - budget.spent,
                lambda tr, w=w: True if _solved_at(tr, w) else None,
                lambda tr, w=w: [(p, th) for p, th in open_or_nodes(tr) if p[:len(w)] == w])
            try:
                final, sub_path, _ = scoped.run(tree)
            except Exhausted:
                raise InductiveFailure(tree.nodes[w].term) from None
            budget.spend(len(sub_path))
            path.extend(sub_path)
            tree = final
            continue
        # then the shallowest coinductive node still waiting for a clause
        move = None
        for w in current:
            if _has_clause_child(tree, w):
                continue
            if w in tree.frontier:
                raise FuelOut(tree, "rewriting tree exceeds fuel")
            opens = [(p, th) for p, th in open_or_nodes(tree) if p[:-1] == w]
            if opens:
                move = opens[0]
                break
        if move is None:
            break
        tree = step(move[1])

    instance = tree.sigma.apply(t)
    residual = tuple(tree.nodes[w].term for w in _current_subtree(tree)
                     if not _has_clause_child(tree, w))
    answer = {v: _diamond_vars(truncate(depth, tree.sigma.apply(v))) for v in _query_vars(t)}
    return Observation(depth, truncate(depth, instance), len(path), residual, answer,
                       tuple(path), tree)


# -- implication at infinity -----------------------------------------------------------

def implied_at_infinity(P: Program, t: Term, typing: TypingFunction, depth: int,
                        fuel: int = DEFAULT_SEARCH_FUEL) -> ImpliedWitness:
    """Rewrite ``t`` to normal form and find evidence for every residual goal.

    Inductive residual goals need a refutation; coinductive ones an
    observation at ``depth`` (or, failing that, a loop-closing answer).
    Raises :class:`Fail` (including the productivity gate's
    :class:`NonProductiveRejected`) when some goal yields nothing.
    """
    _gate(P, fuel)
    try:
        nf = rewrite_normal_form(P, (t,), max(fuel, DEFAULT_FUEL))
    except FuelExhausted as e:
        raise FuelOut(e.partial) from None
    if not nf.goals:
        return ImpliedWitness(t, (), nf.steps, ((t, s_refute(P, t, fuel)),))
    evidence = []
    for g in nf.goals:
        try:
            if typing.is_coinductive(g):
                try:
                    ev = observe(P, g, typing, depth, fuel)
                except FuelOut:
                    ev = colp_s_solve(P, g, typing, fuel)
            else:
                ev = s_refute(P, g, fuel)
        except (Fail, FuelOut) as e:
            raise Fail(f"residual goal {render(g)} yields no evidence: {e}") from e
        evidence.append((g, ev))
    return ImpliedWitness(t, nf.goals, nf.steps, tuple(evidence))
