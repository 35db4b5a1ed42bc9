"""Rewriting trees, substitution on trees, success subtrees and tree transitions.

A rewriting tree ``rew(P, C, σ)`` is stored as a map from positions to
nodes.  The root (position ``()``) holds the clause ``σ(C)``; its children
are term nodes for the body atoms.  A term node at ``w`` has one child per
clause ``P(i)`` at ``w + (i,)``: a clause node when the head of ``P(i)``
matches the term, otherwise an or-node variable.  Clause nodes sit at even
depth, term nodes at odd depth.

Clause variables are renamed by position through a :class:`TreeContext`, so
rebuilding a tree for the same derivation with a larger substitution reuses
the same variable names and or-node numbers.  That is what makes
``θ(rew(P, C, σ)) = rew(P, C, θσ)`` checkable by plain structural equality.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, List, Optional, Tuple, Union

from .program import Clause, Kind, Program, TypingFunction, render_clause
from .reductions import FuelExhausted, max_gen
from .terms import ID, App, Position, Substitution, Term, Var, VarSupply, compose, render, var_namer, variables
from .unify import mgm, mgu

DEFAULT_TREE_FUEL = 2_000


@dataclass(frozen=True)
class ClauseNode:
    clause: Clause
    index: int  # clause index in P, -1 for the root goal clause


@dataclass(frozen=True)
class TermNode:
    term: Term


@dataclass(frozen=True)
class VarNode:
    number: int

    def __str__(self) -> str:
        return f"X{self.number}"


RewNode = Union[ClauseNode, TermNode, VarNode]


class TreeContext:
    """Per-derivation naming state: clause renamings and or-node numbers by position."""

    def __init__(self, supply: Optional[VarSupply] = None):
        self.supply = supply or VarSupply(start=1)
        self._gens: Dict[Position, int] = {}
        self._orvars: Dict[Position, int] = {}

    @classmethod
    def for_clause(cls, C: Clause) -> "TreeContext":
        return cls(VarSupply(start=max_gen((C.head,) + C.body) + 1))

    def gen(self, pos: Position) -> int:
        g = self._gens.get(pos)
        if g is None:
            g = self._gens[pos] = self.supply.next_gen()
        return g

    def orvar(self, pos: Position) -> int:
        n = self._orvars.get(pos)
        if n is None:
            n = self._orvars[pos] = len(self._orvars) + 1
        return n

    def clause_at(self, P: Program, pos: Position) -> Clause:
        """``P(i)`` renamed for position ``pos = w + (i,)``."""
        return P[pos[-1]].rename(self.gen(pos))


class _EmptyTree:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "EmptyTree"

    def __bool__(self) -> bool:
        return False


EMPTY_TREE = _EmptyTree()


@dataclass(frozen=True, eq=False)
class RewTree:
    program: Program
    clause: Clause
    sigma: Substitution
    nodes: Dict[Position, RewNode]
    frontier: FrozenSet[Position]
    context: TreeContext = field(repr=False)
    fuel: int = DEFAULT_TREE_FUEL

    @property
    def root(self) -> ClauseNode:
        return self.nodes[()]

    @property
    def complete(self) -> bool:
        return not self.frontier

    def __len__(self) -> int:
        return len(self.nodes)

    def __getitem__(self, pos: Position) -> RewNode:
        return self.nodes[pos]

    def __contains__(self, pos) -> bool:
        return pos in self.nodes

    def children(self, pos: Position) -> List[Position]:
        node = self.nodes[pos]
        if isinstance(node, ClauseNode):
            n = len(node.clause.body)
        elif isinstance(node, TermNode):
            if pos in self.frontier:
                return []
            n = len(self.program)
        else:
            return []
        return [pos + (i,) for i in range(n)]

    def or_nodes(self) -> List[Tuple[Position, VarNode]]:
        """Or-node variables in breadth-first (leftmost-outermost) order."""
        return sorted(((p, n) for p, n in self.nodes.items() if isinstance(n, VarNode)),
                      key=lambda e: (len(e[0]), e[0]))

    def find_var(self, x) -> Position:
        """Position of or-node variable ``x`` (a number, a :class:`VarNode` or a position)."""
        if isinstance(x, tuple):
            if not isinstance(self.nodes.get(x), VarNode):
                raise KeyError(f"no or-node variable at {x}")
            return x
        number = x.number if isinstance(x, VarNode) else int(x)
        for p, n in self.nodes.items():
            if isinstance(n, VarNode) and n.number == number:
                return p
        raise KeyError(f"no or-node variable X{number}")

    def term_nodes(self) -> List[Tuple[Position, Term]]:
        return [(p, n.term) for p, n in self.nodes.items() if isinstance(n, TermNode)]

    def height(self) -> int:
        return max(len(p) for p in self.nodes)

    def labels(self):
        """Structure with or-node numbers erased; equal iff equal up to or-variable renaming."""
        out = {}
        for p, n in self.nodes.items():
            out[p] = ("var",) if isinstance(n, VarNode) else n
        return out, self.frontier

    def equivalent(self, other: "RewTree") -> bool:
        return isinstance(other, RewTree) and self.labels() == other.labels()

    def __eq__(self, other) -> bool:
        return (isinstance(other, RewTree) and self.nodes == other.nodes
                and self.frontier == other.frontier)

    __hash__ = None

    def namer(self):
        vs = set()
        for n in self.nodes.values():
            if isinstance(n, ClauseNode):
                vs.update(n.clause.variables())
            elif isinstance(n, TermNode):
                vs.update(variables(n.term))
        return var_namer(vs)

    def label(self, pos: Position, ascii: bool = False, var_name=None) -> str:
        var_name = var_name or self.namer()
        n = self.nodes[pos]
        if isinstance(n, ClauseNode):
            return render_clause(n.clause, var_name, ascii)
        if isinstance(n, TermNode):
            return render(n.term, ascii, var_name)
        return str(n)

    def pretty(self, ascii: bool = False) -> str:
        var_name = self.namer()
        lines = []

        def walk(p: Position, indent: int):
            lines.append("  " * indent + self.label(p, ascii, var_name))
            if p in self.frontier:
                lines.append("  " * (indent + 1) + ("..." if ascii else "⋮"))
            for c in self.children(p):
                walk(c, indent + 1)

        walk((), 0)
        return "\n".join(lines)

    def __str__(self) -> str:
        return self.pretty()


# -- construction --------------------------------------------------------------

class _Builder:
    def __init__(self, P: Program, sigma: Substitution, ctx: TreeContext, fuel: int):
        self.P = P
        self.sigma = sigma
        self.ctx = ctx
        self.fuel = fuel
        self.nodes: Dict[Position, RewNode] = {}
        self.queue: deque = deque()
        self.frontier = set()

    def add_clause(self, pos: Position, clause: Clause, index: int) -> None:
        self.nodes[pos] = ClauseNode(clause, index)
        for j, b in enumerate(clause.body):
            self.nodes[pos + (j,)] = TermNode(b)
            self.queue.append(pos + (j,))

    def child(self, w: Position, t: Term, i: int) -> None:
        """Fill position ``w + (i,)`` under the term node ``t`` at ``w``."""
        pos = w + (i,)
        c = self.ctx.clause_at(self.P, pos).apply(self.sigma)
        theta = mgm(c.head, t)
        if theta is None:
            self.nodes[pos] = VarNode(self.ctx.orvar(pos))
        else:
            self.add_clause(pos, c.apply(theta), i)

    def run(self) -> None:
        while self.queue:
            w = self.queue.popleft()
            if len(self.nodes) > self.fuel:
                self.frontier.add(w)
                self.frontier.update(self.queue)
                self.queue.clear()
                break
            t = self.nodes[w].term
            for i in range(len(self.P)):
                self.child(w, t, i)


def build_rew(P: Program, C: Clause, sigma: Substitution = ID, fuel: int = DEFAULT_TREE_FUEL,
              context: Optional[TreeContext] = None, partial_ok: bool = False) -> RewTree:
    """Construct ``rew(P, C, σ)`` breadth first.

    At most about ``fuel`` nodes are built.  When the tree is larger,
    :class:`FuelExhausted` is raised carrying the partial tree (whose
    ``frontier`` lists the unexpanded term nodes), unless ``partial_ok`` is
    set, in which case the partial tree is returned.
    """
    ctx = context or TreeContext.for_clause(C)
    b = _Builder(P, sigma, ctx, fuel)
    b.add_clause((), C.apply(sigma), -1)
    b.run()
    tree = RewTree(P, C, sigma, b.nodes, frozenset(b.frontier), ctx, fuel)
    if tree.frontier and not partial_ok:
        raise FuelExhausted(tree, len(tree.nodes), "rewriting tree exceeds fuel")
    return tree


def apply_subst_tree(theta: Substitution, T: RewTree, partial_ok: bool = True) -> RewTree:
    """The tree ``θ(T)``: apply θ to every label and expand or-nodes that now match.

    Frontier term nodes of a partial tree stay unexpanded.
    """
    new_sigma = compose(theta, T.sigma)
    b = _Builder(T.program, new_sigma, T.context, max(T.fuel, len(T.nodes)))
    for pos, n in T.nodes.items():
        if pos in b.nodes:
            continue
        if isinstance(n, ClauseNode):
            b.nodes[pos] = ClauseNode(n.clause.apply(theta), n.index)
        elif isinstance(n, TermNode):
            b.nodes[pos] = TermNode(theta.apply(n.term))
        else:
            b.child(pos[:-1], b.nodes[pos[:-1]].term, pos[-1])
            b.run()
    frontier = frozenset(T.frontier | b.frontier)
    tree = RewTree(T.program, T.clause, new_sigma, b.nodes, frontier, T.context, T.fuel)
    if b.frontier and not partial_ok:
        raise FuelExhausted(tree, len(tree.nodes), "rewriting tree exceeds fuel")
    return tree


# -- success subtrees ------------------------------------------------------

@dataclass(frozen=True)
class SuccessSubtree:
    positions: FrozenSet[Position]
    tree: RewTree = field(repr=False, compare=False)

    def leaves(self) -> List[Position]:
        return sorted(p for p in self.positions
                      if isinstance(self.tree[p], ClauseNode) and not self.tree[p].clause.body)

    def leaf_clauses(self) -> List[Clause]:
        return [self.tree[p].clause for p in self.leaves()]

    def clause_choices(self) -> Dict[Position, int]:
        """For each term node in the subtree, the index of the chosen clause."""
        return {p[:-1]: p[-1] for p in self.positions
                if len(p) % 2 == 0 and p != ()}


def find_success_subtree(T: RewTree) -> Optional[SuccessSubtree]:
    """A finite subtree choosing one clause child per term node whose leaves are facts.

    Clause children are tried lowest index first.  Unexpanded (frontier)
    term nodes never succeed.
    """
    chosen: List[Position] = []

    def solve_term(w: Position) -> bool:
        if w in T.frontier:
            return False
        for i in range(len(T.program)):
            pos = w + (i,)
            node = T.nodes.get(pos)
            if not isinstance(node, ClauseNode):
                continue
            mark = len(chosen)
            chosen.append(pos)
            if all(solve_term(pos + (j,)) for j in range(len(node.clause.body))):
                return True
            del chosen[mark:]
        return False

    for j in range(len(T.root.clause.body)):
        if not solve_term((j,)):
            return None
    positions = {()}
    for pos in chosen:
        positions.add(pos)
        positions.add(pos[:-1])
    return SuccessSubtree(frozenset(positions), T)


def is_success_tree(T: RewTree) -> bool:
    return find_success_subtree(T) is not None


# -- transitions -----------------------------------------------------------

def resolvent_at(T: RewTree, x) -> Optional[Substitution]:
    """External resolvent of ``P(i)`` and ``T(w)`` for the or-node at ``w + (i,)``.

    The unifier is restricted to the variables of ``T(w)``; bindings of the
    clause's own head variables are recomputed by matching when the tree is
    rebuilt.
    """
    pos = T.find_var(x)
    t = T.nodes[pos[:-1]].term
    c = T.context.clause_at(T.program, pos).apply(T.sigma)
    theta = mgu(c.head, t, occurs_check=True)
    if theta is None or mgm(c.head, t) is not None:
        return None
    return theta.restrict(variables(t))


def transition(T: RewTree, x, partial_ok: bool = True):
    """The tree ``T_X``: ``rew(P, C, θσ)`` for the external resolvent θ, else ``EMPTY_TREE``."""
    theta = resolvent_at(T, x)
    if theta is None:
        return EMPTY_TREE
    return build_rew(T.program, T.clause, compose(theta, T.sigma), T.fuel, T.context, partial_ok)


def open_or_nodes(T: RewTree) -> List[Tuple[Position, Substitution]]:
    """Or-nodes whose transition is non-empty, with their resolvents, leftmost-outermost."""
    out = []
    for pos, _ in T.or_nodes():
        theta = resolvent_at(T, pos)
        if theta is not None:
            out.append((pos, theta))
    return out


@dataclass(frozen=True)
class NodeClass:
    open: bool
    kind: Kind

    @property
    def coinductively_open(self) -> bool:
        return self.open and self.kind is Kind.COINDUCTIVE

    @property
    def inductively_open(self) -> bool:
        return self.open and self.kind is Kind.INDUCTIVE


def classify_nodes(T: RewTree, typing: TypingFunction) -> Dict[Position, NodeClass]:
    """Open/closed and inductive/coinductive status of every node.

    Term nodes take the kind of their predicate; clause nodes and or-nodes
    inherit the kind of their parent (the root is inductive).  An or-node is
    open iff its transition is non-empty; a term node is open iff one of its
    or-node children is; clause nodes are closed.
    """
    out: Dict[Position, NodeClass] = {}
    for pos, n in T.nodes.items():
        if pos == ():
            out[pos] = NodeClass(False, Kind.INDUCTIVE)
        elif isinstance(n, TermNode):
            out[pos] = NodeClass(False, typing(n.term))
        elif isinstance(n, ClauseNode):
            out[pos] = NodeClass(False, out[pos[:-1]].kind)
        else:
            kind = out[pos[:-1]].kind
            is_open = resolvent_at(T, pos) is not None
            out[pos] = NodeClass(is_open, kind)
            if is_open:
                out[pos[:-1]] = NodeClass(True, out[pos[:-1]].kind)
    return out


# -- output ---------------------------------------------------------------------

def _node_id(pos: Position) -> str:
    return "n" + "".join(f"_{i}" for i in pos)


def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def to_dot(T: RewTree, success: Optional[SuccessSubtree] = None, name: str = "rew") -> str:
    """Graphviz rendering: clause nodes as boxes, term nodes as ellipses, or-nodes as diamonds.

    Frontier term nodes are drawn dashed.  Nodes of ``success`` are drawn bold.
    """
    var_name = T.namer()
    marked = success.positions if success is not None else frozenset()
    lines = [f"digraph {name} {{", '  node [fontname="Helvetica"];']
    for pos, n in T.nodes.items():
        shape = {ClauseNode: "box", TermNode: "ellipse", VarNode: "diamond"}[type(n)]
        attrs = [f'label="{_dot_escape(T.label(pos, var_name=var_name))}"', f"shape={shape}"]
        if pos in T.frontier:
            attrs.append("style=dashed")
        if pos in marked:
            attrs.append("penwidth=2")
        lines.append(f"  {_node_id(pos)} [{', '.join(attrs)}];")
    for pos in T.nodes:
        if pos:
            lines.append(f"  {_node_id(pos[:-1])} -> {_node_id(pos)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_json(T: RewTree) -> dict:
    var_name = T.namer()
    kinds = {ClauseNode: "clause", TermNode: "term", VarNode: "var"}
    return {
        "nodes": [{"position": list(p), "kind": kinds[type(n)], "label": T.label(p, var_name=var_name)}
                  for p, n in T.nodes.items()],
        "frontier": [list(p) for p in sorted(T.frontier)],
    }


def dump_json(T: RewTree) -> str:
    return json.dumps(to_json(T), ensure_ascii=False, indent=2)
