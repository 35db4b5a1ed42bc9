"""First-order terms, positions, substitutions, truncation and the term ultrametric.

Terms are immutable.  A term is either a :class:`Var` or an :class:`App` of a
symbol to a tuple of argument terms; constants are applications with no
arguments.  Positions are tuples of child indices, the empty tuple being the
root.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, Iterator, Mapping, Optional, Tuple, Union

Position = Tuple[int, ...]


class PositionOutOfRange(LookupError):
    pass


@dataclass(frozen=True, order=True)
class Var:
    name: str
    gen: int = 0

    def __str__(self) -> str:
        return self.name if self.gen == 0 else f"{self.name}_{self.gen}"

    def __repr__(self) -> str:
        return f"Var({str(self)})"


@dataclass(frozen=True)
class App:
    functor: str
    args: Tuple["Term", ...] = ()

    def __post_init__(self):
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))

    @property
    def arity(self) -> int:
        return len(self.args)

    def __str__(self) -> str:
        return render(self)

    def __repr__(self) -> str:
        return f"App({render(self)})"


Term = Union[Var, App]

DIAMOND_SYMBOL = "◇"
DIAMOND = App(DIAMOND_SYMBOL)


def render(t: Term, ascii: bool = False, var_name: Callable[[Var], str] = str) -> str:
    if isinstance(t, Var):
        return var_name(t)
    name = t.functor
    if ascii and name == DIAMOND_SYMBOL:
        name = "?diamond?"
    if not t.args:
        return name
    return name + "(" + ", ".join(render(a, ascii, var_name) for a in t.args) + ")"


def mk(functor: str, *args: Term) -> App:
    return App(functor, tuple(args))


# -- structure -------------------------------------------------------------

def variables(t: Term) -> Iterator[Var]:
    """Variables of ``t`` in left-to-right order of first occurrence."""
    seen = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Var):
            if u not in seen:
                seen.add(u)
                yield u
        else:
            stack.extend(reversed(u.args))


def vars_of(*terms: Term) -> set:
    out = set()
    for t in terms:
        out.update(variables(t))
    return out


def is_ground(t: Term) -> bool:
    return next(variables(t), None) is None


def depth(t: Term) -> int:
    if isinstance(t, Var) or not t.args:
        return 0
    return 1 + max(depth(a) for a in t.args)


def positions(t: Term) -> Iterator[Position]:
    """All positions of ``t`` in breadth-first order."""
    frontier = [((), t)]
    while frontier:
        nxt = []
        for pos, u in frontier:
            yield pos
            if isinstance(u, App):
                nxt.extend((pos + (i,), a) for i, a in enumerate(u.args))
        frontier = nxt


def symbol_at(t: Term, w: Position):
    u = subterm(t, w)
    return u if isinstance(u, Var) else u.functor


def subterm(t: Term, w: Position) -> Term:
    u = t
    for k, i in enumerate(w):
        if isinstance(u, Var) or not 0 <= i < len(u.args):
            raise PositionOutOfRange(f"position {list(w)} not in {render(t)} (failed at step {k})")
        u = u.args[i]
    return u


def replace_at(t: Term, w: Position, new: Term) -> Term:
    if not w:
        return new
    if isinstance(t, Var) or not 0 <= w[0] < len(t.args):
        raise PositionOutOfRange(f"position {list(w)} not in {render(t)}")
    args = list(t.args)
    args[w[0]] = replace_at(args[w[0]], w[1:], new)
    return App(t.functor, tuple(args))


def map_vars(t: Term, f: Callable[[Var], Term]) -> Term:
    if isinstance(t, Var):
        return f(t)
    if not t.args:
        return t
    return App(t.functor, tuple(map_vars(a, f) for a in t.args))


# -- substitutions ---------------------------------------------------------

class Substitution(Mapping[Var, Term]):
    """A finite map from variables to terms, applied homomorphically.

    Trivial bindings ``X -> X`` are dropped on construction.
    """

    __slots__ = ("_b", "_hash")

    def __init__(self, bindings: Optional[Mapping[Var, Term] | Iterable[Tuple[Var, Term]]] = None):
        items = dict(bindings or {})
        self._b: Dict[Var, Term] = {v: t for v, t in items.items() if t != v}
        self._hash = None

    def __getitem__(self, v: Var) -> Term:
        return self._b[v]

    def __iter__(self):
        return iter(self._b)

    def __len__(self) -> int:
        return len(self._b)

    def __eq__(self, other) -> bool:
        if isinstance(other, Substitution):
            return self._b == other._b
        if isinstance(other, Mapping):
            return self._b == dict(other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._b.items()))
        return self._hash

    def __repr__(self) -> str:
        return "{" + ", ".join(f"{v} ↦ {render(t)}" for v, t in self._b.items()) + "}"

    def __call__(self, t: Term) -> Term:
        return self.apply(t)

    def apply(self, t: Term) -> Term:
        if not self._b:
            return t
        b = self._b
        return map_vars(t, lambda v: b.get(v, v))

    @property
    def idempotent(self) -> bool:
        dom = set(self._b)
        return not any(dom & vars_of(t) for t in self._b.values())

    def restrict(self, vs: Iterable[Var]) -> "Substitution":
        keep = set(vs)
        return Substitution({v: t for v, t in self._b.items() if v in keep})

    def compose(self, first: "Substitution") -> "Substitution":
        """Return ``self ∘ first``: apply ``first``, then ``self``."""
        return compose(self, first)

    def range_vars(self) -> set:
        return vars_of(*self._b.values())


ID = Substitution()


def apply(sigma: Mapping[Var, Term], t: Term) -> Term:
    if isinstance(sigma, Substitution):
        return sigma.apply(t)
    return map_vars(t, lambda v: sigma.get(v, v))


def compose(second: Substitution, first: Substitution) -> Substitution:
    """``compose(s2, s1)(t) == s2(s1(t))`` for every term ``t``."""
    out = {v: second.apply(t) for v, t in first.items()}
    for v, t in second.items():
        if v not in first:
            out[v] = t
    return Substitution(out)


class VarSupply:
    """Source of fresh variable generations.

    Parsed variables have generation 0; every call to :meth:`next_gen` returns a
    generation never issued before by this supply.  Supplies built with
    disjoint ``start``/``step`` pairs never collide.
    """

    def __init__(self, start: int = 1, step: int = 1):
        self._counter = itertools.count(start, step)

    def next_gen(self) -> int:
        return next(self._counter)

    def fresh(self, name: str = "V") -> Var:
        return Var(name, self.next_gen())


def var_namer(vs: Iterable[Var]) -> Callable[[Var], str]:
    """Printing names that drop generation counters where unambiguous.

    Among variables sharing a name the oldest keeps the bare name and later
    generations get primes (``X``, ``X'``, ``X''``).  Variables not in ``vs``
    print with :func:`str`.
    """
    by_name: Dict[str, set] = {}
    for v in vs:
        by_name.setdefault(v.name, set()).add(v.gen)
    names: Dict[Var, str] = {}
    for name, gens in by_name.items():
        for k, g in enumerate(sorted(gens)):
            names[Var(name, g)] = name + "'" * k
    return lambda v: names.get(v, str(v))


# -- truncation and the ultrametric ----------------------------------------

def truncate(n: int, t: Term) -> Term:
    """Cut ``t`` at depth ``n``: nodes at depth ``n`` become ◇."""
    if n <= 0:
        return DIAMOND
    if isinstance(t, Var) or not t.args:
        return t
    return App(t.functor, tuple(truncate(n - 1, a) for a in t.args))


class _Infinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITY"

    def __eq__(self, other) -> bool:
        return other is self

    def __hash__(self) -> int:
        return hash("strucres.INFINITY")

    def __lt__(self, other) -> bool:
        return False

    def __le__(self, other) -> bool:
        return other is self

    def __gt__(self, other) -> bool:
        return other is not self

    def __ge__(self, other) -> bool:
        return True


INFINITY = _Infinity()


def _label(t: Term):
    return ("var", t) if isinstance(t, Var) else ("fn", t.functor, len(t.args))


def gamma(s: Term, t: Term):
    """Least depth at which the truncations of ``s`` and ``t`` differ.

    Truncations at depth n agree iff the labels of the two trees agree at every
    position of depth < n, so the answer is one more than the shallowest
    differing node.
    """
    level = [(s, t)]
    d = 0
    while level:
        nxt = []
        for a, b in level:
            if _label(a) != _label(b):
                return d + 1
            if isinstance(a, App):
                nxt.extend(zip(a.args, b.args))
        level = nxt
        d += 1
    return INFINITY


def distance(s: Term, t: Term) -> Fraction:
    g = gamma(s, t)
    if g is INFINITY:
        return Fraction(0)
    return Fraction(1, 2 ** g)


# -- rational terms --------------------------------------------------------

@dataclass(frozen=True)
class RationalTerm:
    """A possibly infinite term given as a system of equations.

    ``equations`` maps variables to terms that may mention any equation
    variable, including the left-hand side itself; ``root`` names the
    variable whose solution is denoted.  Variables without an equation are
    free.
    """

    equations: Mapping[Var, Term]
    root: Var

    def __post_init__(self):
        object.__setattr__(self, "equations", dict(self.equations))

    def solve(self, v: Var) -> Term:
        """One unfolding step of ``v`` (``v`` itself when free)."""
        return self.equations.get(v, v)

    def is_guarded(self) -> bool:
        """No equation chain ``X = Y = ... = X`` without a constructor."""
        for start in self.equations:
            seen = {start}
            cur = self.equations[start]
            while isinstance(cur, Var) and cur in self.equations:
                if cur in seen:
                    return False
                seen.add(cur)
                cur = self.equations[cur]
        return True

    def unfold(self, n: int) -> Term:
        return unfold(self, n)

    def graph(self):
        """The term as a finite rooted graph ``(root, nodes)``.

        ``nodes`` maps node ids to ``(label, children)`` where label is a
        functor name or a free :class:`Var`.  Distinct ids may still denote
        equal infinite trees; see :meth:`minimal_graph`.
        """
        nodes: Dict[int, tuple] = {}
        var_node: Dict[Var, int] = {}
        counter = itertools.count()

        def node_for_var(v: Var) -> int:
            if v in var_node:
                return var_node[v]
            body = self.equations.get(v)
            if body is None:
                nid = next(counter)
                var_node[v] = nid
                nodes[nid] = (v, ())
                return nid
            # alias chains resolve to the first constructor on the chain
            seen = [v]
            while isinstance(body, Var) and body in self.equations:
                if body in seen:
                    raise ValueError("unguarded rational term")
                seen.append(body)
                body = self.equations[body]
            if isinstance(body, Var):
                nid = node_for_var(body)
                for s in seen:
                    var_node[s] = nid
                return nid
            nid = next(counter)
            for s in seen:
                var_node[s] = nid
            nodes[nid] = None
            nodes[nid] = (body.functor, tuple(node_for_term(a) for a in body.args))
            return nid

        def node_for_term(t: Term) -> int:
            if isinstance(t, Var):
                return node_for_var(t)
            nid = next(counter)
            nodes[nid] = None
            nodes[nid] = (t.functor, tuple(node_for_term(a) for a in t.args))
            return nid

        root = node_for_var(self.root)
        return root, nodes

    def is_finite(self) -> bool:
        """The denoted term is a finite term (no cycle is reachable from the root)."""
        _, nodes = self.graph()
        return not _cyclic_nodes(nodes)

    def to_term(self) -> Term:
        """The denoted finite term; raises ``ValueError`` for infinite terms."""
        if not self.is_finite():
            raise ValueError("rational term is infinite")
        root, nodes = self.graph()

        def build(nid: int) -> Term:
            label, kids = nodes[nid]
            if isinstance(label, Var):
                return label
            return App(label, tuple(build(k) for k in kids))

        return build(root)

    def minimal_graph(self):
        """Quotient of :meth:`graph` by bisimilarity."""
        root, nodes = self.graph()
        return _minimize(root, nodes)

    def __str__(self) -> str:
        return render_rational(self)


def _minimize(root, nodes):
    block = {}
    keys = {}
    for nid, (label, kids) in nodes.items():
        key = (label, len(kids))
        block[nid] = keys.setdefault(key, len(keys))
    while True:
        sigs = {}
        new_block = {}
        for nid, (label, kids) in nodes.items():
            sig = (block[nid], tuple(block[k] for k in kids))
            new_block[nid] = sigs.setdefault(sig, len(sigs))
        if len(sigs) == len(set(block.values())):
            break
        block = new_block
    out = {}
    for nid, (label, kids) in nodes.items():
        out[block[nid]] = (label, tuple(block[k] for k in kids))
    return block[root], out


def rational_equal(a: RationalTerm, b: RationalTerm) -> bool:
    """Equality of the (possibly infinite) trees denoted by ``a`` and ``b``."""
    ra, na = a.graph()
    rb, nb = b.graph()
    merged = {("a", k): (lab, tuple(("a", c) for c in kids)) for k, (lab, kids) in na.items()}
    merged.update({("b", k): (lab, tuple(("b", c) for c in kids)) for k, (lab, kids) in nb.items()})
    blocks = {}
    keys = {}
    for nid, (label, kids) in merged.items():
        blocks[nid] = keys.setdefault((label, len(kids)), len(keys))
    while True:
        sigs = {}
        nb2 = {}
        for nid, (label, kids) in merged.items():
            nb2[nid] = sigs.setdefault((blocks[nid], tuple(blocks[k] for k in kids)), len(sigs))
        if len(sigs) == len(set(blocks.values())):
            break
        blocks = nb2
    return blocks[("a", ra)] == blocks[("b", rb)]


def unfold(r: RationalTerm, n: int) -> Term:
    """Depth-``n`` truncation of the infinite term denoted by ``r``."""

    def go(t: Term, k: int, chain: Tuple[Var, ...]) -> Term:
        if k <= 0:
            return DIAMOND
        if isinstance(t, Var):
            if t in r.equations:
                if t in chain:
                    raise ValueError("unguarded rational term")
                return go(r.equations[t], k, chain + (t,))
            return t
        if not t.args:
            return t
        return App(t.functor, tuple(go(a, k - 1, ()) for a in t.args))

    return go(r.root, n, ())


def render_rational(r: RationalTerm, ascii: bool = False, var_name: Callable[[Var], str] = str) -> str:
    """Print ``r`` in minimal form, naming cycle targets.

    The root is named by ``r.root``; other nodes that are re-entered get
    names ``_R1, _R2, ...`` listed after ``where``.
    """
    root, nodes = r.minimal_graph()
    preds: Dict[int, int] = {}
    for nid, (_, kids) in nodes.items():
        for k in kids:
            preds[k] = preds.get(k, 0) + 1

    names: Dict[int, str] = {root: var_name(r.root)}
    extra = itertools.count(1)
    # nodes on a cycle need a name; shared acyclic nodes are simply repeated
    on_cycle = _cyclic_nodes(nodes)
    for nid in sorted(on_cycle):
        if nid not in names:
            names[nid] = f"_R{next(extra)}"

    def show(nid: int, top: bool) -> str:
        label, kids = nodes[nid]
        if not top and nid in names:
            return names[nid]
        if isinstance(label, Var):
            return var_name(label)
        if label == DIAMOND_SYMBOL and ascii:
            label = "?diamond?"
        if not kids:
            return label
        return label + "(" + ", ".join(show(k, False) for k in kids) + ")"

    body = show(root, True)
    wheres = [f"{names[nid]} = {show(nid, True)}" for nid in sorted(names) if nid != root and nid in on_cycle]
    text = body
    if wheres:
        text += " where " + ", ".join(wheres)
    return text


def _cyclic_nodes(nodes) -> set:
    """Nodes that can reach themselves."""
    out = set()
    for start in nodes:
        stack = list(nodes[start][1])
        seen = set()
        while stack:
            k = stack.pop()
            if k == start:
                out.add(start)
                break
            if k not in seen:
                seen.add(k)
                stack.extend(nodes[k][1])
    return out


# -- signatures ------------------------------------------------------------

class ArityClash(ValueError):
    pass


class EmptyHerbrandUniverse(ValueError):
    pass


@dataclass
class Signature:
    functions: Dict[str, int] = field(default_factory=dict)
    predicates: Dict[str, int] = field(default_factory=dict)

    def add_function(self, name: str, arity: int) -> None:
        _declare(self.functions, name, arity, "function")

    def add_predicate(self, name: str, arity: int) -> None:
        _declare(self.predicates, name, arity, "predicate")

    def constants(self):
        return sorted(f for f, a in self.functions.items() if a == 0)

    def check_inhabited(self) -> None:
        if not self.constants():
            raise EmptyHerbrandUniverse("signature has no function symbol of arity 0")

    def merged(self, other: "Signature") -> "Signature":
        out = Signature(dict(self.functions), dict(self.predicates))
        for f, a in other.functions.items():
            out.add_function(f, a)
        for p, a in other.predicates.items():
            out.add_predicate(p, a)
        return out


def _declare(table: Dict[str, int], name: str, arity: int, kind: str) -> None:
    old = table.get(name)
    if old is not None and old != arity:
        raise ArityClash(f"{kind} symbol {name!r} used with arity {old} and {arity}")
    table[name] = arity
