import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from strucres.corpus import get, typing_for
from strucres.syntax import parse_clause, parse_query, parse_term
from strucres.terms import App, Var

settings.register_profile("default", max_examples=100, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

T = parse_term
Q = parse_query
C = parse_clause


@pytest.fixture
def P():
    return get


@pytest.fixture
def Ty():
    return typing_for


# small signature: a/0, b/0, f/1, g/2 with variables X, Y, Z
VARS = [Var("X"), Var("Y"), Var("Z")]
CONSTS = [App("a"), App("b")]


def terms(max_leaves: int = 12, ground: bool = False):
    leaves = st.sampled_from(CONSTS if ground else CONSTS + VARS)
    return st.recursive(
        leaves,
        lambda sub: st.one_of(
            st.builds(lambda x: App("f", (x,)), sub),
            st.builds(lambda x, y: App("g", (x, y)), sub, sub),
        ),
        max_leaves=max_leaves,
    )


def substitutions(ground: bool = False):
    return st.dictionaries(st.sampled_from(VARS), terms(6, ground), max_size=3)


# -- corpus-driven strategies ---------------------------------------------------

PRODUCTIVE = ["P1", "P2", "P3", "P4", "P5", "P7", "P8", "P10", "P11", "P12", "good"]
FRESH = [Var("U"), Var("W")]


def signature_of(name: str):
    from strucres.corpus import SOURCES
    from strucres.syntax import parse_program
    return parse_program(SOURCES[name])[2]


def corpus_terms(name: str, max_leaves: int = 5, with_vars: bool = True):
    """Terms over the function symbols of a corpus program, with fresh variables."""
    funcs = signature_of(name).functions
    consts = [App(f) for f, k in sorted(funcs.items()) if k == 0] or [App("k")]
    leaves = st.sampled_from(consts + (FRESH if with_vars else []))
    compound = [(f, k) for f, k in sorted(funcs.items()) if k > 0]
    if not compound:
        return leaves
    return st.recursive(
        leaves,
        lambda sub: st.sampled_from(compound).flatmap(
            lambda fk: st.tuples(*[sub] * fk[1]).map(lambda args, f=fk[0]: App(f, args))),
        max_leaves=max_leaves,
    )


def corpus_queries(name: str):
    """Most general goals and renamed-apart clause heads of a corpus program."""
    P = get(name)
    goals = [App(p, tuple(Var(f"A{i}") for i in range(k))) for p, k in sorted(P.predicates().items())]
    goals += [c.rename(50).head for c in P]
    return st.sampled_from(goals)


@st.composite
def rew_triples(draw, names=PRODUCTIVE):
    """(program name, query atom, binding for some of the query's variables)."""
    from strucres.terms import Substitution, variables
    name = draw(st.sampled_from(names))
    t = draw(corpus_queries(name))
    vs = list(dict.fromkeys(variables(t)))
    dom = draw(st.lists(st.sampled_from(vs), unique=True, max_size=len(vs))) if vs else []
    theta = {v: draw(corpus_terms(name)) for v in dom}
    return name, t, Substitution(theta)


# -- random small programs -------------------------------------------------------

SMALL_PREDS = [("p", 1), ("q", 2), ("r", 1)]
SMALL_FUNCS = [("a", 0), ("b", 0), ("f", 1)]


def _random_term(rng, depth, vars_):
    if depth == 0 or rng.random() < 0.4:
        pool = [App(c) for c, k in SMALL_FUNCS if k == 0] + (vars_ if vars_ else [])
        return rng.choice(pool)
    f, k = rng.choice(SMALL_FUNCS)
    return App(f, tuple(_random_term(rng, depth - 1, vars_) for _ in range(k)))


def _random_atom(rng, vars_, depth=2):
    p, k = rng.choice(SMALL_PREDS)
    return App(p, tuple(_random_term(rng, depth, vars_) for _ in range(k)))


def random_program(rng):
    """At most four clauses over p/1, q/2, r/1 and a/0, b/0, f/1."""
    from strucres.program import Clause, Program
    from strucres.terms import variables
    clauses = []
    for _ in range(rng.randint(1, 4)):
        head = _random_atom(rng, VARS[:2])
        hv = list(dict.fromkeys(variables(head)))
        body = tuple(_random_atom(rng, hv + VARS[2:]) for _ in range(rng.choice([0, 0, 1, 2])))
        clauses.append(Clause(head, body))
    return Program(tuple(clauses))


def random_ground_query(rng):
    return _random_atom(rng, [], depth=2)
