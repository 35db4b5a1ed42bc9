import itertools

import pytest

from conftest import T
from strucres.corpus import get, typing_for
from strucres.oracle import forward_closure, herbrand_universe
from strucres.program import TypingFunction
from strucres.reductions import sld_partial_answers
from strucres.search import (CoinductiveAnswer, Exhausted, Fail, FuelOut, InductiveFailure, NonProductiveRejected,
                             Observation, Refutation, colp_s_solve, implied_at_infinity, observe, s_refute, sld_solve)
from strucres.syntax import parse_program
from strucres.terms import DIAMOND, ID, App, Substitution, Var, compose, truncate, unfold, variables
from strucres.trees import build_rew, find_success_subtree
from strucres.unify import is_variant, mgm

X, Y, Z = Var("X"), Var("Y"), Var("Z")


def peano(n):
    t = T("0")
    for _ in range(n):
        t = App("s", (t,))
    return t


def refines(approx, pattern):
    """``approx`` agrees with ``pattern`` wherever the pattern is not a variable."""
    return mgm(pattern, approx) is not None


def stream(elements, tail, cons="cons"):
    for e in reversed(elements):
        tail = App(cons, (e, tail))
    return tail


class TestRefutation:
    def test_overlap(self):
        r = s_refute(get("P7"), T("p(X)"))
        assert r.answer == {X: T("c")} and r.steps == 1
        assert find_success_subtree(r.final_tree) is not None

    def test_conn_via_z(self):
        r = s_refute(get("P6"), T("conn(a, c)"))
        [theta] = r.resolvents
        [(z, value)] = theta.items()
        assert z.name == "Z" and value == T("b")
        assert r.answer == ID

    def test_ground_nat(self):
        r = s_refute(get("P1"), T("nat(s(s(0)))"))
        assert r.answer == ID and r.steps == 0

    def test_final_tree_is_rebuilt_from_composed_resolvents(self):
        r = s_refute(get("P6"), T("conn(X, Y)"))
        sigma = ID
        for theta in r.resolvents:
            sigma = compose(theta, sigma)
        assert sigma == r.final_tree.sigma
        rebuilt = build_rew(get("P6"), r.final_tree.clause, sigma, r.final_tree.fuel, partial_ok=True)
        assert rebuilt.equivalent(r.final_tree)

    def test_exhausted(self):
        P, _, _ = parse_program("p(a). q(X) :- p(X).")
        with pytest.raises(Exhausted):
            s_refute(P, T("q(b)"))

    def test_fuel_out(self):
        with pytest.raises(FuelOut):
            s_refute(get("P6"), T("conn(c, a)"), fuel=10)

    def test_conjunctive_query(self):
        r = s_refute(get("P6"), [T("conn(a, X)"), T("conn(X, c)")])
        assert r.answer == {X: T("b")}


class TestSld:
    def test_conn_first_answer(self):
        assert sld_solve(get("P6"), T("conn(X, Y)")) == {X: T("a"), Y: T("b")}

    def test_nat(self):
        assert sld_solve(get("P1"), T("nat(s(X))")) == {X: T("0")}

    def test_overlap(self):
        assert sld_solve(get("P7"), T("p(X)")) == {X: T("c")}

    def test_exhausted(self):
        with pytest.raises(Exhausted):
            sld_solve(get("P1"), T("nat(a)"))


INDUCTIVE_QUERIES = [
    ("P1", "nat(X)"), ("P1", "nat(s(s(0)))"), ("P1", "nat(s(X))"), ("P6", "conn(X, Y)"), ("P6", "conn(a, c)"),
    ("P6", "conn(a, X)"), ("P6", "conn(X, c)"), ("P7", "p(X)"), ("P7", "p(c)"),
]


@pytest.mark.parametrize("name,query", INDUCTIVE_QUERIES)
def test_engines_agree(name, query):
    P, t = get(name), T(query)
    s = s_refute(P, t).answer
    d = sld_solve(P, t)
    vs = list(variables(t))
    assert is_variant(App("ans", tuple(s.apply(v) for v in vs)), App("ans", tuple(d.apply(v) for v in vs)))


@pytest.mark.parametrize("name,query", INDUCTIVE_QUERIES)
def test_refutations_are_sound(name, query):
    P, t = get(name), T(query)
    r = s_refute(P, t)
    closure = forward_closure(P, 4, 4)
    instance = r.answer.apply(t)
    free = list(dict.fromkeys(variables(instance)))
    universe = herbrand_universe(P.signature(), 3)
    for values in itertools.product(universe, repeat=len(free)):
        assert Substitution(dict(zip(free, values))).apply(instance) in closure


def test_unbound_answer_variables_are_universal():
    P, _, _ = parse_program("anything(X). pair(X, Y) :- anything(X), anything(Y). base(a). base(f(b)).")
    r = s_refute(P, T("pair(a, Y)"))
    assert Y not in r.answer
    closure = forward_closure(P, 3, 3)
    for g in herbrand_universe(P.signature(), 3):
        assert App("pair", (T("a"), g)) in closure


class TestCoinduction:
    def test_nats(self):
        ans = colp_s_solve(get("P2"), T("nats(X)"), typing_for("P2"))
        assert isinstance(ans, CoinductiveAnswer)
        r = ans.rational[X]
        assert str(r) == "scons(0, X)" and not r.is_finite()
        loop = ans.loop_witness
        assert loop.ancestor_term.functor == loop.descendant_term.functor == "nats"

    def test_rational_answer_unfolds_to_sld_prefixes(self):
        ans = colp_s_solve(get("P2"), T("nats(X)"), typing_for("P2"))
        for k in range(1, 7):
            expected = truncate(k, stream([T("0")] * k, X, "scons"))
            assert unfold(ans.rational[X], k) == expected

    def test_bad_rejected(self):
        with pytest.raises(NonProductiveRejected) as e:
            colp_s_solve(get("bad"), T("bad(X)"), typing_for("bad"))
        assert e.value.verdict.witness.predicate == "bad"

    def test_fibonacci_has_no_loop(self):
        with pytest.raises(FuelOut):
            colp_s_solve(get("P3"), T("fibs(0, s(0), X)"), typing_for("P3"), fuel=60)

    def test_inductive_query_gives_refutation(self):
        r = colp_s_solve(get("P1"), T("nat(X)"), typing_for("P1"))
        assert isinstance(r, Refutation) and r.answer == {X: T("0")}

    def test_loop_pairs_unify_without_occurs_check(self):
        ans = colp_s_solve(get("P2"), T("nats(X)"), typing_for("P2"))
        for loop in ans.loops:
            a = ans.unifier.apply(loop.ancestor_term)
            d = ans.unifier.apply(loop.descendant_term)
            assert a.functor == d.functor


class TestObservation:
    def test_zeros(self):
        o = observe(get("P12"), T("zeros(X)"), typing_for("P12"), 3)
        assert o.resolvents_used == 2
        assert o.answer[X] == Substitution({Y: DIAMOND}).apply(T("scons(0, scons(0, Y))"))
        assert o.approximation == truncate(3, T("zeros(scons(0, scons(0, Y)))"))

    def test_from(self):
        o = observe(get("P4"), T("from(0, X)"), typing_for("P4"), 4)
        assert 2 <= o.resolvents_used <= 3
        assert refines(o.approximation, truncate(4, T("from(0, scons(0, scons(s(0), Y)))")))

    def test_fibonacci_prefix(self):
        o = observe(get("P3"), T("fibs(0, s(0), X)"), typing_for("P3"), 8)
        prefix = stream([peano(0), peano(1), peano(1), peano(2)], Y)
        assert refines(o.answer[X], truncate(7, prefix))

    def test_error_stream_fails(self):
        with pytest.raises(InductiveFailure) as e:
            observe(get("P5"), T("from(0, X)"), typing_for("P5"), 3)
        assert e.value.goal == T("error(0)")

    def test_rejected(self):
        with pytest.raises(NonProductiveRejected):
            observe(get("bad"), T("bad(X)"), typing_for("bad"), 3)

    def test_depth_must_be_positive(self):
        with pytest.raises(ValueError):
            observe(get("P12"), T("zeros(X)"), typing_for("P12"), 0)

    @pytest.mark.parametrize("name,query", [("P4", "from(0, X)"), ("P12", "zeros(X)"), ("P3", "fibs(0, s(0), X)")])
    def test_monotone_refinement(self, name, query):
        obs = [observe(get(name), T(query), typing_for(name), n) for n in range(1, 8)]
        for n, (a, b) in enumerate(zip(obs, obs[1:]), start=1):
            assert truncate(n, b.approximation) == a.approximation
            assert a.resolvents_used <= b.resolvents_used

    @pytest.mark.parametrize("name,query", [("P4", "from(0, X)"), ("P12", "zeros(X)"), ("P3", "fibs(0, s(0), X)")])
    def test_resolvents_reproduce_the_answer(self, name, query):
        t = T(query)
        o = observe(get(name), t, typing_for(name), 5)
        sigma = ID
        for theta in o.resolvents:
            sigma = compose(theta, sigma)
        assert truncate(5, sigma.apply(t)) == o.approximation
        assert not any(v for v in variables(o.approximation))

    @pytest.mark.parametrize("name,query,steps", [("P4", "from(0, X)", 12), ("P12", "zeros(X)", 8)])
    def test_agrees_with_sld(self, name, query, steps):
        t = T(query)
        o = observe(get(name), t, typing_for(name), 4)
        answers = [truncate(4, a.apply(t)) for a, _ in sld_partial_answers(get(name), t, steps)]
        assert o.approximation in answers


class TestImplied:
    def test_p11(self):
        w = implied_at_infinity(get("P11"), T("p(Y)"), typing_for("P11"), 3)
        [g] = w.residual
        assert is_variant(g, T("from(0, X)")) and w.rewrite_steps == 1
        [(goal, ev)] = w.evidence
        assert goal == g and isinstance(ev, Observation)

    def test_inductive(self):
        w = implied_at_infinity(get("P1"), T("nat(s(0))"), typing_for("P1"), 2)
        assert w.residual == () and isinstance(w.evidence[0][1], Refutation)

    def test_bad(self):
        with pytest.raises(Fail):
            implied_at_infinity(get("bad"), T("bad(X)"), typing_for("bad"), 3)

    def test_failing_residual(self):
        with pytest.raises(Fail):
            implied_at_infinity(get("P5"), T("from(0, X)"), typing_for("P5"), 3)

    def test_committed_rewriting(self):
        # p(X) rewrites to q(X), which has no clauses, although p(c) holds
        with pytest.raises(Fail):
            implied_at_infinity(get("P7"), T("p(X)"), TypingFunction(), 2)
        w = implied_at_infinity(get("P7"), T("p(c)"), TypingFunction(), 2)
        assert isinstance(w.evidence[0][1], Refutation)
