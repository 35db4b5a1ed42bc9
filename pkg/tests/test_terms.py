from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import T, VARS, substitutions, terms
from strucres.terms import (DIAMOND, ID, INFINITY, App, ArityClash, EmptyHerbrandUniverse, PositionOutOfRange,
                            RationalTerm, Signature, Substitution, Var, VarSupply, compose, depth, distance,
                            gamma, positions, rational_equal, render, render_rational, subterm, truncate,
                            unfold, var_namer, variables)

X, Y = Var("X"), Var("Y")


class TestSubterm:
    def test_root(self):
        assert subterm(T("nat(s(0))"), ()) == T("nat(s(0))")

    def test_first_child(self):
        assert subterm(T("nat(s(0))"), (0,)) == T("s(0)")

    def test_nested(self):
        assert subterm(T("scons(0, scons(s(0), Y))"), (1, 0)) == T("s(0)")

    @pytest.mark.parametrize("w", [(1,), (0, 0, 0), (0, 0, 0, 0)])
    def test_out_of_range(self, w):
        with pytest.raises(PositionOutOfRange):
            subterm(T("nat(s(0))"), w)

    def test_positions_bfs_and_prefix_closed(self):
        ps = list(positions(T("f(g(a, X), b)")))
        assert ps == [(), (0,), (1,), (0, 0), (0, 1)]
        assert all(p[:-1] in ps for p in ps if p)


class TestSubstitution:
    def test_single_binding(self):
        assert Substitution({X: T("0")}).apply(T("nat(X)")) == T("nat(0)")

    def test_identity(self):
        t = T("f(X, g(Y))")
        assert ID.apply(t) == t

    def test_stream_step(self):
        s = Substitution({X: T("scons(0, Y)")})
        assert s(T("from(0, X)")) == T("from(0, scons(0, Y))")

    def test_compose_example(self):
        s = compose(Substitution({Y: T("s(0)")}), Substitution({X: Y}))
        assert s == {X: T("s(0)"), Y: T("s(0)")}

    def test_left_identity(self):
        s = Substitution({X: T("f(Y)")})
        assert compose(ID, s) == s and compose(s, ID) == s

    def test_trivial_bindings_dropped(self):
        assert len(Substitution({X: X})) == 0

    def test_idempotent_flag(self):
        assert Substitution({X: T("f(Y)")}).idempotent
        assert not Substitution({X: T("f(X)")}).idempotent

    @given(substitutions(), substitutions(), substitutions(), terms())
    def test_compose_associative(self, s1, s2, s3, t):
        s1, s2, s3 = map(Substitution, (s1, s2, s3))
        assert compose(s3, compose(s2, s1)).apply(t) == compose(compose(s3, s2), s1).apply(t)

    @given(substitutions(), substitutions(), terms())
    def test_compose_is_sequential_application(self, s1, s2, t):
        s1, s2 = Substitution(s1), Substitution(s2)
        assert compose(s2, s1).apply(t) == s2.apply(s1.apply(t))

    @given(substitutions(), terms())
    def test_application_preserves_skeleton(self, s, t):
        u = Substitution(s).apply(t)
        for w in positions(t):
            sub = subterm(t, w)
            if isinstance(sub, App):
                assert subterm(u, w).functor == sub.functor


class TestTruncation:
    def test_root(self):
        assert truncate(0, T("nat(0)")) == DIAMOND

    def test_middle(self):
        assert truncate(2, T("nat(s(0))")) == App("nat", (App("s", (DIAMOND,)),))

    def test_deep_enough(self):
        assert truncate(3, T("nat(s(0))")) == T("nat(s(0))")

    def test_ascii_rendering(self):
        assert render(truncate(1, T("f(a)")), ascii=True) == "f(?diamond?)"

    @given(terms(), st.integers(0, 6))
    def test_idempotent(self, t, n):
        assert truncate(n, truncate(n, t)) == truncate(n, t)

    @given(terms(), st.integers(0, 6))
    def test_diamonds_only_at_depth_n(self, t, n):
        u = truncate(n, t)
        for w in positions(u):
            if subterm(u, w) == DIAMOND:
                assert len(w) == n
            else:
                assert subterm(t, w) == subterm(u, w) or len(w) < n


class TestUltrametric:
    def test_gamma_equal(self):
        assert gamma(T("nat(0)"), T("nat(0)")) is INFINITY

    def test_gamma_examples(self):
        assert gamma(T("nat(0)"), T("nat(s(0))")) == 2
        assert gamma(T("nat(0)"), T("conn(a, b)")) == 1

    def test_distance_examples(self):
        assert distance(T("f(X)"), T("f(X)")) == 0
        assert distance(T("nat(0)"), T("nat(s(0))")) == Fraction(1, 4)
        assert isinstance(distance(T("a"), T("b")), Fraction)

    @given(terms(), terms())
    def test_gamma_is_least_differing_truncation(self, s, t):
        g = gamma(s, t)
        if g is INFINITY:
            assert s == t
        else:
            assert truncate(g, s) != truncate(g, t)
            assert all(truncate(n, s) == truncate(n, t) for n in range(g))

    @given(terms(), terms())
    def test_identity_and_symmetry(self, s, t):
        assert (distance(s, t) == 0) == (s == t)
        assert distance(s, t) == distance(t, s)

    @given(terms(), terms(), terms())
    def test_strong_triangle(self, s, t, u):
        assert distance(s, u) <= max(distance(s, t), distance(t, u))


class TestRationalTerms:
    def test_unfold_stream(self):
        # depth-2 truncation of scons(0, scons(0, ...)): both depth-2 subterms become diamonds
        r = RationalTerm({X: T("scons(0, X)")}, X)
        assert unfold(r, 2) == App("scons", (T("0"), App("scons", (DIAMOND, DIAMOND))))
        assert unfold(r, 2) == truncate(2, T("scons(0, scons(0, X))"))

    def test_unfold_f(self):
        r = RationalTerm({X: T("f(X)")}, X)
        assert unfold(r, 2) == App("f", (App("f", (DIAMOND,)),))
        assert depth(unfold(r, 3)) == 3

    def test_unfold_zero(self):
        assert unfold(RationalTerm({X: T("f(X)")}, X), 0) == DIAMOND

    def test_minimal_printing(self):
        r = RationalTerm({X: T("scons(0, Y)"), Y: T("scons(0, Y)")}, X)
        assert render_rational(r) == "scons(0, X)"
        assert str(RationalTerm({X: T("f(X)")}, X)) == "f(X)"

    def test_equality_by_bisimulation(self):
        a = RationalTerm({X: T("scons(0, X)")}, X)
        b = RationalTerm({Y: T("scons(0, scons(0, Y))")}, Y)
        c = RationalTerm({Y: T("scons(0, scons(s(0), Y))")}, Y)
        assert rational_equal(a, b)
        assert not rational_equal(a, c)

    def test_finite(self):
        r = RationalTerm({X: T("f(Y)"), Y: T("a")}, X)
        assert r.is_finite() and r.to_term() == T("f(a)")
        assert not RationalTerm({X: T("f(X)")}, X).is_finite()

    def test_where_clause_for_inner_cycles(self):
        r = RationalTerm({X: T("g(a, Y)"), Y: T("f(Y)")}, X)
        assert render_rational(r) == "g(a, _R1) where _R1 = f(_R1)"


class TestSignatureAndNames:
    def test_arity_clash(self):
        sig = Signature()
        sig.add_function("f", 1)
        with pytest.raises(ArityClash):
            sig.add_function("f", 2)

    def test_inhabited(self):
        sig = Signature()
        sig.add_function("s", 1)
        with pytest.raises(EmptyHerbrandUniverse):
            sig.check_inhabited()
        sig.add_function("0", 0)
        sig.check_inhabited()

    def test_supply_freshness(self):
        s = VarSupply()
        assert s.fresh("X") != s.fresh("X")

    def test_namer(self):
        names = var_namer([Var("X"), Var("X", 7), Var("Y", 3)])
        assert [names(v) for v in (Var("X"), Var("X", 7), Var("Y", 3))] == ["X", "X'", "Y"]

    def test_variables_in_order(self):
        assert list(variables(T("f(Y, g(X, Y))"))) == [Y, X]
