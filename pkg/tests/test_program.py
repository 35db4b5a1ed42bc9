import pytest

from conftest import C, Q, T
from strucres.corpus import SOURCES, corpus, get, typing_for
from strucres.program import GOAL_HEAD, Clause, Kind, Program, TypingFunction, goal_clause
from strucres.syntax import ParseError, format_program, parse_program, parse_query, tokenize


class TestParseProgram:
    def test_nat(self):
        P, ty, sig = parse_program("nat(0). nat(s(X)) :- nat(X).")
        assert len(P) == 2 and P.arity == 2
        assert P[1] == C("nat(s(X)) :- nat(X)")
        assert sig.functions == {"0": 0, "s": 1} and sig.predicates == {"nat": 1}
        assert ty("nat") is Kind.INDUCTIVE

    def test_directive(self):
        P, ty, _ = parse_program(":- coinductive nats/1.\nnats(scons(X, Y)) :- nats(Y).")
        assert ty("nats") is Kind.COINDUCTIVE
        assert ty(T("nats(X)")) is Kind.COINDUCTIVE

    def test_unbalanced(self):
        with pytest.raises(ParseError) as e:
            parse_program("p(X,Y")
        assert "end of input" in str(e.value)

    def test_error_position(self):
        with pytest.raises(ParseError) as e:
            parse_program("p(a).\nq(b) :- ,")
        assert (e.value.line, e.value.column) == (2, 9)

    def test_arity_clash(self):
        with pytest.raises(ParseError):
            parse_program("p(f(a)). q(f(a, b)).")

    def test_directive_arity_checked(self):
        with pytest.raises(ParseError):
            parse_program(":- coinductive p/2.\np(a).")

    def test_variable_atom_rejected(self):
        with pytest.raises(ParseError):
            parse_program("p(a) :- X.")

    def test_comments(self):
        P, _, _ = parse_program("% header\np(a). % trailing\n")
        assert len(P) == 1

    def test_tokens(self):
        kinds = [t.kind for t in tokenize("?- p(X).")]
        assert kinds == ["query", "name", "punct", "var", "punct", "punct", "eof"]


class TestQueries:
    def test_single(self):
        assert parse_query("?- nats(X).") == goal_clause(T("nats(X)"))
        assert parse_query("?- nats(X).").head == GOAL_HEAD

    def test_empty_rejected(self):
        with pytest.raises(ParseError):
            parse_query("?- .")

    def test_ground(self):
        q = parse_query("?- conn(a,c).")
        assert q.body == (T("conn(a, c)"),) and q.is_goal
        assert str(q) == "? ← conn(a, c)"

    def test_conjunction_and_optional_prefix(self):
        assert parse_query("p(X), q(X)").body == (T("p(X)"), T("q(X)"))


class TestClauses:
    def test_tree_view(self):
        c = C("conn(X, Y) :- conn(X, Z), conn(Z, Y)")
        assert c[()] == T("conn(X, Y)")
        assert c[(0,)] == T("conn(X, Z)") and c[(1,)] == T("conn(Z, Y)")
        assert c.arity == 2
        with pytest.raises(KeyError):
            c[(0, 0)]

    def test_typing_default_inductive(self):
        ty = TypingFunction.of("nats")
        assert ty("nat") is Kind.INDUCTIVE and ty.is_coinductive("nats")


class TestCorpus:
    def test_sizes(self):
        programs = corpus()
        assert len(programs["P1"]) == 2
        assert len(programs["P6"]) == 3
        assert set(programs) >= {f"P{i}" for i in range(1, 13)} | {"bad", "good"}

    def test_zeros(self):
        assert get("P12").clauses == (C("zeros(scons(0, X)) :- zeros(X)"),)

    def test_composites(self):
        assert get("P8").clauses[:3] == get("P2").clauses
        assert get("P11").clauses[0] == get("P4").clauses[0]

    def test_typings(self):
        assert typing_for("P2").is_coinductive("nats")
        assert not typing_for("P2").is_coinductive("nat")
        assert typing_for("P1").coinductive == frozenset()

    @pytest.mark.parametrize("name", sorted(SOURCES))
    def test_round_trip(self, name):
        P, ty = get(name), typing_for(name)
        P2, ty2, _ = parse_program(format_program(P, ty))
        assert P2 == P and ty2 == ty

    @pytest.mark.parametrize("name", sorted(SOURCES))
    def test_tree_view_everywhere(self, name):
        for c in get(name):
            assert c[()] == c.head
            assert [c[(i,)] for i in range(c.arity)] == list(c.body)
