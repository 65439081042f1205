from hypothesis import given
from hypothesis import strategies as st

from sidl.parser import _Parser, tokenize
from sidl.terms import (
    Atom, Compound, Int, ListTerm, Real, Var, comp, is_ground, to_text,
)


def parse_term(text):
    return _Parser(tokenize(text)).parse_expr()


def test_atom_quoting():
    assert to_text(Atom("state")) == "state"
    assert to_text(Atom("A")) == "'A'"
    assert to_text(Atom("10")) == "'10'"


def test_compound_and_list():
    t = comp("thrown", Atom("alice"), Int(8))
    assert to_text(t) == "thrown(alice, 8)"
    assert to_text(ListTerm((Atom("a"), Atom("b")))) == "[a, b]"


def test_arith_infix_parens():
    minus = comp("-", Int(3), Var("X"))
    assert to_text(minus) == "3-X"
    assert to_text(comp("*", comp("+", Int(1), Int(2)), Int(3))) == "(1+2)*3"
    assert to_text(comp("-", Int(1), comp("-", Int(2), Int(3)))) == "1-(2-3)"


def test_ground():
    assert is_ground(comp("state", Int(0)))
    assert not is_ground(comp("state", Var("X")))


ground_terms = st.deferred(lambda: st.one_of(
    st.integers(-50, 50).map(Int),
    st.sampled_from(["alice", "bob", "state", "A", "10"]).map(Atom),
    st.floats(allow_nan=False, allow_infinity=False, width=32).map(Real),
    st.tuples(st.sampled_from(["f", "g"]),
              st.lists(ground_terms, min_size=1, max_size=3)).map(
        lambda fa: Compound(fa[0], tuple(fa[1]))),
    st.lists(ground_terms, max_size=3).map(lambda xs: ListTerm(tuple(xs))),
))


@given(ground_terms)
def test_text_round_trip(t):
    assert parse_term(to_text(t)) == t
