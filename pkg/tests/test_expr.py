import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tscale import parse_expr
from tscale.errors import ExprSyntaxError, UnknownFunction
from tscale.expr import BinOp, Neg, Num, Pow, Special, Var, format_complex, to_text, tokenize
from tscale.fixtures import expression_corpus, load_fixture


def test_precedence_and_associativity():
    assert parse_expr("1 - 2 - 3").ast == BinOp("-", BinOp("-", Num(1), Num(2)), Num(3))
    assert parse_expr("2*t^2").ast == BinOp("*", Num(2), Pow(Var("t"), 2))
    assert parse_expr("-t^2").ast == Neg(Pow(Var("t"), 2))
    assert parse_expr("ets(1-2i)").ast == Special("ets", (1 - 2j,))
    assert parse_expr("etsinv(-i)").ast == Special("etsinv", (-1j,))
    assert parse_expr("chi(0.5, 2)").ast == Special("chi", (0.5, 2.0))


def test_errors_carry_byte_offsets():
    with pytest.raises(ExprSyntaxError) as e:
        parse_expr("t + * 2")
    assert e.value.offset == 4
    with pytest.raises(ExprSyntaxError) as e:
        parse_expr("μ + t")
    assert e.value.offset == 0
    with pytest.raises(ExprSyntaxError) as e:
        parse_expr("t + μ")
    assert e.value.offset == 4
    with pytest.raises(UnknownFunction):
        parse_expr("tan(t)")
    for bad in ["", "(t", "t)", "hk(1.5)", "hk(-1)", "ets()", "2 3"]:
        with pytest.raises(ExprSyntaxError):
            parse_expr(bad)


def test_complex_formatting():
    assert format_complex(1 - 1j) == "1-i"
    assert format_complex(-2.5j) == "-2.5i"
    assert format_complex(3) == "3"
    assert format_complex(0.1 + 2j) == "0.1+2i"


def test_corpus_round_trips():
    corpus = expression_corpus()
    assert len(corpus) == 50
    for text in corpus:
        e = parse_expr(text)
        assert parse_expr(str(e)) == e, text


def test_evaluation(Z, mixed):
    f = parse_expr("t^2 + 1").bind(Z, 0)
    assert f(3) == 10
    g = parse_expr("hk(2)").bind(mixed, 0)
    assert g(3).real == pytest.approx(3.75)
    h = parse_expr("ets(1)").bind(Z, 0)
    assert h(3).real == pytest.approx(8)
    c = parse_expr("chi(1, 3)").bind(Z, 0)
    assert [c(t).real for t in range(5)] == [0, 1, 1, 0, 0]
    p = parse_expr("ind(2)").bind(Z, 0)
    assert [p(t).real for t in range(4)] == [0, 0, 1, 0]
    assert parse_expr("exp(i*t)").bind(Z, 0)(1) == pytest.approx(complex(math.cos(1), math.sin(1)))


def test_point_mass_is_invisible_on_dense_cells(mixed):
    f = parse_expr("ind(0.5)").bind(mixed, 0)
    assert f.on_dense(np.array([0.5]))[0] == 0
    assert f.at(np.array([0.5]))[0] == 1


leaf = st.one_of(st.just(Var("t")), st.builds(Num, st.floats(0, 100).map(lambda x: round(x, 3))),
                 st.builds(lambda n: Special("hk", (n,)), st.integers(0, 4)))


def nodes():
    return st.recursive(leaf, lambda ch: st.one_of(
        st.builds(BinOp, st.sampled_from("+-*/"), ch, ch),
        st.builds(Neg, ch),
        st.builds(Pow, ch, st.sampled_from([2.0, 0.5, -1.0])),
    ), max_leaves=8)


@settings(max_examples=300, deadline=None)
@given(nodes())
def test_print_parse_round_trip(node):
    assert parse_expr(to_text(node)).ast == node


def test_tokenize_positions():
    toks = tokenize("ets( 2 )")
    assert [(t.kind, t.pos) for t in toks] == [("name", 0), ("op", 3), ("num", 5), ("op", 7), ("end", 8)]
