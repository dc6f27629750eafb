import pytest
from hypothesis import given

from conftest import graphs
from zipperlogic.combinators import compile_term
from zipperlogic.graph import Arrow, Free, PortRef, ZGraph, validate, zm
from zipperlogic.iso import isomorphic
from zipperlogic.terms import parse_term
from zipperlogic.zgformat import ZgSyntaxError, emit_dot, emit_zg, fingerprint, parse_zg


def test_parse_identity_combinator():
    g = parse_zg("ZM 1 x out x")
    want = ZGraph(
        {0: zm(1)},
        [Arrow(PortRef(0, "1"), PortRef(0, "0")), Arrow(PortRef(0, "0'"), Free("out"))],
    )
    assert g == want
    assert validate(g) == []


def test_parse_loop_and_arrow():
    assert parse_zg("LOOP") == ZGraph(loops=1)
    g = parse_zg("ARROW a b\n# comment\nLOOP  # trailing\n")
    assert g.arrows == (Arrow(Free("a"), Free("b")),)
    assert g.loop_count == 1


@pytest.mark.parametrize(
    "text,line,fragment",
    [
        ("ZM 1 x out", 1, "arity error"),
        ("T a\nT a", 2, "used twice in head position"),
        ("FO a b c\nFO d b e", 2, "used twice in tail position"),
        ("T a\nARROW a b", 2, "invalid direction pairing"),
        ("ZP zero a b c", 1, "bad arity"),
        ("ZM 0 a b", 1, "arity must be"),
        ("BOX a", 1, "unknown statement"),
        ("LOOP extra", 1, "LOOP takes no arguments"),
    ],
)
def test_parse_errors(text, line, fragment):
    with pytest.raises(ZgSyntaxError) as err:
        parse_zg(text)
    assert err.value.line == line
    assert fragment in str(err.value)


def test_error_column_points_at_label():
    with pytest.raises(ZgSyntaxError) as err:
        parse_zg("FO a b c\nFO d  b e")
    assert err.value.column == 7


def test_emit_examples():
    assert emit_zg(ZGraph()) == ""
    assert emit_zg(ZGraph(loops=2)) == "LOOP\nLOOP\n"
    assert emit_zg(parse_zg("ZM 1 x out x")) == "ZM 1 e0 out e0\n"


def test_emit_keeps_free_labels():
    text = emit_zg(parse_zg("ZM 1 a f x\nZP 1 f c d"))
    assert text == "ZM 1 a e0 x\nZP 1 e0 c d\n"


@given(graphs)
def test_round_trip(g):
    text = emit_zg(g)
    back = parse_zg(text)
    assert isomorphic(back, g)
    assert emit_zg(back) == text
    assert fingerprint(back) == fingerprint(g)


def test_dot_output():
    assert emit_dot(ZGraph()) == "digraph zipper {\n  rankdir=TB;\n}\n"
    t = emit_dot(parse_zg("T a"))
    assert 'label="T"' in t
    s = emit_dot(compile_term(parse_term("S")))
    assert s.count('label="ZM3"') == 1
    assert s.count('label="FO"') == 1
    assert s.count('label="ZP1"') == 3
    assert 'taillabel="0\'"' in s
    looped = emit_dot(ZGraph(loops=1))
    assert "style=dashed" in looped
