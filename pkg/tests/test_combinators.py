import random

import pytest
from hypothesis import given

from conftest import terms
from zipperlogic.combinators import (
    ReadbackError,
    compile_term,
    node_count,
    readback,
    split_towers,
)
from zipperlogic.graph import FO, ZM, ZP, Free, T, validate
from zipperlogic.iso import isomorphic
from zipperlogic.moves import MoveKind, apply_move, enumerate_matches
from zipperlogic.terms import I, counts, parse_term, random_term
from zipperlogic.zgformat import parse_zg


def tags(g):
    return sorted(str(g.kind(n)) for n in g.node_ids())


def test_identity():
    g = compile_term(I)
    assert isomorphic(g, parse_zg("ZM 1 x out x"))
    assert len(g) == 1 and len(g.arrows) == 2
    assert g.free_ends() == [("out", "out")]


def test_k():
    g = compile_term(parse_term("K"))
    assert tags(g) == ["T", "ZM2"]
    assert isomorphic(g, parse_zg("ZM 2 x out x y\nT y"))
    assert [lab for _, lab in g.free_ends()] == ["out"]


def test_s():
    g = compile_term(parse_term("S"))
    assert tags(g) == ["FO", "ZM3", "ZP1", "ZP1", "ZP1"]
    m = g.nodes_of(ZM)[0]
    assert g.kind(g.arrow_from(m, "3").head.node).tag == FO


def test_application():
    g = compile_term(parse_term("I I"))
    assert tags(g) == ["ZM1", "ZM1", "ZP1"]
    assert len(g.free_out_arrows()) == 1
    assert g.free_out_arrows()[0].head == Free("out")


def test_skk_node_count():
    g = compile_term(parse_term("S K K"))
    assert len(g) == 11 == node_count(parse_term("S K K"))


def brute_count(t):
    c = counts(t)
    return c["App"] * 1 + c["I"] * 1 + c["K"] * 2 + c["S"] * 5


@given(terms)
def test_compile_invariants(t):
    g = compile_term(t)
    assert validate(g) == []
    assert len(g.free_ends()) == 1
    assert len(g) == node_count(t) == brute_count(t)


def test_readback_round_trip_on_random_terms():
    rng = random.Random(2024)
    for _ in range(500):
        t = random_term(rng, 12)
        assert readback(compile_term(t)) == t


@given(terms)
def test_readback_after_tower_merges(t):
    g = compile_term(t)
    for m in enumerate_matches(g, MoveKind.TOWER_MERGE)[:1]:
        g = apply_move(g, m)
    assert readback(g) == t
    assert isomorphic(split_towers(g), compile_term(t))


def test_readback_examples():
    assert readback(compile_term(parse_term("S K K"))) == parse_term("S K K")
    assert readback(parse_zg("ZM 1 x out x")) == I


def test_readback_rejects_zipper():
    g = parse_zg("ZM 1 x f x\nZP 1 f a out\nZM 1 y a y")
    g = apply_move(g, enumerate_matches(g, MoveKind.CLICK)[0])
    with pytest.raises(ReadbackError) as err:
        readback(g)
    assert err.value.node is not None


@pytest.mark.parametrize(
    "text",
    [
        "",
        "ZM 1 x out x\nZM 1 y out2 y",
        "ZM 2 x out x y\nT y\nLOOP\nT z",
        "ZM 1 x out y",
        "ZM 2 x out y x\nT y",
        "FO a out b\nT b\nZM 1 x a x",
    ],
)
def test_readback_rejects_other_shapes(text):
    with pytest.raises(ReadbackError):
        readback(parse_zg(text))


def test_readback_error_names_leftover_node():
    g = parse_zg("ZM 1 x out x\nZM 1 y z y\nT z")
    with pytest.raises(ReadbackError) as err:
        readback(g)
    assert err.value.node in (1, 2)


def test_loops_are_ignored():
    assert readback(compile_term(I).with_loops(3)) == I


def test_t_only_under_k():
    g = compile_term(parse_term("K K"))
    assert [g.kind(n).tag for n in g.nodes_of(T)] == [T, T]
    assert len(g.nodes_of(ZP)) == 1
