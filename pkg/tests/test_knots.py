import random

import pytest
from hypothesis import assume, given, settings

from conftest import seeds
from zipperlogic.generators import _close, random_kind
from zipperlogic.graph import Free, GraphEditor, PortRef, zipper
from zipperlogic.knots import (
    KnotError,
    apply_r2,
    diagram_dot,
    diagram_iso,
    emit_diagram,
    encode,
    parse_diagram,
    r2_sites,
    realize_click,
    unpair,
)
from zipperlogic.moves import MoveKind, apply_move, enumerate_matches
from zipperlogic.zgformat import parse_zg

REDEX = parse_zg("ZM 1 body fun var\nZP 1 fun arg result")


def clicked():
    (m,) = enumerate_matches(REDEX, MoveKind.CLICK)
    return apply_move(REDEX, m)


def bare_zipper(n):
    ed = GraphEditor()
    z = ed.add_node(zipper(n))
    for p in zipper(n).in_ports:
        ed.add_arrow(Free(f"i{p}"), PortRef(z, p))
    for p in zipper(n).out_ports:
        ed.add_arrow(PortRef(z, p), Free(f"o{p}"))
    return ed.freeze()


def half_graph(seed, tags=("ZM", "ZP", "Z")):
    rng = random.Random(seed)
    ed = GraphEditor()
    for _ in range(rng.randint(1, 4)):
        ed.add_node(random_kind(rng, 3, tags))
    return _close(rng, ed, rng.uniform(0.3, 0.9))


def r2_reachable(d, target, depth):
    """Brute force: some sequence of ``depth`` R2 moves turns d into target."""
    if depth == 0:
        return diagram_iso(d, target)
    return any(r2_reachable(apply_r2(d, s), target, depth - 1) for s in r2_sites(d))


def test_clicked_one_zipper_has_two_crossings():
    d = encode(clicked())
    assert sorted(c.sign for c in d.crossings) == [-1, 1]
    assert d.virtual_count == 0 and d.check() == []
    assert r2_sites(d)


def test_half_zipper_is_a_chain_with_virtual_stubs():
    d = encode(parse_zg("ZM 2 a b c d"))
    assert [c.sign for c in d.crossings] == [-1, -1]
    assert d.crossings[0].oo == d.crossings[1].oi
    assert d.virtual_count == 2
    assert all(a.source.startswith("~") for a in d.arcs if not a.real)


def test_redex_pairs_teeth_with_one_virtual_arc():
    d = encode(REDEX)
    (v,) = [a for a in d.arcs if not a.real]
    assert v.source.startswith("x") and v.target.startswith("x")


def test_strict_encode_rejects_fanout():
    g = parse_zg("FO a b c")
    with pytest.raises(KnotError):
        encode(g)
    d = encode(g, strict=False)
    assert d.crossings == () and any(a.source.startswith(":FO") for a in d.arcs)


def test_zipper_crossing_count():
    for n in (1, 2, 3):
        assert len(encode(bare_zipper(n)).crossings) == 2 * n


def test_realize_click_errors():
    with pytest.raises(KnotError):
        realize_click(encode(parse_zg("ZM 2 a b c d")))
    done = realize_click(encode(REDEX))
    with pytest.raises(KnotError):
        realize_click(done)
    d = encode(REDEX)
    real = d.arcs[0].id
    with pytest.raises(KnotError):
        realize_click(d, real)
    with pytest.raises(KnotError):
        realize_click(d, "nope")
    with pytest.raises(KnotError):
        realize_click(d, [])


def test_apply_r2_errors():
    with pytest.raises(KnotError):
        apply_r2(encode(parse_zg("ZM 2 a b c d")))
    with pytest.raises(KnotError):
        apply_r2(encode(parse_zg("")))
    d = encode(clicked())
    with pytest.raises(KnotError):
        apply_r2(d, (0, 0))
    with pytest.raises(KnotError):
        apply_r2(d, (0, 7))
    # virtual arc in the way
    with pytest.raises(KnotError):
        apply_r2(encode(REDEX))


def test_click_square_and_zip_square():
    assert diagram_iso(realize_click(encode(REDEX)), encode(clicked()))
    (m,) = enumerate_matches(clicked(), MoveKind.ZIP)
    assert diagram_iso(apply_r2(encode(clicked())), encode(apply_move(clicked(), m)))


def test_diagram_iso_examples():
    a = encode(parse_zg("ZM 2 a b c d"))
    b = encode(parse_zg("ZM 2 a b c d"))
    assert diagram_iso(a, b)
    assert not diagram_iso(a, encode(parse_zg("ZP 2 a b c d")))
    assert not diagram_iso(a, encode(parse_zg("ZM 2 a b d c")))
    assert not diagram_iso(encode(REDEX), encode(clicked()))


def test_text_round_trip_and_errors():
    for g in (REDEX, clicked(), bare_zipper(3)):
        d = encode(g)
        text = emit_diagram(d)
        back = parse_diagram(text)
        assert back == d and emit_diagram(back) == text
    with pytest.raises(KnotError, match="line 1"):
        parse_diagram("X up a b c d")
    with pytest.raises(KnotError, match="line 1"):
        parse_diagram("BOGUS")
    with pytest.raises(KnotError):
        parse_diagram("ARC a0 :a x0 real")


def test_dot_output():
    dot = diagram_dot(encode(REDEX))
    assert dot.startswith("digraph") and "style=dashed" in dot


@given(seeds)
@settings(max_examples=60)
def test_encoding_is_well_formed(seed):
    d = encode(half_graph(seed))
    assert d.check() == []
    assert parse_diagram(emit_diagram(d)) == d


@given(seeds)
@settings(max_examples=60)
def test_realize_keeps_crossings(seed):
    d = encode(half_graph(seed, ("ZM", "ZP")))
    try:
        r = realize_click(d)
    except KnotError:
        return
    assert len(r.crossings) == len(d.crossings)
    assert r.virtual_count < d.virtual_count
    assert r.check() == []


@given(seeds)
@settings(max_examples=60)
def test_r2_removes_two_crossings(seed):
    d = encode(half_graph(seed))
    for site in r2_sites(d):
        r = apply_r2(d, site)
        assert len(r.crossings) == len(d.crossings) - 2
        assert r.check() == []


@given(seeds)
@settings(max_examples=40)
def test_zip_is_n_r2_moves(seed):
    g = half_graph(seed)
    ms = enumerate_matches(g, MoveKind.ZIP)
    assume(ms)
    m = random.Random(seed).choice(ms)
    n = g.kind(m.node("zipper")).arity
    target = unpair(encode(apply_move(g, m)))
    assert r2_reachable(unpair(encode(g)), target, n)


def test_zip_can_create_a_pairing_that_r2_does_not():
    # ZM.0' -> Z(1).0 and Z.0' -> ZP.0: after the zip the ZM feeds the ZP
    g = parse_zg("ZM 1 a m v\nZ 1 m x y z\nZP 1 y p r")
    (m,) = enumerate_matches(g, MoveKind.ZIP)
    after = encode(apply_move(g, m))
    before = encode(g)
    assert after.virtual_count == before.virtual_count - 1
    assert not r2_reachable(before, after, 1)
    assert r2_reachable(unpair(before), unpair(after), 1)


def test_unpair():
    d = unpair(encode(REDEX))
    assert d.check() == []
    assert d.virtual_count == 2
    assert all(not (a.source.startswith("x") and a.target.startswith("x")) for a in d.arcs if not a.real)
    assert diagram_iso(unpair(d), d)
