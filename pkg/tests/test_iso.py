import random

import networkx as nx
from hypothesis import given, strategies as st
from networkx.algorithms.isomorphism import DiGraphMatcher

from conftest import graphs, seeds
from zipperlogic.combinators import compile_term
from zipperlogic.generators import random_graph
from zipperlogic.graph import Arrow, PortRef, ZGraph, relabel_free, renumber
from zipperlogic.iso import find_isomorphism, invariant_hash, isomorphic
from zipperlogic.moves import MoveKind, apply_move, enumerate_matches
from zipperlogic.terms import parse_term
from zipperlogic.zgformat import parse_zg


def to_nx(g):
    """Oracle encoding: one vertex per node and per port, free ends as vertices."""
    h = nx.DiGraph()
    for n in g.node_ids():
        h.add_node(("n", n), label=str(g.kind(n)))
        for p in g.kind(n).ports:
            h.add_node(("p", n, p), label=p)
            h.add_edge(("n", n), ("p", n, p))
    for i, a in enumerate(g.arrows):
        t = ("p", a.tail.node, a.tail.port) if isinstance(a.tail, PortRef) else ("free-t", i)
        d = ("p", a.head.node, a.head.port) if isinstance(a.head, PortRef) else ("free-h", i)
        for v in (t, d):
            if v[0].startswith("free"):
                h.add_node(v, label=v[0])
        h.add_edge(t, d)
    for i in range(g.loop_count):
        h.add_node(("loop", i), label="loop")
    return h


def nx_isomorphic(g1, g2):
    m = DiGraphMatcher(to_nx(g1), to_nx(g2), node_match=lambda a, b: a["label"] == b["label"])
    return m.is_isomorphic()


def shuffled(g, seed):
    """Same graph with node ids permuted and free labels renamed."""
    rng = random.Random(seed)
    ids = g.node_ids()
    perm = dict(zip(ids, rng.sample(range(100, 100 + len(ids)), len(ids))))
    def mv(e):
        return PortRef(perm[e.node], e.port) if isinstance(e, PortRef) else e

    moved = ZGraph(
        {perm[n]: k for n, k in g.nodes.items()},
        [Arrow(mv(a.tail), mv(a.head)) for a in g.arrows],
        g.loop_count,
    )
    return relabel_free(moved, {lab: f"z{lab}" for lab in g.labels()})


def test_examples():
    i = compile_term(parse_term("I"))
    k = compile_term(parse_term("K"))
    assert isomorphic(i, i)
    assert not isomorphic(i, k)
    a = parse_zg("FO x a b")
    b = parse_zg("FO x b a")
    swapped = apply_move(a, enumerate_matches(a, MoveKind.CO_COMM)[0])
    assert isomorphic(a, b, fanout_outs_unordered=True)
    assert isomorphic(a, swapped, fanout_outs_unordered=True)
    assert isomorphic(a, b)  # free labels are not part of the structure


def test_fanout_order_matters_without_flag():
    a = parse_zg("FO x a b\nT a\nZP 1 b p q")
    b = parse_zg("FO x b a\nT a\nZP 1 b p q")
    assert not isomorphic(a, b)
    assert isomorphic(a, b, fanout_outs_unordered=True)


@given(graphs, seeds)
def test_invariant_under_renaming(g, seed):
    h = shuffled(g, seed)
    m = find_isomorphism(g, h)
    assert m is not None
    assert sorted(m) == g.node_ids()
    assert invariant_hash(g) == invariant_hash(h)
    assert isomorphic(renumber(h), g)


@given(graphs, graphs)
def test_agrees_with_networkx(g1, g2):
    assert isomorphic(g1, g2) == nx_isomorphic(g1, g2)


@given(graphs, seeds, seeds)
def test_equivalence_relation(g, s1, s2):
    a, b = shuffled(g, s1), shuffled(g, s2)
    assert isomorphic(a, b) and isomorphic(b, a)
    assert isomorphic(a, g) and isomorphic(g, b)


@given(st.integers(1, 6), seeds)
def test_agrees_with_networkx_on_near_misses(n, seed):
    rng = random.Random(seed)
    g = random_graph(rng, max_nodes=n)
    kinds = [k for k in MoveKind if enumerate_matches(g, k)]
    if not kinds:
        return
    h = apply_move(g, enumerate_matches(g, rng.choice(kinds))[0])
    assert isomorphic(g, h) == nx_isomorphic(g, h)
