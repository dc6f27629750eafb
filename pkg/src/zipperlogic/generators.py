"""Random zipper graphs for property tests and the verification suites.

``planted(rng, kind)`` builds a valid graph that contains at least one
occurrence of ``kind``'s left-hand pattern.  The remaining ports are wired
to each other or to free ends at random, so self-arrows and closed cycles
turn up often.
"""

from __future__ import annotations

import random

from .graph import (
    FANIN,
    FANOUT,
    TERM,
    Free,
    GraphEditor,
    NodeKind,
    PortRef,
    ZGraph,
    zipper,
    zm,
    zp,
)
from .moves import MoveKind

_ANY = ("ZM", "ZP", "Z", "FO", "FI", "T")


def random_kind(rng: random.Random, max_arity: int = 3, tags=_ANY) -> NodeKind:
    tag = rng.choice(tags)
    if tag == "FO":
        return FANOUT
    if tag == "FI":
        return FANIN
    if tag == "T":
        return TERM
    return NodeKind(tag, rng.randint(1, max_arity))


def _close(
    rng: random.Random,
    ed: GraphEditor,
    link: float = 0.6,
    free_arrows: int = 0,
    loops: int = 0,
    keep_free=(),
) -> ZGraph:
    """Attach every open port, pairing outs with ins or leaving free ends."""
    open_in, open_out = [], []
    for n, kind in sorted(ed.nodes.items()):
        for p in kind.in_ports:
            if PortRef(n, p) not in ed.by_head:
                open_in.append(PortRef(n, p))
        for p in kind.out_ports:
            if PortRef(n, p) not in ed.by_tail:
                open_out.append(PortRef(n, p))
    rng.shuffle(open_in)
    rng.shuffle(open_out)
    reserved = set(keep_free)
    while open_in and open_out:
        h = open_in.pop()
        if h in reserved or rng.random() > link:
            ed.add_arrow(Free(ed.fresh_label("i")), h)
            continue
        ed.add_arrow(open_out.pop(), h)
    for h in open_in:
        ed.add_arrow(Free(ed.fresh_label("i")), h)
    for t in open_out:
        ed.add_arrow(t, Free(ed.fresh_label("o")))
    for _ in range(free_arrows):
        ed.add_arrow(Free(ed.fresh_label("i")), Free(ed.fresh_label("o")))
    g = ed.freeze()
    return g.with_loops(loops) if loops else g


def random_graph(
    rng: random.Random, max_nodes: int = 6, max_arity: int = 3, extras: bool = True
) -> ZGraph:
    """A valid graph over every node kind, optionally with ARROW and LOOP parts."""
    ed = GraphEditor()
    for _ in range(rng.randint(0, max_nodes)):
        ed.add_node(random_kind(rng, max_arity))
    free_arrows = rng.randint(0, 2) if extras else 0
    loops = rng.randint(0, 2) if extras else 0
    return _close(rng, ed, rng.uniform(0.3, 0.9), free_arrows, loops)


def _half(rng: random.Random, tag: str, max_arity: int, low: int = 1) -> NodeKind:
    n = rng.randint(low, max_arity)
    return zm(n) if tag == "ZM" else zp(n)


def planted(rng: random.Random, kind: MoveKind, max_arity: int = 3, extra: int = 3) -> ZGraph:
    """Random valid graph containing ``kind``'s pattern at least once."""
    ed = GraphEditor()
    keep = []
    if kind is MoveKind.CLICK:
        a = ed.add_node(_half(rng, "ZM", max_arity))
        b = ed.add_node(_half(rng, "ZP", max_arity))
        ed.add_arrow(PortRef(a, "0'"), PortRef(b, "0"))
    elif kind is MoveKind.ZIP:
        ed.add_node(zipper(rng.randint(1, max_arity)))
    elif kind in (MoveKind.TOWER_MERGE, MoveKind.TOWER_SPLIT):
        tag = rng.choice(("ZM", "ZP"))
        if kind is MoveKind.TOWER_SPLIT:
            ed.add_node(_half(rng, tag, max(2, max_arity), low=2))
        else:
            a = ed.add_node(_half(rng, tag, max_arity))
            b = ed.add_node(_half(rng, tag, max_arity))
            ed.add_arrow(PortRef(a, "0'"), PortRef(b, "0"))
    elif kind is MoveKind.CO_COMM:
        ed.add_node(FANOUT)
    elif kind is MoveKind.CO_ASSOC:
        a, b = ed.add_node(FANOUT), ed.add_node(FANOUT)
        ed.add_arrow(PortRef(a, rng.choice(("out1", "out2"))), PortRef(b, "in"))
    elif kind is MoveKind.FAN_IN:
        a, b = ed.add_node(FANIN), ed.add_node(FANOUT)
        ed.add_arrow(PortRef(a, "out"), PortRef(b, "in"))
    elif kind in (MoveKind.DIST_PLUS, MoveKind.DIST_MINUS):
        h = ed.add_node(_half(rng, "ZP" if kind is MoveKind.DIST_PLUS else "ZM", max_arity))
        f = ed.add_node(FANOUT)
        ed.add_arrow(PortRef(h, "0'"), PortRef(f, "in"))
    elif kind in (MoveKind.PRUNE_ZP, MoveKind.PRUNE_ZM):
        h = ed.add_node(_half(rng, "ZP" if kind is MoveKind.PRUNE_ZP else "ZM", max_arity))
        t = ed.add_node(TERM)
        ed.add_arrow(PortRef(h, "0'"), PortRef(t, "in"))
    elif kind is MoveKind.PRUNE_FO:
        f, t = ed.add_node(FANOUT), ed.add_node(TERM)
        ed.add_arrow(PortRef(f, rng.choice(("out1", "out2"))), PortRef(t, "in"))
    elif kind is MoveKind.PRUNE_FI:
        f, t = ed.add_node(FANIN), ed.add_node(TERM)
        ed.add_arrow(PortRef(f, "out"), PortRef(t, "in"))
    elif kind is MoveKind.PRUNE_ARROW:
        t = ed.add_node(TERM)
        keep.append(PortRef(t, "in"))
    else:  # pragma: no cover
        raise ValueError(kind)
    for _ in range(rng.randint(0, extra)):
        ed.add_node(random_kind(rng, max_arity))
    return _close(
        rng, ed, rng.uniform(0.3, 0.9), rng.randint(0, 1), rng.randint(0, 1), keep_free=keep
    )
