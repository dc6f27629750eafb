"""Isomorphism of zipper graphs by backtracking with forced propagation.

A candidate mapping of one node forces the mapping of every node connected
to it (each port carries at most one arrow), so the search only branches on
the first node of each connected component and, optionally, on the
orientation of fanout nodes.  Free-end labels are ignored.
"""

from __future__ import annotations

import hashlib
from collections import Counter

from .graph import FO, Free, ZGraph

_SWAP = {"out1": "out2", "out2": "out1"}


def _far(end):
    return "free" if isinstance(end, Free) else (end.node, end.port)


def _neighbourhood(g: ZGraph):
    """port -> None | "free" | (node, port) for every port of every node."""
    table: dict[int, dict[str, object]] = {}
    for n in g.node_ids():
        kind = g.kind(n)
        row = {}
        for p in kind.in_ports:
            a = g.arrow_into(n, p)
            row[p] = None if a is None else _far(a.tail)
        for p in kind.out_ports:
            a = g.arrow_from(n, p)
            row[p] = None if a is None else _far(a.head)
        table[n] = row
    return table


def _far(end):
    return "free" if isinstance(end, Free) else (end.node, end.port)


def _local_signature(g: ZGraph, table, n: int, unordered: bool):
    kind = g.kind(n)
    marks = []
    for p in kind.ports:
        d = table[n][p]
        if d is None:
            m = "none"
        elif d == "free":
            m = "free"
        else:
            other = g.kind(d[0])
            q = d[1]
            if unordered and other.tag == FO and q in _SWAP:
                q = "out*"
            m = (str(other), q)
        pp = "out*" if unordered and kind.tag == FO and p in _SWAP else p
        marks.append((pp, m))
    return (str(kind), tuple(sorted(marks, key=repr)))


def _far(end):
    return "free" if isinstance(end, Free) else (end.node, end.port)


def _free_arrow_count(g: ZGraph) -> int:
    return sum(1 for a in g.arrows if a.is_free)


def find_isomorphism(g1: ZGraph, g2: ZGraph, fanout_outs_unordered: bool = False):
    """Return a node bijection ``{n1: n2}`` or ``None``."""
    if len(g1) != len(g2) or g1.loop_count != g2.loop_count:
        return None
    if len(g1.arrows) != len(g2.arrows) or _free_arrow_count(g1) != _free_arrow_count(g2):
        return None
    t1, t2 = _neighbourhood(g1), _neighbourhood(g2)
    sig1 = {n: _local_signature(g1, t1, n, fanout_outs_unordered) for n in g1.node_ids()}
    sig2 = {n: _local_signature(g2, t2, n, fanout_outs_unordered) for n in g2.node_ids()}
    if Counter(sig1.values()) != Counter(sig2.values()):
        return None
    by_sig: dict[object, list[int]] = {}
    for n in g2.node_ids():
        by_sig.setdefault(sig2[n], []).append(n)

    fwd: dict[int, int] = {}
    bwd: dict[int, int] = {}
    swap: dict[int, bool] = {}

    def port_map(n1: int, p: str) -> str:
        if swap.get(n1) and p in _SWAP:
            return _SWAP[p]
        return p

    def swaps_for(n1: int):
        if fanout_outs_unordered and g1.kind(n1).tag == FO:
            return (False, True)
        return (False,)

    def assign(n1: int, n2: int, sw: bool, trail: list, pending: list) -> bool:
        fwd[n1] = n2
        bwd[n2] = n1
        swap[n1] = sw
        trail.append(n1)
        row1, row2 = t1[n1], t2[n2]
        for p, d1 in row1.items():
            d2 = row2[port_map(n1, p)]
            if d1 is None or d1 == "free":
                if d2 != d1:
                    return False
                continue
            if d2 is None or d2 == "free":
                return False
            m1, q1 = d1
            m2, q2 = d2
            if m1 in fwd:
                if fwd[m1] != m2 or port_map(m1, q1) != q2:
                    return False
            elif m2 in bwd:
                return False
            else:
                pending.append((m1, m2, q1, q2))
        return True

    def undo(trail: list):
        for n1 in trail:
            del bwd[fwd.pop(n1)]
            swap.pop(n1, None)

    order = g1.node_ids()

    def extend(pending: list) -> bool:
        # resolve forced pairs first; they never branch except on fanout swaps
        while pending:
            m1, m2, q1, q2 = pending.pop()
            if m1 in fwd:
                if fwd[m1] != m2:
                    return False
                if port_map(m1, q1) != q2:
                    return False
                continue
            if m2 in bwd or sig1[m1] != sig2[m2]:
                return False
            options = [
                sw for sw in swaps_for(m1) if (_SWAP.get(q1, q1) if sw else q1) == q2
            ]
            if not options:
                return False
            if len(options) == 1:
                trail: list = []
                if not assign(m1, m2, options[0], trail, pending):
                    undo(trail)
                    return False
                if extend(pending):
                    return True
                undo(trail)
                return False
            for sw in options:
                trail = []
                sub = list(pending)
                if assign(m1, m2, sw, trail, sub) and extend(sub):
                    return True
                undo(trail)
            return False
        return choose()

    def choose() -> bool:
        n1 = next((n for n in order if n not in fwd), None)
        if n1 is None:
            return True
        for n2 in by_sig[sig1[n1]]:
            if n2 in bwd:
                continue
            for sw in swaps_for(n1):
                trail: list = []
                pending: list = []
                if assign(n1, n2, sw, trail, pending) and extend(pending):
                    return True
                undo(trail)
        return False

    import sys

    limit = sys.getrecursionlimit()
    need = 4 * len(g1) + 200
    if need > limit:
        sys.setrecursionlimit(need)
    try:
        ok = choose()
    finally:
        if need > limit:
            sys.setrecursionlimit(limit)
    return dict(fwd) if ok else None


def isomorphic(g1: ZGraph, g2: ZGraph, fanout_outs_unordered: bool = False) -> bool:
    return find_isomorphism(g1, g2, fanout_outs_unordered) is not None


def invariant_hash(g: ZGraph, fanout_outs_unordered: bool = True, rounds: int = 3) -> str:
    """Isomorphism-invariant digest (colour refinement); equal graphs hash equal."""
    table = _neighbourhood(g)
    colour = {n: str(_local_signature(g, table, n, fanout_outs_unordered)) for n in g.node_ids()}
    for _ in range(rounds):
        nxt = {}
        for n in g.node_ids():
            kind = g.kind(n)
            parts = []
            for p in kind.ports:
                d = table[n][p]
                pp = "out*" if fanout_outs_unordered and kind.tag == FO and p in _SWAP else p
                parts.append((pp, colour[d[0]] if isinstance(d, tuple) else str(d)))
            nxt[n] = hashlib.sha1(
                (colour[n] + repr(sorted(parts))).encode()
            ).hexdigest()
        colour = nxt
    body = repr(
        (sorted(colour.values()), g.loop_count, len(g.arrows), _free_arrow_count(g))
    )
    return hashlib.sha1(body.encode()).hexdigest()
