"""The zipper-logic move set.

Each move is split in two steps.  :func:`enumerate_matches` finds the
occurrences of a move's left-hand pattern; a planner then turns a match into
a :class:`Rewrite`, a small record of which nodes die and are born and which
arrows are consumed and created.  Executing a rewrite is mechanical, and its
inverse is the same record read backwards, which is how every move is
reversed.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping

from .graph import (
    FANIN,
    FANOUT,
    FI,
    FO,
    TERM,
    ZM,
    ZP,
    Arrow,
    End,
    Free,
    NodeKind,
    PortRef,
    T,
    Z,
    ZGraph,
    arg_port,
    var_port,
    zipper,
)


class MoveKind(enum.Enum):
    CLICK = "click"
    ZIP = "zip"
    TOWER_MERGE = "tower+"
    TOWER_SPLIT = "tower-"
    CO_COMM = "cocomm"
    CO_ASSOC = "coassoc"
    FAN_IN = "fanin"
    DIST_PLUS = "dist+"
    DIST_MINUS = "dist-"
    PRUNE_ZP = "prune-zp"
    PRUNE_ZM = "prune-zm"
    PRUNE_FO = "prune-fo"
    PRUNE_FI = "prune-fi"
    PRUNE_ARROW = "prune-arrow"

    @classmethod
    def parse(cls, name: str) -> "MoveKind":
        try:
            return cls(name.strip())
        except ValueError:
            names = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown move {name!r} (expected one of: {names})") from None

    def __str__(self):
        return self.value


PRUNES = (
    MoveKind.PRUNE_ZP,
    MoveKind.PRUNE_ZM,
    MoveKind.PRUNE_FO,
    MoveKind.PRUNE_FI,
    MoveKind.PRUNE_ARROW,
)


class MoveError(ValueError):
    """Raised when a match does not fit the graph it is applied to."""


@dataclass(frozen=True)
class Rewrite:
    dead: tuple[tuple[int, NodeKind], ...]
    born: tuple[tuple[int, NodeKind], ...]
    consumed: tuple[Arrow, ...]
    created: tuple[Arrow, ...]
    loops: int = 0

    def inverse(self) -> "Rewrite":
        return Rewrite(self.born, self.dead, self.created, self.consumed, -self.loops)


@dataclass(frozen=True)
class Match:
    kind: MoveKind
    roles: tuple[tuple[str, int], ...]
    case: str | None = None
    params: tuple = ()
    undo: Rewrite | None = None

    @property
    def is_inverse(self) -> bool:
        return self.undo is not None

    def node(self, role: str) -> int:
        for r, n in self.roles:
            if r == role:
                return n
        raise KeyError(role)

    def param(self, key: str):
        for k, v in self.params:
            if k == key:
                return v
        raise KeyError(key)

    def summary(self) -> str:
        parts = [f"{r}={n}" for r, n in self.roles]
        parts += [f"{k}={v}" for k, v in self.params]
        tag = f"[{self.case}]" if self.case else ""
        inv = " (reverse)" if self.is_inverse else ""
        return f"{self.kind.value}{tag}{inv} " + " ".join(parts)


def execute(g: ZGraph, rw: Rewrite) -> ZGraph:
    nodes = g.nodes
    for nid, kind in rw.dead:
        if nodes.get(nid) != kind:
            raise MoveError(f"node {nid} is not a {kind}")
        del nodes[nid]
    for nid, kind in rw.born:
        if nid in nodes:
            raise MoveError(f"node id {nid} already in use")
        nodes[nid] = kind
    arrows = set(g.arrows)
    for a in rw.consumed:
        if a not in arrows:
            raise MoveError(f"stale match: arrow {a} not present")
        arrows.remove(a)
    dead = {nid for nid, _ in rw.dead}
    used: set[PortRef] = set()
    for a in arrows:
        for e in (a.tail, a.head):
            if isinstance(e, PortRef):
                if e.node in dead:
                    raise MoveError(f"arrow {a} still attached to removed node {e.node}")
                used.add(e)
    for a in rw.created:
        for e in (a.tail, a.head):
            if isinstance(e, PortRef):
                if e.node not in nodes:
                    raise MoveError(f"arrow {a} refers to missing node {e.node}")
                if e in used:
                    raise MoveError(f"port {e} already attached")
                used.add(e)
        arrows.add(a)
    loops = g.loop_count + rw.loops
    if loops < 0:
        raise MoveError("no loop left to reopen")
    return ZGraph(nodes, arrows, loops)


# ---------------------------------------------------------------- helpers


class _Plan:
    """Scratch state for building a rewrite against a fixed graph."""

    def __init__(self, g: ZGraph):
        self.g = g
        self._ids = itertools.count(max(g.nodes, default=-1) + 1)
        self._taken = g.labels()
        self._lab = itertools.count()
        self.dead: dict[int, NodeKind] = {}
        self.born: dict[int, NodeKind] = {}
        self.consumed: list[Arrow] = []
        self.created: list[Arrow] = []
        self.loops = 0

    def kill(self, *nodes: int):
        for n in nodes:
            self.dead[n] = self.g.kind(n)

    def new(self, kind: NodeKind) -> int:
        nid = next(self._ids)
        self.born[nid] = kind
        return nid

    def label(self) -> str:
        while True:
            lab = f"f{next(self._lab)}"
            if lab not in self._taken:
                self._taken.add(lab)
                return lab

    def incident(self) -> list[Arrow]:
        seen: list[Arrow] = []
        for n in sorted(self.dead):
            kind = self.dead[n]
            for p in kind.in_ports:
                a = self.g.arrow_into(n, p)
                if a is not None and a not in seen:
                    seen.append(a)
            for p in kind.out_ports:
                a = self.g.arrow_from(n, p)
                if a is not None and a not in seen:
                    seen.append(a)
        return seen

    def remap(self, mapping: Mapping[PortRef, End], drop: Iterable[Arrow] = ()):
        """Consume every arrow touching a dead node, re-creating it with its
        dead ends replaced through ``mapping``.  Arrows in ``drop`` vanish."""
        drop = set(drop)
        for a in self.incident():
            self.consumed.append(a)
            if a in drop:
                continue
            ends = []
            for e in (a.tail, a.head):
                if isinstance(e, PortRef) and e.node in self.dead:
                    if e not in mapping:
                        raise MoveError(f"port {e} has no image")
                    ends.append(mapping[e])
                else:
                    ends.append(e)
            self.created.append(Arrow(*ends))

    def splice(self, through: Mapping[PortRef, PortRef]):
        """Consume arrows touching dead nodes, fusing chains along ``through``
        (dead in port -> dead out port); closed chains become loops."""
        g, dead = self.g, self.dead
        touched = self.incident()
        inverse = {q: p for p, q in through.items()}

        def on_dead(e: End) -> bool:
            return isinstance(e, PortRef) and e.node in dead

        used: set[Arrow] = set()

        def walk(a: Arrow):
            chain = [a]
            cur = a
            while on_dead(cur.head):
                q = through.get(cur.head)
                if q is None:
                    used.update(chain)
                    return "drop"
                nxt = g.arrow_from(q.node, q.port)
                if nxt is None:
                    used.update(chain)
                    return "dangling"
                if nxt is a:
                    used.update(chain)
                    return "cycle"
                if nxt in used or nxt in chain:
                    raise MoveError(f"inconsistent splice at {nxt}")
                chain.append(nxt)
                cur = nxt
            used.update(chain)
            return cur.head

        for a in touched:
            if on_dead(a.head) and not on_dead(a.tail):
                end = walk(a)
                if end == "drop":
                    raise MoveError(f"arrow {a} enters a consumed port")
                head = Free(self.label()) if end == "dangling" else end
                self.created.append(Arrow(a.tail, head))
        for a in touched:
            if a in used or not on_dead(a.tail):
                continue
            p = inverse.get(a.tail)
            if p is not None and g.arrow_into(p.node, p.port) is not None:
                continue
            end = walk(a)
            if isinstance(end, (PortRef, Free)):
                self.created.append(Arrow(Free(self.label()), end))
        for a in touched:
            if a in used:
                continue
            if walk(a) != "cycle":
                raise MoveError(f"open chain through {a}")
            self.loops += 1
        self.consumed.extend(touched)

    def rewrite(self) -> Rewrite:
        return Rewrite(
            tuple(sorted(self.dead.items())),
            tuple(sorted(self.born.items())),
            tuple(self.consumed),
            tuple(self.created),
            self.loops,
        )


def _head_node(g: ZGraph, n: int, port: str) -> PortRef | None:
    a = g.arrow_from(n, port)
    if a is None or not isinstance(a.head, PortRef):
        return None
    return a.head


def _tail_node(g: ZGraph, n: int, port: str) -> PortRef | None:
    a = g.arrow_into(n, port)
    if a is None or not isinstance(a.tail, PortRef):
        return None
    return a.tail


def _require(cond: bool, m: Match, why: str):
    if not cond:
        raise MoveError(f"pattern mismatch for {m.kind.value}: {why}")


def _is(g: ZGraph, n: int, tag: str) -> bool:
    return n in g and g.kind(n).tag == tag


def _spine(g: ZGraph, n: int, port: str, tag: str, in_port: str):
    """Node of kind ``tag`` whose ``in_port`` receives ``n.port``, if any."""
    h = _head_node(g, n, port)
    if h is not None and h.port == in_port and _is(g, h.node, tag) and h.node != n:
        return h.node
    return None


# ---------------------------------------------------------------- matching


def _click_case(m: int, n: int) -> str:
    return "m=n" if m == n else ("m>n" if m > n else "m<n")


def _match_click(g: ZGraph) -> Iterator[Match]:
    for a in g.nodes_of(ZM):
        b = _spine(g, a, "0'", ZP, "0")
        if b is not None:
            case = _click_case(g.kind(b).arity, g.kind(a).arity)
            yield Match(MoveKind.CLICK, (("minus", a), ("plus", b)), case)


def _match_zip(g: ZGraph) -> Iterator[Match]:
    for z in g.nodes_of(Z):
        yield Match(MoveKind.ZIP, (("zipper", z),))


def _match_merge(g: ZGraph) -> Iterator[Match]:
    found = []
    for inner in g.nodes_of(ZM):
        outer = _spine(g, inner, "0'", ZM, "0")
        if outer is not None:
            found.append(Match(MoveKind.TOWER_MERGE, (("inner", inner), ("outer", outer)), "minus"))
    for lower in g.nodes_of(ZP):
        upper = _spine(g, lower, "0'", ZP, "0")
        if upper is not None:
            found.append(Match(MoveKind.TOWER_MERGE, (("lower", lower), ("upper", upper)), "plus"))
    found.sort(key=lambda m: tuple(n for _, n in m.roles))
    return iter(found)


def _match_split(g: ZGraph) -> Iterator[Match]:
    for n in g.node_ids():
        kind = g.kind(n)
        if kind.tag in (ZM, ZP) and kind.arity >= 2:
            sign = "minus" if kind.tag == ZM else "plus"
            for j in range(1, kind.arity):
                yield Match(MoveKind.TOWER_SPLIT, (("node", n),), sign, (("point", j),))


def _match_cocomm(g: ZGraph) -> Iterator[Match]:
    for f in g.nodes_of(FO):
        yield Match(MoveKind.CO_COMM, (("fanout", f),))


def _match_coassoc(g: ZGraph, lean: str = "left") -> Iterator[Match]:
    port = "out1" if lean == "left" else "out2"
    for a in g.nodes_of(FO):
        b = _spine(g, a, port, FO, "in")
        if b is not None:
            yield Match(MoveKind.CO_ASSOC, (("top", a), ("lower", b)), lean)


def _match_fanin(g: ZGraph) -> Iterator[Match]:
    for f in g.nodes_of(FI):
        o = _spine(g, f, "out", FO, "in")
        if o is not None:
            yield Match(MoveKind.FAN_IN, (("fanin", f), ("fanout", o)))


def _match_dist(tag: str, kind: MoveKind):
    def gen(g: ZGraph) -> Iterator[Match]:
        for h in g.nodes_of(tag):
            f = _spine(g, h, "0'", FO, "in")
            if f is not None:
                yield Match(kind, (("half", h), ("fanout", f)))

    return gen


def _match_prune_half(tag: str, kind: MoveKind):
    def gen(g: ZGraph) -> Iterator[Match]:
        for h in g.nodes_of(tag):
            t = _spine(g, h, "0'", T, "in")
            if t is not None:
                yield Match(kind, (("half", h), ("term", t)))

    return gen


def _match_prune_fo(g: ZGraph) -> Iterator[Match]:
    for f in g.nodes_of(FO):
        for port in ("out1", "out2"):
            t = _spine(g, f, port, T, "in")
            if t is not None:
                yield Match(MoveKind.PRUNE_FO, (("fanout", f), ("term", t)), port)


def _match_prune_fi(g: ZGraph) -> Iterator[Match]:
    for f in g.nodes_of(FI):
        t = _spine(g, f, "out", T, "in")
        if t is not None:
            yield Match(MoveKind.PRUNE_FI, (("fanin", f), ("term", t)))


def _match_prune_arrow(g: ZGraph) -> Iterator[Match]:
    for t in g.nodes_of(T):
        a = g.arrow_into(t, "in")
        if a is not None and isinstance(a.tail, Free):
            yield Match(MoveKind.PRUNE_ARROW, (("term", t),))


_MATCHERS: dict[MoveKind, Callable[[ZGraph], Iterator[Match]]] = {
    MoveKind.CLICK: _match_click,
    MoveKind.ZIP: _match_zip,
    MoveKind.TOWER_MERGE: _match_merge,
    MoveKind.TOWER_SPLIT: _match_split,
    MoveKind.CO_COMM: _match_cocomm,
    MoveKind.CO_ASSOC: _match_coassoc,
    MoveKind.FAN_IN: _match_fanin,
    MoveKind.DIST_PLUS: _match_dist(ZP, MoveKind.DIST_PLUS),
    MoveKind.DIST_MINUS: _match_dist(ZM, MoveKind.DIST_MINUS),
    MoveKind.PRUNE_ZP: _match_prune_half(ZP, MoveKind.PRUNE_ZP),
    MoveKind.PRUNE_ZM: _match_prune_half(ZM, MoveKind.PRUNE_ZM),
    MoveKind.PRUNE_FO: _match_prune_fo,
    MoveKind.PRUNE_FI: _match_prune_fi,
    MoveKind.PRUNE_ARROW: _match_prune_arrow,
}


def enumerate_matches(g: ZGraph, kind: MoveKind) -> list[Match]:
    """All occurrences of ``kind``'s left-hand pattern, ordered by node ids."""
    return list(_MATCHERS[kind](g))


def enumerate_inverse_matches(g: ZGraph, kind: MoveKind) -> list[Match]:
    """Matches that run ``kind`` backwards, for the kinds where the reverse
    pattern is itself local and finite (TOWER, CO-COMM, CO-ASSOC)."""
    if kind is MoveKind.TOWER_MERGE:
        return list(_match_split(g))
    if kind is MoveKind.TOWER_SPLIT:
        return list(_match_merge(g))
    if kind is MoveKind.CO_COMM:
        return list(_match_cocomm(g))
    if kind is MoveKind.CO_ASSOC:
        return list(_match_coassoc(g, "right"))
    raise ValueError(f"{kind.value} has no locally enumerable inverse; use the undo record")


# ---------------------------------------------------------------- planners


def _plan_click(g: ZGraph, m: Match) -> Rewrite:
    a, b = m.node("minus"), m.node("plus")
    _require(_is(g, a, ZM) and _is(g, b, ZP), m, "expected ZM and ZP")
    _require(_spine(g, a, "0'", ZP, "0") == b, m, "ZM.0' does not feed ZP.0")
    n, k = g.kind(a).arity, g.kind(b).arity
    _require(m.case in (None, _click_case(k, n)), m, "stale arity case")
    p = _Plan(g)
    p.kill(a, b)
    clicked = g.arrow_from(a, "0'")
    width = min(n, k)
    z = p.new(zipper(width))
    mp: dict[PortRef, End] = {}
    for i in range(1, width + 1):
        mp[PortRef(a, var_port(i))] = PortRef(z, var_port(i))
        mp[PortRef(b, arg_port(i))] = PortRef(z, arg_port(i))
    if k > n:
        r = p.new(NodeKind(ZP, k - n))
        mp[PortRef(a, "0")] = PortRef(z, "0")
        for j in range(1, k - n + 1):
            mp[PortRef(b, arg_port(n + j))] = PortRef(r, arg_port(j))
        mp[PortRef(b, "0'")] = PortRef(r, "0'")
        p.created.append(Arrow(PortRef(z, "0'"), PortRef(r, "0")))
    elif k < n:
        r = p.new(NodeKind(ZM, n - k))
        mp[PortRef(a, "0")] = PortRef(r, "0")
        for j in range(1, n - k + 1):
            mp[PortRef(a, var_port(k + j))] = PortRef(r, var_port(j))
        mp[PortRef(b, "0'")] = PortRef(z, "0'")
        p.created.append(Arrow(PortRef(r, "0'"), PortRef(z, "0")))
    else:
        mp[PortRef(a, "0")] = PortRef(z, "0")
        mp[PortRef(b, "0'")] = PortRef(z, "0'")
    p.remap(mp, drop=[clicked])
    return p.rewrite()


def _plan_zip(g: ZGraph, m: Match) -> Rewrite:
    z = m.node("zipper")
    _require(_is(g, z, Z), m, "expected a zipper")
    n = g.kind(z).arity
    p = _Plan(g)
    p.kill(z)
    through = {PortRef(z, "0"): PortRef(z, "0'")}
    for i in range(1, n + 1):
        through[PortRef(z, arg_port(i))] = PortRef(z, var_port(i))
    p.splice(through)
    return p.rewrite()


def _plan_merge(g: ZGraph, m: Match) -> Rewrite:
    p = _Plan(g)
    if m.case == "minus":
        inner, outer = m.node("inner"), m.node("outer")
        _require(_is(g, inner, ZM) and _spine(g, inner, "0'", ZM, "0") == outer, m, "no minus stack")
        k, j = g.kind(inner).arity, g.kind(outer).arity
        p.kill(inner, outer)
        t = p.new(NodeKind(ZM, j + k))
        mp: dict[PortRef, End] = {
            PortRef(inner, "0"): PortRef(t, "0"),
            PortRef(outer, "0'"): PortRef(t, "0'"),
        }
        for v in range(1, j + 1):
            mp[PortRef(outer, var_port(v))] = PortRef(t, var_port(v))
        for v in range(1, k + 1):
            mp[PortRef(inner, var_port(v))] = PortRef(t, var_port(j + v))
        p.remap(mp, drop=[g.arrow_from(inner, "0'")])
    else:
        lower, upper = m.node("lower"), m.node("upper")
        _require(_is(g, lower, ZP) and _spine(g, lower, "0'", ZP, "0") == upper, m, "no plus stack")
        j, k = g.kind(lower).arity, g.kind(upper).arity
        p.kill(lower, upper)
        t = p.new(NodeKind(ZP, j + k))
        mp = {
            PortRef(lower, "0"): PortRef(t, "0"),
            PortRef(upper, "0'"): PortRef(t, "0'"),
        }
        for v in range(1, j + 1):
            mp[PortRef(lower, arg_port(v))] = PortRef(t, arg_port(v))
        for v in range(1, k + 1):
            mp[PortRef(upper, arg_port(v))] = PortRef(t, arg_port(j + v))
        p.remap(mp, drop=[g.arrow_from(lower, "0'")])
    return p.rewrite()


def _plan_split(g: ZGraph, m: Match) -> Rewrite:
    n = m.node("node")
    j = m.param("point")
    _require(n in g and g.kind(n).tag in (ZM, ZP), m, "expected a half-zipper")
    kind = g.kind(n)
    total = kind.arity
    if not 1 <= j < total:
        raise MoveError(f"split point {j} out of range for {kind}")
    k = total - j
    p = _Plan(g)
    p.kill(n)
    if kind.tag == ZM:
        outer = p.new(NodeKind(ZM, j))
        inner = p.new(NodeKind(ZM, k))
        mp: dict[PortRef, End] = {
            PortRef(n, "0"): PortRef(inner, "0"),
            PortRef(n, "0'"): PortRef(outer, "0'"),
        }
        for v in range(1, j + 1):
            mp[PortRef(n, var_port(v))] = PortRef(outer, var_port(v))
        for v in range(1, k + 1):
            mp[PortRef(n, var_port(j + v))] = PortRef(inner, var_port(v))
        p.created.append(Arrow(PortRef(inner, "0'"), PortRef(outer, "0")))
    else:
        lower = p.new(NodeKind(ZP, j))
        upper = p.new(NodeKind(ZP, k))
        mp = {
            PortRef(n, "0"): PortRef(lower, "0"),
            PortRef(n, "0'"): PortRef(upper, "0'"),
        }
        for v in range(1, j + 1):
            mp[PortRef(n, arg_port(v))] = PortRef(lower, arg_port(v))
        for v in range(1, k + 1):
            mp[PortRef(n, arg_port(j + v))] = PortRef(upper, arg_port(v))
        p.created.append(Arrow(PortRef(lower, "0'"), PortRef(upper, "0")))
    p.remap(mp)
    return p.rewrite()


def _plan_cocomm(g: ZGraph, m: Match) -> Rewrite:
    f = m.node("fanout")
    _require(_is(g, f, FO), m, "expected a fanout")
    p = _Plan(g)
    # the node keeps its id: kill and re-create it in place
    p.dead[f] = FANOUT
    p.born[f] = FANOUT
    p.remap(
        {
            PortRef(f, "in"): PortRef(f, "in"),
            PortRef(f, "out1"): PortRef(f, "out2"),
            PortRef(f, "out2"): PortRef(f, "out1"),
        }
    )
    return p.rewrite()


def _plan_coassoc(g: ZGraph, m: Match) -> Rewrite:
    a, b = m.node("top"), m.node("lower")
    lean = m.case or "left"
    port = "out1" if lean == "left" else "out2"
    _require(_is(g, a, FO) and _spine(g, a, port, FO, "in") == b, m, f"top.{port} does not feed lower")
    p = _Plan(g)
    p.dead.update({a: FANOUT, b: FANOUT})
    p.born.update({a: FANOUT, b: FANOUT})
    link = g.arrow_from(a, port)
    if lean == "left":
        # A(x; B(p, q), z)  ->  A(x; p, B(q, z))
        mp = {
            PortRef(a, "in"): PortRef(a, "in"),
            PortRef(b, "out1"): PortRef(a, "out1"),
            PortRef(b, "out2"): PortRef(b, "out1"),
            PortRef(a, "out2"): PortRef(b, "out2"),
        }
        p.created.append(Arrow(PortRef(a, "out2"), PortRef(b, "in")))
    else:
        # A(x; p, B(q, z))  ->  A(x; B(p, q), z)
        mp = {
            PortRef(a, "in"): PortRef(a, "in"),
            PortRef(a, "out1"): PortRef(b, "out1"),
            PortRef(b, "out1"): PortRef(b, "out2"),
            PortRef(b, "out2"): PortRef(a, "out2"),
        }
        p.created.append(Arrow(PortRef(a, "out1"), PortRef(b, "in")))
    p.remap(mp, drop=[link])
    return p.rewrite()


def _plan_fanin(g: ZGraph, m: Match) -> Rewrite:
    f, o = m.node("fanin"), m.node("fanout")
    _require(_is(g, f, FI) and _spine(g, f, "out", FO, "in") == o, m, "FI.out does not feed FO")
    p = _Plan(g)
    p.kill(f, o)
    p.splice({PortRef(f, "in1"): PortRef(o, "out2"), PortRef(f, "in2"): PortRef(o, "out1")})
    return p.rewrite()


def _plan_dist(g: ZGraph, m: Match) -> Rewrite:
    h, f = m.node("half"), m.node("fanout")
    tag = ZP if m.kind is MoveKind.DIST_PLUS else ZM
    _require(_is(g, h, tag) and _spine(g, h, "0'", FO, "in") == f, m, f"{tag}.0' does not feed FO")
    kind = g.kind(h)
    n = kind.arity
    p = _Plan(g)
    p.kill(h, f)
    c1, c2 = p.new(kind), p.new(kind)
    mp: dict[PortRef, End] = {
        PortRef(f, "out1"): PortRef(c1, "0'"),
        PortRef(f, "out2"): PortRef(c2, "0'"),
    }
    if tag == ZP:
        for port in kind.in_ports:
            fo = p.new(FANOUT)
            mp[PortRef(h, port)] = PortRef(fo, "in")
            p.created.append(Arrow(PortRef(fo, "out1"), PortRef(c1, port)))
            p.created.append(Arrow(PortRef(fo, "out2"), PortRef(c2, port)))
    else:
        fo = p.new(FANOUT)
        mp[PortRef(h, "0")] = PortRef(fo, "in")
        p.created.append(Arrow(PortRef(fo, "out1"), PortRef(c1, "0")))
        p.created.append(Arrow(PortRef(fo, "out2"), PortRef(c2, "0")))
        for i in range(1, n + 1):
            fi = p.new(FANIN)
            mp[PortRef(h, var_port(i))] = PortRef(fi, "out")
            # in1 from the second copy, so the crosswise FAN-IN restores copies
            p.created.append(Arrow(PortRef(c2, var_port(i)), PortRef(fi, "in1")))
            p.created.append(Arrow(PortRef(c1, var_port(i)), PortRef(fi, "in2")))
    p.remap(mp, drop=[g.arrow_from(h, "0'")])
    return p.rewrite()


def _plan_prune_zp(g: ZGraph, m: Match) -> Rewrite:
    h, t = m.node("half"), m.node("term")
    _require(_is(g, h, ZP) and _spine(g, h, "0'", T, "in") == t, m, "ZP.0' does not feed T")
    p = _Plan(g)
    p.kill(h, t)
    mp: dict[PortRef, End] = {}
    for port in g.kind(h).in_ports:
        mp[PortRef(h, port)] = PortRef(p.new(TERM), "in")
    p.remap(mp, drop=[g.arrow_from(h, "0'")])
    return p.rewrite()


def _plan_prune_zm(g: ZGraph, m: Match) -> Rewrite:
    h, t = m.node("half"), m.node("term")
    _require(_is(g, h, ZM) and _spine(g, h, "0'", T, "in") == t, m, "ZM.0' does not feed T")
    p = _Plan(g)
    p.kill(h, t)
    body = g.arrow_into(h, "0")
    drop = [g.arrow_from(h, "0'")]
    mp: dict[PortRef, End] = {}
    if isinstance(body.tail, PortRef) and body.tail.node == h:
        # a variable wired straight to the body closes into a loop
        drop.append(body)
        p.loops += 1
    else:
        mp[PortRef(h, "0")] = PortRef(p.new(TERM), "in")
    for i in range(1, g.kind(h).arity + 1):
        ref = PortRef(h, var_port(i))
        if body.tail != ref:
            mp[ref] = Free(p.label())
    p.remap(mp, drop=drop)
    return p.rewrite()


def _plan_prune_fo(g: ZGraph, m: Match) -> Rewrite:
    f, t = m.node("fanout"), m.node("term")
    port = m.case
    _require(_is(g, f, FO) and port in ("out1", "out2"), m, "expected a fanout")
    _require(_spine(g, f, port, T, "in") == t, m, f"FO.{port} does not feed T")
    other = "out2" if port == "out1" else "out1"
    p = _Plan(g)
    p.kill(f, t)
    p.splice({PortRef(f, "in"): PortRef(f, other)})
    return p.rewrite()


def _plan_prune_fi(g: ZGraph, m: Match) -> Rewrite:
    f, t = m.node("fanin"), m.node("term")
    _require(_is(g, f, FI) and _spine(g, f, "out", T, "in") == t, m, "FI.out does not feed T")
    p = _Plan(g)
    p.kill(f, t)
    mp = {
        PortRef(f, "in1"): PortRef(p.new(TERM), "in"),
        PortRef(f, "in2"): PortRef(p.new(TERM), "in"),
    }
    p.remap(mp, drop=[g.arrow_from(f, "out")])
    return p.rewrite()


def _plan_prune_arrow(g: ZGraph, m: Match) -> Rewrite:
    t = m.node("term")
    _require(_is(g, t, T), m, "expected a termination")
    a = g.arrow_into(t, "in")
    _require(a is not None and isinstance(a.tail, Free), m, "arrow into T has an attached tail")
    p = _Plan(g)
    p.kill(t)
    p.remap({}, drop=[a])
    p.loops += 1
    return p.rewrite()


_PLANNERS: dict[MoveKind, Callable[[ZGraph, Match], Rewrite]] = {
    MoveKind.CLICK: _plan_click,
    MoveKind.ZIP: _plan_zip,
    MoveKind.TOWER_MERGE: _plan_merge,
    MoveKind.TOWER_SPLIT: _plan_split,
    MoveKind.CO_COMM: _plan_cocomm,
    MoveKind.CO_ASSOC: _plan_coassoc,
    MoveKind.FAN_IN: _plan_fanin,
    MoveKind.DIST_PLUS: _plan_dist,
    MoveKind.DIST_MINUS: _plan_dist,
    MoveKind.PRUNE_ZP: _plan_prune_zp,
    MoveKind.PRUNE_ZM: _plan_prune_zm,
    MoveKind.PRUNE_FO: _plan_prune_fo,
    MoveKind.PRUNE_FI: _plan_prune_fi,
    MoveKind.PRUNE_ARROW: _plan_prune_arrow,
}


def plan(g: ZGraph, m: Match) -> Rewrite:
    if m.is_inverse:
        return m.undo
    try:
        return _PLANNERS[m.kind](g, m)
    except KeyError as exc:
        raise MoveError(f"stale match {m.summary()}: node {exc} missing") from None


def apply_with_inverse(g: ZGraph, m: Match) -> tuple[ZGraph, Match]:
    """Apply ``m`` and return the result with a match that undoes it."""
    rw = plan(g, m)
    out = execute(g, rw)
    if m.is_inverse:
        back = Match(m.kind, m.roles, m.case, m.params)
    else:
        back = Match(m.kind, m.roles, m.case, m.params, undo=rw.inverse())
    return out, back


def apply_move(g: ZGraph, m: Match) -> ZGraph:
    return execute(g, plan(g, m))


def reverse(g: ZGraph, m: Match) -> ZGraph:
    """Run a move backwards; ``m`` is the inverse match from :func:`apply_with_inverse`."""
    if not m.is_inverse:
        raise MoveError("reverse needs an inverse match carrying its undo record")
    return execute(g, m.undo)


# per-move entry points -------------------------------------------------------


def _entry(*kinds: MoveKind):
    def run(g: ZGraph, m: Match) -> ZGraph:
        if m.kind not in kinds:
            raise MoveError(f"expected a {'/'.join(k.value for k in kinds)} match, got {m.kind.value}")
        return apply_move(g, m)

    return run


click = _entry(MoveKind.CLICK)
zip_move = _entry(MoveKind.ZIP)
co_comm = _entry(MoveKind.CO_COMM)
co_assoc = _entry(MoveKind.CO_ASSOC)
fan_in_cross = _entry(MoveKind.FAN_IN)
dist = _entry(MoveKind.DIST_PLUS, MoveKind.DIST_MINUS)
prune = _entry(*PRUNES)


def tower(g: ZGraph, m: Match, direction: str = "merge") -> ZGraph:
    want = MoveKind.TOWER_MERGE if direction == "merge" else MoveKind.TOWER_SPLIT
    if direction not in ("merge", "split"):
        raise ValueError(f"direction must be merge or split, not {direction!r}")
    if m.kind is not want:
        raise MoveError(f"expected a {want.value} match for {direction}")
    return apply_move(g, m)


def touched_nodes(m: Match) -> set[int]:
    return {n for _, n in m.roles}
