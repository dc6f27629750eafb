"""Zipper graph data model.

A :class:`ZGraph` is a finite multigraph of zipper-logic nodes, arrows and
loops.  Nodes are identified by integers; ports carry the symbolic labels
``0``, ``0'``, ``1`` .. ``n`` and ``1'`` .. ``n'`` used for half-zippers and
zippers, and ``in``/``out1``/``out2`` style names for the trivalent and
univalent nodes.  An arrow end is either attached to a port or free; free
ends carry a label so the boundary of a graph can be tracked through
rewrites.

Graphs are treated as immutable values.  All rewriting goes through
:class:`GraphEditor`, which works on a private copy and produces a new graph.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Union

IN = "in"
OUT = "out"

ZM = "ZM"
ZP = "ZP"
Z = "Z"
FO = "FO"
FI = "FI"
T = "T"

HALF_ZIPPERS = (ZM, ZP)
ARITY_KINDS = (ZM, ZP, Z)
ALL_TAGS = (ZM, ZP, Z, FO, FI, T)


def var_port(i: int) -> str:
    return str(i)


def arg_port(i: int) -> str:
    return f"{i}'"


@dataclass(frozen=True, order=True)
class NodeKind:
    tag: str
    arity: int = 0

    def __post_init__(self):
        if self.tag not in ALL_TAGS:
            raise ValueError(f"unknown node kind {self.tag!r}")
        if self.tag in ARITY_KINDS:
            if self.arity < 1:
                raise ValueError(f"{self.tag} needs arity >= 1, got {self.arity}")
        elif self.arity != 0:
            raise ValueError(f"{self.tag} takes no arity")

    @property
    def in_ports(self) -> tuple[str, ...]:
        n = self.arity
        if self.tag == ZM:
            return ("0",)
        if self.tag in (ZP, Z):
            return ("0",) + tuple(arg_port(i) for i in range(1, n + 1))
        if self.tag == FO:
            return ("in",)
        if self.tag == FI:
            return ("in1", "in2")
        return ("in",)

    @property
    def out_ports(self) -> tuple[str, ...]:
        n = self.arity
        if self.tag in (ZM, Z):
            return ("0'",) + tuple(var_port(i) for i in range(1, n + 1))
        if self.tag == ZP:
            return ("0'",)
        if self.tag == FO:
            return ("out1", "out2")
        if self.tag == FI:
            return ("out",)
        return ()

    @property
    def ports(self) -> tuple[str, ...]:
        return self.in_ports + self.out_ports

    def direction(self, port: str) -> str | None:
        if port in self.in_ports:
            return IN
        if port in self.out_ports:
            return OUT
        return None

    def __str__(self):
        return f"{self.tag}{self.arity}" if self.tag in ARITY_KINDS else self.tag


def zm(n: int) -> NodeKind:
    return NodeKind(ZM, n)


def zp(n: int) -> NodeKind:
    return NodeKind(ZP, n)


def zipper(n: int) -> NodeKind:
    return NodeKind(Z, n)


FANOUT = NodeKind(FO)
FANIN = NodeKind(FI)
TERM = NodeKind(T)


@dataclass(frozen=True, order=True)
class PortRef:
    node: int
    port: str

    def __str__(self):
        return f"{self.node}.{self.port}"


@dataclass(frozen=True, order=True)
class Free:
    label: str

    def __str__(self):
        return f"~{self.label}"


End = Union[PortRef, Free]


@dataclass(frozen=True)
class Arrow:
    tail: End
    head: End

    @property
    def is_free(self) -> bool:
        return isinstance(self.tail, Free) and isinstance(self.head, Free)

    def __str__(self):
        return f"{self.tail}->{self.head}"


def _end_key(e: End):
    return (0, e.node, e.port) if isinstance(e, PortRef) else (1, 0, e.label)


def arrow_key(a: Arrow):
    return (_end_key(a.tail), _end_key(a.head))


@dataclass(frozen=True)
class Diagnostic:
    invariant: str
    subject: str
    message: str

    def __str__(self):
        return f"{self.invariant}: {self.subject}: {self.message}"


class ZGraph:
    """Immutable zipper graph: nodes and arrows, plus a count of closed loops."""

    __slots__ = ("_nodes", "_arrows", "_loops", "_by_tail", "_by_head")

    def __init__(
        self,
        nodes: Mapping[int, NodeKind] | None = None,
        arrows: Iterable[Arrow] = (),
        loops: int = 0,
    ):
        self._nodes = dict(nodes or {})
        self._arrows = tuple(sorted(arrows, key=arrow_key))
        self._loops = int(loops)
        self._by_tail: dict[PortRef, Arrow] = {}
        self._by_head: dict[PortRef, Arrow] = {}
        for a in self._arrows:
            if isinstance(a.tail, PortRef):
                self._by_tail.setdefault(a.tail, a)
            if isinstance(a.head, PortRef):
                self._by_head.setdefault(a.head, a)

    @property
    def nodes(self) -> Mapping[int, NodeKind]:
        return dict(self._nodes)

    @property
    def arrows(self) -> tuple[Arrow, ...]:
        return self._arrows

    @property
    def loop_count(self) -> int:
        return self._loops

    def kind(self, node: int) -> NodeKind:
        return self._nodes[node]

    def node_ids(self) -> list[int]:
        return sorted(self._nodes)

    def nodes_of(self, tag: str) -> list[int]:
        return sorted(i for i, k in self._nodes.items() if k.tag == tag)

    def __len__(self):
        return len(self._nodes)

    def __contains__(self, node: int):
        return node in self._nodes

    def arrow_from(self, node: int, port: str) -> Arrow | None:
        """The arrow whose tail sits on ``node.port`` (an out port)."""
        return self._by_tail.get(PortRef(node, port))

    def arrow_into(self, node: int, port: str) -> Arrow | None:
        """The arrow whose head sits on ``node.port`` (an in port)."""
        return self._by_head.get(PortRef(node, port))

    def arrow_at(self, ref: PortRef) -> Arrow | None:
        kind = self._nodes[ref.node]
        if kind.direction(ref.port) == IN:
            return self._by_head.get(ref)
        return self._by_tail.get(ref)

    def free_ends(self) -> list[tuple[str, str]]:
        """Sorted (direction, label) pairs; ``in`` is a free tail, ``out`` a free head."""
        ends = []
        for a in self._arrows:
            if isinstance(a.tail, Free):
                ends.append((IN, a.tail.label))
            if isinstance(a.head, Free):
                ends.append((OUT, a.head.label))
        return sorted(ends)

    def labels(self) -> set[str]:
        return {lab for _, lab in self.free_ends()}

    def free_out_arrows(self) -> list[Arrow]:
        return [a for a in self._arrows if isinstance(a.head, Free)]

    def edit(self) -> "GraphEditor":
        return GraphEditor(self)

    def with_loops(self, loops: int) -> "ZGraph":
        return ZGraph(self._nodes, self._arrows, loops)

    def __eq__(self, other):
        if not isinstance(other, ZGraph):
            return NotImplemented
        return (
            self._nodes == other._nodes
            and self._arrows == other._arrows
            and self._loops == other._loops
        )

    def __hash__(self):
        return hash((tuple(sorted(self._nodes.items())), self._arrows, self._loops))

    def __repr__(self):
        return f"ZGraph({len(self._nodes)} nodes, {len(self._arrows)} arrows, {self._loops} loops)"


class GraphEditor:
    """Mutable scratch copy of a graph used to build rewrites."""

    def __init__(self, g: ZGraph | None = None):
        g = g if g is not None else ZGraph()
        self.nodes: dict[int, NodeKind] = g.nodes
        self.loops = g.loop_count
        self.by_tail: dict[PortRef, Arrow] = {}
        self.by_head: dict[PortRef, Arrow] = {}
        self.free: list[Arrow] = []
        for a in g.arrows:
            self._index(a)
        self._next = max(self.nodes, default=-1) + 1
        self._labels = g.labels()
        self._fresh = itertools.count()

    def _index(self, a: Arrow):
        if isinstance(a.tail, PortRef):
            self.by_tail[a.tail] = a
        if isinstance(a.head, PortRef):
            self.by_head[a.head] = a
        if a.is_free:
            self.free.append(a)

    def add_node(self, kind: NodeKind) -> int:
        nid = self._next
        self._next += 1
        self.nodes[nid] = kind
        return nid

    def fresh_label(self, prefix: str = "f") -> str:
        while True:
            lab = f"{prefix}{next(self._fresh)}"
            if lab not in self._labels:
                self._labels.add(lab)
                return lab

    def into(self, node: int, port: str) -> Arrow:
        return self.by_head[PortRef(node, port)]

    def out_of(self, node: int, port: str) -> Arrow:
        return self.by_tail[PortRef(node, port)]

    def remove_arrow(self, a: Arrow):
        if isinstance(a.tail, PortRef):
            del self.by_tail[a.tail]
        if isinstance(a.head, PortRef):
            del self.by_head[a.head]
        if a.is_free:
            self.free.remove(a)

    def add_arrow(self, tail: End, head: End) -> Arrow:
        a = Arrow(tail, head)
        self._index(a)
        return a

    def incident(self, node: int) -> list[Arrow]:
        kind = self.nodes[node]
        seen = []
        for p in kind.in_ports:
            a = self.by_head.get(PortRef(node, p))
            if a is not None and a not in seen:
                seen.append(a)
        for p in kind.out_ports:
            a = self.by_tail.get(PortRef(node, p))
            if a is not None and a not in seen:
                seen.append(a)
        return seen

    def remove_node(self, node: int):
        """Remove a node; its incident arrows must already be detached."""
        kind = self.nodes.pop(node)
        for p in kind.in_ports:
            assert PortRef(node, p) not in self.by_head, f"{node}.{p} still attached"
        for p in kind.out_ports:
            assert PortRef(node, p) not in self.by_tail, f"{node}.{p} still attached"

    def retarget_head(self, a: Arrow, head: End) -> Arrow:
        self.remove_arrow(a)
        return self.add_arrow(a.tail, head)

    def retarget_tail(self, a: Arrow, tail: End) -> Arrow:
        self.remove_arrow(a)
        return self.add_arrow(tail, a.head)

    def freeze(self) -> ZGraph:
        arrows = set(self.by_tail.values()) | set(self.by_head.values()) | set(self.free)
        return ZGraph(self.nodes, arrows, self.loops)


def validate(g: ZGraph) -> list[Diagnostic]:
    """Check the zipper-graph invariants; an empty list means ``g`` is valid."""
    out: list[Diagnostic] = []
    if g.loop_count < 0:
        out.append(Diagnostic("finiteness", "loops", f"negative loop count {g.loop_count}"))
    seen: dict[PortRef, Arrow] = {}
    labels: dict[tuple[str, str], Arrow] = {}
    for a in g.arrows:
        for end, want in ((a.tail, OUT), (a.head, IN)):
            if isinstance(end, Free):
                key = ("tail" if want == OUT else "head", end.label)
                if key in labels:
                    out.append(Diagnostic("free-label", str(a), f"label {end.label!r} reused"))
                labels[key] = a
                continue
            if end.node not in g:
                out.append(Diagnostic("dangling", str(a), f"node {end.node} does not exist"))
                continue
            kind = g.kind(end.node)
            d = kind.direction(end.port)
            if d is None:
                out.append(Diagnostic("bad-port", str(a), f"{kind} has no port {end.port!r}"))
                continue
            if d != want:
                out.append(
                    Diagnostic("direction", str(a), f"{end} is an {d} port used as {want}")
                )
                continue
            if end in seen:
                out.append(
                    Diagnostic("port-uniqueness", str(end), f"port used by {seen[end]} and {a}")
                )
            else:
                seen[end] = a
    for ref, direction in iter_port_refs(g):
        if ref not in seen:
            out.append(Diagnostic("unattached", str(ref), f"{direction} port has no arrow"))
    return out


def strip_loops(g: ZGraph) -> tuple[ZGraph, int]:
    return g.with_loops(0), g.loop_count


def components(g: ZGraph) -> list[ZGraph]:
    """Split ``g`` into arrow-connected pieces; each loop is its own piece."""
    parent = {n: n for n in g.node_ids()}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a in g.arrows:
        if isinstance(a.tail, PortRef) and isinstance(a.head, PortRef):
            ra, rb = find(a.tail.node), find(a.head.node)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[int]] = {}
    for n in g.node_ids():
        groups.setdefault(find(n), []).append(n)
    pieces: list[ZGraph] = []
    kinds = g.nodes
    for root in sorted(groups):
        members = set(groups[root])
        arrows = [
            a
            for a in g.arrows
            if (isinstance(a.tail, PortRef) and a.tail.node in members)
            or (isinstance(a.head, PortRef) and a.head.node in members)
        ]
        pieces.append(ZGraph({n: kinds[n] for n in members}, arrows))
    for a in g.arrows:
        if a.is_free:
            pieces.append(ZGraph({}, [a]))
    pieces.extend(ZGraph(loops=1) for _ in range(g.loop_count))
    return pieces


def disjoint_union(*graphs: ZGraph) -> ZGraph:
    """Union with node ids shifted apart; free labels are kept as given."""
    nodes: dict[int, NodeKind] = {}
    arrows: list[Arrow] = []
    loops = 0
    offset = 0

    def shift(e: End, k: int) -> End:
        return PortRef(e.node + k, e.port) if isinstance(e, PortRef) else e

    for g in graphs:
        for n, kind in g.nodes.items():
            nodes[n + offset] = kind
        arrows.extend(Arrow(shift(a.tail, offset), shift(a.head, offset)) for a in g.arrows)
        loops += g.loop_count
        offset += max(g.nodes, default=-1) + 1
    return ZGraph(nodes, arrows, loops)


def relabel_free(g: ZGraph, mapping: Mapping[str, str]) -> ZGraph:
    def ren(e: End) -> End:
        return Free(mapping.get(e.label, e.label)) if isinstance(e, Free) else e

    return ZGraph(g.nodes, [Arrow(ren(a.tail), ren(a.head)) for a in g.arrows], g.loop_count)


def renumber(g: ZGraph) -> ZGraph:
    """Compact node ids to 0..n-1 preserving their order."""
    order = {n: i for i, n in enumerate(g.node_ids())}

    def ren(e: End) -> End:
        return PortRef(order[e.node], e.port) if isinstance(e, PortRef) else e

    return ZGraph(
        {order[n]: k for n, k in g.nodes.items()},
        [Arrow(ren(a.tail), ren(a.head)) for a in g.arrows],
        g.loop_count,
    )


def iter_port_refs(g: ZGraph) -> Iterator[tuple[PortRef, str]]:
    for n in g.node_ids():
        kind = g.kind(n)
        for p in kind.in_ports:
            yield PortRef(n, p), IN
        for p in kind.out_ports:
            yield PortRef(n, p), OUT
