"""Compiling SKI terms into zipper combinator graphs and reading them back.

The three base graphs are the lambda terms ``λx.x``, ``λxy.x`` and
``λxyz.(xz)(yz)`` drawn with a (-n) half-zipper for the abstractions and
(+1) half-zippers for the applications.  A variable that is never used is
capped by a termination node; the one variable used twice (``z`` in S) goes
through a single fanout.
"""

from __future__ import annotations

from .graph import (
    FANOUT,
    FI,
    FO,
    TERM,
    ZM,
    ZP,
    Free,
    GraphEditor,
    PortRef,
    T,
    Z,
    ZGraph,
    zm,
    zp,
)
from .terms import App, I, K, S, Term, rewind

OUT_LABEL = "out"


class ReadbackError(ValueError):
    """The graph is not shaped like a compiled combinator term."""

    def __init__(self, message: str, node: int | None = None):
        super().__init__(message if node is None else f"node {node}: {message}")
        self.node = node


def _emit_atom(ed: GraphEditor, name: str) -> PortRef:
    """Add one base combinator; return its out port."""
    if name == "I":
        m = ed.add_node(zm(1))
        ed.add_arrow(PortRef(m, "1"), PortRef(m, "0"))
        return PortRef(m, "0'")
    if name == "K":
        m = ed.add_node(zm(2))
        t = ed.add_node(TERM)
        ed.add_arrow(PortRef(m, "1"), PortRef(m, "0"))
        ed.add_arrow(PortRef(m, "2"), PortRef(t, "in"))
        return PortRef(m, "0'")
    m = ed.add_node(zm(3))
    f = ed.add_node(FANOUT)
    xz = ed.add_node(zp(1))
    yz = ed.add_node(zp(1))
    top = ed.add_node(zp(1))
    ed.add_arrow(PortRef(m, "3"), PortRef(f, "in"))
    ed.add_arrow(PortRef(m, "1"), PortRef(xz, "0"))
    ed.add_arrow(PortRef(f, "out1"), PortRef(xz, "1'"))
    ed.add_arrow(PortRef(m, "2"), PortRef(yz, "0"))
    ed.add_arrow(PortRef(f, "out2"), PortRef(yz, "1'"))
    ed.add_arrow(PortRef(xz, "0'"), PortRef(top, "0"))
    ed.add_arrow(PortRef(yz, "0'"), PortRef(top, "1'"))
    ed.add_arrow(PortRef(top, "0'"), PortRef(m, "0"))
    return PortRef(m, "0'")


def _emit(ed: GraphEditor, t: Term) -> PortRef:
    # iterative over the application spine, recursive into arguments
    stack: list[Term] = []
    while isinstance(t, App):
        stack.append(t.argument)
        t = t.function
    out = _emit_atom(ed, t.name)
    for arg in reversed(stack):
        a = ed.add_node(zp(1))
        ed.add_arrow(out, PortRef(a, "0"))
        ed.add_arrow(_emit(ed, arg), PortRef(a, "1'"))
        out = PortRef(a, "0'")
    return out


def compile_term(t: Term, out_label: str = OUT_LABEL) -> ZGraph:
    """Zipper combinator graph of ``t`` with one free out end ``out_label``."""
    ed = GraphEditor()
    root = _emit(ed, t)
    ed.add_arrow(root, Free(out_label))
    return ed.freeze()


def node_count(t: Term) -> int:
    """Nodes in ``compile_term(t)``: one per application, 1/2/5 per I/K/S."""
    from .terms import counts

    c = counts(t)
    return c["App"] + c["I"] + 2 * c["K"] + 5 * c["S"]


# ---------------------------------------------------------------- readback


class _Reader:
    def __init__(self, g: ZGraph):
        self.g = g
        self.seen: set[int] = set()

    def visit(self, n: int):
        if n in self.seen:
            raise ReadbackError("shared node", n)
        self.seen.add(n)

    def source(self, n: int, port: str) -> PortRef:
        a = self.g.arrow_into(n, port)
        if a is None or not isinstance(a.tail, PortRef):
            raise ReadbackError(f"port {port} has no attached source", n)
        return a.tail

    def term(self, ref: PortRef) -> Term:
        g = self.g
        n = ref.node
        kind = g.kind(n)
        if ref.port != "0'" or kind.tag not in (ZM, ZP):
            raise ReadbackError(f"unexpected {kind} output {ref.port}", n)
        self.visit(n)
        if kind.tag == ZP:
            head = self.term(self.source(n, "0"))
            args = [self.term(self.source(n, f"{i}'")) for i in range(1, kind.arity + 1)]
            return rewind(head, args)
        return self.combinator(n)

    def var_use(self, m: int, i: int):
        """Where variable ``i`` of abstraction ``m`` goes: a list of in ports,
        or the string "T" when it is discarded."""
        a = self.g.arrow_from(m, str(i))
        if a is None or not isinstance(a.head, PortRef):
            raise ReadbackError(f"variable {i} is not attached", m)
        h = a.head
        kind = self.g.kind(h.node)
        if kind.tag == T:
            self.visit(h.node)
            return "T"
        if kind.tag == FO:
            self.visit(h.node)
            outs = []
            for p in ("out1", "out2"):
                b = self.g.arrow_from(h.node, p)
                if b is None or not isinstance(b.head, PortRef):
                    raise ReadbackError("fanout branch is not attached", h.node)
                outs.append(b.head)
            return outs
        return [h]

    def body(self, ref: PortRef, m: int, uses: dict[PortRef, int]):
        """Body of abstraction ``m`` as a tree of ("app", f, x) / ("var", i)."""
        g = self.g
        n = ref.node
        if n == m:
            return None
        kind = g.kind(n)
        if kind.tag == FO:
            a = g.arrow_into(n, "in")
            if isinstance(a.tail, PortRef) and a.tail.node == m:
                return None
        if kind.tag != ZP or ref.port != "0'":
            raise ReadbackError(f"{kind} inside a combinator body", n)
        self.visit(n)
        parts = []
        for port in ["0"] + [f"{i}'" for i in range(1, kind.arity + 1)]:
            here = PortRef(n, port)
            if here in uses:
                parts.append(("var", uses[here]))
            else:
                sub = self.body(self.source(n, port), m, uses)
                if sub is None:
                    raise ReadbackError("variable reached outside its use sites", n)
                parts.append(sub)
        tree = parts[0]
        for p in parts[1:]:
            tree = ("app", tree, p)
        return tree

    def combinator(self, m: int) -> Term:
        g = self.g
        n = g.kind(m).arity
        uses: dict[PortRef, int] = {}
        discarded = set()
        for i in range(1, n + 1):
            u = self.var_use(m, i)
            if u == "T":
                discarded.add(i)
                continue
            for ref in u:
                if ref in uses:
                    raise ReadbackError("variable ports collide", m)
                uses[ref] = i
        root = PortRef(m, "0")
        if root in uses:
            tree = ("var", uses[root])
        else:
            tree = self.body(self.source(m, "0"), m, uses)
            if tree is None:
                raise ReadbackError("body loops back without a variable", m)
        x, y, z = ("var", 1), ("var", 2), ("var", 3)
        if n == 1 and tree == x and not discarded:
            return I
        if n == 2 and tree == x and discarded == {2}:
            return K
        if n == 3 and tree == ("app", ("app", x, z), ("app", y, z)) and not discarded:
            fo = g.arrow_from(m, "3").head.node
            if g.kind(fo).tag != FO:
                raise ReadbackError("S must share its third variable through a fanout", m)
            return S
        raise ReadbackError(f"abstraction of arity {n} is not S, K or I", m)


def readback(g: ZGraph) -> Term:
    """Inverse of :func:`compile_term` on combinator-shaped graphs.

    (+n) half-zippers are read as left-nested applications, so graphs whose
    application spines were merged by TOWER moves read back the same way.
    Loops are ignored.  Raises :class:`ReadbackError` naming the first node
    that does not fit.
    """
    outs = g.free_out_arrows()
    if len(outs) != 1:
        raise ReadbackError(f"expected exactly one free out end, found {len(outs)}")
    tails = [a for a in g.arrows if isinstance(a.tail, Free)]
    if tails:
        raise ReadbackError(f"graph has {len(tails)} free in ends")
    for n in g.node_ids():
        if g.kind(n).tag in (Z, FI):
            raise ReadbackError(f"{g.kind(n)} never occurs in a combinator graph", n)
    root = outs[0].tail
    if not isinstance(root, PortRef):
        raise ReadbackError("the out arrow is a bare arrow")
    r = _Reader(g)
    t = r.term(root)
    extra = sorted(set(g.node_ids()) - r.seen)
    if extra:
        raise ReadbackError("unreachable material left over", extra[0])
    return t


def split_towers(g: ZGraph) -> ZGraph:
    """Split every (+n) half-zipper with n > 1 into a chain of (+1) nodes."""
    from .moves import Match, MoveKind, apply_move

    while True:
        big = [n for n in g.nodes_of(ZP) if g.kind(n).arity > 1]
        if not big:
            return g
        n = big[0]
        g = apply_move(
            g,
            Match(MoveKind.TOWER_SPLIT, (("node", n),), "plus", (("point", g.kind(n).arity - 1),)),
        )
