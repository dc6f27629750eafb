"""The ``.zg`` line format and DOT export.

One statement per line, ``#`` starts a comment::

    ZM n e0 e0' e1 ... en        (-n) half-zipper
    ZP n e0 e1' ... en' e0'      (+n) half-zipper
    Z n e0 e1' ... en' e0' e1 ... en
    FO ein eout1 eout2
    FI ein1 ein2 eout
    T ein
    ARROW etail ehead
    LOOP

A label used once in a head (in port) position and once in a tail (out
port) position is an internal arrow; a label used once is a free end.
"""

from __future__ import annotations

import hashlib

from .graph import (
    FANIN,
    FANOUT,
    FI,
    FO,
    IN,
    OUT,
    TERM,
    ZM,
    ZP,
    Arrow,
    Free,
    NodeKind,
    PortRef,
    T,
    Z,
    ZGraph,
)


class ZgSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


def port_order(kind: NodeKind) -> list[tuple[str, str]]:
    """(port, direction) in serialized token order."""
    n = kind.arity
    if kind.tag == ZM:
        return [("0", IN), ("0'", OUT)] + [(str(i), OUT) for i in range(1, n + 1)]
    if kind.tag == ZP:
        return [("0", IN)] + [(f"{i}'", IN) for i in range(1, n + 1)] + [("0'", OUT)]
    if kind.tag == Z:
        return (
            [("0", IN)]
            + [(f"{i}'", IN) for i in range(1, n + 1)]
            + [("0'", OUT)]
            + [(str(i), OUT) for i in range(1, n + 1)]
        )
    if kind.tag == FO:
        return [("in", IN), ("out1", OUT), ("out2", OUT)]
    if kind.tag == FI:
        return [("in1", IN), ("in2", IN), ("out", OUT)]
    return [("in", IN)]


_FIXED = {"FO": FANOUT, "FI": FANIN, "T": TERM}


def _tokens(line: str):
    """Yield (column, token) pairs, stopping at a comment."""
    i = 0
    while i < len(line):
        if line[i] == "#":
            return
        if line[i].isspace():
            i += 1
            continue
        j = i
        while j < len(line) and not line[j].isspace() and line[j] != "#":
            j += 1
        yield i + 1, line[i:j]
        i = j


def parse_zg(text: str) -> ZGraph:
    nodes: dict[int, NodeKind] = {}
    heads: dict[str, tuple[PortRef, int, int]] = {}
    tails: dict[str, tuple[PortRef, int, int]] = {}
    standalone: list[tuple[str, str, int, int]] = []
    loops = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        toks = list(_tokens(line))
        if not toks:
            continue
        col, word = toks[0]
        if word == "LOOP":
            if len(toks) != 1:
                raise ZgSyntaxError("LOOP takes no arguments", lineno, toks[1][0])
            loops += 1
            continue
        if word == "ARROW":
            if len(toks) != 3:
                raise ZgSyntaxError("ARROW takes a tail and a head label", lineno, col)
            standalone.append((toks[1][1], toks[2][1], lineno, toks[1][0]))
            continue
        if word in (ZM, ZP, Z):
            if len(toks) < 2:
                raise ZgSyntaxError(f"{word} needs an arity", lineno, col)
            try:
                n = int(toks[1][1])
            except ValueError:
                raise ZgSyntaxError(f"bad arity {toks[1][1]!r}", lineno, toks[1][0]) from None
            if n < 1:
                raise ZgSyntaxError(f"arity must be >= 1, got {n}", lineno, toks[1][0])
            kind = NodeKind(word, n)
            labels = toks[2:]
        elif word in _FIXED:
            kind = _FIXED[word]
            labels = toks[1:]
        else:
            raise ZgSyntaxError(f"unknown statement {word!r}", lineno, col)
        order = port_order(kind)
        if len(labels) != len(order):
            raise ZgSyntaxError(
                f"arity error: {kind} expects {len(order)} labels, got {len(labels)}",
                lineno,
                col,
            )
        nid = len(nodes)
        nodes[nid] = kind
        for (port, direction), (lcol, lab) in zip(order, labels):
            table = heads if direction == IN else tails
            if lab in table:
                prev = table[lab]
                where = "head" if direction == IN else "tail"
                raise ZgSyntaxError(
                    f"label {lab!r} used twice in {where} position (first on line {prev[1]})",
                    lineno,
                    lcol,
                )
            table[lab] = (PortRef(nid, port), lineno, lcol)

    arrows: list[Arrow] = []
    for lab in sorted(set(heads) | set(tails)):
        h = heads.get(lab)
        t = tails.get(lab)
        arrows.append(
            Arrow(t[0] if t else Free(lab), h[0] if h else Free(lab))
        )
    seen_free: set[str] = set()
    for tail, head, lineno, col in standalone:
        for lab in (tail, head):
            if lab in heads or lab in tails or lab in seen_free:
                raise ZgSyntaxError(
                    f"invalid direction pairing: ARROW label {lab!r} is used elsewhere",
                    lineno,
                    col,
                )
        if tail == head:
            raise ZgSyntaxError("ARROW needs two distinct labels", lineno, col)
        seen_free.update((tail, head))
        arrows.append(Arrow(Free(tail), Free(head)))
    return ZGraph(nodes, arrows, loops)


def emit_zg(g: ZGraph) -> str:
    """Canonical text: nodes by id, internal arrows named e0, e1, ... in order."""
    free_used: dict[str, int] = {}
    for _, lab in g.free_ends():
        free_used[lab] = free_used.get(lab, 0) + 1
    internal: dict[Arrow, str] = {}
    reserved = set(free_used)
    counter = 0

    def fresh() -> str:
        nonlocal counter
        while True:
            lab = f"e{counter}"
            counter += 1
            if lab not in reserved:
                reserved.add(lab)
                return lab

    # free labels stay as given unless they would pair up with another end
    rename: dict[tuple[int, str], str] = {}

    def free_label(a: Arrow, which: str) -> str:
        end = a.tail if which == "tail" else a.head
        key = (id(a), which)
        if key not in rename:
            lab = end.label
            rename[key] = lab if free_used[lab] == 1 else fresh()
        return rename[key]

    lines = []
    for n in g.node_ids():
        kind = g.kind(n)
        toks = []
        for port, direction in port_order(kind):
            if direction == IN:
                a = g.arrow_into(n, port)
                if a is None:
                    toks.append(fresh())
                elif isinstance(a.tail, Free):
                    toks.append(free_label(a, "tail"))
                else:
                    if a not in internal:
                        internal[a] = fresh()
                    toks.append(internal[a])
            else:
                a = g.arrow_from(n, port)
                if a is None:
                    toks.append(fresh())
                elif isinstance(a.head, Free):
                    toks.append(free_label(a, "head"))
                else:
                    if a not in internal:
                        internal[a] = fresh()
                    toks.append(internal[a])
        head = f"{kind.tag} {kind.arity}" if kind.tag in (ZM, ZP, Z) else kind.tag
        lines.append(" ".join([head] + toks))
    for a in g.arrows:
        if a.is_free:
            lines.append(f"ARROW {free_label(a, 'tail')} {free_label(a, 'head')}")
    lines.extend("LOOP" for _ in range(g.loop_count))
    return "".join(line + "\n" for line in lines)


def fingerprint(g: ZGraph) -> str:
    return hashlib.sha1(emit_zg(g).encode()).hexdigest()[:16]


_SHAPES = {
    ZM: ("invtriangle", "ZM"),
    ZP: ("triangle", "ZP"),
    Z: ("box", "Z"),
    FO: ("circle", "FO"),
    FI: ("doublecircle", "FI"),
    T: ("square", "T"),
}


def emit_dot(g: ZGraph, name: str = "zipper") -> str:
    out = [f"digraph {name} {{", "  rankdir=TB;"]
    for n in g.node_ids():
        kind = g.kind(n)
        shape, lab = _SHAPES[kind.tag]
        text = f"{lab}{kind.arity}" if kind.tag in (ZM, ZP, Z) else lab
        out.append(f'  n{n} [shape={shape}, label="{text}"];')
    pseudo = 0
    for a in g.arrows:
        ends = []
        for end, side in ((a.tail, "tail"), (a.head, "head")):
            if isinstance(end, Free):
                pid = f"free{pseudo}"
                pseudo += 1
                out.append(f'  {pid} [shape=plaintext, label="{end.label}"];')
                ends.append((pid, None))
            else:
                ends.append((f"n{end.node}", end.port))
        (t, tp), (h, hp) = ends
        attrs = []
        if tp is not None:
            attrs.append(f'taillabel="{tp}"')
        if hp is not None:
            attrs.append(f'headlabel="{hp}"')
        suffix = f" [{', '.join(attrs)}]" if attrs else ""
        out.append(f"  {t} -> {h}{suffix};")
    for i in range(g.loop_count):
        out.append(f'  loop{i} [shape=circle, style=dashed, label="loop"];')
    out.append("}")
    return "\n".join(out) + "\n"
