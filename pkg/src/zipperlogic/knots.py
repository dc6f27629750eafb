"""Half-zippers and zippers as oriented tangle diagrams.

Each tooth becomes one crossing.  A (-n) half-zipper is a chain of n
negative crossings whose over strand runs from port 0 to port 0'; tooth i
leaves along its under strand to port i and arrives along a virtual arc.
A (+n) half-zipper is the mirror: n positive crossings, tooth i arrives
from port i' and leaves along a virtual arc.  When a (-n) output feeds a
(+m) input, paired teeth share one virtual arc; CLICK makes those arcs
real, and ZIP is then a sequence of Reidemeister 2 cancellations.

Diagrams are combinatorial: arcs with endpoints plus crossings that name
their four arcs.  An endpoint is a crossing (``x3``), a boundary point
(``:label``), a virtual stub (``~k``) or ``@`` for a closed loop.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .graph import FI, FO, ZM, ZP, Free, PortRef, T, Z, ZGraph, arg_port, var_port

SLOTS = ("oi", "oo", "ui", "uo")
_INCOMING = ("oi", "ui")


class KnotError(ValueError):
    pass


@dataclass(frozen=True)
class Arc:
    id: str
    source: str
    target: str
    real: bool = True


@dataclass(frozen=True)
class Crossing:
    sign: int
    oi: str
    oo: str
    ui: str
    uo: str

    def arcs(self) -> tuple[str, str, str, str]:
        return (self.oi, self.oo, self.ui, self.uo)


def _xid(c: int) -> str:
    return f"x{c}"


def _is_crossing(end: str) -> bool:
    return end.startswith("x") and end[1:].isdigit()


@dataclass(frozen=True)
class TangleDiagram:
    arcs: tuple[Arc, ...]
    crossings: tuple[Crossing, ...]

    def arc(self, aid: str) -> Arc:
        for a in self.arcs:
            if a.id == aid:
                return a
        raise KeyError(aid)

    @property
    def virtual_count(self) -> int:
        return sum(1 for a in self.arcs if not a.real)

    def check(self) -> list[str]:
        """Structural problems, empty when the diagram is well formed."""
        problems = []
        ids = [a.id for a in self.arcs]
        if len(set(ids)) != len(ids):
            problems.append("duplicate arc id")
        arcs = {a.id: a for a in self.arcs}
        used: dict[tuple[str, str], int] = {}
        for k, c in enumerate(self.crossings):
            if c.sign not in (-1, 1):
                problems.append(f"x{k}: sign must be +1 or -1")
            for slot in SLOTS:
                aid = getattr(c, slot)
                a = arcs.get(aid)
                if a is None:
                    problems.append(f"x{k}: unknown arc {aid}")
                    continue
                end = a.target if slot in _INCOMING else a.source
                if end != _xid(k):
                    problems.append(f"x{k}: arc {aid} is not oriented through slot {slot}")
                key = (aid, "target" if slot in _INCOMING else "source")
                used[key] = used.get(key, 0) + 1
        for key, count in used.items():
            if count > 1:
                problems.append(f"arc end {key} used by {count} crossing slots")
        for a in self.arcs:
            for end, side in ((a.source, "source"), (a.target, "target")):
                if _is_crossing(end) and (a.id, side) not in used:
                    problems.append(f"arc {a.id} {side} names {end} but no slot holds it")
        return problems


class _Builder:
    def __init__(self):
        self.crossings: list[dict] = []
        self.arcs: list[Arc] = []

    def crossing(self, sign: int) -> int:
        self.crossings.append({"sign": sign})
        return len(self.crossings) - 1

    def arc(self, source, target, real: bool = True) -> str:
        aid = f"a{len(self.arcs)}"
        ends = []
        for end, incoming in ((source, False), (target, True)):
            if isinstance(end, tuple):
                c, slot = end
                self.crossings[c][slot] = aid
                ends.append(_xid(c))
            else:
                ends.append(end)
        self.arcs.append(Arc(aid, ends[0], ends[1], real))
        return aid

    def build(self) -> TangleDiagram:
        xs = tuple(Crossing(c["sign"], c["oi"], c["oo"], c["ui"], c["uo"]) for c in self.crossings)
        return TangleDiagram(tuple(self.arcs), xs)


def encode(g: ZGraph, strict: bool = True) -> TangleDiagram:
    """Tangle diagram of ``g``.

    Fanout, fanin and termination nodes have no crossing form.  With
    ``strict`` they are rejected; otherwise their ports become boundary
    points named ``:FO3.out1`` and so on, which is enough for drawing.
    """
    b = _Builder()
    slot: dict[PortRef, object] = {}
    minus: dict[int, dict[int, int]] = {}
    plus: dict[int, dict[int, int]] = {}
    for n in g.node_ids():
        kind = g.kind(n)
        if kind.tag in (FO, FI, T):
            if strict:
                raise KnotError(f"node {n} ({kind}) has no knot encoding")
            for p in kind.ports:
                slot[PortRef(n, p)] = f":{kind.tag}{n}.{p}"
            continue
        k = kind.arity
        cs: dict[int, int] = {}
        ds: dict[int, int] = {}
        if kind.tag in (ZM, Z):
            for i in range(k, 0, -1):
                cs[i] = b.crossing(-1)
            for i in range(k, 1, -1):
                b.arc((cs[i], "oo"), (cs[i - 1], "oi"))
            for i in range(1, k + 1):
                slot[PortRef(n, var_port(i))] = (cs[i], "uo")
            slot[PortRef(n, "0")] = (cs[k], "oi")
        if kind.tag in (ZP, Z):
            for i in range(1, k + 1):
                ds[i] = b.crossing(1)
            for i in range(1, k):
                b.arc((ds[i], "oo"), (ds[i + 1], "oi"))
            for i in range(1, k + 1):
                slot[PortRef(n, arg_port(i))] = (ds[i], "ui")
            slot[PortRef(n, "0'")] = (ds[k], "oo")
        if kind.tag == ZM:
            slot[PortRef(n, "0'")] = (cs[1], "oo")
            minus[n] = cs
        elif kind.tag == ZP:
            slot[PortRef(n, "0")] = (ds[1], "oi")
            plus[n] = ds
        else:
            b.arc((cs[1], "oo"), (ds[1], "oi"))
            for i in range(1, k + 1):
                b.arc((ds[i], "uo"), (cs[i], "ui"))

    def end(e):
        return f":{e.label}" if isinstance(e, Free) else slot[e]

    for a in g.arrows:
        b.arc(end(a.tail), end(a.head))
    stubs = 0

    def stub() -> str:
        nonlocal stubs
        stubs += 1
        return f"~{stubs - 1}"

    paired: set[int] = set()
    for n, cs in minus.items():
        h = g.arrow_from(n, "0'").head if g.arrow_from(n, "0'") else None
        ds = plus.get(h.node) if isinstance(h, PortRef) and h.port == "0" else None
        if ds is not None:
            paired.add(h.node)
        for i, c in cs.items():
            if ds is not None and i in ds:
                b.arc((ds[i], "uo"), (c, "ui"), real=False)
            else:
                b.arc(stub(), (c, "ui"), real=False)
        if ds is not None:
            for i, d in ds.items():
                if i not in cs:
                    b.arc((d, "uo"), stub(), real=False)
    for p, ds in plus.items():
        if p not in paired:
            for d in ds.values():
                b.arc((d, "uo"), stub(), real=False)
    for _ in range(g.loop_count):
        b.arc("@", "@")
    return b.build()


def realize_click(d: TangleDiagram, site=None) -> TangleDiagram:
    """Make the virtual arcs in ``site`` real.

    Every arc named must be virtual and run from a positive crossing's
    under strand to a negative crossing's under strand.  ``site=None``
    takes every such arc.
    """
    matched = []
    for a in d.arcs:
        if a.real or not (_is_crossing(a.source) and _is_crossing(a.target)):
            continue
        src = d.crossings[int(a.source[1:])]
        dst = d.crossings[int(a.target[1:])]
        if src.sign == 1 and dst.sign == -1 and src.uo == a.id and dst.ui == a.id:
            matched.append(a.id)
    if site is None:
        if not matched:
            raise KnotError("no matched virtual arcs to realize")
        chosen = set(matched)
    else:
        chosen = {site} if isinstance(site, str) else set(site)
        if not chosen:
            raise KnotError("empty click site")
        for aid in chosen:
            try:
                a = d.arc(aid)
            except KeyError:
                raise KnotError(f"no arc {aid}") from None
            if a.real:
                raise KnotError(f"arc {aid} is already real")
            if aid not in matched:
                raise KnotError(f"arc {aid} does not join a plus tooth to a minus tooth")
    arcs = tuple(replace(a, real=True) if a.id in chosen else a for a in d.arcs)
    return TangleDiagram(arcs, d.crossings)


def unpair(d: TangleDiagram) -> TangleDiagram:
    """Split every virtual arc between two crossings into a pair of stubs.

    Tooth pairing is recorded globally, so a move that brings a new
    ``ZM -> ZP`` pair into contact adds a virtual arc no local diagram move
    would produce.  Comparing diagrams after ``unpair`` ignores that.
    """
    stubs = sum(1 for a in d.arcs for e in (a.source, a.target) if e.startswith("~"))
    taken = {a.id for a in d.arcs}
    fresh = 0
    arcs: list[Arc] = []
    renames: dict[tuple[int, str], str] = {}
    for a in d.arcs:
        if a.real or not (_is_crossing(a.source) and _is_crossing(a.target)):
            arcs.append(a)
            continue
        while f"v{fresh}" in taken:
            fresh += 1
        other = f"v{fresh}"
        taken.add(other)
        arcs.append(Arc(a.id, a.source, f"~{stubs}", False))
        arcs.append(Arc(other, f"~{stubs + 1}", a.target, False))
        stubs += 2
        k = int(a.target[1:])
        slot = next(s for s in _INCOMING if getattr(d.crossings[k], s) == a.id)
        renames[(k, slot)] = other
    xs = tuple(
        replace(x, **{s: renames[(k, s)] for s in _INCOMING if (k, s) in renames})
        for k, x in enumerate(d.crossings)
    )
    return TangleDiagram(tuple(arcs), xs)


def r2_sites(d: TangleDiagram) -> list[tuple[int, int]]:
    out = []
    for i in range(len(d.crossings)):
        for j in range(len(d.crossings)):
            if i != j and _r2_shape(d, i, j) is not None:
                out.append((i, j))
    return out


def _r2_shape(d: TangleDiagram, i: int, j: int):
    """(through-map, removed arcs) when crossing i's over strand runs into j."""
    x, y = d.crossings[i], d.crossings[j]
    if x.sign + y.sign != 0 or x.oo != y.oi:
        return None
    if y.uo == x.ui:
        under = ((j, "ui"), (i, "uo"), y.uo)
    elif x.uo == y.ui:
        under = ((i, "ui"), (j, "uo"), x.uo)
    else:
        return None
    shared = (x.oo, under[2])
    if shared[0] == shared[1] or not all(d.arc(a).real for a in shared):
        return None
    through = {(i, "oi"): (j, "oo"), under[0]: under[1]}
    return through, set(shared)


def apply_r2(d: TangleDiagram, site=None) -> TangleDiagram:
    """Cancel two adjacent crossings of opposite sign.

    ``site`` is ``(i, j)`` with crossing i's over strand running straight
    into crossing j, and the two sharing an under arc.  ``None`` picks the
    first such pair.
    """
    if site is None:
        sites = r2_sites(d)
        if not sites:
            raise KnotError("no Reidemeister 2 pattern in the diagram")
        site = sites[0]
    i, j = site
    n = len(d.crossings)
    if not (0 <= i < n and 0 <= j < n) or i == j:
        raise KnotError(f"bad crossing pair {site}")
    shape = _r2_shape(d, i, j)
    if shape is None:
        raise KnotError(f"crossings {i}, {j} do not form an oriented R2 pattern")
    through, removed = shape
    gone = {i, j}
    arcs = {a.id: a for a in d.arcs}
    # arc ids leaving each slot of the removed crossings
    leaving = {}
    for c in gone:
        x = d.crossings[c]
        leaving[(c, "oo")] = x.oo
        leaving[(c, "uo")] = x.uo
    entering = {}
    for c in gone:
        x = d.crossings[c]
        entering[x.oi] = (c, "oi")
        entering[x.ui] = (c, "ui")

    def nxt(aid: str) -> str | None:
        if aid not in entering:
            return None
        return leaving[through[entering[aid]]]

    survivors = [a for a in d.arcs if a.id not in removed]
    touched = [
        a
        for a in survivors
        if a.id in entering or _is_crossing(a.source) and int(a.source[1:]) in gone
    ]
    plain = [a for a in survivors if a not in touched]
    merged: list[tuple[str, str]] = []
    seen: set[str] = set()
    starts = [a for a in touched if not (_is_crossing(a.source) and int(a.source[1:]) in gone)]
    for a in starts:
        cur = a.id
        seen.add(cur)
        while (nx := nxt(cur)) is not None:
            cur = nx
            seen.add(cur)
        merged.append((a.source, arcs[cur].target))
    loops = 0
    for a in touched:
        if a.id not in seen:
            cur = a.id
            while cur not in seen:
                seen.add(cur)
                cur = nxt(cur)
            loops += 1

    # renumber crossings, then rebuild arcs with fresh ids
    keep = [k for k in range(n) if k not in gone]
    renum = {_xid(k): _xid(new) for new, k in enumerate(keep)}

    def fix(end: str) -> str:
        return renum.get(end, end)

    new_arcs = [Arc(a.id, fix(a.source), fix(a.target), a.real) for a in plain]
    taken = {a.id for a in d.arcs}
    fresh = 0
    first_id: dict[str, str] = {}
    for (src, tgt), a in zip(merged, starts):
        while f"r{fresh}" in taken:
            fresh += 1
        nid = f"r{fresh}"
        taken.add(nid)
        first_id[a.id] = nid
        new_arcs.append(Arc(nid, fix(src), fix(tgt)))
    for _ in range(loops):
        while f"r{fresh}" in taken:
            fresh += 1
        taken.add(f"r{fresh}")
        new_arcs.append(Arc(f"r{fresh}", "@", "@"))
    # a merged arc replaces its first piece at the source end and its last at the target
    last_id: dict[str, str] = {}
    for a in starts:
        cur = a.id
        while (nx := nxt(cur)) is not None:
            cur = nx
        last_id[cur] = first_id[a.id]

    def slot_arc(aid: str, incoming: bool) -> str:
        if incoming and aid in last_id:
            return last_id[aid]
        if not incoming and aid in first_id:
            return first_id[aid]
        return aid

    crossings = []
    for k in keep:
        x = d.crossings[k]
        crossings.append(
            Crossing(
                x.sign,
                slot_arc(x.oi, True),
                slot_arc(x.oo, False),
                slot_arc(x.ui, True),
                slot_arc(x.uo, False),
            )
        )
    return TangleDiagram(tuple(new_arcs), tuple(crossings))


# ---------------------------------------------------------------- comparison


def _end_class(end: str) -> str:
    if end.startswith("~"):
        return "~"
    return end


def _rows(d: TangleDiagram):
    arcs = {a.id: a for a in d.arcs}
    slot_of: dict[tuple[str, str], tuple[int, str]] = {}
    for k, x in enumerate(d.crossings):
        for s in SLOTS:
            side = "target" if s in _INCOMING else "source"
            slot_of[(getattr(x, s), side)] = (k, s)
    rows = []
    for k, x in enumerate(d.crossings):
        row = {}
        for s in SLOTS:
            a = arcs[getattr(x, s)]
            far_side = "source" if s in _INCOMING else "target"
            far = slot_of.get((a.id, far_side))
            row[s] = (a.real, far if far else ("end", _end_class(getattr(a, far_side))))
        rows.append(row)
    free = sorted(
        (_end_class(a.source), _end_class(a.target), a.real)
        for a in d.arcs
        if not _is_crossing(a.source) and not _is_crossing(a.target)
    )
    return rows, free


def diagram_iso(d1: TangleDiagram, d2: TangleDiagram) -> bool:
    """Equal up to renaming of arcs and crossings; virtual stubs are interchangeable."""
    if len(d1.crossings) != len(d2.crossings) or len(d1.arcs) != len(d2.arcs):
        return False
    r1, f1 = _rows(d1)
    r2, f2 = _rows(d2)
    if f1 != f2:
        return False
    n = len(r1)

    def local(row):
        return sorted(
            (s, real, far[0] == "end" and far[1] or "x") for s, (real, far) in row.items()
        )

    sig1 = [(d1.crossings[k].sign, local(r1[k])) for k in range(n)]
    sig2 = [(d2.crossings[k].sign, local(r2[k])) for k in range(n)]
    if sorted(map(repr, sig1)) != sorted(map(repr, sig2)):
        return False
    fwd: dict[int, int] = {}
    bwd: dict[int, int] = {}

    def propagate(a: int, b: int, trail: list) -> bool:
        stack = [(a, b)]
        while stack:
            p, q = stack.pop()
            if p in fwd:
                if fwd[p] != q:
                    return False
                continue
            if q in bwd or sig1[p] != sig2[q]:
                return False
            fwd[p] = q
            bwd[q] = p
            trail.append(p)
            for s in SLOTS:
                real1, far1 = r1[p][s]
                real2, far2 = r2[q][s]
                if real1 != real2 or (far1[0] == "end") != (far2[0] == "end"):
                    return False
                if far1[0] == "end":
                    if far1 != far2:
                        return False
                    continue
                if far1[1] != far2[1]:
                    return False
                stack.append((far1[0], far2[0]))
        return True

    def search() -> bool:
        p = next((k for k in range(n) if k not in fwd), None)
        if p is None:
            return True
        for q in range(n):
            if q in bwd:
                continue
            trail: list = []
            if propagate(p, q, trail) and search():
                return True
            for k in trail:
                del bwd[fwd.pop(k)]
        return False

    return search()


# ---------------------------------------------------------------- text formats


def emit_diagram(d: TangleDiagram) -> str:
    lines = [f"ARC {a.id} {a.source} {a.target} {'real' if a.real else 'virtual'}" for a in d.arcs]
    lines += [f"X {x.sign:+d} {x.oi} {x.oo} {x.ui} {x.uo}" for x in d.crossings]
    return "".join(line + "\n" for line in lines)


def parse_diagram(text: str) -> TangleDiagram:
    arcs, crossings = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = raw.split("#", 1)[0].split()
        if not toks:
            continue
        if toks[0] == "ARC" and len(toks) == 5 and toks[4] in ("real", "virtual"):
            arcs.append(Arc(toks[1], toks[2], toks[3], toks[4] == "real"))
        elif toks[0] == "X" and len(toks) == 6:
            try:
                sign = int(toks[1])
            except ValueError:
                raise KnotError(f"line {lineno}: bad sign {toks[1]!r}") from None
            crossings.append(Crossing(sign, *toks[2:]))
        else:
            raise KnotError(f"line {lineno}: cannot parse {raw.strip()!r}")
    d = TangleDiagram(tuple(arcs), tuple(crossings))
    problems = d.check()
    if problems:
        raise KnotError(problems[0])
    return d


def diagram_dot(d: TangleDiagram, name: str = "tangle") -> str:
    out = [f"digraph {name} {{"]
    for k, x in enumerate(d.crossings):
        out.append(f'  x{k} [shape=circle, label="{x.sign:+d}"];')
    ends = {}
    for a in d.arcs:
        for e in (a.source, a.target):
            if not _is_crossing(e) and e not in ends:
                ends[e] = f"e{len(ends)}"
                out.append(f'  {ends[e]} [shape=plaintext, label="{e}"];')
    slots = {}
    for k, x in enumerate(d.crossings):
        for s in SLOTS:
            slots[(getattr(x, s), s in _INCOMING)] = s
    for a in d.arcs:
        src = a.source if _is_crossing(a.source) else ends[a.source]
        tgt = a.target if _is_crossing(a.target) else ends[a.target]
        attrs = [f'label="{a.id}"']
        if (a.id, False) in slots:
            attrs.append(f'taillabel="{slots[(a.id, False)]}"')
        if (a.id, True) in slots:
            attrs.append(f'headlabel="{slots[(a.id, True)]}"')
        if not a.real:
            attrs.append("style=dashed")
        out.append(f"  {src} -> {tgt} [{', '.join(attrs)}];")
    out.append("}")
    return "\n".join(out) + "\n"
