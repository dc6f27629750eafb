"""Reduction strategies, traces, equality modulo loops, and the multiplier
and death tactics.

Two disciplines are available.  ``free`` is the textbook loop: apply the
highest-priority move kind that has a match anywhere, until none does.
``combinator`` performs weak reduction on combinator graphs: it never
rewrites inside an S, K or I graph, contracts the leftmost-outermost
saturated redex, and duplicates shared arguments eagerly with a
bookkeeping macro that keeps the two copies apart.  Readback only makes
sense for the second, so it is the default.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field

from .graph import (
    FANOUT,
    FI,
    FO,
    TERM,
    ZM,
    ZP,
    Free,
    PortRef,
    T,
    ZGraph,
    components,
    strip_loops,
)
from .iso import invariant_hash, isomorphic
from .moves import (
    PRUNES,
    Match,
    MoveError,
    MoveKind,
    apply_move,
    enumerate_inverse_matches,
    enumerate_matches,
)
from .zgformat import fingerprint

FORWARD = frozenset(
    {
        MoveKind.CLICK,
        MoveKind.ZIP,
        MoveKind.TOWER_MERGE,
        MoveKind.DIST_PLUS,
        MoveKind.DIST_MINUS,
        MoveKind.FAN_IN,
        *PRUNES,
    }
)

DEFAULT_PRIORITY = (
    MoveKind.PRUNE_ZP,
    MoveKind.PRUNE_ZM,
    MoveKind.PRUNE_FO,
    MoveKind.PRUNE_FI,
    MoveKind.PRUNE_ARROW,
    MoveKind.CLICK,
    MoveKind.ZIP,
    MoveKind.TOWER_MERGE,
    MoveKind.DIST_PLUS,
    MoveKind.DIST_MINUS,
    MoveKind.FAN_IN,
)

KILL_PRIORITY = (
    MoveKind.PRUNE_ZP,
    MoveKind.PRUNE_FO,
    MoveKind.PRUNE_FI,
    MoveKind.PRUNE_ZM,
    MoveKind.PRUNE_ARROW,
    MoveKind.CLICK,
    MoveKind.ZIP,
    MoveKind.DIST_PLUS,
    MoveKind.DIST_MINUS,
)

DISCIPLINES = ("combinator", "free")
TIE_BREAKS = ("first-match", "random")


class ReductionError(RuntimeError):
    """A tactic could not reach its promised end state."""

    def __init__(self, message: str, trace: "Trace | None" = None):
        super().__init__(message)
        self.trace = trace


@dataclass(frozen=True)
class Strategy:
    priority: tuple[MoveKind, ...] = DEFAULT_PRIORITY
    max_steps: int = 10_000
    seed: int | None = None
    tie_break: str = "first-match"
    discipline: str = "combinator"

    def __post_init__(self):
        kinds = tuple(MoveKind.parse(k) if isinstance(k, str) else k for k in self.priority)
        object.__setattr__(self, "priority", kinds)
        bad = [k.value for k in kinds if k not in FORWARD]
        if bad:
            raise ValueError(f"priority may only hold forward moves, not {', '.join(bad)}")
        if len(set(kinds)) != len(kinds):
            raise ValueError("priority lists a move twice")
        if self.max_steps < 1:
            raise ValueError("max_steps must be positive")
        if self.tie_break not in TIE_BREAKS:
            raise ValueError(f"tie_break must be one of {TIE_BREAKS}")
        if self.discipline not in DISCIPLINES:
            raise ValueError(f"discipline must be one of {DISCIPLINES}")


@dataclass(frozen=True)
class Step:
    match: Match
    fingerprint: str

    @property
    def kind(self) -> MoveKind:
        return self.match.kind

    @property
    def summary(self) -> str:
        return self.match.summary()


@dataclass
class Trace:
    initial: ZGraph
    steps: list[Step] = field(default_factory=list)
    final: ZGraph | None = None
    status: str = "normal-form"

    @property
    def initial_fingerprint(self) -> str:
        return fingerprint(self.initial)

    def __len__(self):
        return len(self.steps)

    def replay(self) -> ZGraph:
        """Re-apply every step to the initial graph, checking fingerprints."""
        g = self.initial
        for k, s in enumerate(self.steps, start=1):
            g = apply_move(g, s.match)
            if fingerprint(g) != s.fingerprint:
                raise ReductionError(f"replay diverged at step {k}")
        return g

    def to_log(self) -> list[str]:
        lines = [f"start: {self.initial_fingerprint}"]
        for k, s in enumerate(self.steps, start=1):
            lines.append(f"step {k}: {s.kind.value} @ {s.summary} -> {s.fingerprint}")
        loops = self.final.loop_count if self.final is not None else 0
        lines.append(f"status: {self.status} loops: {loops}")
        return lines


class _StepLimit(Exception):
    pass


class _Runner:
    def __init__(self, g: ZGraph, max_steps: int, rng: random.Random | None):
        self.g = g
        self.trace = Trace(g)
        self.max_steps = max_steps
        self.rng = rng

    def do(self, m: Match):
        if len(self.trace.steps) >= self.max_steps:
            raise _StepLimit
        self.g = apply_move(self.g, m)
        self.trace.steps.append(Step(m, fingerprint(self.g)))

    def pick(self, options: list):
        if self.rng is None or len(options) == 1:
            return options[0]
        return self.rng.choice(options)

    def finish(self, status: str) -> Trace:
        self.trace.final = self.g
        self.trace.status = status
        return self.trace


# ---------------------------------------------------------------- duplication


def _source(g: ZGraph, n: int, port: str):
    a = g.arrow_into(n, port)
    return None if a is None else a.tail


def _target(g: ZGraph, n: int, port: str):
    a = g.arrow_from(n, port)
    return None if a is None else a.head


def _new_nodes(before: ZGraph, after: ZGraph, tag: str) -> set[int]:
    return {n for n in after.nodes_of(tag) if n not in before}


def _shuffle(run: _Runner, s: int, p: int, q: int):
    """s(p(a1, a2), q(b1, b2))  ->  s(p(a1, b1), q(a2, b2)) in five moves."""
    run.do(Match(MoveKind.CO_ASSOC, (("top", s), ("lower", p)), "left"))
    run.do(Match(MoveKind.CO_COMM, (("fanout", p),)))
    run.do(Match(MoveKind.CO_ASSOC, (("top", p), ("lower", q)), "left"))
    run.do(Match(MoveKind.CO_ASSOC, (("top", s), ("lower", p)), "right"))
    run.do(Match(MoveKind.CO_COMM, (("fanout", q),)))


def _duplicate(run: _Runner, start: int):
    """Push the fanout ``start`` through the combinator graph feeding it.

    ``dup`` holds fanouts that copy (out1 feeds the first copy), ``pending``
    the fanins made by DIST on an abstraction.  Structural fanouts (the
    sharing inside S) are met from below by two copiers and are reordered
    so they become a copier themselves.
    """
    dup = {start}
    pending: set[int] = set()
    while dup or pending:
        g = run.g
        acted = False
        for fi in sorted(pending):
            h = _target(g, fi, "out")
            if isinstance(h, PortRef) and g.kind(h.node).tag == T:
                run.do(Match(MoveKind.PRUNE_FI, (("fanin", fi), ("term", h.node))))
                pending.discard(fi)
                acted = True
                break
        if acted:
            continue
        for d in sorted(dup):
            src = _source(g, d, "in")
            if not isinstance(src, PortRef):
                continue
            tag = g.kind(src.node).tag
            if tag in (ZP, ZM) and src.port == "0'":
                kind = MoveKind.DIST_PLUS if tag == ZP else MoveKind.DIST_MINUS
                run.do(Match(kind, (("half", src.node), ("fanout", d))))
                dup.discard(d)
                dup |= _new_nodes(g, run.g, FO)
                pending |= _new_nodes(g, run.g, FI)
            elif tag == FI and src.node in pending:
                run.do(Match(MoveKind.FAN_IN, (("fanin", src.node), ("fanout", d))))
                dup.discard(d)
                pending.discard(src.node)
            elif tag == FO and src.node not in dup:
                s = src.node
                p, q = _target(g, s, "out1"), _target(g, s, "out2")
                if not all(
                    isinstance(x, PortRef) and x.port == "in" and x.node in dup for x in (p, q)
                ):
                    continue
                _shuffle(run, s, p.node, q.node)
                dup -= {p.node, q.node}
                dup.add(s)
            else:
                continue
            acted = True
            break
        if not acted:
            raise ReductionError(
                f"duplication stuck with copiers {sorted(dup)} and fanins {sorted(pending)}",
                run.trace,
            )


def _copiers(g: ZGraph) -> list[int]:
    """Fanouts fed directly by a half-zipper's output: shared arguments."""
    out = []
    for f in g.nodes_of(FO):
        src = _source(g, f, "in")
        if isinstance(src, PortRef) and src.port == "0'" and g.kind(src.node).tag in (ZP, ZM):
            out.append(f)
    return out


# ---------------------------------------------------------------- weak reduction


def _roots(g: ZGraph) -> list[PortRef]:
    outs = sorted(g.free_out_arrows(), key=lambda a: a.head.label)
    return [a.tail for a in outs if isinstance(a.tail, PortRef)]


def _preorder(g: ZGraph) -> list[int]:
    """Application nodes in leftmost-outermost order from the free outputs.

    The walk follows function position before arguments and never enters
    an abstraction, so only redexes outside S, K and I are seen.
    """
    order: list[int] = []
    seen: set[int] = set()
    stack = list(reversed(_roots(g)))
    while stack:
        ref = stack.pop()
        n = ref.node
        if n in seen:
            continue
        kind = g.kind(n)
        if kind.tag == ZM:
            continue
        seen.add(n)
        if kind.tag == ZP:
            order.append(n)
        below = []
        for p in kind.in_ports:
            src = _source(g, n, p)
            if isinstance(src, PortRef):
                below.append(src)
        stack.extend(reversed(below))
    for n in g.nodes_of(ZP):
        if n not in seen:
            order.append(n)
    return order


def _spine_actions(g: ZGraph) -> list[Match]:
    """Saturated clicks and the tower merges that saturate a spine."""
    found = []
    for b in _preorder(g):
        src = _source(g, b, "0")
        if not (isinstance(src, PortRef) and src.port == "0'" and g.kind(src.node).tag == ZM):
            continue
        a = src.node
        n, m = g.kind(a).arity, g.kind(b).arity
        if m >= n:
            case = "m=n" if m == n else "m>n"
            found.append(Match(MoveKind.CLICK, (("minus", a), ("plus", b)), case))
            continue
        up = _target(g, b, "0'")
        if isinstance(up, PortRef) and up.port == "0" and g.kind(up.node).tag == ZP:
            found.append(Match(MoveKind.TOWER_MERGE, (("lower", b), ("upper", up.node)), "plus"))
    return found


_COMBINATOR_PRUNES = (
    MoveKind.PRUNE_ZP,
    MoveKind.PRUNE_ZM,
    MoveKind.PRUNE_FO,
    MoveKind.PRUNE_FI,
    MoveKind.PRUNE_ARROW,
)


def _combinator_step(run: _Runner) -> bool:
    g = run.g
    for kind in _COMBINATOR_PRUNES + (MoveKind.ZIP,):
        ms = enumerate_matches(g, kind)
        if ms:
            run.do(run.pick(ms))
            return True
    copiers = _copiers(g)
    if copiers:
        _duplicate(run, run.pick(copiers))
        return True
    actions = _spine_actions(g)
    if actions:
        run.do(run.pick(actions))
        return True
    return False


def _free_step(run: _Runner, priority) -> bool:
    for kind in priority:
        ms = enumerate_matches(run.g, kind)
        if ms:
            run.do(run.pick(ms))
            return True
    return False


def reduce(g: ZGraph, strategy: Strategy | None = None) -> Trace:
    """Rewrite ``g`` until no move is eligible or the step limit is hit."""
    s = strategy or Strategy()
    rng = random.Random(s.seed) if s.tie_break == "random" else None
    run = _Runner(g, s.max_steps, rng)
    try:
        while True:
            if s.discipline == "combinator":
                progressed = _combinator_step(run)
            else:
                progressed = _free_step(run, s.priority)
            if not progressed:
                return run.finish("normal-form")
    except _StepLimit:
        return run.finish("step-limit")


def is_normal(g: ZGraph, strategy: Strategy | None = None) -> bool:
    """True when ``strategy`` has no eligible move on ``g``."""
    s = strategy or Strategy()
    if s.discipline == "free":
        return not any(enumerate_matches(g, k) for k in s.priority)
    if any(enumerate_matches(g, k) for k in _COMBINATOR_PRUNES + (MoveKind.ZIP,)):
        return False
    return not _copiers(g) and not _spine_actions(g)


# ---------------------------------------------------------------- equality


def equal_mod_loops(g1: ZGraph, g2: ZGraph) -> tuple[bool, int]:
    a, la = strip_loops(g1)
    b, lb = strip_loops(g2)
    return isomorphic(a, b, fanout_outs_unordered=True), abs(la - lb)


def _neighbours(g: ZGraph) -> list[Match]:
    ms: list[Match] = []
    for kind in MoveKind:
        ms.extend(enumerate_matches(g, kind))
    ms.extend(enumerate_inverse_matches(g, MoveKind.CO_ASSOC))
    return ms


def search_path(
    g1: ZGraph, g2: ZGraph, depth: int, max_states: int = 200_000
) -> list[Match] | None:
    """Shortest move sequence from ``g1`` to a graph equal to ``g2`` modulo loops.

    Breadth-first over every move in both orientations (TOWER splits and
    right-leaning CO-ASSOC are the reverse patterns; CO-COMM is its own
    inverse).  Returns ``None`` when nothing is found within ``depth`` moves
    or ``max_states`` visited graphs; that is not a proof of inequality.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    goal, _ = strip_loops(g2)
    goal_hash = invariant_hash(goal)

    def hits(g: ZGraph) -> bool:
        core, _ = strip_loops(g)
        return invariant_hash(core) == goal_hash and isomorphic(core, goal, True)

    if hits(g1):
        return []
    seen: dict[str, list[ZGraph]] = {invariant_hash(g1): [g1]}
    frontier = deque([(g1, [])])
    visited = 1
    while frontier:
        g, path = frontier.popleft()
        if len(path) >= depth:
            continue
        for m in _neighbours(g):
            try:
                h = apply_move(g, m)
            except MoveError:
                continue
            key = invariant_hash(h)
            bucket = seen.setdefault(key, [])
            if any(h.loop_count == x.loop_count and isomorphic(h, x, True) for x in bucket):
                continue
            bucket.append(h)
            if hits(h):
                return path + [m]
            visited += 1
            if visited >= max_states:
                return None
            frontier.append((h, path + [m]))
    return None


# ---------------------------------------------------------------- tactics


def _attach(a: ZGraph, kind_tag: str):
    outs = a.free_out_arrows()
    if len(outs) != 1:
        raise ValueError(f"expected one free out end, found {len(outs)}")
    arrow = outs[0]
    ed = a.edit()
    if kind_tag == FO:
        n = ed.add_node(FANOUT)
        lab = arrow.head.label
        first = lab + ".1" if lab + ".1" not in a.labels() else ed.fresh_label()
        second = lab + ".2" if lab + ".2" not in a.labels() else ed.fresh_label()
        ed.retarget_head(arrow, PortRef(n, "in"))
        ed.add_arrow(PortRef(n, "out1"), Free(first))
        ed.add_arrow(PortRef(n, "out2"), Free(second))
    else:
        n = ed.add_node(TERM)
        ed.retarget_head(arrow, PortRef(n, "in"))
    return ed.freeze(), n


def multiply(a: ZGraph, max_steps: int = 10_000) -> tuple[ZGraph, Trace]:
    """Put a fanout on the output of ``a`` and push it through.

    Succeeds with two components each isomorphic to ``a``; raises
    :class:`ReductionError` otherwise.
    """
    g, fo = _attach(a, FO)
    run = _Runner(g, max_steps, None)
    try:
        _duplicate(run, fo)
    except _StepLimit:
        raise ReductionError("step limit before two copies", run.finish("step-limit")) from None
    trace = run.finish("normal-form")
    parts = components(trace.final)
    if len(parts) != 2 or not all(isomorphic(p, a) for p in parts):
        raise ReductionError("multiplication did not produce two copies", trace)
    return trace.final, trace


def kill(a: ZGraph, max_steps: int = 10_000) -> tuple[int, Trace]:
    """Put a termination on the output of ``a`` and prune it to loops."""
    g, _ = _attach(a, T)
    trace = reduce(g, Strategy(KILL_PRIORITY, max_steps, discipline="free"))
    final = trace.final
    if trace.status != "normal-form" or len(final) or final.arrows:
        raise ReductionError("graph did not die into loops", trace)
    return final.loop_count, trace
