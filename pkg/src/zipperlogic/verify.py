"""Named verification suites, one per acceptance criterion.

Each suite returns a :class:`SuiteResult` whose cases carry a pass flag and
a short detail string.  Suites are deterministic for a given seed.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Callable

from .combinators import ReadbackError, compile_term, readback
from .engine import (
    ReductionError,
    Strategy,
    equal_mod_loops,
    kill,
    multiply,
    reduce,
    search_path,
)
from .generators import planted, random_graph
from .graph import (
    FI,
    FO,
    ZM,
    ZP,
    Arrow,
    Free,
    GraphEditor,
    PortRef,
    T,
    Z,
    ZGraph,
    components,
    zipper,
)
from .iso import isomorphic
from .knots import apply_r2, diagram_iso, encode, realize_click
from .moves import (
    MoveKind,
    apply_with_inverse,
    enumerate_inverse_matches,
    enumerate_matches,
    reverse,
)
from .terms import App, I, K, S, Term, normalizes, oracle_nf, parse_term, random_term, show
from .zgformat import emit_zg, parse_zg


@dataclass
class Case:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class SuiteResult:
    name: str
    cases: list[Case] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    def add(self, name: str, passed: bool, detail: str = ""):
        self.cases.append(Case(name, bool(passed), detail))

    def lines(self) -> list[str]:
        out = [
            f"  {'PASS' if c.passed else 'FAIL'} {c.name}" + (f": {c.detail}" if c.detail else "")
            for c in self.cases
        ]
        good = sum(c.passed for c in self.cases)
        verdict = "PASS" if self.passed else "FAIL"
        out.append(f"{verdict} {self.name} ({good}/{len(self.cases)} cases, {self.seconds:.2f}s)")
        return out


def _nf_readback(t: Term) -> tuple[Term | None, ZGraph, str]:
    trace = reduce(compile_term(t))
    try:
        return readback(trace.final), trace.final, trace.status
    except ReadbackError as exc:
        return None, trace.final, f"{trace.status}; readback failed: {exc}"


def _check_nf(res: SuiteResult, label: str, t: Term, expected: Term):
    got, _, status = _nf_readback(t)
    res.add(label, got == expected, f"{show(got) if got else status} vs {show(expected)}")


def _pool(rng: random.Random, fixed: list[str], count: int, max_size: int, fuel: int) -> list[Term]:
    pool = [parse_term(s) for s in fixed]
    while len(pool) < len(fixed) + count:
        t = random_term(rng, max_size)
        if normalizes(t, fuel):
            pool.append(t)
    return pool


FIXED_A = ["S", "K", "I", "S K", "K I", "K (I I)"]


def theorem_a(seed: int = 0) -> SuiteResult:
    res = SuiteResult("theorem-a")
    for a in _pool(random.Random(seed), FIXED_A, 50, 8, 200):
        _check_nf(res, f"I ({show(a)})", App(I, a), oracle_nf(a, 200))
    return res


def theorem_b(seed: int = 0) -> SuiteResult:
    res = SuiteResult("theorem-b")
    rng = random.Random(seed)
    pool = _pool(rng, FIXED_A, 50, 8, 200)
    for i, a in enumerate(pool):
        b = pool[(i * 7 + 3) % len(pool)]
        t = App(App(K, a), b)
        got, final, status = _nf_readback(t)
        want = oracle_nf(a, 200)
        res.add(
            f"K ({show(a)}) ({show(b)})",
            got == want and final.loop_count >= 0,
            f"{show(got) if got else status}, {final.loop_count} loops",
        )
    return res


def theorem_c(seed: int = 0) -> SuiteResult:
    res = SuiteResult("theorem-c")
    names = ["S", "K", "I", "S K"]
    for a in names:
        for b in names:
            for c in names:
                left = reduce(compile_term(parse_term(f"S ({a}) ({b}) ({c})")))
                right = reduce(compile_term(parse_term(f"({a}) ({c}) (({b}) ({c}))")))
                same, diff = equal_mod_loops(left.final, right.final)
                ok = same and left.status == right.status == "normal-form"
                res.add(f"S ({a}) ({b}) ({c})", ok, f"loop difference {diff}")
    return res


def theorem_d(seed: int = 0) -> SuiteResult:
    res = SuiteResult("theorem-d")
    skk = compile_term(App(App(S, K), K))
    trace = reduce(skk)
    same, diff = equal_mod_loops(trace.final, compile_term(I))
    if same:
        res.add("S K K reduces to I", True, f"{len(trace)} steps, loop difference {diff}")
    else:
        path = search_path(skk, compile_term(I), 12)
        detail = (
            "no path within 12 moves"
            if path is None
            else f"weak normal form differs; path of {len(path)} moves: "
            + ", ".join(m.kind.value for m in path)
        )
        res.add("S K K equals I modulo loops", path is not None, detail)
    rng = random.Random(seed)
    probes = 0
    while probes < 20:
        p = random_term(rng, 8)
        if not normalizes(p, 200) or not normalizes(App(App(App(S, K), K), p), 200):
            continue
        probes += 1
        _check_nf(res, f"S K K ({show(p)})", App(App(App(S, K), K), p), oracle_nf(p, 200))
    return res


MULTIPLIER_TERMS = ["I", "K", "S", "S K", "K I", "S (K I)"]


def multiplier(seed: int = 0) -> SuiteResult:
    res = SuiteResult("multiplier")
    for src in MULTIPLIER_TERMS:
        a = compile_term(parse_term(src))
        try:
            out, trace = multiply(a)
        except ReductionError as exc:
            res.add(src, False, str(exc))
            continue
        parts = components(out)
        ok = len(parts) == 2 and all(isomorphic(p, a) for p in parts)
        res.add(src, ok, f"{len(parts)} components after {len(trace)} moves")
    return res


DEATH_EXPECTED = {"I": 1, "K": 2, "S": 3}


def death(seed: int = 0) -> SuiteResult:
    res = SuiteResult("death")
    for src, want in DEATH_EXPECTED.items():
        loops, _ = kill(compile_term(parse_term(src)))
        res.add(f"kill {src}", loops == want, f"{loops} loops (expected {want})")
    rng = random.Random(seed)
    for i in range(50):
        t = random_term(rng, 10)
        try:
            loops, trace = kill(compile_term(t))
            res.add(f"kill {show(t)}", True, f"{loops} loops in {len(trace)} moves")
        except ReductionError as exc:
            res.add(f"kill {show(t)}", False, str(exc))
    return res


BETA_REDEX = "ZM 1 body fun var\nZP 1 fun arg result\n"


def beta(seed: int = 0) -> SuiteResult:
    res = SuiteResult("beta")
    g = parse_zg(BETA_REDEX)
    (click,) = enumerate_matches(g, MoveKind.CLICK)
    g1, _ = apply_with_inverse(g, click)
    (unzip,) = enumerate_matches(g1, MoveKind.ZIP)
    g2, _ = apply_with_inverse(g1, unzip)
    want = {Arrow(Free("body"), Free("result")), Arrow(Free("arg"), Free("var"))}
    ok = len(g2) == 0 and g2.loop_count == 0 and set(g2.arrows) == want
    res.add("click then zip", ok, " ".join(str(a) for a in g2.arrows))
    trace = reduce(g, Strategy(discipline="free"))
    res.add("reduce", trace.final == g2, f"{len(trace)} steps")
    return res


def candidate_matches(g: ZGraph, kind: MoveKind):
    ms = enumerate_matches(g, kind)
    if kind is MoveKind.CO_ASSOC:
        ms += enumerate_inverse_matches(g, kind)
    return ms


def reversibility(seed: int = 0, per_kind: int = 100) -> SuiteResult:
    res = SuiteResult("reversibility")
    rng = random.Random(seed)
    for kind in MoveKind:
        failures = 0
        for _ in range(per_kind):
            g = planted(rng, kind)
            m = rng.choice(candidate_matches(g, kind))
            h, back = apply_with_inverse(g, m)
            if not isomorphic(reverse(h, back), g):
                failures += 1
        res.add(kind.value, failures == 0, f"{per_kind - failures}/{per_kind} restored")
    return res


def fuzz(seed: int = 0, count: int = 200, max_size: int = 12, fuel: int = 500) -> SuiteResult:
    res = SuiteResult("fuzz")
    rng = random.Random(seed)
    done = 0
    while done < count:
        t = random_term(rng, max_size)
        if not normalizes(t, fuel):
            continue
        done += 1
        _check_nf(res, f"#{done} {show(t)}", t, oracle_nf(t, fuel))
    return res


def knots(seed: int = 0) -> SuiteResult:
    res = SuiteResult("knots")
    redex = parse_zg(BETA_REDEX)
    (click,) = enumerate_matches(redex, MoveKind.CLICK)
    clicked, _ = apply_with_inverse(redex, click)
    (unzip,) = enumerate_matches(clicked, MoveKind.ZIP)
    zipped, _ = apply_with_inverse(clicked, unzip)
    d = encode(clicked)
    res.add(
        "encode . zip = apply_r2 . encode",
        diagram_iso(encode(zipped), apply_r2(d)),
        f"{len(d.crossings)} crossings before, {len(apply_r2(d).crossings)} after",
    )
    res.add(
        "realize_click . encode = encode . click",
        diagram_iso(realize_click(encode(redex)), d),
    )
    for n in (2, 3):
        ed = GraphEditor()
        zn = ed.add_node(zipper(n))
        for p in zipper(n).in_ports:
            ed.add_arrow(Free(f"in{p}"), PortRef(zn, p))
        for p in zipper(n).out_ports:
            ed.add_arrow(PortRef(zn, p), Free(f"out{p}"))
        zg = ed.freeze()
        dd = encode(zg)
        for _ in range(n):
            dd = apply_r2(dd)
        (m,) = enumerate_matches(zg, MoveKind.ZIP)
        zz, _ = apply_with_inverse(zg, m)
        res.add(f"zip of a {n}-zipper is {n} R2 moves", diagram_iso(encode(zz), dd))
    return res


def _corpus(seed: int, size: int = 50) -> list[ZGraph]:
    rng = random.Random(seed)
    corpus: list[ZGraph] = []
    kinds = list(MoveKind)
    while len(corpus) < size:
        if len(corpus) % 2:
            corpus.append(random_graph(rng))
        else:
            corpus.append(planted(rng, kinds[len(corpus) // 2 % len(kinds)]))
    return corpus


def serialization(seed: int = 0) -> SuiteResult:
    res = SuiteResult("serialization")
    corpus = _corpus(seed)
    tags = set()
    free_arrows = loops = free_ends = 0
    for i, g in enumerate(corpus):
        text = emit_zg(g)
        back = parse_zg(text)
        res.add(f"graph {i}", isomorphic(back, g) and emit_zg(back) == text)
        tags |= {g.kind(n).tag for n in g.node_ids()}
        free_arrows += sum(a.is_free for a in g.arrows)
        loops += g.loop_count
        free_ends += len(g.free_ends())
    want = {ZM, ZP, Z, FO, FI, T}
    res.add(
        "corpus coverage",
        tags == want and free_arrows > 0 and loops > 0 and free_ends > 0,
        f"kinds {sorted(tags)}, {free_arrows} ARROW, {loops} LOOP, {free_ends} free ends",
    )
    return res


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "theorem-a": theorem_a,
    "theorem-b": theorem_b,
    "theorem-c": theorem_c,
    "theorem-d": theorem_d,
    "multiplier": multiplier,
    "death": death,
    "beta": beta,
    "reversibility": reversibility,
    "fuzz": fuzz,
    "knots": knots,
    "serialization": serialization,
}


def run_suite(name: str, seed: int = 0) -> SuiteResult:
    try:
        fn = SUITES[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)} or all") from None
    start = time.perf_counter()
    res = fn(seed)
    res.seconds = time.perf_counter() - start
    return res
