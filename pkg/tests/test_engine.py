import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import planted_graphs, seeds, terms
from zipperlogic.combinators import compile_term, readback
from zipperlogic.engine import (
    DEFAULT_PRIORITY,
    FORWARD,
    ReductionError,
    Strategy,
    equal_mod_loops,
    is_normal,
    kill,
    multiply,
    reduce,
    search_path,
)
from zipperlogic.graph import Free, ZGraph, components, validate
from zipperlogic.iso import isomorphic
from zipperlogic.moves import MoveKind, apply_move, enumerate_matches
from zipperlogic.terms import normalizes, oracle_nf, parse_term, random_term
from zipperlogic.zgformat import fingerprint, parse_zg

FREE = Strategy(discipline="free")


def graph(src):
    return compile_term(parse_term(src))


def test_reduce_examples():
    tr = reduce(graph("I I"))
    assert tr.status == "normal-form"
    assert isomorphic(tr.final, graph("I"))
    tr = reduce(graph("K I (K I)"))
    assert equal_mod_loops(tr.final, graph("I"))[0]
    tr = reduce(ZGraph())
    assert len(tr) == 0 and tr.status == "normal-form"


def test_equal_mod_loops_examples():
    i = graph("I")
    assert equal_mod_loops(i.with_loops(2), i) == (True, 2)
    assert equal_mod_loops(i, graph("K"))[0] is False


def test_skk_is_stuck_under_weak_reduction_but_equal_to_i():
    skk = graph("S K K")
    tr = reduce(skk)
    assert tr.status == "normal-form" and readback(tr.final) == parse_term("S K K")
    free = reduce(skk, FREE)
    assert equal_mod_loops(free.final, graph("I"))[0]
    path = search_path(skk, graph("I"), 12)
    assert path is not None and len(path) <= 12
    g = skk
    for m in path:
        g = apply_move(g, m)
    assert equal_mod_loops(g, graph("I"))[0]


def test_search_path_examples():
    i = graph("I")
    assert search_path(i, i, 0) == []
    path = search_path(graph("I I"), i, 4)
    assert [m.kind for m in path] == [MoveKind.CLICK, MoveKind.ZIP]
    assert search_path(graph("K"), graph("S"), 1) is None
    with pytest.raises(ValueError):
        search_path(i, i, -1)


def test_multiply_examples():
    for src in ["I", "K", "S K"]:
        a = graph(src)
        out, trace = multiply(a)
        parts = components(out)
        assert len(parts) == 2 and all(isomorphic(p, a) for p in parts)
        assert sorted(lab for _, lab in out.free_ends()) == ["out.1", "out.2"]
        assert trace.replay() == out


def test_multiply_step_limit():
    with pytest.raises(ReductionError):
        multiply(graph("S (K I)"), max_steps=3)


@given(terms)
@settings(max_examples=40)
def test_multiply_any_combinator(t):
    a = compile_term(t)
    out, _ = multiply(a)
    parts = components(out)
    assert len(parts) == 2 and all(isomorphic(p, a) for p in parts)


def test_kill_examples():
    assert kill(graph("I"))[0] == 1
    assert kill(graph("K"))[0] == 2
    assert kill(graph("S"))[0] == 3
    assert kill(graph("S K K"))[0] == 7


@given(terms)
@settings(max_examples=50)
def test_kill_counts_loops_per_atom(t):
    from zipperlogic.terms import counts

    c = counts(t)
    loops, trace = kill(compile_term(t))
    assert loops == c["I"] + 2 * c["K"] + 3 * c["S"]
    assert len(trace.final) == 0 and not trace.final.arrows


def test_kill_rejects_open_graph():
    with pytest.raises(ValueError):
        kill(parse_zg("FO a b c"))


def test_trace_log_format():
    tr = reduce(graph("I I"))
    lines = tr.to_log()
    assert lines[0] == f"start: {fingerprint(graph('I I'))}"
    assert lines[1].startswith("step 1: click @ click[m=n] minus=")
    assert lines[1].endswith(f"-> {tr.steps[0].fingerprint}")
    assert lines[-1] == "status: normal-form loops: 0"


def test_step_limit():
    omega = parse_term("S I I (S I I)")
    tr = reduce(compile_term(omega), Strategy(max_steps=40))
    assert tr.status == "step-limit" and len(tr) == 40
    assert tr.replay() == tr.final


@given(terms, st.sampled_from(["combinator", "free"]), st.sampled_from(["first-match", "random"]), seeds)
@settings(max_examples=60)
def test_trace_replay(t, discipline, tie, seed):
    s = Strategy(max_steps=300, seed=seed, tie_break=tie, discipline=discipline)
    tr = reduce(compile_term(t), s)
    assert tr.replay() == tr.final
    assert validate(tr.final) == []


@given(planted_graphs(), seeds)
@settings(max_examples=40)
def test_normal_form_soundness_free(kg, seed):
    _, g = kg
    tr = reduce(g, Strategy(max_steps=100, seed=seed, tie_break="random", discipline="free"))
    if tr.status == "normal-form":
        for kind in FORWARD:
            assert enumerate_matches(tr.final, kind) == []


@given(terms)
@settings(max_examples=60)
def test_normal_form_soundness_combinator(t):
    tr = reduce(compile_term(t), Strategy(max_steps=2000))
    if tr.status == "normal-form":
        assert is_normal(tr.final)
        assert not enumerate_matches(tr.final, MoveKind.ZIP)


def test_deterministic_first_match():
    a = reduce(graph("S (K I) I K"))
    b = reduce(graph("S (K I) I K"))
    assert [s.fingerprint for s in a.steps] == [s.fingerprint for s in b.steps]


def test_strategy_independence():
    rng = random.Random(11)
    checked = 0
    while checked < 100:
        t = random_term(rng, 10)
        if not normalizes(t, 300):
            continue
        checked += 1
        a = reduce(compile_term(t))
        b = reduce(compile_term(t), Strategy(tie_break="random", seed=checked))
        assert a.status == b.status == "normal-form"
        assert readback(a.final) == readback(b.final) == oracle_nf(t, 300)


def test_beta_check():
    g = parse_zg("ZM 1 body fun var\nZP 1 fun arg result")
    tr = reduce(g, FREE)
    assert len(tr.final) == 0
    assert {(a.tail, a.head) for a in tr.final.arrows} == {
        (Free("body"), Free("result")),
        (Free("arg"), Free("var")),
    }


@pytest.mark.parametrize(
    "kwargs",
    [
        {"priority": (MoveKind.CO_COMM,)},
        {"priority": (MoveKind.ZIP, MoveKind.ZIP)},
        {"max_steps": 0},
        {"tie_break": "coin"},
        {"discipline": "lazy"},
    ],
)
def test_strategy_validation(kwargs):
    with pytest.raises(ValueError):
        Strategy(**kwargs)


def test_strategy_accepts_names():
    s = Strategy(priority=("click", "zip"))
    assert s.priority == (MoveKind.CLICK, MoveKind.ZIP)
    assert set(DEFAULT_PRIORITY) == FORWARD


def test_free_discipline_reaches_i_from_i_i():
    assert isomorphic(reduce(graph("I I"), FREE).final, graph("I"))
