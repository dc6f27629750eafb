import random

import pytest
from hypothesis import given, strategies as st

from conftest import terms
from zipperlogic.terms import (
    App,
    FuelExhausted,
    I,
    K,
    S,
    TermSyntaxError,
    counts,
    normalizes,
    oracle_nf,
    parse_term,
    random_term,
    show,
    size,
    step,
)


def spine_nf(t, budget):
    """Second oracle: weak head reduction on an explicit argument stack,
    then normalize the arguments.  ``budget`` is a one-element list."""
    stack = []
    while True:
        while isinstance(t, App):
            stack.append(t.argument)
            t = t.function
        need = {"I": 1, "K": 2, "S": 3}[t.name]
        if len(stack) < need:
            break
        budget[0] -= 1
        if budget[0] < 0:
            raise FuelExhausted(0, t)
        if t == I:
            t = stack.pop()
        elif t == K:
            t = stack.pop()
            stack.pop()
        else:
            x, y, z = stack.pop(), stack.pop(), stack.pop()
            t = App(App(x, z), App(y, z))
    for a in reversed(stack):
        t = App(t, spine_nf(a, budget))
    return t


def test_parse_examples():
    assert parse_term("S K K") == App(App(S, K), K)
    assert parse_term("S (K K)") == App(S, App(K, K))
    assert parse_term("  ((I))  ") == I


@pytest.mark.parametrize(
    "text,pos", [("S K )", 4), ("", 0), ("   ", 0), ("(S", 2), ("()", 0), ("S x", 2)]
)
def test_parse_errors(text, pos):
    with pytest.raises(TermSyntaxError) as err:
        parse_term(text)
    assert err.value.position == pos


@given(terms)
def test_show_parses_back(t):
    assert parse_term(show(t)) == t


def test_show_minimal_parentheses():
    assert show(parse_term("((S K) K)")) == "S K K"
    assert show(parse_term("S (K I) (I I)")) == "S (K I) (I I)"


def test_oracle_examples():
    assert oracle_nf(parse_term("I K")) == K
    assert oracle_nf(parse_term("S K K I")) == I
    assert oracle_nf(parse_term("K I (K I)")) == I
    assert oracle_nf(parse_term("S K K")) == parse_term("S K K")


def test_oracle_is_leftmost_outermost():
    # K I omega has a normal form only under normal order
    omega = parse_term("S I I (S I I)")
    assert step(omega) is not None
    assert oracle_nf(App(App(K, I), omega)) == I
    with pytest.raises(FuelExhausted) as err:
        oracle_nf(omega, 50)
    assert err.value.fuel == 50
    assert not normalizes(omega, 50)


def test_zero_fuel():
    assert oracle_nf(S, 0) == S
    with pytest.raises(FuelExhausted):
        oracle_nf(parse_term("I I"), 0)
    with pytest.raises(ValueError):
        oracle_nf(S, -1)


@given(terms)
def test_oracles_agree(t):
    try:
        want = oracle_nf(t, 300)
    except FuelExhausted:
        return
    assert spine_nf(t, [10_000]) == want


@given(terms, st.integers(0, 200))
def test_extra_fuel_does_not_change_the_answer(t, extra):
    try:
        nf = oracle_nf(t, 300)
    except FuelExhausted:
        return
    assert oracle_nf(t, 300 + extra) == nf
    assert oracle_nf(nf, 0) == nf


@given(st.integers(0, 10_000), st.integers(1, 15))
def test_random_term_size(seed, n):
    t = random_term(random.Random(seed), n)
    assert 1 <= size(t) <= n
    c = counts(t)
    assert c["App"] == size(t) - 1 == c["S"] + c["K"] + c["I"] - 1
