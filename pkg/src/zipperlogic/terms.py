"""SKI terms with a normal-order rewriting oracle.

The oracle knows nothing about graphs.  It rewrites terms with the three
rules ``I x -> x``, ``K x y -> x`` and ``S x y z -> x z (y z)``, always
contracting the leftmost-outermost redex.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Union


@dataclass(frozen=True)
class Atom:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class App:
    function: "Term"
    argument: "Term"

    def __str__(self):
        return show(self)


Term = Union[Atom, App]

S = Atom("S")
K = Atom("K")
I = Atom("I")
ATOMS = {"S": S, "K": K, "I": I}
_ARITY = {"I": 1, "K": 2, "S": 3}


class TermSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class FuelExhausted(RuntimeError):
    """The oracle ran out of steps before reaching a normal form."""

    def __init__(self, fuel: int, last: Term):
        super().__init__(f"no normal form within {fuel} steps")
        self.fuel = fuel
        self.last = last


def parse_term(text: str) -> Term:
    """Parse juxtaposition-as-application, left associative, with parentheses."""
    pos = 0
    n = len(text)

    def skip():
        nonlocal pos
        while pos < n and text[pos].isspace():
            pos += 1

    def atom_or_group() -> Term | None:
        nonlocal pos
        skip()
        if pos >= n:
            return None
        ch = text[pos]
        if ch in ATOMS:
            pos += 1
            return ATOMS[ch]
        if ch == "(":
            start = pos
            pos += 1
            inner = sequence()
            skip()
            if inner is None:
                raise TermSyntaxError("empty parentheses", start)
            if pos >= n or text[pos] != ")":
                raise TermSyntaxError("missing ')'", pos)
            pos += 1
            return inner
        if ch == ")":
            return None
        raise TermSyntaxError(f"unexpected character {ch!r}", pos)

    def sequence() -> Term | None:
        head = atom_or_group()
        if head is None:
            return None
        while True:
            nxt = atom_or_group()
            if nxt is None:
                return head
            head = App(head, nxt)

    skip()
    if pos >= n:
        raise TermSyntaxError("empty input", 0)
    t = sequence()
    skip()
    if t is None:
        raise TermSyntaxError("expected a term", pos)
    if pos < n:
        raise TermSyntaxError(f"unexpected {text[pos]!r}", pos)
    return t


def show(t: Term) -> str:
    """Minimal-parentheses rendering that parses back to ``t``."""
    if isinstance(t, Atom):
        return t.name
    head, args = unwind(t)
    parts = [head.name if isinstance(head, Atom) else show(head)]
    for a in args:
        parts.append(a.name if isinstance(a, Atom) else f"({show(a)})")
    return " ".join(parts)


def unwind(t: Term) -> tuple[Term, list[Term]]:
    args = []
    while isinstance(t, App):
        args.append(t.argument)
        t = t.function
    args.reverse()
    return t, args


def rewind(head: Term, args) -> Term:
    for a in args:
        head = App(head, a)
    return head


def size(t: Term) -> int:
    """Number of atom leaves."""
    count = 0
    stack = [t]
    while stack:
        x = stack.pop()
        if isinstance(x, Atom):
            count += 1
        else:
            stack.append(x.function)
            stack.append(x.argument)
    return count


def counts(t: Term) -> dict[str, int]:
    out = {"App": 0, "S": 0, "K": 0, "I": 0}
    stack = [t]
    while stack:
        x = stack.pop()
        if isinstance(x, Atom):
            out[x.name] += 1
        else:
            out["App"] += 1
            stack.append(x.function)
            stack.append(x.argument)
    return out


def _contract(head: Atom, args: list[Term]) -> Term:
    if head == I:
        return rewind(args[0], args[1:])
    if head == K:
        return rewind(args[0], args[2:])
    x, y, z = args[:3]
    return rewind(App(App(x, z), App(y, z)), args[3:])


def step(t: Term) -> Term | None:
    """One leftmost-outermost contraction, or ``None`` if ``t`` is normal."""
    head, args = unwind(t)
    if isinstance(head, Atom) and len(args) >= _ARITY[head.name]:
        return _contract(head, args)
    for i, a in enumerate(args):
        r = step(a)
        if r is not None:
            return rewind(head, args[:i] + [r] + args[i + 1 :])
    return None


def oracle_nf(t: Term, fuel: int = 1000) -> Term:
    """Normal form of ``t`` within ``fuel`` contractions, else :class:`FuelExhausted`."""
    if fuel < 0:
        raise ValueError("fuel must be >= 0")
    for used in range(fuel + 1):
        nxt = step(t)
        if nxt is None:
            return t
        if used == fuel:
            break
        t = nxt
    raise FuelExhausted(fuel, t)


def normalizes(t: Term, fuel: int) -> bool:
    try:
        oracle_nf(t, fuel)
    except (FuelExhausted, RecursionError):
        return False
    return True


def random_term(rng: random.Random, max_size: int, min_size: int = 1) -> Term:
    """Uniform leaf count in [min_size, max_size], random binary shape."""
    leaves = rng.randint(min_size, max_size)

    def build(k: int) -> Term:
        if k == 1:
            return ATOMS[rng.choice("SKI")]
        left = rng.randint(1, k - 1)
        return App(build(left), build(k - left))

    return build(leaves)
