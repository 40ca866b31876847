"""Seeded generators of small grammars and programs for randomized checks."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .bounded import LetterBoundedExpression
from .grammar import Grammar, Production


@dataclass(frozen=True)
class LetterBoundedCase:
    grammar: Grammar
    axiom: str
    letters: LetterBoundedExpression


def random_letter_bounded_grammar(
    rng: random.Random,
    max_nonterminals: int = 4,
    max_productions: int = 8,
    max_letters: int = 4,
    min_letters: int = 1,
) -> LetterBoundedCase:
    """A grammar whose axiom language is included in ``a1* … ad*`` by construction.

    Every nonterminal owns an interval of letters; bodies ``a? Y? b? Z?`` are
    drawn so that letters and sub-intervals appear in nondecreasing order.
    Each nonterminal gets one terminal-only production, so all are productive.
    """
    d = rng.randint(min_letters, max_letters)
    letters = tuple(f"a{i}" for i in range(1, d + 1))
    n = rng.randint(1, max_nonterminals)
    names = [f"X{i}" for i in range(n)]
    span = {names[0]: (1, d)}
    for x in names[1:]:
        lo = rng.randint(1, d)
        span[x] = (lo, rng.randint(lo, d))

    def letter(lo: int, hi: int) -> tuple[str, int]:
        i = rng.randint(lo, hi)
        return letters[i - 1], i

    def body(x: str, allow_nt: bool, skip: float = 0.5) -> tuple[str, ...]:
        lo, hi = span[x]
        cur = lo
        out: list[str] = []
        for kind in ("t", "n", "t", "n"):
            if rng.random() < skip:
                continue
            if kind == "t":
                a, cur = letter(cur, hi)
                out.append(a)
            elif allow_nt:
                fits = [y for y in names if cur <= span[y][0] and span[y][1] <= hi]
                if fits:
                    y = rng.choice(fits)
                    out.append(y)
                    cur = span[y][1]
        return tuple(out)

    prods: list[Production] = []
    for x in names:
        prods.append(Production(len(prods) + 1, x, body(x, allow_nt=False)))
    budget = rng.randint(len(prods), max(len(prods), max_productions))
    tries = 0
    while len(prods) < budget and tries < 50:
        tries += 1
        x = names[0] if rng.random() < 0.5 else rng.choice(names)
        b = body(x, allow_nt=True, skip=0.3)
        if not any(s in span for s in b):
            continue
        if any(p.head == x and p.body == b for p in prods):
            continue
        prods.append(Production(len(prods) + 1, x, b))
    g = Grammar(prods, nonterminals=set(names), terminals=set(letters), check_shape=False)
    return LetterBoundedCase(g, names[0], LetterBoundedExpression(letters))


def optimality_family(k: int) -> Grammar:
    """``X_i -> X_{i-1} X_{i-1}`` for ``i = 1..k`` and ``X_0 -> a``; ``L_{X_k} = {a^(2^k)}``."""
    if k < 1:
        raise ValueError("k must be at least 1")
    prods = [Production(1, "X0", ("a",))]
    for i in range(1, k + 1):
        prods.append(Production(i + 1, f"X{i}", (f"X{i - 1}", f"X{i - 1}")))
    return Grammar(prods, nonterminals={f"X{i}" for i in range(k + 1)}, terminals={"a"}, check_shape=False)


@dataclass(frozen=True)
class PilpInstance:
    a: tuple[tuple[int, ...], ...]  # one row per unknown, one column per constraint
    c: tuple[int, ...]


def random_pilp_instance(rng: random.Random, max_unknowns: int = 3, max_constraints: int = 3,
                         max_coeff: int = 3) -> PilpInstance:
    """A system ``Σ k_i·a_i + c <= 0`` with small integer coefficients."""
    m, n = rng.randint(1, max_unknowns), rng.randint(1, max_constraints)
    a = tuple(tuple(rng.randint(-max_coeff, max_coeff) for _ in range(n)) for _ in range(m))
    c = tuple(rng.randint(-max_coeff, max_coeff) for _ in range(n))
    return PilpInstance(a, c)
