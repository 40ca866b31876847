"""Independent brute-force oracles used by the test suite.

Octagon solution sets are enumerated point by point inside a box, either
from the raw atom list a relation was built from or from a relation's
bound matrix; grammar-side helpers expand closed-form languages directly.
"""

from __future__ import annotations

import itertools
import random
from typing import Iterable, Sequence

from flatoct.octagon import INF, OctRelation, VarSet

Atom = tuple[dict[str, int], int]
Point = tuple[int, ...]


def _backtrack(n: int, lo: int, hi: int, check) -> set[Point]:
    """Points of ``[lo, hi]^n``; ``check(prefix)`` tests every constraint whose
    dimensions all lie in the prefix, so dead prefixes are cut early."""
    out: set[Point] = set()
    point: list[int] = []

    def go(d: int) -> None:
        if d == n:
            out.add(tuple(point))
            return
        for v in range(lo, hi + 1):
            point.append(v)
            if check(point):
                go(d + 1)
            point.pop()

    go(0)
    return out


def atom_solutions(vars: VarSet, atoms: Sequence[Atom], lo: int = -4, hi: int = 4) -> set[Point]:
    """Integer points of ``[lo, hi]^(2n)`` satisfying every ``Σ coeff·dim <= c``."""
    dims = vars.dims()
    compiled = []
    for coeffs, c in atoms:
        terms = [(dims.index(name), a) for name, a in coeffs.items() if a]
        last = max((i for i, _ in terms), default=-1)
        compiled.append((last, terms, c))
    by_last: dict[int, list] = {}
    for last, terms, c in compiled:
        by_last.setdefault(last, []).append((terms, c))
    if any(c < 0 for terms, c in by_last.get(-1, [])):
        return set()

    def check(prefix: list[int]) -> bool:
        d = len(prefix) - 1
        return all(sum(a * prefix[i] for i, a in terms) <= c for terms, c in by_last.get(d, ()))

    return _backtrack(len(dims), lo, hi, check)


def relation_solutions(rel: OctRelation, lo: int = -4, hi: int = 4) -> set[Point]:
    """Integer points of the box in ``rel``, read off its bound matrix.

    Entry ``m[i][j] = c`` over signed literals (``2d`` is ``+dim d``, ``2d+1``
    is ``-dim d``) bounds ``lit_j - lit_i <= c``.
    """
    if rel.is_empty():
        return set()
    m = rel.matrix
    size = len(m)
    by_last: dict[int, list[tuple[int, int, int]]] = {}
    for i in range(size):
        for j in range(size):
            c = m[i][j]
            if c != INF:
                by_last.setdefault(max(i // 2, j // 2), []).append((i, j, c))

    def lit(prefix: list[int], k: int) -> int:
        v = prefix[k // 2]
        return -v if k & 1 else v

    def check(prefix: list[int]) -> bool:
        d = len(prefix) - 1
        return all(lit(prefix, j) - lit(prefix, i) <= c for i, j, c in by_last.get(d, ()))

    return _backtrack(size // 2, lo, hi, check)


def compose_points(s1: Iterable[Point], s2: Iterable[Point], n: int) -> set[Point]:
    """Relational join of two solution sets over ``n`` variables."""
    by_mid: dict[Point, list[Point]] = {}
    for p in s2:
        by_mid.setdefault(p[:n], []).append(p[n:])
    out = set()
    for p in s1:
        for tail in by_mid.get(p[n:], ()):
            out.add(p[:n] + tail)
    return out


def random_atoms(rng: random.Random, vars: VarSet, count: int, box: int = 4, spread: int = 6) -> list[Atom]:
    """Box constraints on every dimension plus ``count`` random octagonal atoms."""
    dims = vars.dims()
    atoms: list[Atom] = []
    for d in dims:
        atoms.append(({d: 1}, box))
        atoms.append(({d: -1}, box))
    for _ in range(count):
        if rng.random() < 0.25:
            d = rng.choice(dims)
            atoms.append(({d: rng.choice((1, -1))}, rng.randint(-box, box)))
        else:
            u, w = rng.sample(dims, 2)
            atoms.append(({u: rng.choice((1, -1)), w: rng.choice((1, -1))}, rng.randint(-spread, spread)))
    return atoms


def bounded_language(words: Sequence[Sequence[str]], max_len: int) -> set[tuple[str, ...]]:
    """All words of ``w1* … wd*`` up to ``max_len`` by direct expansion."""
    out = set()
    ranges = [range(max_len // len(w) + 1) for w in words]
    for counts in itertools.product(*ranges):
        word = tuple(s for w, c in zip(words, counts) for _ in range(c) for s in w)
        if len(word) <= max_len:
            out.add(word)
    return out


def random_2nf_grammar(rng: random.Random, max_nonterminals: int = 4, terminals: Sequence[str] = ("a", "b")):
    """A random grammar with bodies of length at most two; every nonterminal
    gets one terminal-only production so that it is productive."""
    from flatoct.grammar import Grammar, Production

    n = rng.randint(1, max_nonterminals)
    names = [f"N{i}" for i in range(n)]
    symbols = list(terminals) + names
    prods = []
    for x in names:
        body = tuple(rng.choice(terminals) for _ in range(rng.randint(0, 2)))
        prods.append(Production(len(prods) + 1, x, body))
    for _ in range(rng.randint(1, 2 * n + 2)):
        x = rng.choice(names)
        body = tuple(rng.choice(symbols) for _ in range(rng.randint(1, 2)))
        if any(p.head == x and p.body == body for p in prods):
            continue
        prods.append(Production(len(prods) + 1, x, body))
    return Grammar(prods, nonterminals=names, terminals=terminals)


def random_derivation(g, start: Sequence[str], rng: random.Random, depth_first: bool = True, max_steps: int = 30):
    """A random (depth-first) derivation from ``start`` as ``(gamma, positions)``,
    or None when it did not reach a terminal word within ``max_steps``."""
    word = list(start)
    ranks = [0 if g.is_nonterminal(s) else None for s in word]
    gamma, positions = [], []
    for step in range(max_steps):
        live = [i for i, r in enumerate(ranks) if r is not None]
        if not live:
            return tuple(gamma), tuple(positions)
        top = max(ranks[i] for i in live)
        choices = [i for i in live if ranks[i] == top] if depth_first else live
        j = rng.choice(choices)
        prods = g.by_head(word[j])
        if step > max_steps // 2:
            prods = sorted(prods, key=lambda p: sum(1 for s in p.body if g.is_nonterminal(s)))[:1]
        p = rng.choice(prods)
        gamma.append(p.id)
        positions.append(j)
        others = max((ranks[i] for i in live if i != j), default=-1)
        word[j:j + 1] = list(p.body)
        ranks[j:j + 1] = [others + 1 if g.is_nonterminal(s) else None for s in p.body]
    return None


def point_semantics(word: Sequence[str], labels, lo: int = -2, hi: int = 2) -> set[Point]:
    """``⟦w⟧`` restricted to states in ``[lo, hi]^n``, by joining point relations.

    Call and return symbols are matched here with a depth counter, independently
    of the library's nesting code.  Exact whenever every label bounds all of its
    dimensions inside the box, since intermediate states then stay inside too.
    """
    n = len(labels.vars.names)
    states = list(itertools.product(range(lo, hi + 1), repeat=n))
    cache: dict[int, set[Point]] = {}

    def points(rel) -> set[Point]:
        key = id(rel)
        if key not in cache:
            cache[key] = {s + t for s in states for t in states if rel.contains(s + t)}
        return cache[key]

    identity = {s + s for s in states}

    def segment(ws: Sequence[str]) -> set[Point]:
        acc = identity
        i = 0
        while i < len(ws):
            s = ws[i]
            if s.startswith("call["):
                name = s[5:-1]
                depth, j = 0, i + 1
                while not (ws[j] == f"ret[{name}]" and depth == 0):
                    if ws[j] == s:
                        depth += 1
                    elif ws[j] == f"ret[{name}]":
                        depth -= 1
                    j += 1
                inner = compose_points(points(labels.relations[s]), segment(ws[i + 1:j]), n)
                inner = compose_points(inner, points(labels.relations[f"ret[{name}]"]), n)
                part = inner & points(labels.frames[name])
                i = j + 1
            else:
                part = points(labels.relations[s])
                i += 1
            acc = compose_points(acc, part, n)
        return acc

    return segment(tuple(word))
