"""Ranked-word automaton whose paths are the k-index depth-first derivations.

A vertex is a tuple of ``(nonterminal, rank)`` pairs with nondecreasing,
contiguous ranks.  Rewriting the entry of maximal rank with ``X -> w`` drops
it and appends the nonterminals of ``w`` with the rank ``i'`` given by the
three-case rule (0 if nothing else is left, ``i`` if no other rank-``i``
entry remains, ``i + 1`` otherwise).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .config import vertex_budget
from .errors import BudgetExceeded
from .grammar import Grammar

Vertex = tuple[tuple[str, int], ...]

EMPTY: Vertex = ()


def vertex(x: str | None) -> Vertex:
    """``X^<0>`` for a nonterminal, the empty vertex for ``None``."""
    return EMPTY if x is None else ((x, 0),)


def render(v: Vertex) -> str:
    return "".join(f"{x}{{{r}}}" for x, r in v) if v else "ε"


def is_valid_vertex(v: Vertex, k: int) -> bool:
    if len(v) > k:
        return False
    ranks = [r for _, r in v]
    if ranks != sorted(ranks):
        return False
    if ranks and set(ranks) != set(range(ranks[-1] + 1)):
        return False
    return all(ranks.count(r) <= 2 for r in set(ranks))


def successor(g: Grammar, v: Vertex, pid: int, k: int) -> Vertex | None:
    if not v:
        return None
    p = g[pid]
    top = v[-1][1]
    pos = None
    for idx, (x, r) in enumerate(v):
        if r == top and x == p.head:
            pos = idx
            break
    if pos is None:
        return None
    rest = v[:pos] + v[pos + 1:]
    new = [s for s in p.body if g.is_nonterminal(s)]
    if len(rest) + len(new) > k:
        return None
    if not rest:
        rank = 0
    elif any(r == top for _, r in rest):
        rank = top + 1
    else:
        rank = top
    return rest + tuple((s, rank) for s in new)


@dataclass
class DfAutomaton:
    grammar: Grammar
    k: int
    starts: tuple[str, ...]
    vertices: set[Vertex] = field(default_factory=set)
    edges: dict[Vertex, list[tuple[int, Vertex]]] = field(default_factory=dict)

    def step(self, v: Vertex, pid: int) -> Vertex | None:
        for q, t in self.edges.get(v, ()):
            if q == pid:
                return t
        return None

    def run(self, src: Vertex, gamma: Iterable[int]) -> Vertex | None:
        v: Vertex | None = src
        for pid in gamma:
            v = self.step(v, pid)
            if v is None:
                return None
        return v

    def accepts(self, x: str, y: str | None, gamma: Sequence[int]) -> bool:
        return self.run(vertex(x), gamma) == vertex(y)

    def edge_list(self) -> list[tuple[Vertex, int, Vertex]]:
        return sorted((v, pid, t) for v, out in self.edges.items() for pid, t in out)

    def coreachable(self, targets: Iterable[Vertex]) -> set[Vertex]:
        back: dict[Vertex, set[Vertex]] = {}
        for v, out in self.edges.items():
            for _, t in out:
                back.setdefault(t, set()).add(v)
        seen = {t for t in targets if t in self.vertices}
        queue = deque(seen)
        while queue:
            t = queue.popleft()
            for v in back.get(t, ()):
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        return seen

    def dump(self) -> str:
        g = self.grammar
        return "\n".join(f"{render(v)} --{g[pid].name}--> {render(t)}" for v, pid, t in self.edge_list())


def explore(g: Grammar, k: int, x: str | Iterable[str], budget: int | None = None) -> DfAutomaton:
    """Materialize the fragment reachable from ``X^<0>`` (or several starts)."""
    if k < 1:
        raise ValueError("k must be at least 1")
    starts = (x,) if isinstance(x, str) else tuple(x)
    limit = vertex_budget(budget)
    aut = DfAutomaton(g, k, starts)
    queue = deque(vertex(s) for s in starts)
    aut.vertices.update(queue)
    by_head: dict[str, list[int]] = {}
    for p in g.productions:
        by_head.setdefault(p.head, []).append(p.id)
    while queue:
        v = queue.popleft()
        out = []
        if v:
            top = v[-1][1]
            heads = sorted({s for s, r in v if r == top})
            for h in heads:
                for pid in by_head.get(h, ()):
                    t = successor(g, v, pid, k)
                    if t is None:
                        continue
                    out.append((pid, t))
                    if t not in aut.vertices:
                        aut.vertices.add(t)
                        if len(aut.vertices) > limit:
                            raise BudgetExceeded("depth-first automaton vertices", limit, "automaton")
                        queue.append(t)
        aut.edges[v] = sorted(out)
    cap = max(g.size, 2) ** (2 * k)
    assert len(aut.vertices) <= cap, "vertex count exceeds |G|^(2k)"
    return aut


def accepts(g: Grammar, k: int, x: str, y: str | None, gamma: Sequence[int]) -> bool:
    """Is ``gamma`` the label of a path ``X^<0> -> Y^<0>`` in the automaton?"""
    v: Vertex | None = vertex(x)
    for pid in gamma:
        if pid not in g:
            return False
        v = successor(g, v, pid, k)
        if v is None:
            return False
    return v == vertex(y)
