"""Bounded control sets for letter-bounded grammars.

``constant_bounded_control_set`` builds one bounded expression over the
productions from cycle representatives of the depth-first automaton, for
bounds with at most two letters.  ``letter_bounded_control_set`` handles
arbitrary strict letter bounds by splitting derivations at a pivot
production and recursing on the two strictly smaller sub-bounds.
"""

from __future__ import annotations

import heapq
from bisect import bisect_left
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import networkx as nx

from .config import vertex_budget
from .df_automaton import EMPTY, DfAutomaton, Vertex, explore, successor, vertex
from .errors import (
    BudgetExceeded,
    InvalidGuide,
    NotContained,
    NotDerivation,
    NotLetterBounded,
    NotMinimal,
)
from .grammar import (
    ControlWord,
    Grammar,
    NonApplicable,
    Production,
    TreeNode,
    Word,
    apply_control_word,
    build_forest,
    reduce,
)
from .bounded import (
    LetterBoundedExpression,
    language_included,
    minimize_expression,
    partition_nonterminals,
)


# ---------------------------------------------------------------------------
# Bounded control expressions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundedControlExpression:
    """``γ1* … γn*`` over production ids; empty factors are dropped."""

    factors: tuple[ControlWord, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "factors", tuple(tuple(f) for f in self.factors if len(f) > 0))

    def __add__(self, other: "BoundedControlExpression") -> "BoundedControlExpression":
        return BoundedControlExpression(self.factors + other.factors)

    def __len__(self) -> int:
        return len(self.factors)

    @property
    def length(self) -> int:
        """Total number of production occurrences over all factors."""
        return sum(len(f) for f in self.factors)

    def serialize(self, g: Grammar | None = None) -> str:
        if not self.factors:
            return "ε"
        name = (lambda p: g[p].name) if g is not None else (lambda p: f"p{p}")
        return " ".join("(" + " ".join(name(p) for p in f) + ")*" for f in self.factors)

    def __str__(self) -> str:
        return self.serialize()

    def word(self, counts: Sequence[int]) -> ControlWord:
        if len(counts) != len(self.factors):
            raise ValueError("one iteration count per factor expected")
        return tuple(p for f, c in zip(self.factors, counts) for _ in range(c) for p in f)

    # -- factor index used by membership and search ---------------------

    @cached_property
    def _occurrences(self) -> dict[ControlWord, list[int]]:
        occ: dict[ControlWord, list[int]] = {}
        for i, f in enumerate(self.factors):
            occ.setdefault(f, []).append(i)
        return occ

    @cached_property
    def _by_first(self) -> dict[int, list[ControlWord]]:
        out: dict[int, list[ControlWord]] = {}
        for f in self._occurrences:
            out.setdefault(f[0], []).append(f)
        for fs in out.values():
            fs.sort()
        return out

    def next_occurrence(self, word: ControlWord, pos: int) -> int | None:
        occ = self._occurrences.get(word)
        if not occ:
            return None
        i = bisect_left(occ, pos)
        return occ[i] if i < len(occ) else None

    def moves(self, mode: "Mode", pid: int) -> list["Mode"]:
        """NFA successors of a mode on production ``pid``.

        A mode is ``(pos, word, offset)``: ``word is None`` means a factor
        boundary where any factor with index ``>= pos`` may start next;
        otherwise ``offset`` letters of factor ``pos`` (equal to ``word``)
        have been read.  Only the earliest occurrence of each factor word is
        followed, which dominates every later occurrence.
        """
        pos, word, off = mode
        out = []
        if word is None:
            for f in self._by_first.get(pid, ()):
                i = self.next_occurrence(f, pos)
                if i is not None:
                    out.append((i, None, 0) if len(f) == 1 else (i, f, 1))
        elif word[off] == pid:
            out.append((pos, None, 0) if off + 1 == len(word) else (pos, word, off + 1))
        return out

    def contains(self, gamma: Sequence[int]) -> bool:
        return self.iterations(gamma) is not None

    def iterations(self, gamma: Sequence[int]) -> tuple[int, ...] | None:
        """An iteration vector ``(i1..in)`` with ``γ = γ1^i1 … γn^in`` and the
        fewest factor traversals, or None.

        Each mode keeps its Pareto-minimal ``(pos, traversals)`` pairs with a
        back pointer, so the reconstruction is exact.
        """
        Entry = tuple  # (pos, traversals) -> parent (key, pos, traversals)
        layer: dict[tuple, dict[Entry, tuple | None]] = {(None, 0): {(0, 0): None}}
        trail = [layer]
        for pid in gamma:
            nxt: dict[tuple, dict[Entry, tuple | None]] = {}
            for key, entries in layer.items():
                for (pos, it) in entries:
                    for m in self.moves((pos, key[0], key[1]), pid):
                        it2 = it + 1 if key[0] is None else it
                        nxt.setdefault((m[1], m[2]), {}).setdefault((m[0], it2), (key, pos, it))
            if not nxt:
                return None
            layer = {key: _pareto_entries(entries) for key, entries in nxt.items()}
            trail.append(layer)
        final = layer.get((None, 0))
        if not final:
            return None
        pos, it = min(final, key=lambda e: (e[1], e[0]))
        counts = [0] * len(self.factors)
        key = (None, 0)
        for step in range(len(gamma), 0, -1):
            parent = trail[step][key][(pos, it)]
            if key == (None, 0):
                counts[pos] += 1  # a traversal of factor ``pos`` ends here
            key, pos, it = parent
        return tuple(counts)


def _pareto_entries(entries: dict) -> dict:
    out = {}
    best = None
    for pos, it in sorted(entries):
        if best is None or it < best:
            out[(pos, it)] = entries[(pos, it)]
            best = it
    return out


Mode = tuple  # (pos, word | None, offset)


def concat_ordered(words: Iterable[Sequence[int]]) -> BoundedControlExpression:
    """``u1* … uh*`` with the words sorted lexicographically by production id."""
    return BoundedControlExpression(tuple(sorted({tuple(w) for w in words if len(w) > 0})))


@dataclass
class ControlSetFamily:
    """A finite set of bounded control expressions (kept in generation order)."""

    expressions: list[BoundedControlExpression] = field(default_factory=list)

    def __iter__(self) -> Iterator[BoundedControlExpression]:
        return iter(self.expressions)

    def __len__(self) -> int:
        return len(self.expressions)


# ---------------------------------------------------------------------------
# Coverage search: Γ ∩ A^df(k)
# ---------------------------------------------------------------------------


def _emission(g: Grammar, letters: Sequence[str]) -> dict[int, tuple[int, ...]]:
    index = {a: i for i, a in enumerate(letters)}
    out = {}
    for p in g.productions:
        v = [0] * len(letters)
        for s in p.body:
            if g.is_nonterminal(s):
                continue
            if s not in index:
                raise NotLetterBounded(f"terminal {s} of {p} is not among {' '.join(letters)}")
            v[index[s]] += 1
        out[p.id] = tuple(v)
    return out


def covered_words(
    expr: BoundedControlExpression,
    g: Grammar,
    x: str,
    k: int,
    letters: Sequence[str],
    max_len: int,
    y: str | None = None,
    budget: int | None = None,
) -> dict[Word, ControlWord]:
    """Words ``w`` with ``|w| <= max_len`` obtained by some ``γ ∈ Γ`` labelling a path
    ``X^<0> → Y^<0>`` of ``A^df(k)``, mapped to one such ``γ``.

    Words are identified by their Parikh image over ``letters`` and rendered
    in letter order, which is exact for letter-bounded languages.
    """
    limit = vertex_budget(budget) * 10
    emit = _emission(g, letters)
    by_head: dict[str, list[int]] = {}
    for p in g.productions:
        by_head.setdefault(p.head, []).append(p.id)
    goal = vertex(y)
    zero = (0,) * len(letters)
    start = (vertex(x), zero, None, 0)
    best: dict[tuple, int] = {start: 0}
    parent: dict[tuple, tuple[tuple, int] | None] = {start: None}
    heap = [(0, 0, start)]
    tie = 1
    found: dict[Word, ControlWord] = {}
    done: set[tuple] = set()
    while heap:
        pos, _, state = heapq.heappop(heap)
        if state in done:
            continue
        done.add(state)
        if len(done) > limit:
            raise BudgetExceeded("coverage search states", limit, "controlset")
        v, counts, word, off = state
        if v == goal and word is None:
            w = tuple(a for a, c in zip(letters, counts) for _ in range(c))
            if w not in found:
                found[w] = _trace(parent, state)
        if not v:
            continue
        top = v[-1][1]
        heads = {s for s, r in v if r == top}
        for h in sorted(heads):
            for pid in by_head.get(h, ()):
                t = successor(g, v, pid, k)
                if t is None:
                    continue
                c2 = tuple(a + b for a, b in zip(counts, emit[pid]))
                if sum(c2) > max_len:
                    continue
                for m in expr.moves((pos, word, off), pid):
                    nxt = (t, c2, m[1], m[2])
                    if nxt in done or best.get(nxt, m[0] + 1) <= m[0]:
                        continue
                    best[nxt] = m[0]
                    parent[nxt] = (state, pid)
                    heapq.heappush(heap, (m[0], tie, nxt))
                    tie += 1
    return found


def _trace(parent: dict, state: tuple) -> ControlWord:
    out = []
    while parent[state] is not None:
        state, pid = parent[state]
        out.append(pid)
    return tuple(reversed(out))


def family_coverage(
    family: Iterable[BoundedControlExpression],
    g: Grammar,
    x: str,
    k: int,
    letters: Sequence[str],
    max_len: int,
    y: str | None = None,
) -> dict[Word, ControlWord]:
    out: dict[Word, ControlWord] = {}
    for expr in family:
        for w, gamma in covered_words(expr, g, x, k, letters, max_len, y).items():
            out.setdefault(w, gamma)
    return out


# ---------------------------------------------------------------------------
# Constant-size letter bounds
# ---------------------------------------------------------------------------


def _letters(lb: LetterBoundedExpression | Sequence[str]) -> tuple[str, ...]:
    return lb.letters if isinstance(lb, LetterBoundedExpression) else tuple(lb)


def pruned_automaton(
    g: Grammar,
    k: int,
    starts: Iterable[str],
    targets: Iterable[str | None] | None,
    budget: int | None = None,
) -> tuple[DfAutomaton, list[Vertex]]:
    """Explore ``A^df(k)`` from the starts; keep vertices co-reachable to the targets."""
    aut = explore(g, k, list(starts), budget)
    if targets is None:
        keep = set(aut.vertices)
    else:
        keep = aut.coreachable(vertex(t) for t in targets)
    return aut, sorted(keep)


def constant_bounded_control_set(
    g: Grammar,
    lb: LetterBoundedExpression | Sequence[str],
    k: int,
    start: str | Iterable[str] | None = None,
    targets: Iterable[str | None] | None = None,
    budget: int | None = None,
) -> BoundedControlExpression:
    """Bounded expression ``Γ = (C·B0)^N · C·B0·C`` over the productions of ``g``.

    ``N`` is the number of vertices of the explored automaton (restricted to
    those reachable from ``start`` and co-reachable to ``targets``), ``C``
    repeats ``Concat(Δ)`` ``N-1`` times and ``B0`` concatenates, for each
    vertex ``q``, one shortest cycle through ``q`` per achievable letter-count
    vector.
    """
    letters = _letters(lb)
    if k < 1:
        raise ValueError("k must be at least 1")
    starts = sorted(g.nonterminals) if start is None else ([start] if isinstance(start, str) else list(start))
    starts = [s for s in starts if s in g.nonterminals]
    if not starts:
        return BoundedControlExpression()
    aut, keep = pruned_automaton(g, k, starts, targets, budget)
    kept = set(keep)
    edges = [(v, pid, t) for v, pid, t in aut.edge_list() if v in kept and t in kept]
    labels = sorted({pid for _, pid, _ in edges})
    emit = _emission(g.restrict(labels), letters) if labels else {}
    n = len(keep)
    if n == 0:
        return BoundedControlExpression()

    graph = nx.DiGraph()
    graph.add_nodes_from(range(n))
    idx = {v: i for i, v in enumerate(keep)}
    out_edges: dict[Vertex, list[tuple[int, Vertex]]] = {v: [] for v in keep}
    for v, pid, t in edges:
        graph.add_edge(idx[v], idx[t])
        out_edges[v].append((pid, t))
    component = {}
    for comp in nx.strongly_connected_components(graph):
        for i in comp:
            component[i] = comp
    max_emit = max([2] + [sum(e) for e in emit.values()])
    limit = vertex_budget(budget)

    b0 = BoundedControlExpression()
    for q in keep:
        comp = component[idx[q]]
        bound = max_emit * len(comp)
        cycles = _cycle_representatives(q, out_edges, comp, idx, emit, len(letters), bound, limit)
        b0 = b0 + concat_ordered(cycles)
    cat = concat_ordered([(p,) for p in labels])
    c = BoundedControlExpression(cat.factors * (n - 1))
    gamma = BoundedControlExpression()
    for _ in range(n):
        gamma = gamma + c + b0
    return gamma + c + b0 + c


def _cycle_representatives(q, out_edges, comp, idx, emit, s, bound, limit) -> list[ControlWord]:
    """Shortest paths ``<q,0> → <q,v>`` in the count-annotated graph, one per ``v ≠ 0``."""
    zero = (0,) * s
    src = (q, zero)
    parent: dict[tuple, tuple[tuple, int] | None] = {src: None}
    queue = deque([src])
    reps = []
    while queue:
        node = queue.popleft()
        v, counts = node
        for pid, t in out_edges[v]:
            if idx[t] not in comp:
                continue
            c2 = tuple(a + b for a, b in zip(counts, emit[pid]))
            if sum(c2) > bound:
                continue
            nxt = (t, c2)
            if nxt in parent:
                continue
            parent[nxt] = (node, pid)
            if len(parent) > limit:
                raise BudgetExceeded("cycle-representative graph", limit, "controlset")
            queue.append(nxt)
            if t == q and c2 != zero:
                reps.append(_trace(parent, nxt))
    return reps


# ---------------------------------------------------------------------------
# General strict letter bounds
# ---------------------------------------------------------------------------


def pivot_split(g: Grammar, p: Production) -> tuple[str | None, str | None, str | None, str | None] | None:
    """Split a body as ``a y b z`` (each part optional), or None if it does not fit."""
    body = list(p.body)
    parts: list[str | None] = []
    for want_nt in (False, True, False, True):
        if body and g.is_nonterminal(body[0]) == want_nt:
            parts.append(body.pop(0))
        else:
            parts.append(None)
    if body:
        return None
    a, y, b, z = parts
    return a, y, b, z


@dataclass
class _Level:
    grammar: Grammar
    letters: LetterBoundedExpression
    hat: frozenset[str] = frozenset()
    check: frozenset[str] = frozenset()
    sharp: Grammar | None = None
    pivots: tuple[int, ...] = ()


def _prepare(g0: Grammar, x0: str, lb: LetterBoundedExpression) -> _Level:
    g = reduce(g0, x0)
    if not language_included(g, x0, lb):
        raise NotContained(f"L_{x0} is not included in {lb}")
    m = minimize_expression(g, x0, lb, check=False)
    level = _Level(g, m)
    if len(m) <= 2:
        return level
    hat, check = partition_nonterminals(g, m)
    sharp_ids = [
        p.id for p in g.productions
        if p.head in check or (p.head in hat and any(s in hat for s in p.body if g.is_nonterminal(s)))
    ]
    sharp = g.restrict(sharp_ids)
    ends = LetterBoundedExpression((m.letters[0], m.letters[-1]))
    pivots = []
    for p in g.productions:
        if p.head not in hat or any(s in hat for s in p.body if g.is_nonterminal(s)):
            continue
        split = pivot_split(g, p)
        if split is None:
            continue
        if language_included(sharp, x0, ends, y=p.head):
            pivots.append(p.id)
    level.hat, level.check, level.sharp, level.pivots = hat, check, sharp, tuple(pivots)
    return level


def _sharp_expression(level: _Level, x0: str, k: int, budget: int | None) -> BoundedControlExpression:
    heads = sorted({level.grammar[p].head for p in level.pivots})
    m = level.letters
    return constant_bounded_control_set(
        level.sharp, (m.letters[0], m.letters[-1]), k + 1, start=x0, targets=heads, budget=budget
    )


def _pivot_grammar(level: _Level, pid: int) -> Grammar:
    g = level.grammar
    return g.restrict([p.id for p in g.productions if p.head in level.check] + [pid])


def letter_bounded_control_set(
    g: Grammar,
    x: str,
    lb: LetterBoundedExpression | Sequence[str],
    k: int,
    budget: int | None = None,
) -> Iterator[BoundedControlExpression]:
    """Lazily yield the members of a family ``S`` with
    ``L^(k)_x(g) ⊆ L̂_x(⋃S ∩ Γ_x^df(k+1), g)``.

    Members have the form ``Γ♯ · p* · Γ' · Γ''`` (and ``Γ♯ · p* · Γ'' · Γ'``
    when the pivot ``p`` has two nonterminals), where ``Γ♯`` covers the
    prefixes leading to the pivot's head and ``Γ'``, ``Γ''`` range over the
    families of the pivot's nonterminals.
    """
    lb = lb if isinstance(lb, LetterBoundedExpression) else LetterBoundedExpression(tuple(lb))
    if k < 1:
        raise ValueError("k must be at least 1")
    yield from _family(g, x, lb, k, budget)


def _family(g0: Grammar, x0: str, lb: LetterBoundedExpression, k: int, budget) -> Iterator[BoundedControlExpression]:
    level = _prepare(g0, x0, lb)
    if len(level.letters) <= 2:
        yield constant_bounded_control_set(level.grammar, level.letters, k, start=x0, targets=[None], budget=budget)
        return
    sharp = _sharp_expression(level, x0, k, budget)
    for pid in level.pivots:
        _, y, _, z = pivot_split(level.grammar, level.grammar[pid])
        gi = _pivot_grammar(level, pid)
        head = sharp + BoundedControlExpression(((pid,),))
        sub_y = list(_family(gi, y, level.letters, k, budget)) if y else [BoundedControlExpression()]
        sub_z = list(_family(gi, z, level.letters, k, budget)) if z else [BoundedControlExpression()]
        for ey in sub_y:
            for ez in sub_z:
                yield head + ey + ez
        if y and z:
            for ey in sub_y:
                for ez in sub_z:
                    yield head + ez + ey


GuideItem = int | tuple[int, bool]


def guided_control_set(
    g: Grammar,
    x: str,
    lb: LetterBoundedExpression | Sequence[str],
    k: int,
    sigma: Sequence[GuideItem],
    budget: int | None = None,
) -> tuple[BoundedControlExpression, tuple[GuideItem, ...]]:
    """One family member, choosing pivots from ``sigma`` instead of looping.

    An item is a production id, or ``(id, z_first)`` to select the member
    where the second nonterminal's expression comes first.  Returns the
    member and the unconsumed suffix of ``sigma``.
    """
    lb = lb if isinstance(lb, LetterBoundedExpression) else LetterBoundedExpression(tuple(lb))
    expr, used = _guided(g, x, lb, k, tuple(sigma), 0, budget)
    return expr, tuple(sigma)[used:]


def _guided(g0, x0, lb, k, sigma, used, budget) -> tuple[BoundedControlExpression, int]:
    level = _prepare(g0, x0, lb)
    if len(level.letters) <= 2:
        expr = constant_bounded_control_set(level.grammar, level.letters, k, start=x0, targets=[None], budget=budget)
        return expr, used
    if used >= len(sigma):
        raise InvalidGuide(used + 1, "guide exhausted before a pivot was chosen")
    item = sigma[used]
    pid, z_first = (item, False) if isinstance(item, int) else (int(item[0]), bool(item[1]))
    if pid not in level.pivots:
        raise InvalidGuide(used + 1, f"production {pid} is not an admissible pivot")
    _, y, _, z = pivot_split(level.grammar, level.grammar[pid])
    if z_first and not (y and z):
        raise InvalidGuide(used + 1, "z-first order needs two nonterminals in the pivot")
    used += 1
    gi = _pivot_grammar(level, pid)
    ey = ez = BoundedControlExpression()
    if y:
        ey, used = _guided(gi, y, level.letters, k, sigma, used, budget)
    if z:
        ez, used = _guided(gi, z, level.letters, k, sigma, used, budget)
    head = _sharp_expression(level, x0, k, budget) + BoundedControlExpression(((pid,),))
    return (head + ez + ey if z_first else head + ey + ez), used


def guides(g: Grammar, x: str, lb: LetterBoundedExpression, k: int) -> Iterator[tuple[GuideItem, ...]]:
    """All complete guides, in the order the family is generated."""
    lb = lb if isinstance(lb, LetterBoundedExpression) else LetterBoundedExpression(tuple(lb))
    level = _prepare(g, x, lb)
    if len(level.letters) <= 2:
        yield ()
        return
    for pid in level.pivots:
        _, y, _, z = pivot_split(level.grammar, level.grammar[pid])
        gi = _pivot_grammar(level, pid)
        sy = list(guides(gi, y, level.letters, k)) if y else [()]
        sz = list(guides(gi, z, level.letters, k)) if z else [()]
        for order in ((False, True) if y and z else (False,)):
            for a in sy:
                for b in sz:
                    yield ((pid, order),) + a + b


# ---------------------------------------------------------------------------
# Derivation decomposition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Decomposition:
    sharp: ControlWord
    pivot: int
    gamma_y: ControlWord
    gamma_z: ControlWord
    order: str  # "yz" or "zy"
    bounds: tuple[int, int, int]  # 1-based (l, m, r) inside the minimal bound

    def control_word(self) -> ControlWord:
        tail = self.gamma_y + self.gamma_z if self.order == "yz" else self.gamma_z + self.gamma_y
        return self.sharp + (self.pivot,) + tail


def _subtree_word(node: TreeNode) -> ControlWord:
    """Control word of a subtree in depth-first (pre-)order of the original steps."""
    return tuple(p for _, p in sorted(_collect(node)))


def _collect(node: TreeNode) -> list[tuple[int, int]]:
    out = []
    for i in node.steps:
        out.append((i, node.production))
    for c in node.children:
        if isinstance(c, TreeNode):
            out.extend(_collect(c))
    return out


def decompose_derivation(
    g: Grammar,
    x: str,
    lb: LetterBoundedExpression | Sequence[str],
    gamma: Sequence[int],
    k: int | None = None,
) -> Decomposition:
    """Rearrange a depth-first derivation into prefix, pivot and two sub-derivations.

    The pivot is the last step whose head can start with the first letter and
    end with the last one; the prefix collects the ancestor chain of the
    pivot together with the complete subtrees hanging off that chain.
    """
    lb = lb if isinstance(lb, LetterBoundedExpression) else LetterBoundedExpression(tuple(lb))
    gamma = tuple(gamma)
    try:
        seq = apply_control_word(g, x, gamma)
    except NonApplicable as exc:
        raise NotDerivation(str(exc)) from exc
    if not seq.is_terminal():
        raise NotDerivation("control word does not derive a terminal word")
    if not language_included(g, x, lb):
        raise NotContained(f"L_{x} is not included in {lb}")
    if len(lb) < 3:
        raise NotMinimal("decomposition needs a bound with at least three letters")
    gr = reduce(g, x)
    if minimize_expression(gr, x, lb, check=False) != lb:
        raise NotMinimal(f"{lb} is not minimal for L_{x}")
    hat, _check = partition_nonterminals(gr, lb)
    k = k if k is not None else seq.index

    forest = build_forest(seq)
    root = forest[0]
    assert isinstance(root, TreeNode)
    # ancestor chain: hat-headed nodes, each with at most one hat child
    chain = [root]
    while True:
        nxt = [c for c in chain[-1].nt_children() if c.symbol in hat and c.production is not None]
        if not nxt:
            break
        chain.append(nxt[0])
    pivot_node = chain[-1]
    sharp: list[int] = []
    for node, child in zip(chain, chain[1:]):
        sharp.append(node.production)
        for c in node.nt_children():
            if c is not child:
                sharp.extend(_subtree_word(c))
    kids = pivot_node.nt_children()
    split = pivot_split(g, g[pivot_node.production])
    if split is None:
        raise NotDerivation(f"pivot {g[pivot_node.production]} has no a·y·b·z shape")
    _, y, _, z = split
    gy = _subtree_word(kids[0]) if y else ()
    gz = _subtree_word(kids[-1]) if z else ()
    order = "yz"
    if y and z:
        ky = apply_control_word(g, y, gy).index if gy else 1
        order = "yz" if ky <= k - 1 else "zy"
    gi = gr.restrict([p.id for p in gr.productions if p.head in _check] + [pivot_node.production])
    letters = lb.letters

    def span(nt: str) -> tuple[int, int] | None:
        sub = minimize_expression(reduce(gi, nt), nt, lb, check=False).letters
        idx = [letters.index(a) + 1 for a in sub]
        return (min(idx), max(idx)) if idx else None

    sy = span(y) if y else None
    sz = span(z) if z else None
    if sy and sz:
        bounds = (sy[0], max(sy[1], sz[0]), sz[1])
    elif sy:
        bounds = (sy[0], sy[1], sy[1])
    elif sz:
        bounds = (sz[0], sz[0], sz[1])
    else:
        bounds = (1, 1, 1)
    return Decomposition(tuple(sharp), pivot_node.production, gy, gz, order, bounds)
