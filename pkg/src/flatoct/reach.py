"""Flat-octagonal reachability: the decision pipeline and its oracles.

``reach_fo`` intersects the program grammar with the bounded expression,
maps the product onto a strict letter-bounded grammar, builds control-set
families for each product axiom and searches every family member for a
depth-first control word with a nonempty relation.  ``brute_oracle``
enumerates words directly and serves as ground truth at small sizes.
"""

from __future__ import annotations

import enum
import itertools
import sys
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

from .bounded import BoundedExpression, bowtie_grammar, intersect_grammar
from .config import node_budget
from .control_set import BoundedControlExpression, letter_bounded_control_set
from .df_automaton import EMPTY, DfAutomaton, explore, successor, vertex
from .errors import BudgetExceeded, EmptyLanguage
from .generators import optimality_family
from .grammar import ControlWord, Grammar, Production, TreeNode, Word, normalize_2nf, reduce
from .octagon import OctRelation, VarSet, intersect, parse_octagon
from .semantics import ProgramLabels, items_semantics, map_tree, word_semantics

__all__ = [
    "AnalysisConfig",
    "Program",
    "Status",
    "Verdict",
    "Witness",
    "brute_oracle",
    "flat_check",
    "index_grammar",
    "optimality_family",
    "pilp_encode",
    "pilp_feasible",
    "pilp_iteration_bound",
    "reach_fo",
    "reach_fo_k",
]


# ---------------------------------------------------------------------------
# Inputs and outputs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Program:
    grammar: Grammar
    axiom: str
    labels: ProgramLabels
    query: OctRelation | None = None

    @property
    def vars(self) -> VarSet:
        return self.labels.vars

    def with_query(self, query: OctRelation | str | None) -> "Program":
        if isinstance(query, str):
            query = parse_octagon(query, self.vars)
        return replace(self, query=query)

    def restrict(self, rel: OctRelation) -> OctRelation:
        return rel if self.query is None else intersect(rel, self.query)

    def word_relation(self, w: Sequence[str]) -> OctRelation:
        """``⟦w⟧`` conjoined with the query."""
        return self.restrict(word_semantics(w, self.labels))

    @property
    def size(self) -> int:
        """Sum of relation sizes (atom counts) over the productions' statements."""
        total = 0
        for p in self.grammar.productions:
            for s in p.body:
                if not self.grammar.is_nonterminal(s):
                    total += len(self.labels.rho(s).atoms())
                    if s.startswith("call["):
                        total += len(self.labels.frame(s[5:-1]).atoms())
        return total


@dataclass(frozen=True)
class AnalysisConfig:
    K: int | None = None
    K_cap: int = 2
    iteration_bound: int = 10
    word_bound: int = 30
    node_budget: int | None = None
    vertex_budget: int | None = None

    def __post_init__(self) -> None:
        for name in ("K_cap", "iteration_bound"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.word_bound < 0:
            raise ValueError("word_bound must be non-negative")
        if self.K is not None and self.K < 1:
            raise ValueError("K must be positive")


class Status(str, enum.Enum):
    REACHABLE = "REACHABLE"
    UNREACHABLE_UP_TO_BOUND = "UNREACHABLE_UP_TO_BOUND"
    UNKNOWN = "UNKNOWN"


@dataclass
class Witness:
    """A word with nonempty relation; ``iterations`` counts factor traversals
    (emitted sparsely as ``[factor index, count]`` pairs in JSON)."""

    word: Word
    relation: OctRelation
    control_word: tuple[str, ...] = ()
    iterations: tuple[int, ...] | None = None

    def to_json(self) -> dict:
        return {
            "control_word": list(self.control_word),
            "iterations": (
                [[i, n] for i, n in enumerate(self.iterations) if n] if self.iterations is not None else None
            ),
            "word": list(self.word),
            "relation": self.relation.pretty(),
        }


@dataclass
class Verdict:
    status: Status
    witness: Witness | None = None
    diagnostics: dict = field(default_factory=dict)
    sizes: dict = field(default_factory=dict)
    bounds: dict = field(default_factory=dict)
    timings_ms: dict = field(default_factory=dict)

    @property
    def reachable(self) -> bool:
        return self.status is Status.REACHABLE

    def to_json(self) -> dict:
        return {
            "verdict": self.status.value,
            "witness": self.witness.to_json() if self.witness else None,
            "bounds": dict(self.bounds),
            "sizes": dict(self.sizes),
            "diagnostics": dict(self.diagnostics),
            "timings_ms": dict(self.timings_ms),
        }


# ---------------------------------------------------------------------------
# Bounded flat checking
# ---------------------------------------------------------------------------

Evaluation = tuple[OctRelation, Word] | None


class TreeEvaluator:
    """Relations of derivation subtrees, interned by value.

    A completed node's items are its body with every nonterminal replaced by
    the child's value.  Nodes of ``segment_productions`` (chain tails added by
    normalization) are not closed: their value is their item list, spliced
    into the parent, so a call and its return always meet in the body of one
    program production.  Every other node's value is a relation id; a body is
    evaluated once per tuple of child relation ids, and ``None`` signals an
    empty relation.  ``grammar`` supplies production bodies when the acceptor
    runs over a relabelled copy with the same production ids.
    """

    def __init__(
        self,
        labels: ProgramLabels,
        query: OctRelation | None = None,
        segment_productions: Iterable[int] = (),
        grammar: Grammar | None = None,
    ):
        self.labels = labels
        self.grammar = grammar
        self.query = query
        self.segments = frozenset(segment_productions)
        self._body_rel: dict[tuple, int] = {}  # items over relation ids -> relation id
        self._rel_ids: dict[object, int] = {}  # relation key -> relation id
        self._rels: list[OctRelation] = []
        self._empty: list[bool] = []

    def complete(self, pid: int, children: Sequence) -> int | tuple | None:
        if self.segments and any(type(c) is tuple for c in children):
            items: list = []
            for c in children:
                if type(c) is tuple:
                    items.extend(c)
                else:
                    items.append(c)
            key = tuple(items)
        else:
            key = tuple(children)
        if pid in self.segments:
            return key
        rid = self._body_rel.get(key)
        if rid is None:
            rels = self._rels
            rel = items_semantics([rels[i] if type(i) is int else i for i in key], self.labels)
            rid = self._rel_ids.setdefault(rel.key(), len(rels))
            if rid == len(rels):
                rels.append(rel)
                self._empty.append(rel.is_empty())
            self._body_rel[key] = rid
        return None if self._empty[rid] else rid

    def relation(self, rid: int) -> OctRelation:
        return self._rels[rid]

    def finish(self, rid: int) -> OctRelation | None:
        rel = self._rels[rid]
        if self.query is not None:
            rel = intersect(rel, self.query)
        return None if rel.is_empty() else rel


class _Frame:
    __slots__ = ("pid", "children", "pending", "parent", "slot", "up")

    def __init__(self, pid, children, pending, parent, slot):
        self.pid = pid
        self.children = children
        self.pending = pending
        self.parent = parent
        self.slot = slot
        # completed children -> value at the root (None: empty on the way up).
        # Valid because a frame's subtree is finished before any nonterminal
        # outside it is rewritten, so its ancestors' other children are fixed.
        self.up: dict[tuple, object] = {}


_MISSING = object()


def df_yield(g: Grammar, start: str, gamma: Sequence[int]) -> Word:
    """Yield of the depth-first derivation of ``gamma`` from ``start``, always
    rewriting the first pending nonterminal of maximal rank with the head."""
    root: list = [start]
    v = vertex(start)
    holes: list[tuple[list, int]] = [(root, 0)]
    for pid in gamma:
        p = g[pid]
        top = v[-1][1]
        idx = next(i for i, (x, r) in enumerate(v) if r == top and x == p.head)
        node: list = list(p.body)
        parent, slot = holes.pop(idx)
        parent[slot] = node
        holes += [(node, j) for j, sym in enumerate(p.body) if g.is_nonterminal(sym)]
        nv = successor(g, v, pid, len(v) + len(p.body))
        assert nv is not None
        v = nv
    out: list[str] = []

    def walk(item) -> None:
        if isinstance(item, list):
            for c in item:
                walk(c)
        else:
            out.append(item)

    walk(root)
    return tuple(out)


def _pareto(pairs: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    out: list[tuple[int, int]] = []
    for pos, it in sorted(set(pairs)):
        if not out or it < out[-1][1]:
            out.append((pos, it))
    return tuple(out)


def flat_check(
    expr: BoundedControlExpression,
    acceptor: DfAutomaton,
    labels: ProgramLabels | TreeEvaluator,
    cfg: AnalysisConfig | None = None,
    start: str | None = None,
) -> Verdict:
    """Search ``γ = γ1^i1 … γn^in`` with ``Σ ij <= iteration_bound``, accepted
    by the automaton from ``start`` to the empty vertex, whose derivation
    tree has a nonempty relation.

    The search is depth first over distinct control words, in increasing
    order of production ids.  Alongside the automaton vertex it keeps the
    Pareto-minimal (factor position, traversals) pairs of the expression and
    the partially built derivation tree, whose completed subtrees are
    evaluated at once; a subtree with an empty relation cuts the branch.
    When two pending nonterminals could both be rewritten, the first is
    chosen, as in the automaton's successor function.
    """
    cfg = cfg or AnalysisConfig()
    start = start if start is not None else acceptor.starts[0]
    ev = labels if isinstance(labels, TreeEvaluator) else TreeEvaluator(labels)
    g = ev.grammar or acceptor.grammar
    bound = cfg.iteration_bound
    limit = node_budget(cfg.node_budget)
    counter = {"nodes": 0, "words": 0}
    # (vertex, mode, factor position) -> largest remaining budget known dead;
    # a set of modes is dead iff each of its members is
    dead: dict[tuple, int] = {}
    found: list = []
    root_frame = _Frame(None, [None], 1, None, 0)
    result: list = [None]
    nts_of = {p.id: [j for j, sym in enumerate(p.body) if g.is_nonterminal(sym)] for p in g.productions}
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 20_000))

    def fill(frame: _Frame, slot: int, value, log: list) -> bool:
        """Record a completed child and propagate completions upwards."""
        climbed: list[tuple[_Frame, tuple]] = []
        while True:
            frame.children[slot] = value
            frame.pending -= 1
            log.append(frame)
            if frame.pending:
                return True
            if frame.parent is None:
                root = value
                break
            key = tuple(frame.children)
            root = frame.up.get(key, _MISSING)
            if root is not _MISSING:
                break
            climbed.append((frame, key))
            value = ev.complete(frame.pid, frame.children)
            if value is None:
                root = None
                break
            frame, slot = frame.parent, frame.slot
        for f, key in climbed:
            f.up[key] = root
        result[0] = root
        return root is not None

    def undo(log: list) -> None:
        for frame in reversed(log):
            frame.pending += 1
        result[0] = None

    def dfs(v, holes, modes, gamma: list[int]) -> bool:
        counter["nodes"] += 1
        if counter["nodes"] > limit:
            raise BudgetExceeded("flat-check search nodes", limit, "flat_check")
        alive = False
        if v == EMPTY and (None, 0) in modes:
            alive = True
            counter["words"] += 1
            rel = ev.finish(result[0])
            if rel is not None:
                found.append((tuple(gamma), rel, df_yield(g, start, gamma)))
                return True
        for pid, t in acceptor.edges.get(v, ()):
            nxt: dict[tuple, list[tuple[int, int]]] = {}
            for (word, off), pairs in modes.items():
                for pos, it in pairs:
                    for m in expr.moves((pos, word, off), pid):
                        it2 = it + 1 if word is None else it
                        if it2 <= bound:
                            nxt.setdefault((m[1], m[2]), []).append((m[0], it2))
            if not nxt:
                continue
            frozen = {key: _pareto(pairs) for key, pairs in nxt.items()}
            if all(
                dead.get((t, key, pos), -1) >= bound - it for key, pairs in frozen.items() for pos, it in pairs
            ):
                continue
            # rewrite the first pending nonterminal of maximal rank with the head
            p = g[pid]
            top = v[-1][1]
            idx = next(i for i, (x, r) in enumerate(v) if r == top and x == p.head)
            hole_frame, hole_slot = holes[idx]
            body_nts = nts_of[pid]
            frame = _Frame(pid, list(p.body), len(body_nts), hole_frame, hole_slot)
            log: list = []
            ok = True
            if not body_nts:
                value = ev.complete(pid, frame.children)
                ok = value is not None and fill(hole_frame, hole_slot, value, log)
            if ok:
                new_holes = holes[:idx] + holes[idx + 1:] + tuple((frame, j) for j in body_nts)
                gamma.append(pid)
                sub = dfs(t, new_holes, frozen, gamma)
                gamma.pop()
            else:
                sub = True  # semantically empty here, not necessarily dead elsewhere
            undo(log)
            if found:
                return True
            if sub:
                alive = True
            else:
                for mk, pairs in frozen.items():
                    for pos, it in pairs:
                        slot = (t, mk, pos)
                        dead[slot] = max(dead.get(slot, -1), bound - it)
        return alive

    dfs(vertex(start), ((root_frame, 0),), {(None, 0): ((0, 0),)}, [])
    diag = {"control_words_checked": counter["words"], "search_nodes": counter["nodes"]}
    bounds = {"iter": bound}
    if found:
        gamma, rel, word = found[0]
        wit = Witness(word, rel, tuple(g[q].name for q in gamma), expr.iterations(gamma))
        return Verdict(Status.REACHABLE, wit, diag, bounds=bounds)
    return Verdict(Status.UNREACHABLE_UP_TO_BOUND, None, diag, bounds=bounds)


# ---------------------------------------------------------------------------
# Index-bounding grammar
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IndexGrammar:
    grammar: Grammar
    origin: dict[int, int]
    k: int

    def axiom(self, x: str) -> str:
        return index_name(x, self.k)

    def symbol(self, sym: str) -> str:
        return sym.rsplit("#", 1)[0] if "#" in sym else sym

    def to_original(self, node: TreeNode) -> TreeNode:
        return map_tree(node, self.origin, self.symbol)


def index_name(x: str, i: int) -> str:
    return f"{x}#{i}"


def index_grammar(g: Grammar, k: int) -> IndexGrammar:
    """Grammar ``G_k`` with ``L_{X#k}(G_k) = L^(k)_X(G)``.

    ``X#i`` derives what ``X`` derives with index at most ``i``: with two
    nonterminals in a body, one of them is bounded by ``i-1`` (it is derived
    while the other waits) and the other by ``i``.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    prods: list[Production] = []
    origin: dict[int, int] = {}

    def add(head: str, body: tuple[str, ...], p: Production, tag: str) -> None:
        pid = len(prods) + 1
        prods.append(Production(pid, head, body, f"{p.name}{tag}"))
        origin[pid] = p.id

    for i in range(1, k + 1):
        for p in g.productions:
            nts = [j for j, s in enumerate(p.body) if g.is_nonterminal(s)]
            head = index_name(p.head, i)
            if len(nts) == 0:
                add(head, p.body, p, f"#{i}")
            elif len(nts) == 1:
                body = list(p.body)
                body[nts[0]] = index_name(body[nts[0]], i)
                add(head, tuple(body), p, f"#{i}")
            elif len(nts) == 2:
                if i == 1:
                    continue
                for first, tag in ((0, "a"), (1, "b")):
                    body = list(p.body)
                    for j, pos in enumerate(nts):
                        body[pos] = index_name(body[pos], i - 1 if j == first else i)
                    add(head, tuple(body), p, f"#{i}{tag}")
            else:
                raise ValueError(f"{p} has more than two nonterminals")
    nts = {index_name(x, i) for x in g.nonterminals for i in range(1, k + 1)}
    gk = Grammar(prods, nonterminals=nts, terminals=g.terminals, check_shape=False)
    assert gk.size <= 3 * k * g.size + k * (k + 1), "index grammar exceeds 3k|G| + k(k+1)"
    return IndexGrammar(gk, origin, k)


# ---------------------------------------------------------------------------
# The pipeline
# ---------------------------------------------------------------------------


def _ms(t0: float) -> int:
    return int(round((time.perf_counter() - t0) * 1000))


def reach_fo(p: Program, b: BoundedExpression, cfg: AnalysisConfig | None = None) -> Verdict:
    """Decide ``⟦P⟧_b ≠ ∅`` up to the configured search bounds."""
    cfg = cfg or AnalysisConfig()
    return _pipeline(p, p.grammar, p.axiom, b, cfg, None)


def reach_fo_k(p: Program, b: BoundedExpression, k: int, cfg: AnalysisConfig | None = None) -> Verdict:
    """Like :func:`reach_fo`, restricted to words with ``k``-index derivations."""
    cfg = cfg or AnalysisConfig()
    gk = index_grammar(p.grammar, k)
    verdict = _pipeline(p, gk.grammar, gk.axiom(p.axiom), b, replace(cfg, K=k), k)
    verdict.sizes["index_grammar"] = gk.grammar.size
    return verdict


def _pipeline(
    p: Program,
    g: Grammar,
    axiom: str,
    b: BoundedExpression,
    cfg: AnalysisConfig,
    k: int | None,
) -> Verdict:
    timings: dict[str, int] = {}
    sizes: dict[str, int] = {}
    bounds = {"K": None, "k": k, "iter": cfg.iteration_bound, "word": cfg.word_bound}
    stage = "normalize"
    try:
        t0 = time.perf_counter()
        g2, nmap = normalize_2nf(g)
        timings["normalize"] = _ms(t0)

        stage = "intersect"
        t0 = time.perf_counter()
        inter = intersect_grammar(g2, axiom, b)
        timings["intersect"] = _ms(t0)
        sizes["intersection"] = inter.grammar.size
        sizes["axioms"] = len(inter.axioms)
        if not inter.axioms:
            return Verdict(Status.UNREACHABLE_UP_TO_BOUND, None, {"reason": "empty language"},
                           sizes, bounds, timings)

        stage = "bowtie"
        t0 = time.perf_counter()
        bow = bowtie_grammar(inter)
        timings["bowtie"] = _ms(t0)
        K = cfg.K if cfg.K is not None else min(cfg.K_cap, 2 + len(inter.grammar.nonterminals))
        bounds["K"] = K

        segments = [q for q, q2 in inter.strip_production.items() if q2 in nmap.aux]
        evaluator = TreeEvaluator(p.labels, p.query, segments, inter.grammar)

        members = 0
        words_checked = 0
        vertices = 0
        t_family = t_check = 0.0
        for x in inter.axioms:
            stage = "automaton"
            gx = reduce(bow.grammar, x)
            acceptor = explore(gx, K + 1, x, cfg.vertex_budget)
            vertices += len(acceptor.vertices)
            stage = "controlset"
            family = letter_bounded_control_set(gx, x, bow.letters, K, cfg.vertex_budget)
            while True:
                t0 = time.perf_counter()
                member = next(family, None)
                t_family += time.perf_counter() - t0
                if member is None:
                    break
                members += 1
                stage = "flat_check"
                tilde = BoundedControlExpression(tuple(bow.to_intersection(f) for f in member.factors))
                t0 = time.perf_counter()
                verdict = flat_check(tilde, acceptor, evaluator, cfg, start=x)
                t_check += time.perf_counter() - t0
                words_checked += verdict.diagnostics["control_words_checked"]
                if verdict.reachable:
                    wit = verdict.witness
                    assert wit is not None
                    _reverify(p, b, wit)
                    timings["controlset"] = int(t_family * 1000)
                    timings["flat_check"] = int(t_check * 1000)
                    sizes.update(automaton_vertices=vertices, family_members_checked=members)
                    diag = {"axiom": x, "control_words_checked": words_checked}
                    return Verdict(Status.REACHABLE, wit, diag, sizes, bounds, timings)
                stage = "controlset"
        timings["controlset"] = int(t_family * 1000)
        timings["flat_check"] = int(t_check * 1000)
        sizes.update(automaton_vertices=vertices, family_members_checked=members)
        diag = {"control_words_checked": words_checked,
                "exhausted": f"iteration vectors with sum <= {cfg.iteration_bound}, K = {K}"}
        return Verdict(Status.UNREACHABLE_UP_TO_BOUND, None, diag, sizes, bounds, timings)
    except BudgetExceeded as exc:
        diag = {"stage": exc.stage or stage, "budget": exc.budget, "what": exc.what}
        return Verdict(Status.UNKNOWN, None, diag, sizes, bounds, timings)


def _reverify(p: Program, b: BoundedExpression, wit: Witness) -> None:
    if not b.accepts(wit.word):
        raise AssertionError(f"witness word {' '.join(wit.word)} is not in {b}")
    if p.word_relation(wit.word).is_empty():
        raise AssertionError("witness word has an empty relation")


# ---------------------------------------------------------------------------
# Brute-force oracle
# ---------------------------------------------------------------------------


def bounded_words(g: Grammar, x: str, b: BoundedExpression, max_len: int, budget: int | None = None) -> list[Word]:
    """Words of ``L_x(g) ∩ b`` with length at most ``max_len``, shortest first.

    A least fixpoint over length-bounded word sets in which every partial
    word must be a factor of some word of ``b``.
    """
    limit = node_budget(budget)
    lang: dict[str, set[Word]] = {n: set() for n in g.nonterminals}
    changed = True
    total = 0
    while changed:
        changed = False
        for p in g.productions:
            parts: list[Iterable[Word]] = [
                sorted(lang[s]) if g.is_nonterminal(s) else [(s,)] for s in p.body
            ]
            acc: set[Word] = {()}
            for part in parts:
                nxt = set()
                for u in acc:
                    for v in part:
                        w = u + v
                        if len(w) <= max_len and b.is_factor(w):
                            nxt.add(w)
                acc = nxt
                if not acc:
                    break
            new = acc - lang[p.head]
            if new:
                lang[p.head] |= new
                total += len(new)
                if total > limit:
                    raise BudgetExceeded("oracle word enumeration", limit, "oracle")
                changed = True
    return sorted((w for w in lang.get(x, ()) if b.accepts(w)), key=lambda w: (len(w), w))


def brute_oracle(p: Program, b: BoundedExpression, cfg: AnalysisConfig | None = None) -> Verdict:
    """Enumerate ``L_I(G) ∩ b`` up to ``word_bound`` and evaluate each word."""
    cfg = cfg or AnalysisConfig()
    bounds = {"word": cfg.word_bound}
    t0 = time.perf_counter()
    try:
        words = bounded_words(p.grammar, p.axiom, b, cfg.word_bound, cfg.node_budget)
    except BudgetExceeded as exc:
        return Verdict(Status.UNKNOWN, None, {"stage": "oracle", "budget": exc.budget}, bounds=bounds)
    for w in words:
        rel = p.word_relation(w)
        if not rel.is_empty():
            return Verdict(Status.REACHABLE, Witness(w, rel), {"words_checked": words.index(w) + 1},
                           bounds=bounds, timings_ms={"oracle": _ms(t0)})
    return Verdict(Status.UNREACHABLE_UP_TO_BOUND, None, {"words_checked": len(words)},
                   bounds=bounds, timings_ms={"oracle": _ms(t0)})


# ---------------------------------------------------------------------------
# PILP encoding
# ---------------------------------------------------------------------------


def pilp_encode(a: Sequence[Sequence[int]], c: Sequence[int]) -> tuple[Program, BoundedExpression]:
    """Program and bounded expression whose reachability decides
    ``Σ_i k_i·a_i + c <= 0`` over nonnegative integers ``k_1..k_m``.

    ``a`` has one row per unknown ``k_i`` and one column per constraint.
    """
    m = len(a)
    if m < 1:
        raise ValueError("at least one unknown is required")
    n = len(c)
    if any(len(row) != n for row in a):
        raise ValueError("every row needs one coefficient per constraint")
    if n == 0:
        a, c, n = [[0] for _ in range(m)], [0], 1
    names = [f"x{j}" for j in range(1, n + 1)]
    vs = VarSet(tuple(names))

    def shift(vec: Sequence[int]) -> str:
        return ", ".join(f"{v}' = {v} + {d}" if d >= 0 else f"{v}' = {v} - {-d}" for v, d in zip(names, vec))

    rel = {"tau0": ", ".join(f"{v}' = 0" for v in names)}
    for i in range(1, m):
        rel[f"tau{i}"] = ", ".join(f"{v}' = {v}" for v in names)
    rel[f"tau{m}"] = shift(c)
    rel[f"tau{m + 1}"] = ", ".join(f"{v} <= 0" for v in names)
    for i in range(1, m + 1):
        rel[f"lam{i}"] = shift(a[i - 1])
    prods = []
    for i in range(0, m + 1):
        prods.append(Production(len(prods) + 1, f"X{i}", (f"tau{i}", f"X{i + 1}")))
    for i in range(1, m + 1):
        prods.append(Production(len(prods) + 1, f"X{i}", (f"lam{i}", f"X{i}")))
    prods.append(Production(len(prods) + 1, f"X{m + 1}", (f"tau{m + 1}",)))
    g = Grammar(prods)
    labels = ProgramLabels(vs, {s: parse_octagon(r, vs) for s, r in rel.items()})
    words = [("tau0",)]
    for i in range(1, m + 1):
        words += [(f"lam{i}",), (f"tau{i}",)]
    words.append((f"tau{m + 1}",))
    return Program(g, "X0", labels), BoundedExpression(tuple(words))


def pilp_iteration_bound(m: int, max_value: int = 10) -> int:
    """Factor traversals covering every ``k ∈ [0, max_value]^m``: one per
    fixed statement ``tau_0..tau_{m+1}`` plus one per loop iteration."""
    return (m + 2) + m * max_value


def pilp_feasible(a: Sequence[Sequence[int]], c: Sequence[int], max_value: int = 10) -> tuple[int, ...] | None:
    """Brute force: some ``k ∈ [0, max_value]^m`` with ``Σ k_i·a_i + c <= 0``."""
    m, n = len(a), len(c)
    for ks in itertools.product(range(max_value + 1), repeat=m):
        if all(sum(ks[i] * a[i][j] for i in range(m)) + c[j] <= 0 for j in range(n)):
            return ks
    return None
