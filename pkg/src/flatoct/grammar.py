"""Context-free grammars, control words, step sequences and derivation trees.

A production is identified by a stable integer ``id`` (plus a display
``name``); control words are tuples of production ids so that grammar
transforms can remap them.  Sentential forms are tuples of symbol names.
"""

from __future__ import annotations

import re
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .config import node_budget
from .errors import (
    BudgetExceeded,
    EmptyLanguage,
    GrammarError,
    NonApplicable,
    NotDepthFirst,
)

EPS = "eps"

Word = tuple[str, ...]
ControlWord = tuple[int, ...]


@dataclass(frozen=True)
class Production:
    id: int
    head: str
    body: Word
    name: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "body", tuple(self.body))
        if not self.name:
            object.__setattr__(self, "name", f"p{self.id}")

    @property
    def size(self) -> int:
        return len(self.body) + 1

    def __str__(self) -> str:
        rhs = " ".join(self.body) if self.body else EPS
        return f"{self.name}: {self.head} -> {rhs}"


class Grammar:
    """An immutable grammar ``(nonterminals, terminals, productions)``.

    Nonterminals are the production heads plus any extra names supplied;
    every other body symbol is a terminal.  With ``check_shape`` each body
    must carry at most two terminals and at most two nonterminals.
    """

    __slots__ = ("productions", "nonterminals", "terminals", "_by_id", "_by_head", "_by_name")

    def __init__(
        self,
        productions: Iterable[Production],
        nonterminals: Iterable[str] = (),
        terminals: Iterable[str] = (),
        check_shape: bool = True,
    ):
        prods = tuple(sorted(productions, key=lambda p: p.id))
        by_id: dict[int, Production] = {}
        by_name: dict[str, Production] = {}
        for p in prods:
            if p.id in by_id:
                raise GrammarError(f"duplicate production id {p.id}")
            if p.name in by_name:
                raise GrammarError(f"duplicate production name {p.name!r}")
            by_id[p.id] = p
            by_name[p.name] = p
        nts = {p.head for p in prods} | set(nonterminals)
        terms = {s for p in prods for s in p.body if s not in nts} | set(terminals)
        if nts & terms:
            raise GrammarError(f"symbols used as both terminal and nonterminal: {sorted(nts & terms)}")
        if EPS in nts or EPS in terms:
            raise GrammarError(f"{EPS!r} is reserved for the empty word")
        by_head: dict[str, list[Production]] = defaultdict(list)
        for p in prods:
            by_head[p.head].append(p)
            if check_shape:
                n_nt = sum(1 for s in p.body if s in nts)
                if n_nt > 2 or len(p.body) - n_nt > 2:
                    raise GrammarError(f"production {p} has more than two terminals or nonterminals")
        self.productions = prods
        self.nonterminals = frozenset(nts)
        self.terminals = frozenset(terms)
        self._by_id = by_id
        self._by_name = by_name
        self._by_head = {h: tuple(ps) for h, ps in by_head.items()}

    # -- lookup ---------------------------------------------------------
    def __getitem__(self, pid: int) -> Production:
        return self._by_id[pid]

    def __contains__(self, pid: object) -> bool:
        return pid in self._by_id

    def __iter__(self) -> Iterator[Production]:
        return iter(self.productions)

    def __len__(self) -> int:
        return len(self.productions)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Grammar)
            and self.productions == other.productions
            and self.nonterminals == other.nonterminals
            and self.terminals == other.terminals
        )

    def __hash__(self) -> int:
        return hash((self.productions, self.nonterminals))

    def __repr__(self) -> str:
        return f"Grammar({len(self.productions)} productions, {len(self.nonterminals)} nonterminals)"

    def by_head(self, head: str) -> tuple[Production, ...]:
        return self._by_head.get(head, ())

    def by_name(self, name: str) -> Production:
        return self._by_name[name]

    def is_nonterminal(self, sym: str) -> bool:
        return sym in self.nonterminals

    def ids(self) -> tuple[int, ...]:
        return tuple(p.id for p in self.productions)

    @property
    def size(self) -> int:
        """|G| = sum over productions of (|body| + 1)."""
        return sum(p.size for p in self.productions)

    def nonterminal_count(self, word: Sequence[str]) -> int:
        return sum(1 for s in word if s in self.nonterminals)

    def restrict(self, keep: Iterable[int]) -> "Grammar":
        """Sub-grammar with only the productions whose ids are in ``keep``."""
        keep = set(keep)
        return Grammar(
            (p for p in self.productions if p.id in keep),
            nonterminals=self.nonterminals,
            terminals=self.terminals,
            check_shape=False,
        )

    def names(self, gamma: Iterable[int]) -> str:
        return " ".join(self[p].name for p in gamma)

    def control_word(self, names: str | Iterable[str]) -> ControlWord:
        if isinstance(names, str):
            names = names.split()
        return tuple(self.by_name(n).id for n in names)

    # -- text format ------------------------------------------------------
    @classmethod
    def from_rules(cls, text: str, check_shape: bool = True) -> "Grammar":
        """Compact builder: ``"X -> a Y | eps; Y -> b"``; ids numbered from 1."""
        prods = []
        for chunk in re.split(r"[;\n]", text):
            chunk = chunk.strip()
            if not chunk:
                continue
            head, _, rhs = chunk.partition("->")
            head = head.strip()
            for alt in rhs.split("|"):
                body = tuple(s for s in alt.split() if s != EPS)
                prods.append(Production(len(prods) + 1, head, body))
        return cls(prods, check_shape=check_shape)

    def to_text(self, axiom: str | None = None) -> str:
        lines = [f"prod {p}" for p in self.productions]
        if axiom is not None:
            lines.append(f"axiom: {axiom}")
        return "\n".join(lines) + "\n"


_PROD_LINE = re.compile(r"^prod\s+(\S+?)\s*:\s*(\S+)\s*->(.*)$")


def parse_grammar_text(text: str, check_shape: bool = True) -> tuple[Grammar, str | None]:
    """Parse ``prod <id>: <NT> -> sym ...`` / ``axiom: <NT>`` lines."""
    prods: list[Production] = []
    axiom = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("axiom:"):
            axiom = line[len("axiom:"):].strip()
            if not axiom:
                raise GrammarError("missing axiom name", lineno)
            continue
        m = _PROD_LINE.match(line)
        if not m:
            raise GrammarError(f"cannot parse {raw!r}", lineno, 1)
        name, head, rhs = m.group(1), m.group(2), m.group(3)
        body = tuple(s for s in rhs.split() if s != EPS)
        prods.append(Production(len(prods) + 1, head, body, name))
    return Grammar(prods, check_shape=check_shape), axiom


# ---------------------------------------------------------------------------
# Step sequences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Step:
    word: Word  # sentential form before the step
    production: int
    position: int  # 0-based index of the rewritten nonterminal


@dataclass(frozen=True)
class StepSequence:
    grammar: Grammar = field(repr=False, compare=False)
    origin: Word
    steps: tuple[Step, ...]
    result: Word

    @property
    def control_word(self) -> ControlWord:
        return tuple(s.production for s in self.steps)

    @property
    def positions(self) -> tuple[int, ...]:
        return tuple(s.position for s in self.steps)

    def words(self) -> list[Word]:
        return [s.word for s in self.steps] + [self.result]

    @property
    def index(self) -> int:
        """Largest number of nonterminals in any sentential form."""
        return max(self.grammar.nonterminal_count(w) for w in self.words())

    def is_terminal(self) -> bool:
        return self.grammar.nonterminal_count(self.result) == 0

    def is_depth_first(self) -> bool:
        """Creation-time check: the rewritten occurrence is the youngest one."""
        g = self.grammar
        born = [0 if g.is_nonterminal(s) else None for s in self.origin]
        for m, step in enumerate(self.steps):
            live = [b for b in born if b is not None]
            if born[step.position] != max(live):
                return False
            body = g[step.production].body
            born[step.position:step.position + 1] = [m + 1 if g.is_nonterminal(s) else None for s in body]
        return True

    def is_depth_first_ranked(self) -> bool:
        """Rank check: the rewritten occurrence carries a maximal rank."""
        g = self.grammar
        ranks = [0 if g.is_nonterminal(s) else None for s in self.origin]
        for step in self.steps:
            j = step.position
            others = [r for i, r in enumerate(ranks) if r is not None and i != j]
            top = max(others, default=-1)
            if ranks[j] < top:
                return False
            body = g[step.production].body
            ranks[j:j + 1] = [top + 1 if g.is_nonterminal(s) else None for s in body]
        return True

    def tree(self) -> "list[TreeNode | str]":
        return build_forest(self)


def _max_rank_position(word: Sequence[str], ranks: Sequence[int | None], head: str) -> int | None:
    live = [r for r in ranks if r is not None]
    if not live:
        return None
    top = max(live)
    for i, (s, r) in enumerate(zip(word, ranks)):
        if r == top and s == head:
            return i
    return None


def apply_control_word(
    g: Grammar,
    start: str | Sequence[str],
    gamma: Sequence[int],
    positions: Sequence[int] | None = None,
) -> StepSequence:
    """Apply ``gamma`` from ``start``.

    Without explicit ``positions`` each step rewrites the leftmost occurrence
    of the production's head among the nonterminals of maximal rank, which
    yields a depth-first step sequence whenever one exists for ``gamma`` with
    that tie-break.
    """
    word: Word = (start,) if isinstance(start, str) else tuple(start)
    ranks: list[int | None] = [0 if g.is_nonterminal(s) else None for s in word]
    steps = []
    for i, pid in enumerate(gamma):
        if pid not in g:
            raise NonApplicable(i + 1, f"unknown production {pid}")
        p = g[pid]
        if positions is None:
            j = _max_rank_position(word, ranks, p.head)
            if j is None:
                raise NonApplicable(i + 1, f"no maximal-rank {p.head} in {' '.join(word) or EPS}")
        else:
            j = positions[i]
            if not (0 <= j < len(word)) or word[j] != p.head:
                raise NonApplicable(i + 1, f"position {j} does not hold {p.head}")
        steps.append(Step(word, pid, j))
        others = [r for k, r in enumerate(ranks) if r is not None and k != j]
        top = max(others, default=-1)
        ranks[j:j + 1] = [top + 1 if g.is_nonterminal(s) else None for s in p.body]
        word = word[:j] + p.body + word[j + 1:]
    return StepSequence(g, (start,) if isinstance(start, str) else tuple(start), tuple(steps), word)


def all_df_sequences(g: Grammar, start: str, gamma: Sequence[int], limit: int = 64) -> list[StepSequence]:
    """Every depth-first step sequence with control word ``gamma`` from ``start``.

    Differs from :func:`apply_control_word` only when several maximal-rank
    occurrences of a production's head exist; at most ``limit`` sequences
    are returned.
    """
    out: list[StepSequence] = []
    origin: Word = (start,)

    def walk(word: Word, ranks: list[int | None], steps: list[Step], i: int) -> None:
        if len(out) >= limit:
            return
        if i == len(gamma):
            out.append(StepSequence(g, origin, tuple(steps), word))
            return
        pid = gamma[i]
        if pid not in g:
            return
        p = g[pid]
        live = [r for r in ranks if r is not None]
        if not live:
            return
        top = max(live)
        for j, (s, r) in enumerate(zip(word, ranks)):
            if r != top or s != p.head:
                continue
            others = [r2 for m, r2 in enumerate(ranks) if r2 is not None and m != j]
            new_rank = max(others, default=-1) + 1
            nranks = ranks[:j] + [new_rank if g.is_nonterminal(t) else None for t in p.body] + ranks[j + 1:]
            walk(word[:j] + p.body + word[j + 1:], nranks, steps + [Step(word, pid, j)], i + 1)

    walk(origin, [0], [], 0)
    return out


# ---------------------------------------------------------------------------
# Derivation trees
# ---------------------------------------------------------------------------


@dataclass
class TreeNode:
    symbol: str
    production: int | None = None
    children: list["TreeNode | str"] = field(default_factory=list)
    steps: list[int] = field(default_factory=list)  # step index of own expansion (singleton)

    def leaves(self) -> Word:
        out: list[str] = []
        stack: list[TreeNode | str] = [self]
        while stack:
            node = stack.pop()
            if isinstance(node, str):
                out.append(node)
            elif node.production is None:
                out.append(node.symbol)
            else:
                stack.extend(reversed(node.children))
        return tuple(out)

    def subtree_steps(self) -> list[int]:
        """Indices (into the control word) of all steps inside this subtree, sorted."""
        acc: list[int] = []
        stack: list[TreeNode | str] = [self]
        while stack:
            node = stack.pop()
            if isinstance(node, TreeNode):
                acc.extend(node.steps)
                stack.extend(node.children)
        return sorted(acc)

    def nodes(self) -> Iterator["TreeNode"]:
        stack: list[TreeNode | str] = [self]
        while stack:
            node = stack.pop()
            if isinstance(node, TreeNode):
                yield node
                stack.extend(reversed(node.children))

    def nt_children(self) -> list["TreeNode"]:
        return [c for c in self.children if isinstance(c, TreeNode)]


def build_forest(seq: StepSequence) -> list[TreeNode | str]:
    """Parse forest of ``seq``: one entry per origin symbol."""
    g = seq.grammar
    roots: list[TreeNode | str] = [TreeNode(s) if g.is_nonterminal(s) else s for s in seq.origin]
    occ: list[TreeNode | str] = list(roots)
    for m, step in enumerate(seq.steps):
        node = occ[step.position]
        assert isinstance(node, TreeNode)
        p = g[step.production]
        node.production = p.id
        node.steps = [m]
        node.children = [TreeNode(s) if g.is_nonterminal(s) else s for s in p.body]
        occ[step.position:step.position + 1] = node.children
    return roots


def derivation_tree(g: Grammar, start: str, gamma: Sequence[int]) -> TreeNode:
    seq = apply_control_word(g, start, gamma)
    if not seq.is_terminal():
        raise NonApplicable(len(gamma) + 1, "control word does not reach a terminal word")
    root = build_forest(seq)[0]
    assert isinstance(root, TreeNode)
    return root


def split_df_sequence(seq: StepSequence) -> tuple[ControlWord, ControlWord, str]:
    """Split a depth-first derivation from a two-nonterminal word ``XY``.

    Returns ``(gamma1, gamma2, order)`` where ``gamma1`` derives the part of
    the result contributed by ``X`` and ``gamma2`` the part from ``Y``;
    ``order`` is ``"xy"`` when ``gamma = gamma1 gamma2`` and ``"yx"`` when
    ``gamma = gamma2 gamma1``.
    """
    g = seq.grammar
    if len(seq.origin) != 2 or not all(g.is_nonterminal(s) for s in seq.origin):
        raise NotDepthFirst("origin must consist of two nonterminals")
    if not (seq.is_terminal() and seq.is_depth_first() and seq.is_depth_first_ranked()):
        raise NotDepthFirst("not a depth-first derivation of a terminal word")
    owner: list[int | None] = [0, 1]
    tags = []
    for step in seq.steps:
        side = owner[step.position]
        tags.append(side)
        body = g[step.production].body
        owner[step.position:step.position + 1] = [side if g.is_nonterminal(s) else None for s in body]
    gamma = seq.control_word
    g1 = tuple(p for p, t in zip(gamma, tags) if t == 0)
    g2 = tuple(p for p, t in zip(gamma, tags) if t == 1)
    if gamma == g1 + g2:
        return g1, g2, "xy"
    if gamma == g2 + g1:
        return g1, g2, "yx"
    raise NotDepthFirst("the two subderivations interleave")


# ---------------------------------------------------------------------------
# Reduction, normal form, context grammars
# ---------------------------------------------------------------------------


def productive_nonterminals(g: Grammar) -> frozenset[str]:
    prod: set[str] = set()
    changed = True
    while changed:
        changed = False
        for p in g.productions:
            if p.head not in prod and all(s in prod for s in p.body if g.is_nonterminal(s)):
                prod.add(p.head)
                changed = True
    return frozenset(prod)


def reduce_multi(g: Grammar, roots: Iterable[str]) -> Grammar:
    """Drop unproductive and unreachable (from any root) nonterminals."""
    good = productive_nonterminals(g)
    usable = [p for p in g.productions if all(s in good for s in p.body if g.is_nonterminal(s))]
    heads: dict[str, list[Production]] = defaultdict(list)
    for p in usable:
        heads[p.head].append(p)
    seen = {r for r in roots if r in good}
    queue = deque(seen)
    while queue:
        x = queue.popleft()
        for p in heads[x]:
            for s in p.body:
                if g.is_nonterminal(s) and s not in seen:
                    seen.add(s)
                    queue.append(s)
    kept = [p for p in usable if p.head in seen]
    terms = {s for p in kept for s in p.body if not g.is_nonterminal(s)}
    return Grammar(kept, nonterminals=seen, terminals=terms, check_shape=False)


def reduce(g: Grammar, x: str) -> Grammar:
    """Reduced grammar for axiom ``x``; raises ``EmptyLanguage`` if L_x is empty."""
    if x not in productive_nonterminals(g):
        raise EmptyLanguage(f"L_{x} is empty")
    return reduce_multi(g, [x])


@dataclass(frozen=True)
class NormalizationMap:
    """Links productions of a grammar and of its two-symbol-body normal form.

    ``forward[p]`` is the chain of new productions replacing ``p`` (the first
    keeps ``p``'s id and name); ``origin`` maps every new id back; ``aux``
    holds the chain tails whose heads are fresh nonterminals.
    """

    forward: Mapping[int, tuple[int, ...]]
    origin: Mapping[int, int]
    aux: frozenset[int]
    fresh: frozenset[str]

    def to_original(self, gamma: Iterable[int]) -> ControlWord:
        return tuple(self.origin[p] for p in gamma if p not in self.aux)

    def to_normal(self, gamma: Iterable[int]) -> ControlWord:
        return tuple(q for p in gamma for q in self.forward[p])

    def collapse(self, node: TreeNode) -> TreeNode:
        """Rebuild the original-grammar tree by merging fresh-nonterminal nodes into parents."""
        if node.production is None:
            return TreeNode(node.symbol)
        children: list[TreeNode | str] = []
        steps = list(node.steps)
        stack: list[TreeNode | str] = list(reversed(node.children))
        while stack:
            c = stack.pop()
            if isinstance(c, TreeNode) and c.symbol in self.fresh:
                steps.extend(c.steps)
                stack.extend(reversed(c.children))
            elif isinstance(c, TreeNode):
                children.append(self.collapse(c))
            else:
                children.append(c)
        return TreeNode(node.symbol, self.origin[node.production], children, sorted(steps))


def normalize_2nf(g: Grammar) -> tuple[Grammar, NormalizationMap]:
    """Split bodies longer than two symbols into chains ``X -> s1 N1, N1 -> s2 N2, ...``."""
    used = set(g.nonterminals) | set(g.terminals)
    next_id = max(g.ids(), default=0) + 1
    counter = 0
    prods: list[Production] = []
    forward: dict[int, tuple[int, ...]] = {}
    origin: dict[int, int] = {}
    aux: set[int] = set()
    fresh: set[str] = set()
    for p in g.productions:
        if len(p.body) <= 2:
            prods.append(p)
            forward[p.id] = (p.id,)
            origin[p.id] = p.id
            continue
        names = []
        for _ in range(len(p.body) - 2):
            counter += 1
            while f"_N{counter}" in used:
                counter += 1
            names.append(f"_N{counter}")
            used.add(f"_N{counter}")
        fresh.update(names)
        chain = [Production(p.id, p.head, (p.body[0], names[0]), p.name)]
        for j in range(1, len(p.body) - 1):
            tail = (p.body[j], names[j]) if j < len(p.body) - 2 else (p.body[j], p.body[j + 1])
            chain.append(Production(next_id, names[j - 1], tail, f"{p.name}.{j}"))
            next_id += 1
        prods.extend(chain)
        forward[p.id] = tuple(q.id for q in chain)
        for q in chain:
            origin[q.id] = p.id
        aux.update(q.id for q in chain[1:])
    out = Grammar(prods, nonterminals=g.nonterminals, terminals=g.terminals, check_shape=False)
    return out, NormalizationMap(forward, origin, frozenset(aux), frozenset(fresh))


def hole_grammar(g: Grammar, y: str) -> tuple[Grammar, dict[str, str]]:
    """Grammar whose hatted nonterminal ``X^`` generates ``L_{X,Y}`` (one hole at ``y``)."""
    hat = {x: f"{x}#hole" for x in sorted(g.nonterminals)}
    prods = list(g.productions)
    next_id = max(g.ids(), default=0) + 1
    for p in g.productions:
        for i, s in enumerate(p.body):
            if g.is_nonterminal(s):
                body = p.body[:i] + (hat[s],) + p.body[i + 1:]
                prods.append(Production(next_id, hat[p.head], body, f"{p.name}#{i}"))
                next_id += 1
    prods.append(Production(next_id, hat[y], (), f"{y}#close"))
    return Grammar(prods, nonterminals=set(g.nonterminals) | set(hat.values()),
                   terminals=g.terminals, check_shape=False), hat


# ---------------------------------------------------------------------------
# Enumeration oracles
# ---------------------------------------------------------------------------


def _concat_bounded(sets: Sequence[Iterable[Word]], max_len: int) -> set[Word]:
    acc: set[Word] = {()}
    for s in sets:
        by_len: dict[int, list[Word]] = defaultdict(list)
        for v in s:
            if len(v) <= max_len:
                by_len[len(v)].append(v)
        acc = {
            u + v
            for u in acc
            for n in range(max_len - len(u) + 1)
            for v in by_len.get(n, ())
        }
        if not acc:
            break
    return acc


def _fixpoint_languages(g: Grammar, max_len: int) -> dict[str, set[Word]]:
    """Least fixpoint of the length-bounded languages, computed semi-naively:
    each round only extends derivations that use a word found in the
    previous round."""
    lang: dict[str, set[Word]] = {x: set() for x in g.nonterminals}
    delta: dict[str, set[Word]] = {x: set() for x in g.nonterminals}
    for p in g.productions:
        if not any(g.is_nonterminal(s) for s in p.body) and len(p.body) <= max_len:
            delta[p.head].add(p.body)
    while any(delta.values()):
        for x, words in delta.items():
            lang[x] |= words
        fresh: dict[str, set[Word]] = {x: set() for x in g.nonterminals}
        for p in g.productions:
            nts = [i for i, s in enumerate(p.body) if g.is_nonterminal(s)]
            for i in nts:
                if not delta[p.body[i]]:
                    continue
                parts = [
                    delta[s] if j == i else lang[s] if g.is_nonterminal(s) else ((s,),)
                    for j, s in enumerate(p.body)
                ]
                fresh[p.head] |= _concat_bounded(parts, max_len) - lang[p.head]
        delta = fresh
    return lang


def enumerate_words(
    g: Grammar,
    x: str,
    y: str | None = None,
    max_len: int = 8,
    k: int | None = None,
    df: bool = False,
    budget: int | None = None,
) -> frozenset[Word]:
    """Words of ``L_{X,Y}`` (``L_X`` when ``y`` is None) up to ``max_len``.

    With ``k`` only ``k``-index derivations count, and with ``df`` only
    depth-first ones; those cases run an explicit breadth-first search over
    (ranked) sentential forms.  Without ``k`` a least fixpoint over
    length-bounded word sets is computed.
    """
    if max_len < 0:
        raise ValueError("max_len must be non-negative")
    if k is None:
        if y is None:
            return frozenset(_fixpoint_languages(g, max_len).get(x, set()))
        hg, hat = hole_grammar(g, y)
        return frozenset(_fixpoint_languages(hg, max_len).get(hat[x], set()))
    if k < 1:
        raise ValueError("k must be at least 1")
    limit = node_budget(budget)
    found: set[Word] = set()
    for form, _ in _forms(g, x, max_len, k, df, limit):
        nts = [s for s, _r in form if _r is not None]
        if y is None and not nts:
            found.add(tuple(s for s, _ in form))
        elif y is not None and nts == [y]:
            found.add(tuple(s for s, r in form if r is None))
    return frozenset(found)


def _forms(g: Grammar, x: str, max_len: int, k: int, df: bool, limit: int):
    """All (ranked) sentential forms reachable from ``x`` within the bounds."""
    start = ((x, 0),)
    seen = {start}
    queue = deque([start])
    while queue:
        form = queue.popleft()
        yield form, None
        live = [(i, r) for i, (_s, r) in enumerate(form) if r is not None]
        if not live:
            continue
        terminals = len(form) - len(live)
        top = max(r for _, r in live)
        for i, r in live:
            if df and r != top:
                continue
            others_top = max((r2 for j, r2 in live if j != i), default=-1)
            for p in g.by_head(form[i][0]):
                new_nt = sum(1 for s in p.body if g.is_nonterminal(s))
                if len(live) - 1 + new_nt > k:
                    continue
                if terminals + len(p.body) - new_nt > max_len:
                    continue
                rank = others_top + 1 if df else 0
                repl = tuple((s, rank) if g.is_nonterminal(s) else (s, None) for s in p.body)
                nxt = form[:i] + repl + form[i + 1:]
                if nxt not in seen:
                    seen.add(nxt)
                    if len(seen) > limit:
                        raise BudgetExceeded("sentential-form search", limit)
                    queue.append(nxt)


def enumerate_control_words(
    g: Grammar,
    x: str,
    y: str | None = None,
    max_steps: int = 8,
    k: int | None = None,
    df: bool = True,
    budget: int | None = None,
) -> frozenset[ControlWord]:
    """Control words (length ≤ ``max_steps``) of derivations ``x ⇒ uYv`` / ``x ⇒ w``.

    Every position choice allowed by ``df``/``k`` is explored, so this is an
    oracle independent of the ranked automaton.
    """
    limit = node_budget(budget)
    k = k if k is not None else 10**9
    out: set[ControlWord] = set()
    frontier: list[tuple[tuple, ControlWord]] = [(((x, 0),), ())]
    seen = {frontier[0]}
    nodes = 0
    while frontier:
        nxt_frontier = []
        for form, gamma in frontier:
            live = [(i, r) for i, (_s, r) in enumerate(form) if r is not None]
            nts = [form[i][0] for i, _ in live]
            if (y is None and not nts) or (y is not None and nts == [y]):
                out.add(gamma)
            if len(gamma) >= max_steps or not live:
                continue
            top = max(r for _, r in live)
            for i, r in live:
                if df and r != top:
                    continue
                others_top = max((r2 for j, r2 in live if j != i), default=-1)
                for p in g.by_head(form[i][0]):
                    new_nt = sum(1 for s in p.body if g.is_nonterminal(s))
                    if len(live) - 1 + new_nt > k:
                        continue
                    rank = others_top + 1 if df else 0
                    repl = tuple((s, rank) if g.is_nonterminal(s) else (s, None) for s in p.body)
                    state = (form[:i] + repl + form[i + 1:], gamma + (p.id,))
                    if state in seen:
                        continue
                    seen.add(state)
                    nodes += 1
                    if nodes > limit:
                        raise BudgetExceeded("control-word search", limit)
                    nxt_frontier.append(state)
        frontier = nxt_frontier
    return frozenset(out)
