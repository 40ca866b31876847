"""Bounded expressions and the grammar constructions built on them.

* ``BoundedExpression`` -- ``w1* ... wd*`` with its state machine ``G^b``;
* ``LetterBoundedExpression`` -- ``a1* ... ad*`` over distinct letters;
* ``intersect_grammar`` -- the triple product ``G^∩`` of a grammar in
  two-symbol normal form with ``G^b``;
* ``bowtie_grammar`` -- its strictly letter-bounded image ``G^⋈``;
* language tests by product with small deterministic automata.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .errors import GrammarError, InputError, NotContained, NotStrict, ShapeError
from .grammar import ControlWord, Grammar, Production, Word, hole_grammar, reduce_multi

State = tuple[int, int]  # (block s, position r), both 1-based


def state_name(q: State) -> str:
    return f"q{q[1]}^{q[0]}"


@dataclass(frozen=True)
class BoundedExpression:
    words: tuple[Word, ...]

    def __post_init__(self) -> None:
        words = tuple(tuple(w) for w in self.words)
        object.__setattr__(self, "words", words)
        if not words or any(len(w) == 0 for w in words):
            raise InputError("a bounded expression needs at least one nonempty word")

    @classmethod
    def parse(cls, text: str) -> "BoundedExpression":
        """Parse ``(t1 call[t2])* (t4)* ...``; a bare symbol ``a*`` is also accepted."""
        words = []
        pos = 0
        pattern = re.compile(r"\s*(?:\(([^()]*)\)|([^\s()*]+))\s*\*")
        text = text.strip()
        while pos < len(text):
            m = pattern.match(text, pos)
            if not m:
                raise InputError(f"cannot parse bounded expression near {text[pos:pos + 20]!r}", column=pos + 1)
            body = (m.group(1) if m.group(1) is not None else m.group(2)).split()
            if not body:
                raise InputError("empty word in bounded expression", column=pos + 1)
            words.append(tuple(body))
            pos = m.end()
            while pos < len(text) and text[pos] in " \t·.":
                pos += 1
        return cls(tuple(words))

    def __str__(self) -> str:
        return " ".join(f"({' '.join(w)})*" for w in self.words)

    def __len__(self) -> int:
        return sum(len(w) for w in self.words)

    @property
    def d(self) -> int:
        return len(self.words)

    @property
    def alphabet(self) -> frozenset[str]:
        return frozenset(s for w in self.words for s in w)

    # -- state machine G^b ------------------------------------------------
    def states(self) -> list[State]:
        return [(s, r) for s, w in enumerate(self.words, 1) for r in range(1, len(w) + 1)]

    def letter_at(self, q: State) -> str:
        return self.words[q[0] - 1][q[1] - 1]

    def successors(self, q: State) -> list[State]:
        s, r = q
        if r < len(self.words[s - 1]):
            return [(s, r + 1)]
        return [(t, 1) for t in range(s, self.d + 1)]

    def step(self, q: State, sym: str) -> list[State]:
        return self.successors(q) if self.letter_at(q) == sym else []

    def run(self, sources: Iterable[State], word: Sequence[str]) -> set[State]:
        cur = set(sources)
        for sym in word:
            cur = {t for q in cur for t in self.step(q, sym)}
            if not cur:
                break
        return cur

    def accepts(self, word: Sequence[str]) -> bool:
        starts = [(s, 1) for s in range(1, self.d + 1)]
        return any(r == 1 for _, r in self.run(starts, word))

    def is_factor(self, word: Sequence[str]) -> bool:
        """Does ``word`` occur inside some word of the expression?"""
        return bool(self.run(self.states(), word))

    def paths(self, q: State, word: Sequence[str], q2: State) -> list[tuple[State, ...]]:
        """All state sequences reading ``word`` from ``q`` to ``q2``."""
        out = []
        stack: list[tuple[State, ...]] = [(q,)]
        while stack:
            path = stack.pop()
            i = len(path) - 1
            if i == len(word):
                if path[-1] == q2:
                    out.append(path)
                continue
            for t in self.step(path[-1], word[i]):
                stack.append(path + (t,))
        return sorted(out)


def expression_grammar(b: BoundedExpression) -> tuple[Grammar, tuple[str, ...]]:
    """The right-linear grammar ``G^b`` and its start nonterminals ``q1^(s)``."""
    prods = []
    for q in b.states():
        for t in b.successors(q):
            prods.append(Production(len(prods) + 1, state_name(q), (b.letter_at(q), state_name(t))))
    for s in range(1, b.d + 1):
        prods.append(Production(len(prods) + 1, state_name((s, 1)), ()))
    nts = {state_name(q) for q in b.states()}
    return Grammar(prods, nonterminals=nts), tuple(state_name((s, 1)) for s in range(1, b.d + 1))


# ---------------------------------------------------------------------------
# Letter-bounded expressions and finite-automaton language tests
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LetterBoundedExpression:
    letters: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "letters", tuple(self.letters))
        if len(set(self.letters)) != len(self.letters):
            raise NotStrict(f"letters repeat in {self.letters}")

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return " ".join(f"{a}*" for a in self.letters) if self.letters else "ε"

    def index(self, a: str) -> int:
        return self.letters.index(a)

    def accepts(self, word: Sequence[str]) -> bool:
        pos = 0
        for a in word:
            if a not in self.letters:
                return False
            i = self.letters.index(a)
            if i < pos:
                return False
            pos = i
        return True

    def word(self, counts: Sequence[int]) -> Word:
        return tuple(a for a, c in zip(self.letters, counts) for _ in range(c))

    def parikh(self, word: Sequence[str]) -> tuple[int, ...]:
        return tuple(sum(1 for s in word if s == a) for a in self.letters)

    def sub(self, letters: Iterable[str]) -> "LetterBoundedExpression":
        keep = set(letters)
        return LetterBoundedExpression(tuple(a for a in self.letters if a in keep))


@dataclass(frozen=True)
class Homomorphism:
    map: Mapping[str, Word]

    def __post_init__(self) -> None:
        if any(len(w) == 0 for w in self.map.values()):
            raise InputError("homomorphism images must be nonempty")

    def apply(self, word: Iterable[str]) -> Word:
        return tuple(s for a in word for s in self.map[a])


@dataclass(frozen=True)
class DFA:
    """A deterministic automaton with a partial step function (``None`` = dead)."""

    states: tuple
    start: object
    step: Callable[[object, str], object]
    accepting: frozenset


def letter_dfa(lb: LetterBoundedExpression, complement: bool = False) -> DFA:
    """Automaton of ``b̃`` (states = letter indices, plus a sink) or its complement."""
    d = len(lb)
    sink = "sink"

    def step(q, sym):
        if q == sink:
            return sink
        if sym in lb.letters and lb.index(sym) >= q:
            return lb.index(sym)
        return sink

    states = tuple(range(d)) + (sink,) if d else (0, sink)
    acc = frozenset({sink}) if complement else frozenset(range(max(d, 1)))
    return DFA(states, 0, step, acc)


def letter_grammar_and_complement(lb: LetterBoundedExpression, sigma: Iterable[str]) -> tuple[Grammar, Grammar]:
    """Right-linear grammars for ``b̃`` and ``Σ* ∖ b̃`` (axiom ``q^(1)``)."""
    sigma = sorted(set(sigma))
    if not set(lb.letters) <= set(sigma):
        raise InputError("letters must belong to the alphabet")
    d = len(lb)
    q = [f"q^({s})" for s in range(1, d + 1)] or ["q^(1)"]
    sink = "q_sink"
    base = []
    for s in range(d):
        allowed = set(lb.letters[s:])
        for t in range(s, d):
            base.append((q[s], (lb.letters[t], q[t])))
        for a in sigma:
            if a not in allowed:
                base.append((q[s], (a, sink)))
    if d == 0:
        base += [(q[0], (a, sink)) for a in sigma]
    base += [(sink, (a, sink)) for a in sigma]
    finals_in = [(qq, ()) for qq in q]
    finals_out = [(sink, ())]

    def build(rows):
        return Grammar([Production(i + 1, h, b) for i, (h, b) in enumerate(rows)],
                       nonterminals=set(q) | {sink}, check_shape=False)

    return build(base + finals_in), build(base + finals_out)


def _starts_with(a: str) -> DFA:
    return DFA((0, 1), 0, lambda q, s: 1 if q == 1 or s == a else None, frozenset({1}))


def _ends_with(a: str) -> DFA:
    return DFA((0, 1), 0, lambda q, s: 1 if s == a else 0, frozenset({1}))


def _contains(a: str) -> DFA:
    return DFA((0, 1), 0, lambda q, s: 1 if q == 1 or s == a else 0, frozenset({1}))


def product_reachability(g: Grammar, dfa: DFA) -> dict[str, dict[object, set]]:
    """``R[X][p]`` = states reachable from ``p`` by reading some word of ``L_X``."""
    reach: dict[str, dict[object, set]] = {x: {} for x in g.nonterminals}
    changed = True
    while changed:
        changed = False
        for prod in g.productions:
            table = reach[prod.head]
            for p in dfa.states:
                cur = {p}
                for sym in prod.body:
                    if g.is_nonterminal(sym):
                        sub = reach[sym]
                        cur = {t for c in cur for t in sub.get(c, ())}
                    else:
                        cur = {t for c in cur for t in [dfa.step(c, sym)] if t is not None}
                    if not cur:
                        break
                if cur:
                    old = table.setdefault(p, set())
                    if not cur <= old:
                        old |= cur
                        changed = True
    return reach


def cfg_dfa_nonempty(g: Grammar, x: str, dfa: DFA) -> bool:
    """Is ``L_x(g) ∩ L(dfa)`` nonempty?"""
    reach = product_reachability(g, dfa)
    return bool(reach.get(x, {}).get(dfa.start, set()) & dfa.accepting)


def language_included(g: Grammar, x: str, lb: LetterBoundedExpression, y: str | None = None) -> bool:
    """``L_x(g) ⊆ b̃`` (or ``L_{x,y}(g) ⊆ b̃``), decided through the complement automaton."""
    if y is not None:
        hg, hat = hole_grammar(g, y)
        g, x = hg, hat[x]
    return not cfg_dfa_nonempty(g, x, letter_dfa(lb, complement=True))


def minimize_expression(g: Grammar, x: str, lb: LetterBoundedExpression, check: bool = True) -> LetterBoundedExpression:
    """Keep only the letters that occur in some word of ``L_x(g)``."""
    if check and not language_included(g, x, lb):
        raise NotContained(f"L_{x} is not included in {lb}")
    keep = [a for a in lb.letters if cfg_dfa_nonempty(g, x, _contains(a))]
    return lb.sub(keep)


def partition_nonterminals(g: Grammar, lb: LetterBoundedExpression) -> tuple[frozenset[str], frozenset[str]]:
    """Split nonterminals into those with words starting with ``a1`` *and*
    words ending with ``ad`` (first set) and the rest."""
    first, last = lb.letters[0], lb.letters[-1]
    r1 = product_reachability(g, _starts_with(first))
    r2 = product_reachability(g, _ends_with(last))
    hat = set()
    for y in g.nonterminals:
        if 1 in r1[y].get(0, ()) and 1 in r2[y].get(0, ()):
            hat.add(y)
    return frozenset(hat), frozenset(g.nonterminals - hat)


# ---------------------------------------------------------------------------
# G^∩ : product of a grammar with G^b
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Schema:
    """How a product production was built: shape, source/target/middle states."""

    kind: str  # term | unit | left | right | pair
    src: State
    dst: State
    mid: State | None = None


@dataclass
class IntersectionResult:
    grammar: Grammar
    axioms: tuple[str, ...]
    expression: BoundedExpression
    triples: dict[str, tuple[State, str, State]]
    strip_production: dict[int, int]  # ζ on productions: G^∩ id -> g id
    schema: dict[int, Schema] = field(repr=False)

    def strip_symbol(self, sym: str) -> str:
        t = self.triples.get(sym)
        return t[1] if t else sym

    def strip_control(self, gamma: Iterable[int]) -> ControlWord:
        return tuple(self.strip_production[p] for p in gamma)


def triple_name(q: State, x: str, q2: State) -> str:
    return f"[{state_name(q)},{x},{state_name(q2)}]"


def intersect_grammar(g: Grammar, x: str, b: BoundedExpression) -> IntersectionResult:
    """Product grammar whose axioms generate ``L_x(g) ∩ b``.

    ``g`` must have bodies of length at most two.  Triples are materialized
    lazily from the axioms ``[q1^(s) x q1^(t)]`` (``s ≤ t``); the result is
    reduced with respect to the axioms.
    """
    for p in g.productions:
        if len(p.body) > 2:
            raise ShapeError(f"body of {p} longer than two symbols; normalize first")
    states = b.states()
    triples: dict[str, tuple[State, str, State]] = {}
    prods: list[Production] = []
    strip: dict[int, int] = {}
    schema: dict[int, Schema] = {}

    def nt(q: State, y: str, q2: State) -> str:
        name = triple_name(q, y, q2)
        if name not in triples:
            triples[name] = (q, y, q2)
            queue.append(name)
        return name

    def emit(head: str, body: tuple[str, ...], origin: Production, sch: Schema) -> None:
        pid = len(prods) + 1
        prods.append(Production(pid, head, body, f"{origin.name}@{pid}"))
        strip[pid] = origin.id
        schema[pid] = sch

    queue: deque[str] = deque()
    axioms = []
    for s in range(1, b.d + 1):
        for t in range(s, b.d + 1):
            axioms.append(nt((s, 1), x, (t, 1)))
    done: set[str] = set()
    while queue:
        head = queue.popleft()
        if head in done:
            continue
        done.add(head)
        q, y, q2 = triples[head]
        for p in g.by_head(y):
            body = p.body
            kinds = [g.is_nonterminal(s) for s in body]
            if not any(kinds):
                if len(body) == 0:
                    if q == q2:
                        emit(head, (), p, Schema("term", q, q2))
                elif len(body) == 1:
                    if q2 in b.step(q, body[0]):
                        emit(head, body, p, Schema("term", q, q2))
                else:
                    # one production per distinct letter image of the middle state
                    seen_images = set()
                    for path in b.paths(q, body, q2):
                        m = path[1]
                        image = (m[1] == 1, m[0] if q2[1] == 1 else None)
                        if image not in seen_images:
                            seen_images.add(image)
                            emit(head, body, p, Schema("term", q, q2, m))
            elif kinds == [True]:
                emit(head, (nt(q, body[0], q2),), p, Schema("unit", q, q2))
            elif kinds == [False, True]:
                for m in b.step(q, body[0]):
                    if m[0] <= q2[0]:
                        emit(head, (body[0], nt(m, body[1], q2)), p, Schema("left", q, q2, m))
            elif kinds == [True, False]:
                for m in states:
                    if q[0] <= m[0] <= q2[0] and q2 in b.step(m, body[1]):
                        emit(head, (nt(q, body[0], m), body[1]), p, Schema("right", q, q2, m))
            elif kinds == [True, True]:
                for m in states:
                    if q[0] <= m[0] <= q2[0]:
                        emit(head, (nt(q, body[0], m), nt(m, body[1], q2)), p, Schema("pair", q, q2, m))
            else:
                raise ShapeError(f"body of {p} fits no product schema")
    full = Grammar(prods, nonterminals=set(triples), check_shape=False)
    assert full.size <= len(b) ** 3 * max(g.size, 1), "product grammar exceeds |b|^3·|g|"
    reduced = reduce_multi(full, axioms)
    live_axioms = tuple(a for a in axioms if a in reduced.nonterminals)
    kept = {p.id for p in reduced.productions}
    return IntersectionResult(
        grammar=reduced,
        axioms=live_axioms,
        expression=b,
        triples={k: v for k, v in triples.items() if k in reduced.nonterminals},
        strip_production={k: v for k, v in strip.items() if k in kept},
        schema={k: v for k, v in schema.items() if k in kept},
    )


# ---------------------------------------------------------------------------
# G^⋈ : strict letter-bounded image
# ---------------------------------------------------------------------------


@dataclass
class BowtieResult:
    grammar: Grammar
    letters: LetterBoundedExpression
    h: Homomorphism
    iota: dict[int, int]  # G^∩ id -> G^⋈ id
    iota_inv: dict[int, int]
    axioms: tuple[str, ...]

    def to_intersection(self, gamma: Iterable[int]) -> ControlWord:
        return tuple(self.iota_inv[p] for p in gamma)

    def to_bowtie(self, gamma: Iterable[int]) -> ControlWord:
        return tuple(self.iota[p] for p in gamma)


def fresh_letters(d: int, taken: Iterable[str]) -> tuple[str, ...]:
    taken = set(taken)
    prefix = "a"
    while any(f"{prefix}{s}" in taken for s in range(1, d + 1)):
        prefix = "_" + prefix
    return tuple(f"{prefix}{s}" for s in range(1, d + 1))


def bowtie_grammar(inter: IntersectionResult) -> BowtieResult:
    """Replace terminals so that letter ``a_s`` is emitted whenever control
    completes one traversal of ``w_s`` in the expression automaton."""
    b = inter.expression
    g = inter.grammar
    letters = fresh_letters(b.d, set(g.terminals) | set(g.nonterminals))

    def a(block: int) -> tuple[str, ...]:
        return (letters[block - 1],)

    prods = []
    for p in g.productions:
        sch = inter.schema[p.id]
        q, q2, m = sch.src, sch.dst, sch.mid
        if sch.kind == "term":
            if len(p.body) == 0:
                body: tuple[str, ...] = ()
            elif len(p.body) == 1:
                body = a(q[0]) if q2[1] == 1 else ()
            else:
                body = (a(q[0]) if m[1] == 1 else ()) + (a(m[0]) if q2[1] == 1 else ())
        elif sch.kind == "left":
            body = (a(q[0]) if m[1] == 1 else ()) + (p.body[1],)
        elif sch.kind == "right":
            body = (p.body[0],) + (a(m[0]) if q2[1] == 1 else ())
        else:
            body = p.body
        prods.append(Production(p.id, p.head, body, p.name))
    out = Grammar(prods, nonterminals=g.nonterminals, terminals=letters, check_shape=False)
    # every image is produced by exactly one product production
    images: dict[tuple, tuple] = {}
    for p, q in zip(g.productions, out.productions):
        key = (q.head, q.body)
        src = (p.head, p.body)
        if key in images and images[key] != src:
            raise GrammarError(f"letter image of {p} collides with another production")
        images[key] = src
    iota = {p.id: p.id for p in g.productions}
    h = Homomorphism({letters[s]: b.words[s] for s in range(b.d)})
    return BowtieResult(out, LetterBoundedExpression(letters), h, iota, dict(iota), inter.axioms)
