"""Relational semantics of program words and of depth-first control words.

Call and return symbols are written ``call[t]`` and ``ret[t]``; every other
terminal is an internal statement.  Relations compose left to right:
``compose(r1, r2)`` first applies ``r1``, then ``r2``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .errors import NotDepthFirst, ShapeError, Unbalanced, UnlabeledSymbol
from .grammar import Grammar, NonApplicable, TreeNode, Word, all_df_sequences, apply_control_word, build_forest
from .octagon import OctRelation, VarSet, compose, intersect

_CALL = re.compile(r"^call\[(.+)\]$")
_RET = re.compile(r"^ret\[(.+)\]$")


def call_name(sym: str) -> str | None:
    m = _CALL.match(sym)
    return m.group(1) if m else None


def ret_name(sym: str) -> str | None:
    m = _RET.match(sym)
    return m.group(1) if m else None


@dataclass
class ProgramLabels:
    """Relations of internal statements and call/return symbols, plus frames."""

    vars: VarSet
    relations: dict[str, OctRelation] = field(default_factory=dict)
    frames: dict[str, OctRelation] = field(default_factory=dict)
    _identity: OctRelation | None = field(default=None, init=False, repr=False, compare=False)

    def rho(self, sym: str) -> OctRelation:
        try:
            return self.relations[sym]
        except KeyError:
            raise UnlabeledSymbol(f"no relation for symbol {sym}") from None

    def frame(self, t: str) -> OctRelation:
        try:
            return self.frames[t]
        except KeyError:
            raise UnlabeledSymbol(f"no frame condition for call {t}") from None

    def call_clause(self, t: str, inner: OctRelation) -> OctRelation:
        """``(ρ_call[t] ∘ inner ∘ ρ_ret[t]) ∩ φ_t``."""
        r = compose(compose(self.rho(f"call[{t}]"), inner), self.rho(f"ret[{t}]"))
        return intersect(r, self.frame(t))

    def identity(self) -> OctRelation:
        if self._identity is None:
            self._identity = OctRelation.identity(self.vars)
        return self._identity

    def check_covers(self, terminals: Sequence[str]) -> None:
        for s in terminals:
            self.rho(s)
            t = call_name(s) or ret_name(s)
            if t is not None:
                self.frame(t)


@dataclass(frozen=True)
class NestingRelation:
    pairs: frozenset[tuple[int, int]]  # 1-based positions

    def partner(self) -> dict[int, int]:
        out = {}
        for i, j in self.pairs:
            out[i] = j
            out[j] = i
        return out


def match_nesting(w: Sequence[str]) -> NestingRelation:
    """The well-nested matching of ``call[t]`` / ``ret[t]`` positions."""
    stack: list[tuple[int, str]] = []
    pairs = set()
    for i, s in enumerate(w, start=1):
        t = call_name(s)
        if t is not None:
            stack.append((i, t))
            continue
        t = ret_name(s)
        if t is not None:
            if not stack or stack[-1][1] != t:
                raise Unbalanced(i, f"return {s} at position {i} has no matching call")
            j, _ = stack.pop()
            pairs.add((j, i))
    if stack:
        i, t = stack[-1]
        raise Unbalanced(i, f"call[{t}] at position {i} is never matched")
    return NestingRelation(frozenset(pairs))


def word_semantics(w: Sequence[str], labels: ProgramLabels) -> OctRelation:
    """``⟦w⟧`` by the inductive clauses; ``⟦ε⟧`` is the identity."""
    w = tuple(w)
    partner = match_nesting(w).partner()

    def segment(lo: int, hi: int) -> OctRelation:
        acc = labels.identity()
        i = lo
        while i < hi:
            s = w[i]
            t = call_name(s)
            if t is not None:
                j = partner[i + 1] - 1
                part = labels.call_clause(t, segment(i + 1, j))
                i = j + 1
            else:
                part = labels.rho(s)
                i += 1
            acc = compose(acc, part)
            if acc.is_empty():
                return acc
        return acc

    return segment(0, len(w))


# ---------------------------------------------------------------------------
# Control-word semantics over derivation trees
# ---------------------------------------------------------------------------


def tree_semantics(
    node: TreeNode,
    labels: ProgramLabels,
    memo: dict | None = None,
) -> OctRelation:
    """Evaluate a derivation tree of a program grammar bottom-up.

    A node's body is read left to right: internal terminals contribute their
    relation, nonterminal children their subtree's relation, and a
    ``call[t] … ret[t]`` pair wraps what lies between in the call clause.
    With ``memo`` (keyed by subtree shape) shared subtrees are evaluated once.
    """
    key = tree_key(node) if memo is not None else None
    if memo is not None and key in memo:
        return memo[key]
    rel = items_semantics(node.children, labels, memo)
    if memo is not None:
        memo[key] = rel
    return rel


def items_semantics(
    items: Sequence[TreeNode | OctRelation | str],
    labels: ProgramLabels,
    memo: dict | None = None,
) -> OctRelation:
    """Relation of a production body whose nonterminals are replaced by
    subtrees or by already computed relations."""
    return _items_semantics(items, 0, len(items), labels, memo)


def _items_semantics(items, lo, hi, labels, memo) -> OctRelation:
    acc: OctRelation | None = None
    i = lo
    while i < hi:
        c = items[i]
        if isinstance(c, OctRelation):
            part = c
            i += 1
        elif isinstance(c, TreeNode):
            if c.production is None:
                raise NotDepthFirst(f"nonterminal {c.symbol} is left unexpanded")
            part = tree_semantics(c, labels, memo)
            i += 1
        else:
            t = call_name(c)
            if t is not None:
                depth, j = 0, None
                for m in range(i + 1, hi):
                    s = items[m]
                    if isinstance(s, str):
                        if call_name(s) == t:
                            depth += 1
                        elif ret_name(s) == t:
                            if depth == 0:
                                j = m
                                break
                            depth -= 1
                if j is None:
                    raise ShapeError(f"call[{t}] without a matching return in the same body")
                part = labels.call_clause(t, _items_semantics(items, i + 1, j, labels, memo))
                i = j + 1
            elif ret_name(c) is not None:
                raise ShapeError(f"{c} without a matching call in the same body")
            else:
                part = labels.rho(c)
                i += 1
        acc = part if acc is None else compose(acc, part)
        if acc.is_empty():
            return acc
    return labels.identity() if acc is None else acc


def tree_key(node: TreeNode | str):
    if isinstance(node, str):
        return node
    return (node.symbol, node.production, tuple(tree_key(c) for c in node.children))


def map_tree(
    node: TreeNode,
    production: Callable[[int], int] | Mapping[int, int],
    symbol: Callable[[str], str],
) -> TreeNode:
    """Relabel productions and nonterminal symbols of a tree."""
    pmap = production.__getitem__ if isinstance(production, Mapping) else production
    children: list[TreeNode | str] = [
        map_tree(c, pmap, symbol) if isinstance(c, TreeNode) else c for c in node.children
    ]
    prod = pmap(node.production) if node.production is not None else None
    return TreeNode(symbol(node.symbol), prod, children, list(node.steps))


def controlword_semantics(
    g: Grammar,
    x: str,
    gamma: Sequence[int],
    labels: ProgramLabels,
    positions: Sequence[int] | None = None,
) -> OctRelation:
    """``⟦γ⟧`` for a depth-first derivation ``x ⇒γ w`` of a program grammar."""
    try:
        seq = apply_control_word(g, x, gamma, positions)
    except NonApplicable as exc:
        raise NotDepthFirst(str(exc)) from exc
    if not seq.is_terminal():
        raise NotDepthFirst("control word does not derive a terminal word")
    if not seq.is_depth_first():
        raise NotDepthFirst("step sequence is not depth-first")
    root = build_forest(seq)[0]
    assert isinstance(root, TreeNode)
    return tree_semantics(root, labels)


def derivation_trees(g: Grammar, x: str, gamma: Sequence[int]) -> list[TreeNode]:
    """Trees of every depth-first derivation of a terminal word with control word ``gamma``."""
    out = []
    for seq in all_df_sequences(g, x, gamma):
        if seq.is_terminal():
            root = build_forest(seq)[0]
            assert isinstance(root, TreeNode)
            out.append(root)
    return out


def yield_word(node: TreeNode) -> Word:
    return node.leaves()
