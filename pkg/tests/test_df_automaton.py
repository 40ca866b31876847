from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import random_2nf_grammar

from flatoct.df_automaton import (
    EMPTY,
    accepts,
    explore,
    is_valid_vertex,
    render,
    successor,
    vertex,
)
from flatoct.errors import BudgetExceeded
from flatoct.generators import optimality_family
from flatoct.grammar import Grammar, all_df_sequences, enumerate_control_words


def pid(g: Grammar, name: str) -> int:
    return g.by_name(name).id


def v(*entries: tuple[str, int]):
    return tuple(entries)


def derivable(g: Grammar, k: int, x: str, y: str | None, gamma) -> bool:
    """Reference: some depth-first step sequence for ``gamma`` has index <= k
    and ends in ``y`` (or in a terminal word)."""
    for seq in all_df_sequences(g, x, gamma, limit=4096):
        if seq.index > k:
            continue
        rest = [s for s in seq.result if g.is_nonterminal(s)]
        if rest == ([] if y is None else [y]):
            return True
    return False


# -- successor -------------------------------------------------------------------------


def test_successor_examples(running_grammar):
    g = running_grammar
    assert successor(g, vertex("X2"), pid(g, "p2"), 2) == v(("X1", 0), ("X3", 0))
    assert successor(g, v(("X1", 0), ("X3", 0)), pid(g, "p4"), 2) == v(("X3", 0))
    assert successor(g, v(("X1", 0), ("X3", 0)), pid(g, "p1"), 2) == v(("X3", 0), ("X2", 1))
    assert successor(g, v(("X3", 0), ("X2", 1)), pid(g, "p2"), 2) is None  # capacity
    assert successor(g, vertex("X3"), pid(g, "p3"), 2) == EMPTY
    assert successor(g, vertex("X1"), pid(g, "p3"), 2) is None  # wrong head
    assert successor(g, EMPTY, pid(g, "p3"), 2) is None


def test_successor_keeps_rank_when_alone():
    g = Grammar.from_rules("X -> Y Z; Y -> W; Z -> a; W -> a")
    # Y and Z share rank 0; rewriting Z leaves Y alone at rank 0
    assert successor(g, v(("Y", 0), ("Z", 0)), 3, 3) == v(("Y", 0))
    # rewriting Y -> W while Z remains at rank 0 puts W at rank 1
    assert successor(g, v(("Y", 0), ("Z", 0)), 2, 3) == v(("Z", 0), ("W", 1))
    # W alone at the top rank keeps its rank when rewritten to nothing
    assert successor(g, v(("Z", 0), ("W", 1)), 4, 3) == v(("Z", 0))


def test_vertex_rendering(running_grammar):
    assert render(v(("X1", 0), ("X3", 0))) == "X1{0}X3{0}"
    assert render(EMPTY) == "ε"
    aut = explore(running_grammar, 2, "X1")
    assert "X2{0} --p2--> X1{0}X3{0}" in aut.dump().splitlines()


# -- accepts ---------------------------------------------------------------------------


def test_accepts_examples(running_grammar):
    g = running_grammar
    assert accepts(g, 2, "X1", None, g.control_word("p1 p2 p4 p3"))
    assert accepts(g, 2, "X1", None, g.control_word("p1 p2 p3 p1 p2 p4 p3"))
    assert not accepts(g, 2, "X1", None, g.control_word("p4 p4"))
    assert not accepts(g, 1, "X1", None, g.control_word("p1 p2 p4 p3"))
    assert accepts(g, 1, "X1", None, g.control_word("p4"))
    assert accepts(g, 2, "X1", "X1", ())
    assert accepts(g, 2, "X1", "X2", g.control_word("p1"))
    assert not accepts(g, 2, "X1", None, (99,))


def test_explore_running_fragment(running_grammar):
    aut = explore(running_grammar, 2, "X1")
    assert aut.vertices == {
        v(("X1", 0)),
        v(("X2", 0)),
        v(("X1", 0), ("X3", 0)),
        v(("X3", 0), ("X2", 1)),
        v(("X3", 0)),
        EMPTY,
    }
    # rewriting X2 under X3{0} would need three slots, so X3{0}X1{1} and
    # X3{0}X3{1} only appear from index 3 on
    assert v(("X3", 0), ("X1", 1)) not in aut.vertices
    assert v(("X3", 0), ("X1", 1)) in explore(running_grammar, 3, "X1").vertices
    for u, _, w in aut.edge_list():
        assert is_valid_vertex(w, 2)
    assert aut.accepts("X1", None, running_grammar.control_word("p1 p2 p4 p3"))
    # X3{0}X2{1} is a dead end at index 2
    assert aut.coreachable([EMPTY]) == aut.vertices - {v(("X3", 0), ("X2", 1))}


def test_explore_linear_grammar():
    g = Grammar.from_rules("X -> a Y | b; Y -> X c | Z; Z -> eps")
    aut = explore(g, 1, "X")
    assert all(len(u) <= 1 and all(r == 0 for _, r in u) for u in aut.vertices)
    assert aut.vertices == {vertex("X"), vertex("Y"), vertex("Z"), EMPTY}


def test_explore_budget_and_arguments(running_grammar):
    with pytest.raises(BudgetExceeded):
        explore(running_grammar, 2, "X1", budget=3)
    with pytest.raises(ValueError):
        explore(running_grammar, 0, "X1")


@pytest.mark.parametrize("k", [1, 2, 3])
def test_optimality_family_path(k):
    g = optimality_family(k)
    x = f"X{k}"
    (gamma,) = enumerate_control_words(g, x, None, max_steps=2 ** (k + 1), df=True)
    assert len(gamma) == 2 ** (k + 1) - 1
    aut = explore(g, k + 1, x)
    assert aut.accepts(x, None, gamma)
    assert not accepts(g, k, x, None, gamma)


# -- properties ------------------------------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 3))
def test_accepts_iff_depth_first_derivation(seed, k):
    rng = random.Random(seed)
    g = random_2nf_grammar(rng, max_nonterminals=3)
    names = sorted(g.nonterminals)
    x = names[0]
    positives = sorted(enumerate_control_words(g, x, None, max_steps=6, k=k, df=True))
    samples = positives[:50]
    ids = [p.id for p in g]
    for _ in range(200):
        samples.append(tuple(rng.choice(ids) for _ in range(rng.randint(0, 6))))
    for gamma in samples:
        y = rng.choice(names + [None])
        assert accepts(g, k, x, y, gamma) == derivable(g, k, x, y, gamma), (gamma, y)
    for gamma in positives:
        assert accepts(g, k, x, None, gamma)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_successor_output_is_canonical(seed):
    rng = random.Random(seed)
    g = random_2nf_grammar(rng, max_nonterminals=4)
    k = rng.randint(1, 4)
    aut = explore(g, k, sorted(g.nonterminals))
    for u, _, w in aut.edge_list():
        assert is_valid_vertex(u, k) and is_valid_vertex(w, k)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_acceptance_is_monotone_in_k(seed):
    rng = random.Random(seed)
    g = random_2nf_grammar(rng, max_nonterminals=3)
    ids = [p.id for p in g]
    for _ in range(100):
        gamma = tuple(rng.choice(ids) for _ in range(rng.randint(0, 7)))
        verdicts = [accepts(g, k, "N0", None, gamma) for k in (1, 2, 3, 4)]
        assert verdicts == sorted(verdicts)
