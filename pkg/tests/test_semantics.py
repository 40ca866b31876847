from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import PROGRAMS
from oracles import point_semantics, random_atoms, relation_solutions

from flatoct.errors import NotDepthFirst, Unbalanced, UnlabeledSymbol
from flatoct.fop import read_fop
from flatoct.grammar import Grammar, apply_control_word, enumerate_control_words
from flatoct.octagon import OctRelation, VarSet, compose, intersect, parse_octagon
from flatoct.semantics import (
    ProgramLabels,
    controlword_semantics,
    derivation_trees,
    match_nesting,
    tree_semantics,
    word_semantics,
    yield_word,
)

XY = VarSet(("x", "y"))


def nested_call_word(n: int) -> tuple[str, ...]:
    return ("t1", "call[t2]") * n + ("t4",) + ("ret[t2]", "t3") * n


def random_labels(rng: random.Random, symbols=("a", "b", "c"), calls=("f", "g")) -> ProgramLabels:
    def rel() -> OctRelation:
        return OctRelation.from_atoms(XY, random_atoms(rng, XY, rng.randint(0, 3), box=2, spread=3))

    relations = {s: rel() for s in symbols}
    frames = {}
    for t in calls:
        relations[f"call[{t}]"] = rel()
        relations[f"ret[{t}]"] = rel()
        frames[t] = rel()
    return ProgramLabels(XY, relations, frames)


def random_nested_word(rng: random.Random, budget: int, symbols=("a", "b", "c"), calls=("f", "g")) -> tuple[str, ...]:
    out: list[str] = []
    while budget > 0:
        if budget >= 2 and rng.random() < 0.35:
            t = rng.choice(calls)
            inner = random_nested_word(rng, rng.randint(0, budget - 2), symbols, calls)
            out += [f"call[{t}]", *inner, f"ret[{t}]"]
            budget -= len(inner) + 2
        else:
            out.append(rng.choice(symbols))
            budget -= 1
        if rng.random() < 0.2:
            break
    return tuple(out)


# -- nesting ----------------------------------------------------------------------------


def test_match_nesting_examples():
    assert match_nesting(nested_call_word(1)).pairs == {(2, 4)}
    assert match_nesting(nested_call_word(2)).pairs == {(2, 8), (4, 6)}
    assert match_nesting(("t1", "t3")).pairs == frozenset()
    assert match_nesting(()).pairs == frozenset()
    with pytest.raises(Unbalanced) as info:
        match_nesting(("call[t2]", "t1"))
    assert info.value.position == 1
    with pytest.raises(Unbalanced) as info:
        match_nesting(("t1", "ret[t2]"))
    assert info.value.position == 2
    with pytest.raises(Unbalanced):
        match_nesting(("call[f]", "call[g]", "ret[f]", "ret[g]"))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_match_nesting_is_well_nested(seed):
    w = random_nested_word(random.Random(seed), 12)
    pairs = match_nesting(w).pairs
    assert len(pairs) == sum(1 for s in w if s.startswith("call["))
    for i, j in pairs:
        assert w[i - 1][5:-1] == w[j - 1][4:-1]
        for i2, j2 in pairs:
            assert not (i < i2 <= j < j2)


# -- word semantics -----------------------------------------------------------------------------


def test_word_semantics_examples(running):
    labels = running.labels()
    vs = labels.vars
    assert word_semantics(("t4",), labels) == parse_octagon("x = 0, z' = 0", vs)
    rel = word_semantics(nested_call_word(1), labels)
    assert rel.forget(["x'"]) == parse_octagon("x = 1, z' = 2", vs)
    rel = word_semantics(nested_call_word(2), labels)
    assert rel.forget(["x'"]) == parse_octagon("x = 2, z' = 4", vs)
    assert word_semantics((), labels) == OctRelation.identity(vs)
    with pytest.raises(UnlabeledSymbol):
        word_semantics(("t9",), labels)


def test_word_semantics_matches_points_on_running_example(running):
    labels = running.labels()
    for n in range(3):
        w = nested_call_word(n)
        assert relation_solutions(word_semantics(w, labels), -1, 4) == point_semantics(w, labels, -1, 4)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_word_semantics_matches_points(seed):
    rng = random.Random(seed)
    labels = random_labels(rng)
    w = random_nested_word(rng, 7)
    assert relation_solutions(word_semantics(w, labels), -2, 2) == point_semantics(w, labels, -2, 2)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_empty_word_is_neutral(seed):
    rng = random.Random(seed)
    labels = random_labels(rng)
    w = random_nested_word(rng, 6)
    rel = word_semantics(w, labels)
    ident = word_semantics((), labels)
    assert compose(ident, rel) == rel == compose(rel, ident)
    # concatenation is composition
    v = random_nested_word(rng, 4)
    assert word_semantics(w + v, labels) == compose(rel, word_semantics(v, labels))


# -- control-word semantics ----------------------------------------------------------------------


def test_controlword_semantics_examples(running):
    g, labels = running.grammar(), running.labels()
    gamma = g.control_word("p1 p2 p4 p3")
    rel = controlword_semantics(g, "X1", gamma, labels)
    assert rel == word_semantics(nested_call_word(1), labels)
    assert rel.forget(["x'"]) == parse_octagon("x = 1, z' = 2", labels.vars)
    single = controlword_semantics(g, "X1", g.control_word("p4"), labels)
    assert single == labels.rho("t4")
    with pytest.raises(NotDepthFirst):
        controlword_semantics(g, "X1", g.control_word("p1"), labels)
    with pytest.raises(NotDepthFirst):
        controlword_semantics(g, "X1", g.control_word("p4 p4"), labels)


def test_call_children_commute(running):
    # after p2 both X1 and X3 carry the top rank, so either may be expanded first
    g, labels = running.grammar(), running.labels()
    first = controlword_semantics(g, "X1", g.control_word("p1 p2 p4 p3"), labels, positions=[0, 1, 2, 4])
    second = controlword_semantics(g, "X1", g.control_word("p1 p2 p3 p4"), labels, positions=[0, 1, 4, 2])
    assert first == second
    trees = derivation_trees(g, "X1", g.control_word("p1 p2 p3 p4"))
    assert [yield_word(t) for t in trees] == [nested_call_word(1)]


@pytest.mark.parametrize("name", sorted(p.name for p in PROGRAMS.glob("*.fop")))
def test_emptiness_agrees_on_programs(name):
    fop = read_fop(PROGRAMS / name)
    g, labels, axiom = fop.grammar(), fop.labels(), fop.axiom
    query = fop.query_relation()
    words = enumerate_control_words(g, axiom, None, max_steps=10, df=True)
    assert words
    for gamma in words:
        seq = apply_control_word(g, axiom, gamma)
        by_word = word_semantics(seq.result, labels)
        by_tree = controlword_semantics(g, axiom, gamma, labels)
        assert by_word.is_empty() == by_tree.is_empty()
        assert by_word == by_tree
        if query is not None:
            assert intersect(by_word, query).is_empty() == intersect(by_tree, query).is_empty()


PROGRAM_RULES = "S -> a T | b; T -> call[f] S ret[f] U; U -> c | eps | call[g] V ret[g]; V -> a"


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_emptiness_agrees_on_random_labels(seed):
    rng = random.Random(seed)
    g = Grammar.from_rules(PROGRAM_RULES)
    labels = random_labels(rng)
    for gamma in enumerate_control_words(g, "S", None, max_steps=10, df=True):
        for tree in derivation_trees(g, "S", gamma):
            w = yield_word(tree)
            by_word = word_semantics(w, labels)
            by_tree = tree_semantics(tree, labels)
            assert by_word.is_empty() == by_tree.is_empty()
