from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import NESTED_BOUND, NESTED_RULES
from oracles import bounded_language, random_2nf_grammar

from flatoct.bounded import (
    BoundedExpression,
    Homomorphism,
    LetterBoundedExpression,
    bowtie_grammar,
    expression_grammar,
    intersect_grammar,
    language_included,
    letter_grammar_and_complement,
    minimize_expression,
    partition_nonterminals,
    state_name,
    triple_name,
)
from flatoct.errors import InputError, NotContained, NotStrict, ShapeError
from flatoct.generators import random_letter_bounded_grammar
from flatoct.grammar import (
    Grammar,
    apply_control_word,
    enumerate_control_words,
    enumerate_words,
    normalize_2nf,
    reduce,
    reduce_multi,
)


def q(r: int, s: int) -> str:
    """State name of position ``r`` in block ``s``."""
    return state_name((s, r))


def t(s1: int, r1: int, x: str, s2: int, r2: int) -> str:
    return triple_name((s1, r1), x, (s2, r2))


def rules(g: Grammar) -> set[tuple[str, tuple[str, ...]]]:
    return {(p.head, p.body) for p in g}


def product(rules_text: str = NESTED_RULES, bound: str = NESTED_BOUND):
    g, _ = normalize_2nf(Grammar.from_rules(rules_text))
    return g, intersect_grammar(g, "X", BoundedExpression.parse(bound))


# -- bounded expressions and G^b ----------------------------------------------------


def test_parse_and_print():
    b = BoundedExpression.parse("(t1 call[t2])* (t4)* (ret[t2] t3)*")
    assert b.words == (("t1", "call[t2]"), ("t4",), ("ret[t2]", "t3"))
    assert (b.d, len(b)) == (3, 5)
    assert BoundedExpression.parse(str(b)) == b
    assert BoundedExpression.parse("a* (b c)*").words == (("a",), ("b", "c"))
    for bad in ["", "(a b", "()*", "(a)* b"]:
        with pytest.raises(InputError):
            BoundedExpression.parse(bad)


def test_membership():
    b = BoundedExpression.parse(NESTED_BOUND)
    assert b.accepts(())
    assert b.accepts(tuple("acacabdb"))
    assert not b.accepts(tuple("abac"))
    assert not b.accepts(tuple("aca"))
    assert b.is_factor(tuple("ca")) and b.is_factor(tuple("cd")) and not b.is_factor(tuple("bc"))


def test_expression_grammar_nested_example():
    g, starts = expression_grammar(BoundedExpression.parse(NESTED_BOUND))
    assert starts == (q(1, 1), q(1, 2), q(1, 3))
    assert rules(g) == {
        (q(1, 1), ("a", q(2, 1))), (q(1, 1), ()),
        (q(1, 2), ("a", q(2, 2))), (q(1, 2), ()),
        (q(1, 3), ("d", q(2, 3))), (q(1, 3), ()),
        (q(2, 1), ("c", q(1, 1))), (q(2, 1), ("c", q(1, 2))), (q(2, 1), ("c", q(1, 3))),
        (q(2, 2), ("b", q(1, 2))), (q(2, 2), ("b", q(1, 3))),
        (q(2, 3), ("b", q(1, 3))),
    }


@pytest.mark.parametrize("text", [NESTED_BOUND, "a*", "(a b)*", "(a b)* a* (b a b)*", "(t1 call[t2])* (t4)* (ret[t2] t3)*"])
def test_expression_grammar_language(text):
    b = BoundedExpression.parse(text)
    g, starts = expression_grammar(b)
    assert len(g.nonterminals) == len(b)
    lang = set()
    for s in starts:
        lang |= enumerate_words(g, s, max_len=12)
    assert lang == bounded_language(b.words, 12)
    assert all(b.accepts(w) for w in lang)


def test_expression_grammar_small_cases():
    g, starts = expression_grammar(BoundedExpression.parse("a*"))
    assert len(g.nonterminals) == 1
    assert enumerate_words(g, starts[0], max_len=3) == {(), ("a",), ("a", "a"), ("a", "a", "a")}
    g, starts = expression_grammar(BoundedExpression.parse("(a b)*"))
    assert enumerate_words(g, starts[0], max_len=8) == {("a", "b") * n for n in range(5)}


# -- letter-bounded expressions -----------------------------------------------------


def test_letter_bounded_expression_basics():
    lb = LetterBoundedExpression(("a1", "a2", "a3"))
    assert lb.accepts(()) and lb.accepts(("a1", "a3", "a3"))
    assert not lb.accepts(("a2", "a1")) and not lb.accepts(("b",))
    assert lb.word((2, 0, 1)) == ("a1", "a1", "a3")
    assert lb.parikh(("a1", "a1", "a3")) == (2, 0, 1)
    assert lb.sub(["a3", "a1"]).letters == ("a1", "a3")
    assert str(lb) == "a1* a2* a3*" and str(lb.sub([])) == "ε"
    with pytest.raises(NotStrict):
        LetterBoundedExpression(("a", "b", "a"))


def test_homomorphism():
    h = Homomorphism({"a1": ("a", "c"), "a2": ("a", "b")})
    assert h.apply(("a1", "a1", "a2")) == tuple("acacab")
    with pytest.raises(InputError):
        Homomorphism({"a1": ()})


def test_complement_examples():
    lb = LetterBoundedExpression(("a1", "a2"))
    inside, outside = letter_grammar_and_complement(lb, ["a1", "a2"])
    start = "q^(1)"
    lin, lout = enumerate_words(inside, start, max_len=2), enumerate_words(outside, start, max_len=2)
    assert ("a2", "a1") in lout and ("a2", "a1") not in lin
    assert ("a1", "a2") in lin and ("a1", "a2") not in lout
    assert () in lin and () not in lout
    with pytest.raises(InputError):
        letter_grammar_and_complement(lb, ["a1"])


@pytest.mark.parametrize("letters,sigma", [(("a1", "a2"), ("a1", "a2")), (("a1", "a2", "a3"), ("a1", "a2", "a3", "b")), ((), ("a",))])
def test_complement_partitions_all_words(letters, sigma):
    lb = LetterBoundedExpression(letters)
    inside, outside = letter_grammar_and_complement(lb, sigma)
    lin = enumerate_words(inside, "q^(1)", max_len=6)
    lout = enumerate_words(outside, "q^(1)", max_len=6)
    words = {w for n in range(7) for w in itertools.product(sorted(sigma), repeat=n)}
    assert lin | lout == words and not (lin & lout)
    assert lin == {w for w in words if lb.accepts(w)}


def test_language_inclusion():
    lb = LetterBoundedExpression(("a1", "a2", "a3"))
    g = Grammar.from_rules("X -> a1 X a3 | Y; Y -> a2 Y | eps")
    assert language_included(g, "X", lb)
    assert not language_included(g, "X", LetterBoundedExpression(("a1", "a3", "a2")))
    # X =>* a1^n a2^m Y a3^n, so the context language needs all three letters
    assert language_included(g, "X", lb, y="Y")
    assert not language_included(g, "X", LetterBoundedExpression(("a1", "a3")), y="Y")
    assert language_included(g, "Y", LetterBoundedExpression(("a2",)), y="Y")


def test_minimize_examples():
    lb = LetterBoundedExpression(("a1", "a2", "a3"))
    g = Grammar.from_rules("X -> a1 X a3 | eps")
    assert minimize_expression(g, "X", lb).letters == ("a1", "a3")
    eps = Grammar.from_rules("X -> eps")
    assert minimize_expression(eps, "X", lb).letters == ()
    with pytest.raises(NotContained):
        minimize_expression(Grammar.from_rules("X -> a3 a1"), "X", lb)
    _, inter = product()
    bow = bowtie_grammar(inter)
    a1, a2, a3 = bow.letters.letters
    main = t(1, 1, "X", 3, 1)
    assert minimize_expression(reduce(bow.grammar, main), main, bow.letters) == bow.letters
    # the remaining axioms only derive a2 (the word ab)
    for x in set(bow.axioms) - {main}:
        assert minimize_expression(reduce(bow.grammar, x), x, bow.letters).letters == (a2,)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_minimize_keeps_exactly_the_occurring_letters(seed):
    case = random_letter_bounded_grammar(random.Random(seed))
    lb = minimize_expression(case.grammar, case.axiom, case.letters)
    words = enumerate_words(case.grammar, case.axiom, max_len=10)
    occurring = {a for w in words for a in w}
    assert occurring <= set(lb.letters)
    assert set(lb.letters) <= set(case.letters.letters)


def test_partition_examples():
    g = Grammar.from_rules("X -> a1 Y a3; Y -> eps")
    hat, check = partition_nonterminals(g, LetterBoundedExpression(("a1", "a2", "a3")))
    assert hat == {"X"} and check == {"Y"}
    _, inter = product()
    bow = bowtie_grammar(inter)
    main = t(1, 1, "X", 3, 1)
    gx = reduce(bow.grammar, main)
    hat, check = partition_nonterminals(gx, minimize_expression(gx, main, bow.letters))
    assert main in hat
    assert t(2, 2, "Z", 2, 2) in check


@pytest.mark.parametrize("seed", range(50))
def test_partition_matches_definition(seed):
    case = random_letter_bounded_grammar(random.Random(seed))
    g = reduce(case.grammar, case.axiom)
    lb = minimize_expression(g, case.axiom, case.letters)
    if not lb.letters:
        return
    hat, check = partition_nonterminals(g, lb)
    assert hat | check == g.nonterminals and not (hat & check)
    assert case.axiom in hat
    first, last = lb.letters[0], lb.letters[-1]
    for y in g.nonterminals:
        words = enumerate_words(g, y, max_len=12)
        defined = any(w[:1] == (first,) for w in words) and any(w[-1:] == (last,) for w in words)
        assert (y in hat) == defined, y


# -- the product grammar G^∩ ---------------------------------------------------------


def test_product_nested_example_productions():
    g, inter = product()
    two = [t(1, 1, "X", 3, 1), t(2, 1, "X", 3, 1)]
    core = reduce_multi(inter.grammar, two)
    expected = set()
    for j in (1, 2):
        expected.add((t(j, 1, "X", 3, 1), ("a", t(j, 2, "Y", 3, 1))))
        expected.add((t(1, 2, "Z", 3, 2), ("c", t(j, 1, "T", 3, 2))))
        expected.add((t(j, 1, "T", 3, 2), (t(j, 1, "X", 3, 1), "d")))
    expected.add((t(1, 2, "Y", 3, 1), (t(1, 2, "Z", 3, 2), "b")))
    expected.add((t(2, 2, "Z", 2, 2), ()))
    expected.add((t(2, 2, "Y", 3, 1), (t(2, 2, "Z", 2, 2), "b")))
    assert rules(core) == expected
    # ζ sends each product production to the original one of the same shape
    for p in core:
        orig = g[inter.strip_production[p.id]]
        assert orig.head == inter.strip_symbol(p.head)
        assert tuple(inter.strip_symbol(s) for s in p.body) == orig.body


def test_product_trivial():
    g = Grammar.from_rules("X -> a")
    inter = intersect_grammar(g, "X", BoundedExpression.parse("a*"))
    lang = set()
    for x in inter.axioms:
        lang |= enumerate_words(inter.grammar, x, max_len=4)
    assert lang == {("a",)}


def test_product_rejects_long_bodies():
    g = Grammar.from_rules("X -> a b X")
    with pytest.raises(ShapeError):
        intersect_grammar(g, "X", BoundedExpression.parse("(a b)*"))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_product_language_and_size(seed):
    g = random_2nf_grammar(random.Random(seed), max_nonterminals=3, terminals=("a", "b", "c"))
    b = BoundedExpression.parse("(a b)* c*")
    inter = intersect_grammar(g, "N0", b)
    assert inter.grammar.size <= len(b) ** 3 * g.size
    got = set()
    for x in inter.axioms:
        got |= enumerate_words(inter.grammar, x, max_len=10)
    want = {w for w in enumerate_words(g, "N0", max_len=10) if b.accepts(w)}
    assert got == want


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_strip_maps_derivations_back(seed):
    rng = random.Random(seed)
    if rng.random() < 0.3:
        g, inter = product()
        x = "X"
    else:
        g = random_2nf_grammar(rng, max_nonterminals=3, terminals=("a", "b", "c"))
        inter = intersect_grammar(g, "N0", BoundedExpression.parse("(a b)* c*"))
        x = "N0"
    for axiom in inter.axioms:
        for gamma in enumerate_control_words(inter.grammar, axiom, None, max_steps=8, k=2):
            seq = apply_control_word(inter.grammar, axiom, gamma)
            back = apply_control_word(g, x, inter.strip_control(gamma), seq.positions)
            assert back.result == seq.result
            assert back.index == seq.index
            assert back.is_depth_first() == seq.is_depth_first()


# -- the letter-bounded image G^⋈ -------------------------------------------------------


def test_bowtie_nested_example():
    _, inter = product()
    bow = bowtie_grammar(inter)
    a1, a2, a3 = bow.letters.letters
    assert bow.grammar.nonterminals == inter.grammar.nonterminals
    body = {p.head + "|" + inter.grammar[p.id].head: p.body for p in bow.grammar}
    assert body[t(1, 2, "Y", 3, 1) + "|" + t(1, 2, "Y", 3, 1)] == (t(1, 2, "Z", 3, 2), a3)
    assert body[t(2, 2, "Y", 3, 1) + "|" + t(2, 2, "Y", 3, 1)] == (t(2, 2, "Z", 2, 2), a2)
    assert body[t(1, 2, "Z", 3, 2) + "|" + t(1, 2, "Z", 3, 2)] in {(a1, t(1, 1, "T", 3, 2)), (a1, t(2, 1, "T", 3, 2))}


def test_bowtie_single_block():
    g, _ = normalize_2nf(Grammar.from_rules("X -> a b X | eps"))
    inter = intersect_grammar(g, "X", BoundedExpression.parse("(a b)*"))
    bow = bowtie_grammar(inter)
    (a1,) = bow.letters.letters
    assert bow.h.map == {a1: ("a", "b")}
    lang = set()
    for x in bow.axioms:
        lang |= enumerate_words(bow.grammar, x, max_len=5)
    assert lang == {(a1,) * n for n in range(6)}


def _preimage(bow, words: set, max_letters: int) -> set:
    """Letter words ``u`` of ``b̃`` with ``|u| <= max_letters`` and ``h(u)`` in ``words``."""
    out = set()
    d = len(bow.letters)
    for counts in itertools.product(range(max_letters + 1), repeat=d):
        if sum(counts) <= max_letters:
            u = bow.letters.word(counts)
            if bow.h.apply(u) in words:
                out.add(u)
    return out


@pytest.mark.parametrize("k", [1, 2, 3])
def test_bowtie_language_is_letter_preimage(k):
    cases = [product()[1]]
    rng = random.Random(5)
    for _ in range(8):
        g = random_2nf_grammar(rng, max_nonterminals=3, terminals=("a", "b", "c"))
        cases.append(intersect_grammar(g, "N0", BoundedExpression.parse("(a b)* c* (b)*")))
    max_letters = 5
    for inter in cases:
        bow = bowtie_grammar(inter)
        longest = max(len(w) for w in bow.h.map.values())
        for x in inter.axioms:
            mine = enumerate_words(bow.grammar, x, None, max_letters, k=k)
            theirs = enumerate_words(inter.grammar, x, None, max_letters * longest, k=k)
            assert set(mine) == _preimage(bow, set(theirs), max_letters)
            assert all(bow.letters.accepts(u) for u in mine)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_iota_round_trip(seed):
    rng = random.Random(seed)
    _, inter = product()
    bow = bowtie_grammar(inter)
    ids = [p.id for p in bow.grammar]
    gamma = tuple(rng.choice(ids) for _ in range(rng.randint(0, 12)))
    assert bow.to_bowtie(bow.to_intersection(gamma)) == gamma
    assert set(bow.iota_inv) == set(ids)


def test_iota_transfers_coverage():
    # every bowtie derivation, read back through ι⁻¹, derives a word of the
    # product grammar that maps onto the letter word under h
    _, inter = product()
    bow = bowtie_grammar(inter)
    for x in bow.axioms:
        for gamma in enumerate_control_words(bow.grammar, x, None, max_steps=10, k=2):
            letter_word = apply_control_word(bow.grammar, x, gamma).result
            word = apply_control_word(inter.grammar, x, bow.to_intersection(gamma)).result
            assert bow.h.apply(letter_word) == word
