import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fbclab import free_core as fc
from fbclab.free_core import Basis, FreeAutomorphism, StallingsAutomaton

from .oracles import bounded_closure

letters = st.integers(min_value=-3, max_value=3).filter(lambda x: x != 0)
raw_words = st.lists(letters, max_size=12)
words = raw_words.map(fc.reduce)


@given(raw_words)
def test_reduce_is_idempotent_and_reduced(w):
    r = fc.reduce(w)
    assert fc.is_reduced(r)
    assert fc.reduce(r) == r


@given(words, words, words)
def test_concat_associative(u, v, w):
    assert fc.concat(fc.concat(u, v), w) == fc.concat(u, fc.concat(v, w))


@given(words)
def test_inverse_cancels(w):
    assert fc.concat(w, fc.inverse(w)) == ()
    assert fc.inverse(fc.inverse(w)) == w


@given(words, st.integers(min_value=-4, max_value=4))
def test_power_matches_repeated_concat(w, n):
    expected = ()
    step = w if n >= 0 else fc.inverse(w)
    for _ in range(abs(n)):
        expected = fc.concat(expected, step)
    assert fc.power(w, n) == expected


@given(words, words)
def test_cyclic_reduce_is_conjugation(w, x):
    core, conj = fc.cyclic_reduce(w)
    assert fc.concat_many(conj, core, fc.inverse(conj)) == w
    conjugated = fc.concat_many(x, w, fc.inverse(x))
    assert fc.are_conjugate(w, conjugated)
    assert fc.conjugacy_length(w) == fc.conjugacy_length(conjugated)


def test_basis_parse_format_round_trip():
    B = Basis(("a", "b", "c"))
    w = B.parse("a b' c c a'")
    assert w == (1, -2, 3, 3, -1)
    assert B.parse(B.format(w)) == w
    assert B.parse("c^3 a^-2") == (3, 3, 3, -1, -1)
    with pytest.raises(fc.WordError):
        B.parse("d")


def test_automorphism_inverse_and_iterates():
    B = Basis(("a", "b", "c"))
    monodromy = FreeAutomorphism(B, [B.parse("a"), B.parse("b a"), B.parse("c b")],
                           [B.parse("a"), B.parse("b a'"), B.parse("c a b'")])
    c = B.parse("c")
    for n in range(8):
        assert monodromy.apply(monodromy.apply(c, n), -n) == c
    # |monodromy^n(c)| = 1 + n(n+1)/2
    assert [len(monodromy.apply(c, n)) for n in range(6)] == [1 + n * (n + 1) // 2 for n in range(6)]


def test_bad_backward_images_rejected():
    B = Basis(("a", "b"))
    with pytest.raises(fc.WordError):
        FreeAutomorphism(B, [B.parse("a"), B.parse("b a")], [B.parse("a"), B.parse("b a")])


@settings(max_examples=60, deadline=None)
@given(st.lists(words.filter(bool), min_size=1, max_size=3), words)
def test_stallings_agrees_with_closure(gens, w):
    A = StallingsAutomaton.build(gens)
    # everything the closure reaches is a member
    for x in list(bounded_closure(gens, 6))[:200]:
        assert A.member(x)
    # products of generators are members
    prod = fc.concat_many(*gens)
    assert A.member(prod)
    if A.member(w):
        assert A.member(fc.inverse(w))


@settings(max_examples=60, deadline=None)
@given(st.lists(words.filter(bool), min_size=1, max_size=3), words, words)
def test_coset_keys_respect_cosets(gens, x, y):
    A = StallingsAutomaton.build(gens)
    h = gens[0]
    # x and x h lie in the same left coset xH
    assert A.left_coset_key(x) == A.left_coset_key(fc.concat(x, h))
    same = A.member(fc.concat(fc.inverse(x), y))
    assert (A.left_coset_key(x) == A.left_coset_key(y)) == same


def test_stallings_rank_and_trivial():
    assert StallingsAutomaton.build([]).is_trivial()
    assert StallingsAutomaton.build([(1,), (2,)]).rank == 2
    assert StallingsAutomaton.build([(1, 1), (1, 1, 1)]).rank == 1  # <a^2, a^3> = <a>
    assert StallingsAutomaton.build([(1, 1), (1, 1, 1)]).member((1,))
