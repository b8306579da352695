import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fbclab import free_core as fc
from fbclab.mapping_torus import (IDENTITY, BallRangeError, FbcElement, ResourceError, ball, bfs_distances,
                                  count_geodesics, geodesics_between, word_length)

from .conftest import reference, shared_ball, z2_group
from .oracles import naive_multiply

G2, _ = reference("G2")
G3, _ = reference("G3")


def random_element(G, rng: random.Random, max_t: int = 4, max_len: int = 6) -> FbcElement:
    rank = G.basis.rank
    w = fc.reduce(rng.choice([1, -1]) * rng.randint(1, rank) for _ in range(rng.randint(0, max_len)))
    return FbcElement(rng.randint(-max_t, max_t), w)


def elements_of(G):
    rank = G.basis.rank
    letter = st.integers(-rank, rank).filter(bool)
    return st.builds(lambda k, w: FbcElement(k, fc.reduce(w)), st.integers(-4, 4), st.lists(letter, max_size=6))


@pytest.mark.parametrize("G", [G2, G3], ids=["G2", "G3"])
def test_associativity_seeded(G):
    rng = random.Random(20240)
    for _ in range(10_000):
        x, y, z = (random_element(G, rng) for _ in range(3))
        assert G.multiply(G.multiply(x, y), z) == G.multiply(x, G.multiply(y, z))


@pytest.mark.parametrize("G", [G2, G3], ids=["G2", "G3"])
def test_multiply_matches_naive_oracle(G):
    rng = random.Random(7)
    for _ in range(2000):
        x, y = random_element(G, rng), random_element(G, rng)
        assert G.multiply(x, y) == naive_multiply(G, x, y)


@settings(max_examples=200, deadline=None)
@given(elements_of(G3), elements_of(G3))
def test_group_axioms(x, y):
    G = G3
    assert G.multiply(x, IDENTITY) == x == G.multiply(IDENTITY, x)
    assert G.multiply(x, G.invert(x)) == IDENTITY
    assert G.invert(G.multiply(x, y)) == G.multiply(G.invert(y), G.invert(x))
    assert G.power(x, 3) == G.product(x, x, x)
    assert G.power(x, -2) == G.invert(G.product(x, x))


@settings(max_examples=100, deadline=None)
@given(elements_of(G2))
def test_format_parse_round_trip(x):
    assert G2.parse(G2.format(x)) == x


def test_conjugation_convention():
    # t w t^-1 = monodromy(w)
    for G in (G2, G3):
        for i in range(1, G.basis.rank + 1):
            w = (i,)
            assert G.conjugate(G.t(), G.fiber(w)) == G.fiber(G.monodromy.apply(w))
    assert G2.conjugate(G2.t(), G2.parse("b")) == G2.parse("b a")


def test_generators_include_inverses():
    names = [g.name for g in G2.generators]
    assert names == ["a", "a'", "b", "b'", "t", "t'"]
    for g in G2.generators:
        assert G2.multiply(g.element, G2.token(g.name + "'" if not g.name.endswith("'") else g.name[:-1])) == IDENTITY


def test_z2_ball_sizes_closed_form():
    Z = z2_group()
    for r in range(7):
        assert len(ball(Z, r)) == 2 * r * r + 2 * r + 1


def _oracle_ball_size(G, r: int) -> int:
    gens = [g.element for g in G.generators]
    seen = {IDENTITY}
    frontier = [IDENTITY]
    for _ in range(r):
        nxt = []
        for g in frontier:
            for s in gens:
                h = naive_multiply(G, g, s)
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        frontier = nxt
    return len(seen)


@pytest.mark.parametrize("G", [G2, G3], ids=["G2", "G3"])
def test_ball_sizes_match_oracle(G):
    for r in range(5):
        assert len(shared_ball(G, r)) == _oracle_ball_size(G, r)


def test_ball_structure():
    B = shared_ball(G2, 4)
    assert B.dist[B.identity_index] == 0
    # neighbor table is an involution along inverse generators
    inv = [[g.name for g in G2.generators].index(n) for n in ["a'", "a", "b'", "b", "t'", "t"]]
    for i in range(len(B)):
        for s, j in enumerate(B.neighbors[i]):
            if j >= 0:
                assert B.neighbors[j, inv[s]] == i
                assert abs(int(B.dist[j]) - int(B.dist[i])) <= 1
    assert np.array_equal(bfs_distances(B.neighbors, B.identity_index), B.dist)
    assert len(B.sphere(1)) == 6


def test_ball_cap_and_range():
    with pytest.raises(ResourceError):
        ball(G2, 6, cap=100)
    with pytest.raises(BallRangeError):
        ball(G2, -1)


def test_geodesics_between_and_counts():
    B = shared_ball(G2, 6)
    g, h = IDENTITY, G2.parse("a t")
    paths, count = geodesics_between(B, g, h)
    # a t and t a' ... both spell a t; every path has length 2
    assert count == len(paths) and all(len(p) == 3 for p in paths)
    assert count == count_geodesics(B, B.index[g], B.index[h])
    assert word_length(G2, G2.parse("b a b'"), B) == 3
    with pytest.raises(BallRangeError):
        word_length(G2, G2.power(G2.parse("b"), 9), B)


def test_serialisation_is_deterministic():
    B = ball(G2, 2)
    assert B.to_json() == ball(G2, 2).to_json()
    assert B.to_dot().startswith("graph cayley {")
