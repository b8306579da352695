import itertools

import pytest

from fbclab.bass_serre import (axis_intersection_check, check_acylindricity, distinct_attachments, share_power,
                               translation_length_tree, tree_ball)
from fbclab.hierarchy import build_hierarchy

from .conftest import reference, shared_ball

G3_LOXODROMICS = ["c", "c b", "c a", "t c", "a c", "b c", "c b'", "c c", "c a b", "c' b"]


@pytest.fixture(scope="module")
def g3_tree():
    G, rep = reference("G3")
    root = build_hierarchy(rep, G)
    B = shared_ball(G, 6)
    return G, B, tree_ball(root.splitting, 3, B)


@pytest.fixture(scope="module")
def g2_linear_tree():
    G, rep = reference("G2")
    root = build_hierarchy(rep, G)
    B = shared_ball(G, 6)
    return G, B, tree_ball(root.linear, 3, B)


def test_tree_balls_are_trees(g3_tree, g2_linear_tree):
    for _, _, tb in (g3_tree, g2_linear_tree):
        assert tb.is_tree()
        assert distinct_attachments(tb) == []


def test_linear_tree_is_bipartite(g2_linear_tree):
    _, _, tb = g2_linear_tree
    products = {i for i, v in enumerate(tb.gog.vertex_types) if v.kind == "product"}
    assert tb.is_bipartite_by_type(products)


def test_g3_two_acylindrical_and_sharp(g3_tree):
    _, B, tb = g3_tree
    assert check_acylindricity(tb, 2, B).passed
    sharp = check_acylindricity(tb, 1, B)
    assert not sharp.passed and len(sharp.witness_path) == 3


def test_g2_linear_four_acylindrical_and_sharp(g2_linear_tree):
    _, B, tb = g2_linear_tree
    rep = check_acylindricity(tb, 4, B)
    assert rep.passed and rep.longest_stabilized == 4
    sharp = check_acylindricity(tb, 3, B)
    assert not sharp.passed and len(sharp.witness_path) == 5


def test_translation_lengths(g3_tree):
    G, _, tb = g3_tree
    assert translation_length_tree(tb, G.parse("t")).classification == "elliptic"
    assert translation_length_tree(tb, G.parse("a b")).classification == "elliptic"
    r = translation_length_tree(tb, G.parse("c"))
    assert r.as_tuple() == (1, "loxodromic")
    assert translation_length_tree(tb, G.parse("c c")).length == 2


def test_axis_bound_on_g3_pairs(g3_tree):
    G, _, tb = g3_tree
    memo: dict = {}
    checked = 0
    for u, v in itertools.combinations(G3_LOXODROMICS, 2):
        rep = axis_intersection_check(tb, G.parse(u), G.parse(v), 2, memo)
        if rep.status == "checked":
            checked += 1
            assert rep.diameter <= rep.bound, (u, v, rep.as_dict())
    assert checked >= 10


def test_common_powers_rejected(g3_tree):
    G, _, tb = g3_tree
    assert share_power(G, G.parse("c"), G.parse("c c c"))
    assert axis_intersection_check(tb, G.parse("c"), G.parse("c'"), 2).status == "rejected"
