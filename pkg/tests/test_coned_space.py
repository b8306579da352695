import itertools
import json

import jsonschema
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from fbclab.bass_serre import tree_ball
from fbclab.coned_space import (build_axis, cone, diagnose, four_point_delta, margin_ok, measure_bottleneck,
                                measure_delta, pair_bottleneck, project_to_tree)
from fbclab.hierarchy import build_hierarchy, enumerate_products
from fbclab.mapping_torus import BallRangeError, bfs_distances
from fbclab.subgroups import make_product

from .conftest import ROOT, free_tree_ball, reference, shared_ball, z2_group


def family(name):
    G, rep = reference(name)
    root = build_hierarchy(rep, G)
    return G, root, enumerate_products(root).members


def brute_delta(D) -> float:
    best = 0.0
    for x, y, z, w in itertools.combinations(range(len(D)), 4):
        s = sorted([D[x][y] + D[z][w], D[x][z] + D[y][w], D[x][w] + D[y][z]])
        best = max(best, (s[2] - s[1]) / 2)
    return best


@settings(max_examples=40, deadline=None)
@given(st.integers(5, 9), st.lists(st.tuples(st.integers(0, 8), st.integers(0, 8)), min_size=4, max_size=20))
def test_four_point_delta_matches_brute_force(n, extra):
    # a path plus random chords keeps the graph connected
    edges = [(i, i + 1) for i in range(n - 1)] + [(a % n, b % n) for a, b in extra if a % n != b % n]
    rows, cols = zip(*edges)
    A = csr_matrix((np.ones(len(edges)), (rows, cols)), shape=(n, n))
    D = dijkstra(A, directed=False)
    assert four_point_delta(D) == pytest.approx(brute_delta(D))


def test_apex_coning_equals_unit_cliques():
    G, _, members = family("G2")
    B = shared_ball(G, 4)
    cb = cone(B, members)
    # oracle: base edges plus a unit edge between every pair in a coset (deduplicated,
    # since scipy sums repeated entries)
    pairs = {(i, j) for i, _, j in B.edges()}
    for m in cb.coset_members:
        pairs.update(itertools.combinations(sorted(m.tolist()), 2))
    src, dst = zip(*pairs)
    A = csr_matrix((np.ones(len(src)), (src, dst)), shape=(len(B), len(B)))
    for i in [0, B.identity_index, len(B) // 3, len(B) - 1]:
        oracle = dijkstra(A, directed=False, indices=i)
        assert np.array_equal(cb.distances_from(i), oracle)


@pytest.mark.parametrize("r", [2, 4])
def test_product_group_cones_to_a_point(r):
    G, _, members = family("P1")
    cb = cone(shared_ball(G, r), members)
    assert cb.diameter() == 1.0
    assert len(cb.coset_members) == 1


def test_empty_family_leaves_base_metric():
    G, _, _ = family("G2")
    B = shared_ball(G, 4)
    cb = cone(B, [])
    assert cb.n_nodes == len(B)
    for i in (B.identity_index, 5, 17):
        assert np.array_equal(cb.distances_from(i), bfs_distances(B.neighbors, i).astype(float))


def test_coset_ids_agree_with_membership():
    G, _, members = family("G2")
    B = shared_ball(G, 3)
    cb = cone(B, members)
    P = members[0]
    rng = np.random.default_rng(1)
    for _ in range(300):
        i, j = (int(v) for v in rng.integers(0, len(B), size=2))
        x, y = B.elements[i], B.elements[j]
        assert cb.same_coset(i, j) == P.contains(G.multiply(G.invert(x), y))
    audit = cb.union_find_audit()
    assert audit["violations"] == 0 and audit["moves_checked"] > 0


def test_free_tree_is_zero_hyperbolic_with_unit_bottleneck():
    G, _, _ = family("G2")
    tb = free_tree_ball(G, 6)
    cb = cone(tb, [])
    assert measure_delta(cb, pool_size=20).delta == 0.0
    res = measure_bottleneck(cb, n_pairs=6)
    assert res.pairs and res.delta == 1


def test_z2_controls():
    Z = z2_group()
    # without coning the flat is not hyperbolic at scale; coning by the product kills it
    deltas = [measure_delta(cone(shared_ball(Z, r), []), pool_size=24).delta for r in (4, 8)]
    assert deltas[1] >= deltas[0] >= 1
    P = make_product(Z, [Z.basis.parse("a")], Z.t(), "Z2", "whole group")
    assert cone(shared_ball(Z, 4), [P]).diameter() == 1.0


def test_flat_bottleneck_grows_without_coning():
    G, _, _ = family("G2")
    vals = []
    for r in (4, 6):
        B = shared_ball(G, r)
        j = r // 3
        x, y = B.index[G.t(-j)], B.index[G.t(j)]
        cb = cone(B, [])
        assert margin_ok(cb, x, y)
        vals.append(pair_bottleneck(cb, x, y).delta)
    assert vals[1] > vals[0]


def test_lipschitz_projection_g3_topmost():
    G, root, members = family("G3")
    B = shared_ball(G, 4)
    cb = cone(B, members)
    pr = project_to_tree(cb, tree_ball(root.splitting, 4, B))
    assert pr.lipschitz_ok, pr.violations


def test_lipschitz_projection_g2_linear():
    G, root, members = family("G2")
    B = shared_ball(G, 4)
    cb = cone(B, members)
    pr = project_to_tree(cb, tree_ball(root.linear, 8, B), scale=2)
    assert pr.lipschitz_ok, pr.violations


def test_axis_range_errors():
    G, _, members = family("G2")
    cb = cone(shared_ball(G, 4), members)
    ax = build_axis(cb, G.parse("b"), 2)
    assert len(ax.points) == 5
    with pytest.raises(BallRangeError, match="largest feasible N"):
        build_axis(cb, G.parse("b"), 10)


def test_diagnostics_report_validates_against_schema():
    G, root, members = family("G2")
    B = shared_ball(G, 4)
    report = diagnose(cone(B, members), "G2", seed=3, tree=tree_ball(root.linear, 8, B), tree_scale=2)
    payload = json.loads(report.to_json())
    schema = json.loads((ROOT / "schemas" / "diagnostics.schema.json").read_text())
    jsonschema.validate(payload, schema)
    assert payload["lipschitz_check"]["ok"]
    assert report.to_json() == diagnose(cone(B, members), "G2", seed=3, tree=tree_ball(root.linear, 8, B),
                                        tree_scale=2).to_json()


def test_degenerate_radius_zero():
    G, _, members = family("G2")
    report = diagnose(cone(shared_ball(G, 0), members), "G2")
    assert report.delta["delta"] == 0.0 and report.bottleneck["Delta"] == 0
