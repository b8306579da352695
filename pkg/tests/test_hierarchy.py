import pytest

from fbclab.hierarchy import build_hierarchy, check_component_partition, enumerate_products

from .conftest import reference


def family_signature(fam):
    return sorted((tuple(m["fiber_generators"]), m["vertical"]) for m in fam.describe()["members"])


@pytest.mark.parametrize("name, depth, kinds", [
    ("P1", 0, ["product"]),
    ("G2", 1, ["topmost", "product"]),
    ("G3", 2, ["topmost", "topmost", "product"]),
])
def test_hierarchy_shape(name, depth, kinds):
    G, rep = reference(name)
    root = build_hierarchy(rep, G)
    assert root.max_depth == depth == rep.top_degree
    assert [n.kind for n in root.walk()] == kinds


@pytest.mark.parametrize("name", ["G2", "G3", "G2_subdivided"])
def test_splitting_relations_hold(name):
    G, rep = reference(name)
    root = build_hierarchy(rep, G)
    for node in root.walk():
        if node.splitting is not None:
            assert node.splitting.kind == "cyclic"
            assert node.splitting.check_relations() == []
        if node.linear is not None:
            assert node.linear.check_relations() == []
    assert check_component_partition(rep, root) == []


def test_cyclic_edges_attach_in_the_t_coset():
    G, rep = reference("G3")
    root = build_hierarchy(rep, G)
    for node in root.walk():
        if node.splitting is None:
            continue
        for et in node.splitting.edge_types:
            assert all(m.t_exp == 1 and p.t_exp == 1 for m, p in zip(et.minus, et.plus))


def test_linear_splitting_is_bipartite_products_and_cyclics():
    G, rep = reference("G2")
    root = build_hierarchy(rep, G)
    gog = root.linear
    kinds = sorted(v.kind for v in gog.vertex_types)
    assert kinds == ["Z2", "product"]
    for et in gog.edge_types:
        assert {gog.vertex_types[et.src].kind, gog.vertex_types[et.dst].kind} == {"Z2", "product"}


def test_identity_monodromy_is_single_product():
    G, rep = reference("P1")
    root = build_hierarchy(rep, G)
    fam = enumerate_products(root)
    assert root.degree == 0 and root.children == []
    (m,) = fam.members
    assert m.describe()["fiber_rank"] == 2


@pytest.mark.parametrize("name", ["G2", "G3"])
def test_product_family_members_commute(name):
    G, rep = reference(name)
    fam = enumerate_products(build_hierarchy(rep, G))
    assert fam.members
    for m in fam.members:
        assert m.verify_commutation()
    # pruned members sit inside a kept one
    kept = {m.name for m in fam.members}
    for p in fam.describe()["pruned"]:
        assert p["inside"] in kept


def test_g2_family_contains_a_and_conjugate_of_a():
    G, rep = reference("G2")
    fam = enumerate_products(build_hierarchy(rep, G))
    (P,) = fam.members
    for w in ("a", "b a b'", "t", "a t"):
        assert P.contains(G.parse(w))
    for w in ("b", "b t"):
        assert not P.contains(G.parse(w))


def test_subdivision_does_not_change_products():
    fams = []
    for name in ("G2", "G2_subdivided"):
        G, rep = reference(name)
        fams.append(family_signature(enumerate_products(build_hierarchy(rep, G))))
    assert fams[0] == fams[1]


def test_subdividing_each_edge_keeps_depth_and_family():
    G, rep = reference("G3")
    base = build_hierarchy(rep, G)
    want = family_signature(enumerate_products(base))
    for e in range(rep.graph.n_edges):
        root = build_hierarchy(rep.subdivide(e), G)
        assert root.max_depth == base.max_depth
        assert family_signature(enumerate_products(root)) == want
