"""Topmost-edge splittings, the cyclic hierarchy, linear splittings and the family of products.

Everything is realized inside the ambient group G.  For a path ``p`` in the
graph starting at the basepoint, the *vertical element* ``V(p) = [p f(p)^-1] T``
(with ``T = c t`` and ``c`` the marking conjugator) acts on loops transported
along ``p`` exactly as the representative does.  Vertex groups of a component
based at ``v`` with path ``gamma`` are ``[gamma pi_1 gamma^-1] ⋊ <V(gamma)>``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from . import free_core as fc
from .free_core import Basis, FreeAutomorphism, Word
from .mapping_torus import IDENTITY, CayleyBall, FbcElement, FbcGroup, ball
from .representative import TopRep
from .subgroups import (ProductSubgroup, SubgroupError, VerticalSubgroup,
                        find_conjugator_into, make_product)

DEFAULT_CONJUGATION_BOUND = 6


class HierarchyError(ValueError):
    pass


class BaseCaseError(HierarchyError):
    """Topmost splitting requested for a degree-0 monodromy."""


# ---------------------------------------------------------------------------
# components of subgraphs and the vertical-element calculus


@dataclass
class Component:
    vertices: tuple[int, ...]
    edges: frozenset[int]
    base: int
    base_path: Word  # from the basepoint x0 to ``base``
    inner: dict[int, Word]  # vertex -> path inside the component from ``base``
    tree: frozenset[int]
    loops: dict[int, Word]  # non-tree edge -> loop at ``base`` through it

    def anchor(self, v: int) -> Word:
        return fc.reduce(self.base_path + self.inner[v])


def make_component(rep: TopRep, vertices: Sequence[int], edges: frozenset[int], base: int,
                   base_path: Word) -> Component:
    g = rep.graph
    inner = {base: ()}
    tree = set()
    q = deque([base])
    incident: dict[int, list[int]] = {v: [] for v in vertices}
    for e in sorted(edges):
        a, b = g.ends[e]
        incident[a].append(e + 1)
        if b != a:
            incident[b].append(-(e + 1))
        else:
            incident[a].append(-(e + 1))
    while q:
        v = q.popleft()
        for x in incident[v]:
            w = g.head(x)
            if w not in inner:
                inner[w] = inner[v] + (x,)
                tree.add(abs(x) - 1)
                q.append(w)
    if set(inner) != set(vertices):
        raise HierarchyError("component is not connected")
    loops = {}
    for e in sorted(edges - tree):
        a, b = g.ends[e]
        loops[e] = fc.reduce(inner[a] + (e + 1,) + fc.inverse(inner[b]))
    order = sorted(vertices, key=lambda v: (len(inner[v]), v))
    return Component(tuple(order), frozenset(edges), base, base_path, inner, frozenset(tree), loops)


def split_components(rep: TopRep, comp: Component, removed: set[int]) -> list[Component]:
    """Components of comp minus the interiors of ``removed`` edges, in BFS order from comp.base."""
    g = rep.graph
    keep = comp.edges - removed
    parent = {v: v for v in comp.vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for e in keep:
        a, b = g.ends[e]
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[int]] = {}
    for v in comp.vertices:  # BFS order, so the first vertex seen is the base
        groups.setdefault(find(v), []).append(v)
    out = []
    for members in groups.values():
        base = members[0]
        edges = frozenset(e for e in keep if find(g.ends[e][0]) == find(base))
        out.append(make_component(rep, members, edges, base, comp.anchor(base)))
    return out


class Realizer:
    """Turns paths of the representative into elements of G."""

    def __init__(self, rep: TopRep, G: FbcGroup, conjugator_bound: int = 6):
        self.rep = rep
        self.G = G
        c = rep.find_conjugator(G.monodromy, conjugator_bound)
        if c is None:
            raise HierarchyError("representative does not realize the monodromy within the conjugator bound")
        self.conjugator = c
        self.T = G.multiply(FbcElement(0, c), G.t(1))

    def word(self, path: Sequence[int]) -> Word:
        return self.rep.graph.path_word(path)

    def vertical(self, path: Word) -> FbcElement:
        fp = self.rep.apply_path(path)
        return self.G.multiply(FbcElement(0, self.word(tuple(path) + fc.inverse(fp))), self.T)

    def twist(self, path: Word) -> Word:
        """[p f(p)^-1] for a path from the basepoint."""
        return self.word(tuple(path) + fc.inverse(self.rep.apply_path(path)))


# ---------------------------------------------------------------------------
# graphs of groups


@dataclass
class VertexType:
    name: str
    subgroup: VerticalSubgroup
    kind: str  # node | product | cyclic | Z2
    node: "SplittingNode | None" = None


@dataclass
class EdgeType:
    name: str
    src: int
    dst: int
    stable: FbcElement  # the base edge joins G_src and stable * G_dst
    edge_group: VerticalSubgroup
    minus: list[FbcElement]
    plus: list[FbcElement]
    attachment_fiber: Word | None = None  # plus = attachment_fiber * t_dst (cyclic splittings)
    suffix_element: Word | None = None


@dataclass
class GraphOfGroups:
    group: FbcGroup
    ambient: VerticalSubgroup
    vertex_types: list[VertexType]
    edge_types: list[EdgeType]
    kind: str  # cyclic | linear
    notes: list[str] = field(default_factory=list)

    def check_relations(self) -> list[str]:
        """Edge relations as normal-form identities; returns the list of failures."""
        G = self.group
        bad = []
        for et in self.edge_types:
            s = et.stable
            si = G.invert(s)
            for m, p in zip(et.minus, et.plus):
                if G.multiply(G.multiply(si, m), s) != p:
                    bad.append(f"{et.name}: s^-1 d-(g) s != d+(g)")
                if not self.vertex_types[et.src].subgroup.contains(m):
                    bad.append(f"{et.name}: d-(g) outside the source vertex group")
                if not self.vertex_types[et.dst].subgroup.contains(p):
                    bad.append(f"{et.name}: d+(g) outside the target vertex group")
                if self.kind == "cyclic" and (m.t_exp != 1 or p.t_exp != 1):
                    bad.append(f"{et.name}: attachment not in the coset F t")
        return bad

    def describe(self) -> dict:
        G = self.group
        fmt = G.format
        return {
            "kind": self.kind,
            "vertex_types": [
                {"name": v.name, "kind": v.kind, "subgroup": v.subgroup.describe()} for v in self.vertex_types
            ],
            "edge_types": [
                {
                    "name": e.name,
                    "source": self.vertex_types[e.src].name,
                    "target": self.vertex_types[e.dst].name,
                    "stable_element": fmt(e.stable),
                    "minus": [fmt(x) for x in e.minus],
                    "plus": [fmt(x) for x in e.plus],
                    "attachment_fiber": G.basis.format(e.attachment_fiber) if e.attachment_fiber is not None else None,
                    "suffix_element": G.basis.format(e.suffix_element) if e.suffix_element is not None else None,
                }
                for e in self.edge_types
            ],
            "notes": list(self.notes),
        }

    def to_dot(self) -> str:
        fmt = self.group.format
        lines = ["digraph graph_of_groups {"]
        for i, v in enumerate(self.vertex_types):
            gens = ", ".join(fmt(x) for x in v.subgroup.generators())
            lines.append(f'  v{i} [label="{v.name}\\n{v.kind}\\n<{gens}>"];')
        for e in self.edge_types:
            att = "; ".join(f"{fmt(m)} -> {fmt(p)}" for m, p in zip(e.minus, e.plus))
            lines.append(f'  v{e.src} -> v{e.dst} [label="{e.name}: {att}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# the cyclic hierarchy


@dataclass
class SplittingNode:
    name: str
    depth: int
    degree: int
    kind: str  # topmost | product | cyclic
    component: Component
    subgroup: VerticalSubgroup
    local_group: FbcGroup | None
    local_images: dict[str, Word]  # local basis symbol -> ambient fiber word
    splitting: GraphOfGroups | None = None
    children: list["SplittingNode"] = field(default_factory=list)
    linear: GraphOfGroups | None = None
    products: list[ProductSubgroup] = field(default_factory=list)
    linear_edges: list[EdgeType] = field(default_factory=list)

    @property
    def vertical(self) -> FbcElement:
        return self.subgroup.vertical

    def embed(self, g: FbcElement) -> FbcElement:
        """Local element t^k w of the node's own mapping torus -> ambient element."""
        G = self.subgroup.group
        w: Word = ()
        assert self.local_group is not None
        for x in g.fiber:
            img = self.local_images[self.local_group.basis.symbols[abs(x) - 1]]
            w = fc.concat(w, img if x > 0 else fc.inverse(img))
        return G.multiply(G.power(self.vertical, g.t_exp), FbcElement(0, w))

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()

    @property
    def max_depth(self) -> int:
        return max((c.max_depth for c in self.children), default=self.depth)

    def describe(self) -> dict:
        G = self.subgroup.group
        d = {
            "name": self.name,
            "depth": self.depth,
            "degree": self.degree,
            "kind": self.kind,
            "vertex_group": self.subgroup.describe(),
            "vertical": G.format(self.vertical),
        }
        if self.local_group is not None:
            lg = self.local_group
            d["local_basis"] = list(lg.basis.symbols)
            d["local_monodromy"] = {s: lg.basis.format(lg.monodromy.forward[i]) for i, s in enumerate(lg.basis.symbols)}
        if self.splitting is not None:
            d["splitting"] = self.splitting.describe()
        if self.linear is not None:
            d["linear_splitting"] = self.linear.describe()
        d["children"] = [c.describe() for c in self.children]
        return d


def _local_group(rep: TopRep, real: Realizer, comp: Component, vertical: FbcElement,
                 name: str) -> tuple[FbcGroup | None, dict[str, Word]]:
    g = rep.graph
    G = real.G
    edges = sorted(comp.loops)
    if not edges:
        return None, {}
    symbols = tuple(s if s != G.stable_letter else s + "_" for s in (g.edge_names[e] for e in edges))
    local = Basis(symbols)
    pos = {e: i for i, e in enumerate(edges)}

    def read_local(loop: Word) -> Word:
        out = []
        for x in loop:
            e = abs(x) - 1
            if e not in comp.edges:
                raise HierarchyError(f"{name}: loop leaves its component")
            if e in pos:
                out.append((pos[e] + 1) * (1 if x > 0 else -1))
        return fc.reduce(out)

    ambient = {}
    forward = []
    for e in edges:
        loop = comp.loops[e]
        ambient[symbols[pos[e]]] = real.word(comp.base_path + loop + fc.inverse(comp.base_path))
        forward.append(read_local(fc.reduce(rep.apply_path(loop))))
    backward = []
    vi = G.invert(vertical)
    for e in edges:
        x = FbcElement(0, ambient[symbols[pos[e]]])
        pre = G.conjugate(vi, x)
        path = g.word_to_path(pre.fiber)
        loop = fc.reduce(fc.inverse(comp.base_path) + path + comp.base_path)
        backward.append(read_local(loop))
    monodromy = FreeAutomorphism(local, forward, backward)
    return FbcGroup(local, monodromy, stable_letter=G.stable_letter, name=name), ambient


def _fiber_generators(real: Realizer, comp: Component) -> list[Word]:
    return [real.word(comp.base_path + comp.loops[e] + fc.inverse(comp.base_path)) for e in sorted(comp.loops)]


def _make_node(rep: TopRep, real: Realizer, comp: Component, depth: int, name: str,
               parent_degree: int | None) -> SplittingNode:
    degs = rep.degrees()
    degree = max((degs[e] for e in comp.edges), default=0)
    if parent_degree is not None and degree > parent_degree - 1:
        raise HierarchyError(f"{name}: degree {degree} does not drop below {parent_degree}")
    tv = real.vertical(comp.base_path)
    sub = VerticalSubgroup(real.G, _fiber_generators(real, comp), tv, name=name)
    lg, images = _local_group(rep, real, comp, tv, name)
    if degree == 0:
        kind = "product" if comp.loops else "cyclic"
        return SplittingNode(name, depth, 0, kind, comp, sub, lg, images)
    node = SplittingNode(name, depth, degree, "topmost", comp, sub, lg, images)
    node.splitting, node.children = _topmost(rep, real, comp, node, degree)
    return node


def _topmost(rep: TopRep, real: Realizer, comp: Component, node: SplittingNode, degree: int):
    G = real.G
    g = rep.graph
    degs = rep.degrees()
    top = {e for e in comp.edges if degs[e] == degree}
    subs = split_components(rep, comp, top)
    where = {v: j for j, c in enumerate(subs) for v in c.vertices}
    children = []
    vtypes = []
    for j, c in enumerate(subs):
        child = _make_node(rep, real, c, node.depth + 1, f"{node.name}.{j}", degree)
        children.append(child)
        vtypes.append(VertexType(child.name, child.subgroup, child.kind if child.degree == 0 else "node", child))
    order = {e: i for i, e in enumerate(rep.order)}
    etypes = []
    for e in sorted(top, key=order.get):
        a, b = g.ends[e]
        jm, jp = where[a], where[b]
        cm, cp = subs[jm], subs[jp]
        pm = cm.anchor(a)
        ap = cp.anchor(b)
        minus = real.vertical(pm)
        s = FbcElement(0, real.word(pm + (e + 1,) + fc.inverse(ap)))
        plus = G.multiply(G.multiply(G.invert(s), minus), s)
        sfx = rep.suffix(e) or ()
        tau = cp.inner[b]
        twist = real.word(cp.base_path + tau + fc.inverse(rep.apply_path(tau)) + fc.inverse(cp.base_path))
        att = fc.concat(real.word(ap + sfx + fc.inverse(ap)), twist)
        expected = G.multiply(FbcElement(0, att), children[jp].vertical)
        if expected != plus:
            raise HierarchyError(f"edge {g.edge_names[e]}: attachment does not match the suffix recipe")
        egroup = VerticalSubgroup(G, (), minus, name=f"<t_{g.edge_names[e]}>")
        etypes.append(EdgeType(g.edge_names[e], jm, jp, s, egroup, [minus], [plus], att,
                               rep.suffix_loop_element(e)))
    gog = GraphOfGroups(G, node.subgroup, vtypes, etypes, "cyclic")
    bad = gog.check_relations()
    if bad:
        raise HierarchyError("; ".join(bad))
    return gog, children


def topmost_splitting(rep: TopRep, G: FbcGroup) -> GraphOfGroups:
    root = build_hierarchy(rep, G, with_products=False)
    if root.splitting is None:
        raise BaseCaseError("monodromy has growth degree 0; use the product base case")
    return root.splitting


def check_component_partition(rep: TopRep, node: SplittingNode) -> list[str]:
    """Children partition the node's vertices, and f preserves each child component."""
    problems = []
    if not node.children:
        return problems
    seen: set[int] = set()
    for c in node.children:
        vs = set(c.component.vertices)
        if seen & vs:
            problems.append(f"{c.name} overlaps another component")
        seen |= vs
        for e in c.component.edges:
            if any(abs(x) - 1 not in c.component.edges for x in rep.images[e]):
                problems.append(f"f moves edge {rep.graph.edge_names[e]} out of {c.name}")
    if seen != set(node.component.vertices):
        problems.append(f"{node.name}: children do not cover the vertices")
    return problems


# ---------------------------------------------------------------------------
# products: Nielsen graph of a linear level


def _root(w: Word) -> Word:
    core, conj = fc.cyclic_reduce(w)
    n = len(core)
    for d in range(1, n + 1):
        if n % d == 0 and core[:d] * (n // d) == core:
            return fc.concat_many(conj, core[:d], fc.inverse(conj))
    return w


def _conjugator(a: Word, b: Word) -> Word | None:
    """U with U^-1 a U = b, or None."""
    ca, xa = fc.cyclic_reduce(a)
    cb, xb = fc.cyclic_reduce(b)
    if len(ca) != len(cb):
        return None
    for i in range(max(len(ca), 1)):
        if ca[i:] + ca[:i] == cb:
            # cb = ca[:i]^-1 ca ca[:i]
            return fc.concat_many(xa, ca[:i], fc.inverse(xb))
    return None


def _class_key(w: Word) -> Word:
    core, _ = fc.cyclic_reduce(w)
    return min(fc.cyclic_rotations(core)) if core else ()


def nielsen_products(rep: TopRep, real: Realizer, node: SplittingNode) -> list[ProductSubgroup]:
    """Products pi_1(K) x <V> for the components K of the Nielsen graph of a degree <= 1 level."""
    if node.degree > 1:
        return []
    G = real.G
    g = rep.graph
    degs = rep.degrees()
    comp = node.component
    fixed = {e for e in comp.edges if degs[e] == 0}
    linear = sorted((e for e in comp.edges if degs[e] == 1), key=rep.order.index)
    fcomps = split_components(rep, comp, set(comp.edges) - fixed)
    home = {v: c for c in fcomps for v in c.vertices}

    def anchor(v):
        return home[v].anchor(v)

    # N-graph: vertices are graph vertices and one extra vertex per suffix class
    n_edges: list[tuple[object, object, Word]] = []
    for e in sorted(fixed):
        a, b = g.ends[e]
        n_edges.append((a, b, real.word(anchor(a) + (e + 1,) + fc.inverse(anchor(b)))))
    classes: dict[tuple, list[int]] = {}
    for e in linear:
        b = g.head(e + 1)
        a_e = real.word(anchor(b) + rep.suffix(e) + fc.inverse(anchor(b)))
        classes.setdefault((home[b].base, _class_key(a_e)), []).append(e)
    for ci, (_, members) in enumerate(classes.items()):
        e0 = members[0]
        p = g.head(e0 + 1)
        b_word = real.word(anchor(p) + rep.suffix(e0) + fc.inverse(anchor(p)))
        w = ("w", ci)
        n_edges.append((w, w, _root(b_word)))
        for e in members:
            a, b = g.ends[e]
            a_e = real.word(anchor(b) + rep.suffix(e) + fc.inverse(anchor(b)))
            u = _conjugator(a_e, b_word)
            if u is None:
                raise HierarchyError("suffix class members are not conjugate")
            n_edges.append((a, w, fc.concat(real.word(anchor(a) + (e + 1,) + fc.inverse(anchor(b))), u)))
    n_vertices = list(comp.vertices) + [("w", i) for i in range(len(classes))]
    w_anchor = {("w", i): anchor(g.head(m[0] + 1)) for i, m in enumerate(classes.values())}

    # spanning forest and fundamental groups
    adj: dict[object, list[tuple[int, object, int]]] = {v: [] for v in n_vertices}
    for i, (a, b, _) in enumerate(n_edges):
        adj[a].append((i, b, 1))
        adj[b].append((i, a, -1))
    seen: dict[object, Word] = {}
    products = []
    for start in n_vertices:
        if start in seen:
            continue
        seen[start] = ()
        q = deque([start])
        tree_edges = set()
        members = []
        while q:
            v = q.popleft()
            members.append(v)
            for i, w, sign in adj[v]:
                if w not in seen:
                    el = n_edges[i][2]
                    seen[w] = fc.concat(seen[v], el if sign == 1 else fc.inverse(el))
                    tree_edges.add(i)
                    q.append(w)
        member_set = set(members)
        gens = []
        for i, (a, b, el) in enumerate(n_edges):
            if i in tree_edges or a not in member_set:
                continue
            gens.append(fc.concat_many(seen[a], el, fc.inverse(seen[b])))
        if not gens:
            continue
        base_path = anchor(start) if not isinstance(start, tuple) else w_anchor[start]
        z = real.vertical(base_path)
        name = f"{node.name}.N{len(products)}"
        try:
            prod = make_product(G, gens, z, name, origin=f"Nielsen component of {node.name}")
        except SubgroupError as err:
            raise HierarchyError(str(err)) from err
        products.append(prod)
    return products


def linear_z2(real: Realizer, node: SplittingNode) -> list[ProductSubgroup]:
    """Z^2 subgroups <root(g'), attachment> for the linear edges of a degree-1 node."""
    out = []
    if node.splitting is None or node.degree != 1:
        return out
    for et in node.splitting.edge_types:
        z = _root(et.attachment_fiber)
        prod = make_product(real.G, [z], et.plus[0], f"{node.name}.Z[{et.name}]",
                            origin=f"suffix of linear edge {et.name}")
        out.append(prod)
    return out


def leaf_products(node: SplittingNode) -> list[ProductSubgroup]:
    out = []
    for n in node.walk():
        if n.degree == 0 and n.subgroup.fiber_rank >= 1:
            out.append(make_product(n.subgroup.group, n.subgroup.fiber_gens, n.vertical, n.name,
                                    origin=f"degree-0 vertex group {n.name}"))
    return out


@dataclass
class ProductFamily:
    members: list[ProductSubgroup]
    pruned: list[tuple[str, str, str]]  # (pruned name, container name, conjugator)
    bound: int
    note: str = ("maximality certified only up to conjugators of length <= bound; "
                 "full maximality is assumed")

    def describe(self) -> dict:
        G = self.members[0].group if self.members else None
        return {
            "members": [m.describe() for m in self.members],
            "pruned": [{"member": a, "inside": b, "conjugator": c} for a, b, c in self.pruned],
            "conjugation_bound": self.bound,
            "note": self.note,
            "group": G.name if G else None,
        }


_BALLS: dict[tuple[int, int], CayleyBall] = {}


def cached_ball(G: FbcGroup, r: int) -> CayleyBall:
    key = (id(G), r)
    b = _BALLS.get(key)
    if b is None or b.group is not G:
        b = ball(G, r)
        _BALLS[key] = b
    return b


def prune_products(candidates: list[ProductSubgroup], bound: int,
                   restrict: VerticalSubgroup | None = None) -> ProductFamily:
    if not candidates:
        return ProductFamily([], [], bound)
    G = candidates[0].group
    B = cached_ball(G, bound)
    conj = [B.elements[i] for i in B.shortlex_order()]
    if restrict is not None:
        conj = [x for x in conj if restrict.contains(x)]
    ranked = sorted(range(len(candidates)),
                    key=lambda i: (candidates[i].kind != "nonabelian", -candidates[i].subgroup.fiber_rank, i))
    kept: list[ProductSubgroup] = []
    pruned = []
    for i in ranked:
        p = candidates[i]
        hit = None
        for q in kept:
            x = find_conjugator_into(p.subgroup, q.subgroup, conj)
            if x is not None:
                hit = (q, x)
                break
        if hit:
            pruned.append((p.name, hit[0].name, G.format(hit[1])))
        else:
            kept.append(p)
    return ProductFamily(kept, pruned, bound)


# ---------------------------------------------------------------------------
# linear splitting (bipartite inclusion tree)


def linear_splitting(real: Realizer, node: SplittingNode, bound: int = DEFAULT_CONJUGATION_BOUND) -> GraphOfGroups | None:
    G = real.G
    nonab = [p for p in nielsen_products(real.rep, real, node) if p.kind == "nonabelian"]
    zs = linear_z2(real, node)
    if not nonab or not zs:
        return None
    v0 = prune_products(nonab, bound, restrict=node.subgroup).members
    v1 = prune_products(zs, bound, restrict=node.subgroup).members
    B = cached_ball(G, bound)
    cands = [B.elements[i] for i in B.shortlex_order() if node.subgroup.contains(B.elements[i])]
    vtypes = [VertexType(p.name, p.subgroup, "product") for p in v0]
    vtypes += [VertexType(z.name, z.subgroup, "Z2") for z in v1]
    etypes = []
    notes = []
    for k, zk in enumerate(v1):
        zgens = zk.generators()
        z_elems = [x for x in cands if zk.contains(x)]
        for j, pj in enumerate(v0):
            found: list[tuple[FbcElement, set]] = []
            for x in cands:
                xi = G.invert(x)
                if not all(pj.contains(G.multiply(G.multiply(xi, h), x)) for h in zgens):
                    continue
                key = pj.left_coset_key(x)
                if any(key in orbit for _, orbit in found):
                    continue
                orbit = {pj.left_coset_key(G.multiply(z, x)) for z in z_elems}
                orbit.add(key)
                found.append((x, orbit))
            for x, _ in found:
                xi = G.invert(x)
                etypes.append(EdgeType(
                    f"{zk.name}->{pj.name}@{G.format(x)}", len(v0) + k, j, x, zk.subgroup,
                    list(zgens), [G.multiply(G.multiply(xi, h), x) for h in zgens]))
        if not any(e.src == len(v0) + k for e in etypes):
            notes.append(f"{zk.name} has no product neighbour within the search bound")
    notes.append("edge groups equal their Z^2 vertex groups (onto inclusions) by construction")
    return GraphOfGroups(G, node.subgroup, vtypes, etypes, "linear", notes)


# ---------------------------------------------------------------------------
# entry points


def build_hierarchy(rep: TopRep, G: FbcGroup, with_products: bool = True,
                    bound: int = DEFAULT_CONJUGATION_BOUND) -> SplittingNode:
    report = rep.validate_filtration(G.monodromy)
    if not report.passed:
        bad = next(c for c in report.conditions if not c.passed)
        raise HierarchyError(f"representative invalid: {bad.name}: {bad.first_violation}")
    real = Realizer(rep, G)
    g = rep.graph
    comp = make_component(rep, range(len(g.vertices)), frozenset(range(g.n_edges)), g.basepoint, ())
    root = _make_node(rep, real, comp, 0, "G", None)
    root_realizer[id(root)] = real
    if with_products:
        for n in root.walk():
            if n.degree == 1:
                n.linear = linear_splitting(real, n, bound)
    return root


root_realizer: dict[int, Realizer] = {}


def enumerate_products(root: SplittingNode, rep: TopRep | None = None,
                       bound: int = DEFAULT_CONJUGATION_BOUND) -> ProductFamily:
    G = root.subgroup.group
    if root.degree == 0:
        if root.subgroup.fiber_rank == 0:
            return ProductFamily([], [], bound)
        whole = ProductSubgroup(root.subgroup, "whole", "identity-type monodromy: G is a product")
        if not whole.verify_commutation():
            raise HierarchyError("degree-0 root is not a product")
        return ProductFamily([whole], [], bound)
    real = root_realizer.get(id(root))
    if real is None:
        if rep is None:
            raise HierarchyError("need the representative to enumerate products")
        real = Realizer(rep, G)
    cands = leaf_products(root)
    for n in root.walk():
        if n.degree == 1:
            cands += linear_z2(real, n)
    for n in root.walk():
        if n.degree == 1:
            cands += nielsen_products(real.rep, real, n)
    return prune_products(cands, bound)
