"""Finite balls of Bass-Serre trees and the checks run on them.

Vertices are cosets ``x G_j`` and edges are cosets ``x E_i``; the base edge of
type ``i`` joins ``G_src`` and ``s_i G_dst``.  A tree ball is the part of the
tree spanned by translates ``x . (base edges)`` for ``x`` in a ball of the group,
cut at a tree radius.  Representatives are shortlex-least in that group ball.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

from .hierarchy import GraphOfGroups
from .mapping_torus import IDENTITY, BallRangeError, CayleyBall, FbcElement


class TreeBallError(ValueError):
    pass


@dataclass
class TreeBall:
    gog: GraphOfGroups
    radius: int
    source_radius: int
    vkeys: list
    vreps: list
    depth: list
    parent: list
    adj: list  # vid -> list of (neighbour vid, edge id)
    edges: list  # (u, v, edge type, representative)
    vindex: dict
    eindex: dict
    in_ball: list = field(default_factory=list)  # vertex rep came from the group ball

    def __len__(self):
        return len(self.vkeys)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def vertex_key(self, j: int, g: FbcElement) -> tuple:
        return (j, self.gog.vertex_types[j].subgroup.left_coset_key(g))

    def translate(self, g: FbcElement, v: int) -> int | None:
        """Vertex id of g . v, or None when outside the ball."""
        G = self.gog.group
        j = self.vkeys[v][0]
        return self.vindex.get(self.vertex_key(j, G.multiply(g, self.vreps[v])))

    def distance(self, u: int, v: int) -> int:
        d = 0
        du, dv = self.depth[u], self.depth[v]
        while du > dv:
            u, du, d = self.parent[u], du - 1, d + 1
        while dv > du:
            v, dv, d = self.parent[v], dv - 1, d + 1
        while u != v:
            u, v, d = self.parent[u], self.parent[v], d + 2
        return d

    def path(self, u: int, v: int) -> list[int]:
        left, right = [u], [v]
        while self.depth[left[-1]] > self.depth[right[-1]]:
            left.append(self.parent[left[-1]])
        while self.depth[right[-1]] > self.depth[left[-1]]:
            right.append(self.parent[right[-1]])
        while left[-1] != right[-1]:
            left.append(self.parent[left[-1]])
            right.append(self.parent[right[-1]])
        return left + right[-2::-1]

    def edge_stabilizer_generators(self, eid: int) -> list[FbcElement]:
        G = self.gog.group
        _, _, i, x = self.edges[eid]
        xi = G.invert(x)
        return [G.multiply(G.multiply(x, h), xi) for h in self.gog.edge_types[i].minus]

    def is_tree(self) -> bool:
        if self.n_edges != len(self) - 1:
            return False
        seen = {0}
        q = [0]
        while q:
            v = q.pop()
            for w, _ in self.adj[v]:
                if w not in seen:
                    seen.add(w)
                    q.append(w)
        return len(seen) == len(self)

    def is_bipartite_by_type(self, part: set[int]) -> bool:
        """Every edge joins a vertex whose type is in ``part`` to one whose type is not."""
        for u, v, _, _ in self.edges:
            if (self.vkeys[u][0] in part) == (self.vkeys[v][0] in part):
                return False
        return True

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def label(self, v: int) -> str:
        G = self.gog.group
        j = self.vkeys[v][0]
        return f"{G.format(self.vreps[v])} {self.gog.vertex_types[j].name}"

    def to_dot(self) -> str:
        G = self.gog.group
        lines = ["graph tree_ball {"]
        for v in range(len(self)):
            kind = self.gog.vertex_types[self.vkeys[v][0]].kind
            shape = "box" if kind == "Z2" else "ellipse"
            lines.append(f'  n{v} [label="{self.label(v)}", shape={shape}];')
        for u, v, i, x in self.edges:
            lines.append(f'  n{u} -- n{v} [label="{G.format(x)} {self.gog.edge_types[i].name}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        G = self.gog.group
        rec = {
            "radius": self.radius,
            "source_radius": self.source_radius,
            "vertices": [
                {"id": v, "type": self.gog.vertex_types[self.vkeys[v][0]].name,
                 "rep": G.format(self.vreps[v]), "depth": self.depth[v]}
                for v in range(len(self))
            ],
            "edges": [[u, v, self.gog.edge_types[i].name, G.format(x)] for u, v, i, x in self.edges],
        }
        return json.dumps(rec, sort_keys=True, separators=(",", ":"))


def tree_ball(gog: GraphOfGroups, radius: int, group_ball: CayleyBall) -> TreeBall:
    if radius < 0:
        raise TreeBallError("radius must be non-negative")
    G = gog.group
    vts, ets = gog.vertex_types, gog.edge_types
    elems = [group_ball.elements[i] for i in group_ball.shortlex_order()]
    elems = [x for x in elems if gog.ambient.contains(x)]
    reps: dict = {}
    from_ball: set = set()
    for x in elems:
        for j, vt in enumerate(vts):
            key = (j, vt.subgroup.left_coset_key(x))
            if key not in reps:
                reps[key] = x
                from_ball.add(key)
    raw_adj: dict = {}
    raw_edges: dict = {}
    for x in elems:
        for i, et in enumerate(ets):
            ekey = (i, et.edge_group.left_coset_key(x))
            if ekey in raw_edges:
                continue
            u = (et.src, vts[et.src].subgroup.left_coset_key(x))
            xs = G.multiply(x, et.stable)
            w = (et.dst, vts[et.dst].subgroup.left_coset_key(xs))
            reps.setdefault(w, xs)
            raw_edges[ekey] = (u, w, i, x)
            raw_adj.setdefault(u, []).append(ekey)
            raw_adj.setdefault(w, []).append(ekey)

    base = (0, vts[0].subgroup.left_coset_key(IDENTITY))
    vindex = {base: 0}
    vkeys, vreps, depth, parent = [base], [reps.get(base, IDENTITY)], [0], [-1]
    adj: list = [[]]
    edges: list = []
    eindex: dict = {}
    q = deque([0])
    while q:
        v = q.popleft()
        if depth[v] == radius:
            continue
        key = vkeys[v]
        for ekey in sorted(raw_adj.get(key, ()), key=lambda k: _edge_order(raw_edges[k])):
            if ekey in eindex:
                continue
            u, w, i, x = raw_edges[ekey]
            other = w if u == key else u
            if other == key:
                raise TreeBallError("loop edge in a Bass-Serre tree")
            if other in vindex:
                raise TreeBallError("cycle found while building the tree ball")
            o = len(vkeys)
            vindex[other] = o
            vkeys.append(other)
            vreps.append(reps[other])
            depth.append(depth[v] + 1)
            parent.append(v)
            adj.append([])
            eid = len(edges)
            a, b = (v, o) if u == key else (o, v)
            edges.append((a, b, i, x))
            eindex[ekey] = eid
            adj[v].append((o, eid))
            adj[o].append((v, eid))
            q.append(o)
    tb = TreeBall(gog, radius, group_ball.radius, vkeys, vreps, depth, parent, adj, edges, vindex, eindex,
                  [k in from_ball for k in vkeys])
    return tb


def _edge_order(rec):
    return (rec[2], rec[3])


# ---------------------------------------------------------------------------
# acylindricity


@dataclass
class AcylindricityReport:
    kappa: int
    passed: bool
    paths_examined: int
    longest_stabilized: int
    witness_path: list[str] | None
    witness_element: str | None
    tree_radius: int
    group_radius: int

    def as_dict(self):
        return dict(self.__dict__)


def edge_stabilizers(tb: TreeBall, group_ball: CayleyBall) -> list[frozenset[int]]:
    G = tb.gog.group
    ident = group_ball.identity_index
    out = []
    for _, _, i, x in tb.edges:
        eg = tb.gog.edge_types[i].edge_group
        s = eg.conjugate_elements_in_ball(x, group_ball)
        s.discard(ident)
        out.append(frozenset(s))
    return out


def check_acylindricity(tb: TreeBall, kappa: int, group_ball: CayleyBall) -> AcylindricityReport:
    if tb.gog.group is not group_ball.group:
        raise TreeBallError("tree ball and group ball come from different groups")
    G = tb.gog.group
    stabs = edge_stabilizers(tb, group_ball)
    inc: list[dict[int, list[int]]] = [dict() for _ in range(len(tb))]
    for eid, (u, v, _, _) in enumerate(tb.edges):
        for g in stabs[eid]:
            inc[u].setdefault(g, []).append(eid)
            inc[v].setdefault(g, []).append(eid)
    target = kappa + 1
    examined = 0
    longest = 0
    witness = None

    def dfs(v, prev, S, length, trail):
        nonlocal examined, longest, witness
        examined += 1
        longest = max(longest, length)
        if length >= target:
            witness = (trail, min(S))
            return True
        cand = set()
        for g in S:
            cand.update(inc[v].get(g, ()))
        cand.discard(prev)
        for e in sorted(cand):
            S2 = S & stabs[e]
            if not S2:
                continue
            a, b, _, _ = tb.edges[e]
            w = b if a == v else a
            if dfs(w, e, S2, length + 1, trail + [w]):
                return True
        return False

    for eid, (u, v, _, _) in enumerate(tb.edges):
        if not stabs[eid]:
            continue
        if dfs(v, eid, stabs[eid], 1, [u, v]) or dfs(u, eid, stabs[eid], 1, [v, u]):
            break
    wp = we = None
    if witness is not None:
        wp = [tb.label(v) for v in witness[0]]
        we = G.format(group_ball.elements[witness[1]])
    return AcylindricityReport(kappa, witness is None, examined, longest, wp, we, tb.radius, group_ball.radius)


def distinct_attachments(tb: TreeBall) -> list[str]:
    """An edge entering v at its plus end has an attachment unlike every other edge at v.

    Edges sharing their minus end may legitimately share a stabilizer (two
    translates of the base edge by elements commuting with the attachment).
    """
    problems = []
    gens = [tuple(tb.edge_stabilizer_generators(e)) for e in range(tb.n_edges)]
    for v in range(len(tb)):
        incident = [eid for _, eid in tb.adj[v]]
        for e1 in incident:
            if tb.edges[e1][1] != v:
                continue
            for e2 in incident:
                if e2 != e1 and gens[e2] == gens[e1]:
                    problems.append(f"edges {e1} and {e2} at {tb.label(v)} share an attachment")
    return problems


# ---------------------------------------------------------------------------
# translation lengths and axes


@dataclass
class TranslationResult:
    length: int
    classification: str  # elliptic | loxodromic | unknown
    axis: list[int]

    def as_tuple(self):
        return self.length, self.classification


def translation_length_tree(tb: TreeBall, g: FbcElement) -> TranslationResult:
    G = tb.gog.group
    g2 = G.multiply(g, g)
    disp = {}
    for v in range(len(tb)):
        gv = tb.translate(g, v)
        if gv is not None:
            disp[v] = tb.distance(v, gv)
    if not disp:
        raise BallRangeError("g moves every vertex of the tree ball out of the ball")
    lam = min(disp.values())
    if lam == 0:
        return TranslationResult(0, "elliptic", [v for v, d in disp.items() if d == 0])
    certified = None
    for v in sorted(disp, key=lambda v: (disp[v], v)):
        g2v = tb.translate(g2, v)
        if g2v is not None and tb.distance(v, g2v) == 2 * disp[v]:
            certified = disp[v]
            break
    if certified is None:
        return TranslationResult(lam, "unknown", [])
    axis = [v for v, d in disp.items() if d == certified]
    return TranslationResult(certified, "loxodromic", sorted(axis))


def share_power(G, g: FbcElement, h: FbcElement, max_power: int = 6) -> bool:
    """Spot test for a common nontrivial power g^i = h^j with 1 <= i, |j| <= max_power."""
    gp = [G.power(g, i) for i in range(1, max_power + 1)]
    hp = set()
    for j in range(1, max_power + 1):
        x = G.power(h, j)
        hp.add(x)
        hp.add(G.invert(x))
    return any(x in hp for x in gp)


@dataclass
class AxisReport:
    status: str  # checked | inconclusive | rejected
    diameter: int | None
    bound: int | None
    lambda_g: int | None
    lambda_h: int | None
    kappa: int
    common_vertices: int = 0

    @property
    def passed(self) -> bool:
        return self.status == "checked" and self.diameter <= self.bound

    def as_dict(self):
        d = dict(self.__dict__)
        d["passed"] = self.passed
        return d


def axis_intersection_check(tb: TreeBall, g: FbcElement, h: FbcElement, kappa: int,
                            memo: dict | None = None) -> AxisReport:
    """``memo`` caches translation results when many pairs share elements."""
    G = tb.gog.group
    if g == h or share_power(G, g, h):
        return AxisReport("rejected", None, None, None, None, kappa)
    memo = {} if memo is None else memo
    for x in (g, h):
        if x not in memo:
            memo[x] = translation_length_tree(tb, x)
    rg, rh = memo[g], memo[h]
    if rg.classification != "loxodromic" or rh.classification != "loxodromic":
        return AxisReport("inconclusive", None, None, rg.length, rh.length, kappa)
    common = sorted(set(rg.axis) & set(rh.axis))
    diam = 0
    for i, u in enumerate(common):
        for v in common[i + 1:]:
            diam = max(diam, tb.distance(u, v))
    bound = kappa + rg.length * rh.length
    return AxisReport("checked", diam, bound, rg.length, rh.length, kappa, len(common))
