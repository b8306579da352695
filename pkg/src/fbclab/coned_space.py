"""Finite windows of the coned Cayley graph Cay(G; S ∪ 𝒫) and coarse diagnostics.

Each left coset ``xP`` meeting the ball in at least two elements gets an apex
node joined to its members by edges of length 1/2.  Member-to-member distance
through the apex is 1, so element distances are exactly those of the graph in
which every coset is a clique of unit edges, without storing the cliques.
"""

from __future__ import annotations

import json
from collections import OrderedDict
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order, dijkstra

from .bass_serre import TreeBall
from .mapping_torus import BallRangeError, CayleyBall, FbcElement
from .subgroups import ProductSubgroup

SCHEMA_VERSION = "1.0"
ROW_CACHE = 64


class ConeError(ValueError):
    pass


class ConedBall:
    """Both sparse graphs are stored symmetrically, so searches run in directed mode."""

    def __init__(self, base: CayleyBall, products: list[ProductSubgroup]):
        self.base = base
        self.products = list(products)
        n = len(base)
        self.n = n
        keys: list[dict] = [dict() for _ in self.products]
        self.coset_ids = np.full((n, len(self.products)), -1, dtype=np.int64)
        coset_product: list[int] = []
        members: list[list[int]] = []
        for pi, p in enumerate(self.products):
            table = keys[pi]
            for i, x in enumerate(base.elements):
                k = p.left_coset_key(x)
                cid = table.get(k)
                if cid is None:
                    cid = len(members)
                    table[k] = cid
                    members.append([])
                    coset_product.append(pi)
                members[cid].append(i)
                self.coset_ids[i, pi] = cid
        self.coset_members = [np.asarray(m, dtype=np.int64) for m in members]
        self.coset_product = coset_product
        self._build_graph()
        self._rows: OrderedDict[int, np.ndarray] = OrderedDict()
        self._base_rows: OrderedDict[int, np.ndarray] = OrderedDict()

    # -- graph ------------------------------------------------------------

    def _build_graph(self):
        n = self.n
        nb = self.base.neighbors
        src = np.repeat(np.arange(n, dtype=np.int64), nb.shape[1])
        dst = nb.reshape(-1).astype(np.int64)
        ok = dst >= 0
        src, dst = src[ok], dst[ok]
        self.base_csr = csr_matrix((np.ones(len(src), dtype=np.float64), (src, dst)), shape=(n, n))
        big = [c for c, m in enumerate(self.coset_members) if len(m) >= 2]
        self.apex_of = {c: n + k for k, c in enumerate(big)}
        a_src, a_dst = [src], [dst]
        weights = [np.ones(len(src))]
        for c in big:
            m = self.coset_members[c]
            apex = np.full(len(m), self.apex_of[c], dtype=np.int64)
            a_src += [m, apex]
            a_dst += [apex, m]
            weights += [np.full(len(m), 0.5), np.full(len(m), 0.5)]
        total = n + len(big)
        self.n_nodes = total
        self.csr = csr_matrix((np.concatenate(weights), (np.concatenate(a_src), np.concatenate(a_dst))),
                              shape=(total, total))
        self.cone_pairs = int(sum(len(self.coset_members[c]) * (len(self.coset_members[c]) - 1) // 2 for c in big))

    @property
    def radius(self) -> int:
        return self.base.radius

    @property
    def group(self):
        return self.base.group

    def index_of(self, g: FbcElement) -> int:
        i = self.base.index.get(g)
        if i is None:
            raise BallRangeError(f"{self.group.format(g)} is outside the ball")
        return i

    # -- distances ----------------------------------------------------------

    def distances_from(self, i: int) -> np.ndarray:
        """Coned distances from element i to every element (inf when disconnected)."""
        row = self._rows.get(i)
        if row is None:
            full = dijkstra(self.csr, directed=True, indices=i)
            row = np.rint(full[: self.n] * 2) / 2
            self._rows[i] = row
            if len(self._rows) > ROW_CACHE:
                self._rows.popitem(last=False)
        else:
            self._rows.move_to_end(i)
        return row

    def local_distances(self, i: int, limit: float) -> np.ndarray:
        """Coned distances up to ``limit`` (inf beyond); cheap for short paths."""
        if i in self._rows:
            return self._rows[i]
        full = dijkstra(self.csr, directed=True, indices=i, limit=limit + 0.25)
        return np.rint(full[: self.n] * 2) / 2

    def full_distances_from(self, i: int) -> np.ndarray:
        """Distances to elements and apex nodes."""
        return dijkstra(self.csr, directed=True, indices=i)

    def base_local(self, i: int, limit: float) -> np.ndarray:
        if i in self._base_rows:
            return self._base_rows[i]
        return dijkstra(self.base_csr, directed=True, unweighted=True, indices=i, limit=limit + 0.25)

    def base_distances_from(self, i: int) -> np.ndarray:
        row = self._base_rows.get(i)
        if row is None:
            row = dijkstra(self.base_csr, directed=True, unweighted=True, indices=i)
            self._base_rows[i] = row
            if len(self._base_rows) > ROW_CACHE:
                self._base_rows.popitem(last=False)
        return row

    def distance(self, i: int, j: int) -> float:
        return float(self.distances_from(i)[j])

    def diameter(self) -> float:
        """Exact diameter over elements (one Dijkstra per element; small balls only)."""
        best = 0.0
        for i in range(self.n):
            best = max(best, float(self.distances_from(i).max()))
        return best

    def same_coset(self, i: int, j: int) -> bool:
        return bool(np.any(self.coset_ids[i] == self.coset_ids[j]))

    def union_find_audit(self) -> dict:
        """Generator moves that stay in some product must stay in the same coset."""
        gens = [g.element for g in self.group.generators]
        inside = [[p.contains(s) for s in gens] for p in self.products]
        nb = self.base.neighbors
        bad = 0
        checked = 0
        for pi in range(len(self.products)):
            for s, ok in enumerate(inside[pi]):
                if not ok:
                    continue
                j = nb[:, s]
                m = j >= 0
                checked += int(m.sum())
                bad += int(np.sum(self.coset_ids[m, pi] != self.coset_ids[j[m], pi]))
        return {"moves_checked": checked, "violations": bad}

    def to_dot(self, limit: int = 2000) -> str:
        fmt = self.group.format
        names = [g.name for g in self.group.generators]
        lines = ["graph coned_ball {"]
        for i, x in enumerate(self.base.elements[:limit]):
            lines.append(f'  v{i} [label="{fmt(x)}"];')
        for i, s, j in self.base.edges():
            if i < limit and j < limit:
                lines.append(f'  v{i} -- v{j} [label="{names[s]}"];')
        for c, apex in self.apex_of.items():
            m = [int(x) for x in self.coset_members[c] if x < limit]
            if len(m) < 2:
                continue
            lines.append(f'  c{c} [shape=point, label="{self.products[self.coset_product[c]].name}"];')
            for x in m:
                lines.append(f"  c{c} -- v{x} [style=dashed, color=red];")
        lines.append("}")
        return "\n".join(lines) + "\n"


def cone(B: CayleyBall, P_list: list[ProductSubgroup]) -> ConedBall:
    for p in P_list:
        if p.group is not B.group:
            raise ConeError(f"{p.name} belongs to another group")
    return ConedBall(B, P_list)


# ---------------------------------------------------------------------------
# projection to the tree


@dataclass
class Projection:
    vertex: np.ndarray  # element index -> tree vertex id
    max_edge_ratio: float
    max_cone_spread: float
    scale: int
    violations: list[str] = field(default_factory=list)

    @property
    def lipschitz_ok(self) -> bool:
        return self.max_edge_ratio <= 1 and self.max_cone_spread <= 1


def project_to_tree(cb: ConedBall, tb: TreeBall, scale: int = 1) -> Projection:
    """x -> x.v0; ``scale`` divides tree distances (2 for bipartite trees measured between V0 vertices)."""
    G = cb.group
    vt = tb.gog.vertex_types[0].subgroup
    out = np.empty(cb.n, dtype=np.int64)
    for i, x in enumerate(cb.base.elements):
        v = tb.vindex.get((0, vt.left_coset_key(x)))
        if v is None:
            raise BallRangeError(f"{G.format(x)} projects outside the tree ball; enlarge it")
        out[i] = v
    worst = 0.0
    violations = []
    for i, s, j in cb.base.edges():
        d = tb.distance(int(out[i]), int(out[j])) / scale
        if d > worst:
            worst = d
        if d > 1 and len(violations) < 5:
            violations.append(f"{G.format(cb.base.elements[i])} --{G.generators[s].name}--> moves {d}")
    spread = 0.0
    for c, m in enumerate(cb.coset_members):
        if len(m) < 2:
            continue
        vs = sorted(set(int(out[x]) for x in m))
        for a, b in combinations(vs, 2):
            spread = max(spread, tb.distance(a, b) / scale)
    return Projection(out, worst, spread, scale, violations)


# ---------------------------------------------------------------------------
# axes


@dataclass
class Axis:
    element: FbcElement
    base_index: int
    points: list[int]  # ball indices of g^n y0, n = -N..N
    n_max: int
    lambda_x: float
    degenerate: bool

    def as_dict(self, G) -> dict:
        return {"element": G.format(self.element), "base_point": self.base_index, "N": self.n_max,
                "lambda_X": self.lambda_x, "degenerate": self.degenerate}


def build_axis(cb: ConedBall, g: FbcElement, N: int, candidates: list[int] | None = None) -> Axis:
    G = cb.group
    B = cb.base
    if candidates is None:
        candidates = [int(i) for i in B.shortlex_order() if B.dist[i] <= max(1, B.radius // 4)]
    best = None
    for y in candidates:
        gy = B.index.get(G.multiply(g, B.elements[y]))
        if gy is None:
            continue
        d = cb.distance(y, gy)
        if best is None or d < best[0]:
            best = (d, y)
    if best is None:
        raise BallRangeError("g moves every candidate base point out of the ball")
    lam, y0 = best
    pts = {0: y0}
    feasible = 0
    for n in range(1, N + 1):
        a = B.index.get(G.multiply(G.power(g, n), B.elements[y0]))
        b = B.index.get(G.multiply(G.power(g, -n), B.elements[y0]))
        if a is None or b is None:
            break
        pts[n], pts[-n] = a, b
        feasible = n
    if feasible < N:
        raise BallRangeError(f"powers of g leave the ball; largest feasible N is {feasible}")
    points = [pts[n] for n in range(-N, N + 1)]
    degenerate = len(set(points)) < len(points) or lam == 0 or \
        cb.distance(points[0], points[-1]) <= lam
    return Axis(g, y0, points, N, lam, degenerate)


def coarse_intersection(cb: ConedBall, A: Axis, Bx: Axis, eps: float) -> float:
    """Diameter of N_eps(A) ∩ B in the coned metric (0 when empty)."""
    near = set()
    for a in A.points:
        row = cb.distances_from(a)
        for b in Bx.points:
            if row[b] <= eps:
                near.add(b)
    near = sorted(near)
    diam = 0.0
    for i, u in enumerate(near):
        row = cb.distances_from(u)
        for v in near[i + 1:]:
            diam = max(diam, float(row[v]))
    return diam


def coarse_stabilizer_bound(lambda_x: float, lambda_t_g: int, lambda_t_h: int, kappa: int, eps: float) -> float:
    return lambda_x / lambda_t_g * (kappa + lambda_t_g * lambda_t_h + 2 * eps)


# ---------------------------------------------------------------------------
# hyperbolicity, bottleneck and acylindricity measurements


def four_point_delta(D: np.ndarray) -> float:
    """Exact four-point delta of a finite metric given as a square matrix."""
    n = D.shape[0]
    best = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            s1 = D[i, j] + D  # pairs (k, l)
            s2 = D[i][:, None] + D[j][None, :]
            s3 = D[i][None, :] + D[j][:, None]
            stack = np.sort(np.stack([s1, s2, s3]), axis=0)
            best = max(best, float((stack[2] - stack[1]).max()) / 2)
    return best


@dataclass
class DeltaResult:
    delta: float
    pool: list[int]
    tuples: int

    def as_dict(self):
        return {"delta": self.delta, "pool": self.pool, "tuples": self.tuples}


def interior_pool(cb: ConedBall, size: int, seed: int, max_dist: int | None = None) -> list[int]:
    B = cb.base
    if max_dist is None:
        max_dist = B.radius // 2
    idx = np.nonzero(B.dist <= max_dist)[0]
    if len(idx) <= size:
        return [int(i) for i in idx]
    rng = np.random.default_rng(seed)
    pick = rng.choice(idx, size=size, replace=False)
    return sorted(int(i) for i in pick)


def measure_delta(cb: ConedBall, samples: int = 0, seed: int = 0, pool_size: int = 24,
                  pool: list[int] | None = None) -> DeltaResult:
    """Four-point delta over a seeded pool of interior points.

    ``samples = 0`` scans every 4-tuple of the pool; otherwise that many
    seeded random 4-tuples are drawn from it.
    """
    if pool is None:
        pool = interior_pool(cb, pool_size, seed)
    if len(pool) < 4:
        return DeltaResult(0.0, pool, 0)
    D = np.array([cb.distances_from(i)[pool] for i in pool])
    if samples <= 0:
        m = len(pool)
        return DeltaResult(four_point_delta(D), pool, m * (m - 1) * (m - 2) * (m - 3) // 24)
    rng = np.random.default_rng(seed + 1)
    best = 0.0
    for _ in range(samples):
        i, j, k, l = rng.choice(len(pool), size=4, replace=False)
        s = sorted([D[i, j] + D[k, l], D[i, k] + D[j, l], D[i, l] + D[j, k]])
        best = max(best, (s[2] - s[1]) / 2)
    return DeltaResult(float(best), pool, samples)


@dataclass
class BottleneckPair:
    x: int
    y: int
    distance: float
    midpoint: int
    delta: int
    capped: bool

    def as_dict(self, G, B) -> dict:
        return {"x": G.format(B.elements[self.x]), "y": G.format(B.elements[self.y]),
                "coned_distance": self.distance, "midpoint": G.format(B.elements[self.midpoint]),
                "Delta": self.delta, "capped_at_endpoint": self.capped}


@dataclass
class BottleneckResult:
    delta: int
    pairs: list[BottleneckPair]
    skipped: list[str]
    margin_rule: str = "d(id,x), d(id,y) <= radius - d(x,y)"

    def as_dict(self, G, B) -> dict:
        return {"Delta": self.delta, "pairs": [p.as_dict(G, B) for p in self.pairs],
                "skipped": self.skipped, "margin_rule": self.margin_rule}


def margin_ok(cb: ConedBall, x: int, y: int) -> bool:
    B = cb.base
    dxy = cb.base_distances_from(x)[y]
    return B.dist[x] <= B.radius - dxy and B.dist[y] <= B.radius - dxy


def _connected(cb: ConedBall, keep: np.ndarray, x: int, y: int) -> bool:
    sub_index = np.cumsum(keep) - 1
    sub = cb.csr[keep][:, keep]
    order = breadth_first_order(sub, int(sub_index[x]), directed=True, return_predecessors=False)
    return bool(np.isin(sub_index[y], order))


def pair_bottleneck(cb: ConedBall, x: int, y: int) -> BottleneckPair:
    dx = cb.distances_from(x)
    dy = cb.distances_from(y)
    d = dx[y]
    if not np.isfinite(d):
        raise ConeError("pair is disconnected inside the ball")
    half = np.floor(d / 2)
    on_geo = np.nonzero((dx + dy == d) & (dx == half))[0]
    if len(on_geo) == 0:
        on_geo = np.nonzero(dx + dy == d)[0]
        on_geo = on_geo[np.argsort(np.abs(dx[on_geo] - d / 2), kind="stable")]
    m = int(on_geo[0])
    dm = cb.full_distances_from(m)
    cap = int(min(dm[x], dm[y]))
    is_elem = np.zeros(cb.n_nodes, dtype=bool)
    is_elem[: cb.n] = True

    def separates(r: int) -> bool:
        keep = ~(is_elem & (dm < r))
        return not _connected(cb, keep, x, y)

    lo, hi = 1, cap
    if not separates(cap):
        return BottleneckPair(x, y, float(d), m, cap + 1, True)
    while lo < hi:
        mid = (lo + hi) // 2
        if separates(mid):
            hi = mid
        else:
            lo = mid + 1
    return BottleneckPair(x, y, float(d), m, lo, False)


def sample_pairs(cb: ConedBall, n_pairs: int, seed: int, level: int | None = None) -> list[tuple[int, int]]:
    """Seeded pairs on the sphere of radius ``level`` (default radius // 3) obeying the margin rule."""
    B = cb.base
    if level is None:
        level = max(1, B.radius // 3)
    sphere = np.nonzero(B.dist == level)[0]
    rng = np.random.default_rng(seed)
    pairs = []
    tries = 0
    while len(pairs) < n_pairs and tries < 50 * n_pairs and len(sphere) >= 2:
        tries += 1
        x, y = (int(v) for v in rng.choice(sphere, size=2, replace=False))
        if (x, y) in pairs or not margin_ok(cb, x, y):
            continue
        pairs.append((x, y))
    return pairs


def measure_bottleneck(cb: ConedBall, pairs: list[tuple[int, int]] | None = None, n_pairs: int = 6,
                       seed: int = 0) -> BottleneckResult:
    if pairs is None:
        pairs = sample_pairs(cb, n_pairs, seed)
    results, skipped = [], []
    G, B = cb.group, cb.base
    for x, y in pairs:
        if not margin_ok(cb, x, y):
            skipped.append(f"{G.format(B.elements[x])} / {G.format(B.elements[y])}: margin rule")
            continue
        results.append(pair_bottleneck(cb, x, y))
    delta = max((p.delta for p in results), default=0)
    return BottleneckResult(delta, results, skipped)


@dataclass
class AcylRow:
    eps: float
    D: float
    max_count: int | None
    pairs: int

    def as_dict(self):
        return {"eps": self.eps, "D": self.D, "max_count": self.max_count, "pairs": self.pairs,
                "available": self.max_count is not None}


def acylindricity_table(cb: ConedBall, eps_list, D_list, candidate_radius: int = 4,
                        pool_size: int = 40, seed: int = 0) -> list[AcylRow]:
    B = cb.base
    G = cb.group
    cands = [B.elements[i] for i in B.shortlex_order() if B.dist[i] <= candidate_radius]
    # candidates pushing a pool point out of the ball are not counted
    pool = interior_pool(cb, pool_size, seed, max_dist=max(B.radius - candidate_radius, B.radius // 2))
    moved: dict[int, np.ndarray] = {}
    for x in pool:
        row = cb.distances_from(x)
        xe = B.elements[x]
        disp = np.full(len(cands), np.inf)
        for k, g in enumerate(cands):
            j = B.index.get(G.multiply(g, xe))
            if j is not None:
                disp[k] = row[j]
        moved[x] = disp
    dist = {(x, y): cb.distances_from(x)[y] for x, y in combinations(pool, 2)}
    rows = []
    for eps in eps_list:
        for D in D_list:
            best = None
            n = 0
            for (x, y), d in dist.items():
                if d < D:
                    continue
                n += 1
                c = int(np.sum((moved[x] <= eps) & (moved[y] <= eps)))
                best = c if best is None else max(best, c)
            rows.append(AcylRow(eps, D, best, n))
    return rows


# ---------------------------------------------------------------------------
# reports


@dataclass
class DiagnosticsReport:
    group: str
    radius: int
    seed: int
    ball_size: int
    products: list[str]
    delta: dict | None = None
    bottleneck: dict | None = None
    acylindricity_table: list[dict] = field(default_factory=list)
    lipschitz_check: dict | None = None
    caveats: list[str] = field(default_factory=list)
    extra: dict = field(default_factory=dict)
    schema_version: str = SCHEMA_VERSION

    def to_json(self) -> str:
        return json.dumps(self.__dict__, sort_keys=True, indent=2) + "\n"


STANDARD_CAVEATS = [
    "finite-ball measurements are consistent with, never proofs of, the asymptotic statements",
    "pairs violating the margin rule are excluded",
    "distances are those of the coned graph restricted to the ball",
]


def diagnose(cb: ConedBall, name: str, seed: int = 0, tree: TreeBall | None = None, tree_scale: int = 1,
             eps_list=(1,), D_list=(1, 2, 3, 4, 5, 6), pool_size: int = 24, n_pairs: int = 6) -> DiagnosticsReport:
    G = cb.group
    rep = DiagnosticsReport(name, cb.radius, seed, cb.n, [p.name for p in cb.products],
                            caveats=list(STANDARD_CAVEATS))
    if cb.n < 2:
        rep.delta = {"delta": 0.0, "pool": [0], "tuples": 0}
        rep.bottleneck = {"Delta": 0, "pairs": [], "skipped": [], "margin_rule": "n/a"}
        rep.caveats.append("degenerate ball: all metrics are 0")
        return rep
    rep.delta = measure_delta(cb, 0, seed, pool_size).as_dict()
    rep.bottleneck = measure_bottleneck(cb, n_pairs=n_pairs, seed=seed).as_dict(G, cb.base)
    rep.acylindricity_table = [r.as_dict() for r in acylindricity_table(
        cb, eps_list, D_list, candidate_radius=min(4, cb.radius), seed=seed)]
    if tree is not None:
        pr = project_to_tree(cb, tree, tree_scale)
        rep.lipschitz_check = {"max_edge_ratio": pr.max_edge_ratio, "max_cone_spread": pr.max_cone_spread,
                               "scale": tree_scale, "ok": pr.lipschitz_ok}
    far = max(float(cb.distances_from(cb.base.identity_index).max()), 0.0)
    rep.extra["eccentricity_of_identity"] = far
    if far <= 1:
        rep.caveats.append("coned ball has diameter <= 1 around the identity: G is coned to a point")
    return rep
