"""Morse detection for paths, stability and strong quasiconvexity of subgroups, unique roots."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations, product
from pathlib import Path
from typing import Sequence

import numpy as np

from . import free_core as fc
from .coned_space import ConedBall, margin_ok
from .mapping_torus import (IDENTITY, BallRangeError, CayleyBall, FbcElement, FbcGroup, ResourceError,
                            bfs_distances)
from .subgroups import VerticalSubgroup

GEODESIC = "geodesic"
USER = "user"


def quasigeodesic_tag(K: float, C: float) -> str:
    return f"quasigeodesic({K:g},{C:g})"


# ---------------------------------------------------------------------------
# paths


@dataclass
class PathSample:
    vertices: list[FbcElement]
    source: str = USER

    def check(self, G: FbcGroup) -> None:
        gens = {g.element for g in G.generators} | {G.invert(g.element) for g in G.generators}
        for u, v in zip(self.vertices, self.vertices[1:]):
            if G.multiply(G.invert(u), v) not in gens:
                raise ValueError(f"{G.format(u)} and {G.format(v)} are not adjacent")

    def reversed(self) -> PathSample:
        return PathSample(self.vertices[::-1], self.source)

    def translate(self, G: FbcGroup, g: FbcElement) -> PathSample:
        return PathSample([G.multiply(g, v) for v in self.vertices], self.source)

    @classmethod
    def from_steps(cls, G: FbcGroup, steps: Sequence[str], start: FbcElement = IDENTITY,
                   source: str = USER) -> PathSample:
        verts = [start]
        for tok in steps:
            verts.append(G.multiply(verts[-1], G.token(tok)))
        return cls(verts, source)

    @classmethod
    def from_text(cls, G: FbcGroup, text: str, source: str = USER) -> PathSample:
        """Generator tokens separated by whitespace, one step per token; '#' starts a comment."""
        toks = []
        for line in text.splitlines():
            toks += line.split("#", 1)[0].split()
        return cls.from_steps(G, toks, source=source)


@dataclass(frozen=True)
class Thresholds:
    tau: int  # coset intersection diameter at or above which a path is a witness
    K0: float
    C0: float

    def as_dict(self):
        return {"tau": self.tau, "K0": self.K0, "C0": self.C0}


DEFAULT_THRESHOLDS = Thresholds(3, 2.0, 0.5)


@dataclass
class MorseVerdict:
    max_coset_intersection: int
    witness_coset: str | None
    projected_qg_constants: tuple[float, float]  # (K0, C(K0))
    tight_multiplicative: float  # smallest K with C = 0
    classification: str
    qg_classification: str

    def as_dict(self) -> dict:
        return {"max_coset_intersection": self.max_coset_intersection, "witness_coset": self.witness_coset,
                "projected_qg_constants": list(self.projected_qg_constants),
                "tight_multiplicative": self.tight_multiplicative,
                "classification": self.classification, "qg_classification": self.qg_classification}


def affine_defect(index_gaps: np.ndarray, coned: np.ndarray, K: float) -> float:
    """Smallest C with gap/K - C <= coned over all given pairs (the lower half of the envelope)."""
    if index_gaps.size == 0:
        return 0.0
    return float(max(0.0, (index_gaps / K - coned).max()))


def tight_multiplicative(index_gaps: np.ndarray, coned: np.ndarray) -> float:
    if index_gaps.size == 0:
        return 1.0
    if np.any(coned == 0):
        return float("inf")
    return float(max(1.0, (index_gaps / coned).max()))


def _indices(cb: ConedBall, path: PathSample) -> list[int]:
    out = []
    for v in path.vertices:
        i = cb.base.index.get(v)
        if i is None:
            raise BallRangeError(f"{cb.group.format(v)} is outside the ball")
        out.append(i)
    return out


def path_margin_ok(cb: ConedBall, idx: list[int]) -> bool:
    return margin_ok(cb, idx[0], idx[-1])


def morse_check(cb: ConedBall, path: PathSample, thresholds: Thresholds = DEFAULT_THRESHOLDS,
                enforce_margin: bool = True) -> MorseVerdict:
    return _measure(cb, path, thresholds, enforce_margin)[0]


def _measure(cb: ConedBall, path: PathSample, thresholds: Thresholds, enforce_margin: bool):
    idx = _indices(cb, path)
    if enforce_margin and not path_margin_ok(cb, idx):
        raise BallRangeError("path endpoints violate the margin rule")
    n = len(idx)
    base_rows = {i: cb.base_local(i, n) for i in set(idx)}
    best, best_coset = 0, None
    for pi, p in enumerate(cb.products):
        groups: dict[int, list[int]] = {}
        for i in idx:
            groups.setdefault(int(cb.coset_ids[i, pi]), []).append(i)
        for cid, members in groups.items():
            ms = sorted(set(members))
            for u, v in combinations(ms, 2):
                d = int(base_rows[u][v])
                if d > best:
                    best, best_coset = d, f"{p.name}#{cid}"
    gaps, coned = [], []
    for a in range(n):
        row = cb.local_distances(idx[a], n)
        for b in range(a + 1, n):
            gaps.append(b - a)
            coned.append(row[idx[b]])
    gaps_a, coned_a = np.array(gaps, dtype=float), np.array(coned, dtype=float)
    c = affine_defect(gaps_a, coned_a, thresholds.K0)
    cls = "non-morse-witness" if best >= thresholds.tau else "morse-consistent"
    qg = "non-morse-witness" if c > thresholds.C0 else "morse-consistent"
    verdict = MorseVerdict(best, best_coset if cls != "morse-consistent" else None,
                           (thresholds.K0, c), tight_multiplicative(gaps_a, coned_a), cls, qg)
    return verdict, gaps_a, coned_a


@dataclass
class PathProfile:
    """Threshold-free data from which both classifications follow."""
    max_coset_intersection: int
    gaps: np.ndarray
    coned: np.ndarray

    def classify(self, th: Thresholds) -> tuple[bool, bool]:
        by_coset = self.max_coset_intersection >= th.tau
        by_qg = affine_defect(self.gaps, self.coned, th.K0) > th.C0
        return by_coset, by_qg


def profile(cb: ConedBall, path: PathSample) -> PathProfile:
    v, gaps, coned = _measure(cb, path, Thresholds(10 ** 9, 1.0, float("inf")), False)
    return PathProfile(v.max_coset_intersection, gaps, coned)


# ---------------------------------------------------------------------------
# geodesic samples


def all_geodesics(B: CayleyBall, i: int, j: int, limit: int = 500, rows=None) -> list[list[int]]:
    """Every geodesic vertex path from i to j inside the ball (at most ``limit``).

    ``rows(k)`` may supply cached base distances from k (unreachable = negative or inf).
    """
    if rows is None:
        from_i = bfs_distances(B.neighbors, i)
        d = int(from_i[j])
        if d < 0:
            raise BallRangeError("endpoints are disconnected inside the ball")
        from_j = bfs_distances(B.neighbors, j, limit=d)
    else:
        from_i, from_j = rows(i), rows(j)
        if not np.isfinite(from_i[j]) or from_i[j] < 0:
            raise BallRangeError("endpoints are disconnected inside the ball")
        d = int(from_i[j])
    out: list[list[int]] = []

    def walk(path: list[int]):
        if len(out) >= limit:
            return
        cur = path[-1]
        if cur == j:
            out.append(list(path))
            return
        step = from_i[cur] + 1
        for nxt in sorted({int(x) for x in B.neighbors[cur] if x >= 0}):
            if from_i[nxt] == step and 0 <= from_j[nxt] == d - step:
                path.append(nxt)
                walk(path)
                path.pop()

    walk([i])
    return out


def sample_endpoint_pairs(cb: ConedBall, n_pairs: int, seed: int, min_length: int = 2,
                          anchors: Sequence[tuple[FbcElement, FbcElement]] = ()) -> list[tuple[int, int]]:
    """Seeded margin-valid pairs at base distance >= min_length, anchors first."""
    B = cb.base
    pairs: list[tuple[int, int]] = []
    for x, y in anchors:
        i, j = B.index.get(x), B.index.get(y)
        if i is None or j is None or not margin_ok(cb, i, j):
            raise BallRangeError(f"anchor pair {cb.group.format(x)}, {cb.group.format(y)} violates the margin rule")
        pairs.append((i, j))
    R = B.radius
    starts = np.nonzero(B.dist <= max(0, R // 4))[0]
    rng = np.random.default_rng(seed)
    seen = set(pairs)
    tries = 0
    while len(pairs) < n_pairs and tries < 100 * n_pairs:
        tries += 1
        i = int(rng.choice(starts))
        row = cb.base_distances_from(i)
        room = (R - B.dist[i]) // 2
        # y must satisfy |y| <= R - d(x, y); d(x, y) <= room keeps that within reach
        L = int(rng.integers(min_length, max(min_length, room) + 1))
        cand = np.nonzero((row == L) & (B.dist <= R - L))[0]
        if len(cand) == 0:
            continue
        j = int(rng.choice(cand))
        if (i, j) in seen or not margin_ok(cb, i, j):
            continue
        seen.add((i, j))
        pairs.append((i, j))
    return pairs


def geodesic_samples(cb: ConedBall, pairs: list[tuple[int, int]], per_pair: int = 500) -> list[PathSample]:
    out = []
    els = cb.base.elements
    for i, j in pairs:
        for p in all_geodesics(cb.base, i, j, per_pair, cb.base_distances_from):
            out.append(PathSample([els[k] for k in p], GEODESIC))
    return out


@dataclass
class CrosscheckReport:
    thresholds: Thresholds
    matrix: dict  # (coset verdict, qg verdict) -> count
    samples: int
    witnesses: dict

    @property
    def agreement(self) -> float:
        if self.samples == 0:
            return 1.0
        agree = self.matrix["witness/witness"] + self.matrix["consistent/consistent"]
        return agree / self.samples

    def as_dict(self) -> dict:
        return {"thresholds": self.thresholds.as_dict(), "matrix": self.matrix, "samples": self.samples,
                "agreement": self.agreement, "witnesses": self.witnesses}


def _matrix(profiles: list[PathProfile], th: Thresholds) -> dict:
    m = {"witness/witness": 0, "witness/consistent": 0, "consistent/witness": 0, "consistent/consistent": 0}
    for p in profiles:
        a, b = p.classify(th)
        m[f"{'witness' if a else 'consistent'}/{'witness' if b else 'consistent'}"] += 1
    return m


def detectability_crosscheck(cb: ConedBall, samples: list[PathSample],
                             thresholds: Thresholds = DEFAULT_THRESHOLDS) -> CrosscheckReport:
    G = cb.group
    profiles = []
    for s in samples:
        if not path_margin_ok(cb, _indices(cb, s)):
            raise BallRangeError("sample violates the margin rule")
        profiles.append(profile(cb, s))
    wit: dict = {}
    for s, p in zip(samples, profiles):
        a, b = p.classify(thresholds)
        key = "non-morse" if a and b else ("morse" if not a and not b else None)
        if key and key not in wit:
            wit[key] = [G.format(v) for v in s.vertices]
    return CrosscheckReport(thresholds, _matrix(profiles, thresholds), len(samples), wit)


TAU_GRID = (1, 2, 3, 4, 5, 6)
K_GRID = (1.0, 1.5, 2.0, 3.0, 4.0)
C_GRID = (0.0, 0.5, 1.0, 1.5, 2.0, 3.0)


def calibrate(profiles: list[PathProfile]) -> tuple[Thresholds | None, list[dict]]:
    """First grid point (tau, then K0, then C0 ascending) with perfect agreement and both classes present."""
    tried = []
    for tau, K, C in product(TAU_GRID, K_GRID, C_GRID):
        th = Thresholds(tau, K, C)
        m = _matrix(profiles, th)
        ok = m["witness/consistent"] == 0 and m["consistent/witness"] == 0 and \
            m["witness/witness"] > 0 and m["consistent/consistent"] > 0
        tried.append({**th.as_dict(), "perfect": ok})
        if ok:
            return th, tried
    return None, tried


def load_thresholds(path: str | Path) -> Thresholds:
    d = json.loads(Path(path).read_text())
    return Thresholds(int(d["tau"]), float(d["K0"]), float(d["C0"]))


# ---------------------------------------------------------------------------
# subgroups


@dataclass
class SubgroupSpec:
    generators: list[FbcElement]
    ball_radius: int = 6

    def closed(self, G: FbcGroup) -> list[FbcElement]:
        out = []
        for g in self.generators:
            for h in (g, G.invert(g)):
                if h not in out and h != IDENTITY:
                    out.append(h)
        return out

    def fiber_subgroup(self, G: FbcGroup) -> VerticalSubgroup | None:
        """Exact membership when every generator lies in the fiber."""
        if all(g.t_exp == 0 for g in self.generators):
            return VerticalSubgroup(G, [g.fiber for g in self.generators], None)
        return None

    def is_fiber_free_basis(self, G: FbcGroup) -> bool:
        sub = self.fiber_subgroup(G)
        return sub is not None and sub.fiber_rank == len(self.generators)


def intrinsic_ball(G: FbcGroup, H: SubgroupSpec, radius: int, cap: int = 200_000) -> dict[FbcElement, int]:
    """element -> word length over the generators of H, by BFS in H's Cayley graph."""
    gens = H.closed(G)
    dist = {IDENTITY: 0}
    frontier = [IDENTITY]
    for r in range(1, radius + 1):
        nxt = []
        for g in frontier:
            for s in gens:
                h = G.multiply(g, s)
                if h not in dist:
                    dist[h] = r
                    nxt.append(h)
                    if len(dist) > cap:
                        raise ResourceError("intrinsic subgroup ball exceeds the cap", partial=len(dist))
        frontier = nxt
    return dist


def subgroup_points(B: CayleyBall, H: SubgroupSpec) -> np.ndarray:
    """Ball indices of H ∩ B (exact for fiber subgroups, intrinsic BFS otherwise)."""
    G = B.group
    sub = H.fiber_subgroup(G)
    if sub is not None:
        return np.array([i for i, x in enumerate(B.elements) if x.t_exp == 0 and sub.contains(x)], dtype=np.int64)
    pts = intrinsic_ball(G, H, 2 * B.radius + 2)
    return np.array(sorted(B.index[x] for x in pts if x in B.index), dtype=np.int64)


@dataclass
class StabilityReport:
    intersections: list[dict]
    nontrivial: bool
    distortion: list[dict]
    qi_fit: dict
    verdict: str
    notes: list[str] = field(default_factory=list)

    def as_dict(self):
        return {"intersections": self.intersections, "nontrivial_intersection": self.nontrivial,
                "distortion": self.distortion, "qi_fit": self.qi_fit, "verdict": self.verdict,
                "notes": self.notes}


def stability_check(cb: ConedBall, H: SubgroupSpec, P_list=None, conjugator_radius: int = 2,
                    thresholds: Thresholds = DEFAULT_THRESHOLDS) -> StabilityReport:
    G, B = cb.group, cb.base
    P_list = cb.products if P_list is None else P_list
    intr = intrinsic_ball(G, H, H.ball_radius)
    visible = sorted(((x, n) for x, n in intr.items() if x in B.index), key=lambda p: (p[1], B.index[p[0]]))
    conj = [B.elements[i] for i in B.shortlex_order() if B.dist[i] <= conjugator_radius]
    hits = []
    for p in P_list:
        found = None
        for x in conj:
            xi = G.invert(x)
            for h, n in visible:
                if n == 0:
                    continue
                if p.contains(G.multiply(G.multiply(xi, h), x)):
                    found = (h, x)
                    break
            if found:
                break
        hits.append({"product": p.name, "nontrivial": found is not None,
                     "witness": None if found is None else {"h": G.format(found[0]), "conjugator": G.format(found[1])}})
    nontrivial = any(h["nontrivial"] for h in hits)

    table: dict[int, int] = {}
    for h, n in visible:
        d = int(B.dist[B.index[h]])
        table[n] = min(table.get(n, d), d)
    distortion = [{"intrinsic": n, "min_ambient": table[n]} for n in sorted(table)]

    pts = [(h, n) for h, n in visible if margin_ok(cb, B.identity_index, B.index[h])]
    gaps, coned = [], []
    for (h1, _), (h2, _) in combinations(pts, 2):
        dH = intr.get(G.multiply(G.invert(h1), h2))
        if dH is None:
            continue
        gaps.append(dH)
        coned.append(cb.distances_from(B.index[h1])[B.index[h2]])
    ga, ca = np.array(gaps, float), np.array(coned, float)
    c = affine_defect(ga, ca, thresholds.K0)
    qi_ok = c <= thresholds.C0
    fit = {"K": thresholds.K0, "C": c, "pairs": len(gaps), "tight_multiplicative": tight_multiplicative(ga, ca),
           "embedded_consistent": bool(qi_ok)}
    if not nontrivial and qi_ok:
        verdict = "stable-consistent"
    elif nontrivial:
        verdict = "not-stable"
    else:
        verdict = "inconclusive"
    notes = []
    if nontrivial == qi_ok:
        notes.append("intersection scan and QI fit disagree at this radius")
    return StabilityReport(hits, nontrivial, distortion, fit, verdict, notes)


@dataclass
class StrongQCReport:
    radius: int
    pairs: int
    geodesics: int
    observed_M: int
    quasi_observed_M: int
    escaped: bool
    witness: list[str] | None
    quasi_witness: list[str] | None
    skipped: int
    notes: list[str] = field(default_factory=list)

    def as_dict(self):
        return dict(self.__dict__)


class _Rows:
    """Cached word-metric rows of a ball, optionally truncated at a radius (inf beyond it)."""

    def __init__(self, B: CayleyBall):
        self.B = B
        self.cache: dict[int, tuple[int | None, np.ndarray]] = {}

    def __call__(self, i: int, limit: int | None = None) -> np.ndarray:
        hit = self.cache.get(i)
        if hit is not None and (hit[0] is None or (limit is not None and hit[0] >= limit)):
            return hit[1]
        if len(self.cache) > 512:
            self.cache.clear()
        d = bfs_distances(self.B.neighbors, i, limit).astype(float)
        d[d < 0] = np.inf
        self.cache[i] = (limit, d)
        return d


def is_quasigeodesic(path: list[int], rows, K: float, C: float) -> bool:
    n = len(path)
    for a, i in enumerate(path):
        row = rows(i, n)
        for b in range(a + 1, n):
            d = row[path[b]]
            if not np.isfinite(d) or (b - a) > K * d + C:
                return False
    return True


def _descend(B: CayleyBall, start: int, toward: np.ndarray) -> list[int]:
    """Greedy geodesic from start along decreasing distance-to-target (smallest index first)."""
    path = [start]
    cur = start
    while toward[cur] > 0:
        nxt = [int(x) for x in B.neighbors[cur] if x >= 0 and toward[x] == toward[cur] - 1]
        cur = min(nxt)
        path.append(cur)
    return path


def detour_paths(B: CayleyBall, h1: int, h2: int, max_depth: int, rows=None) -> list[list[int]]:
    """h1 s^m (geodesic) s^-m h2 for each generator s and 1 <= m <= max_depth, when inside the ball."""
    G = B.group
    rows = rows or _Rows(B)
    base = rows(h1)[h2]
    out = []
    for gen in G.generators:
        s = gen.element
        a, b = B.elements[h1], B.elements[h2]
        up, down = [h1], []
        for m in range(1, max_depth + 1):
            a, b = G.multiply(a, s), G.multiply(b, s)
            ia, ib = B.index.get(a), B.index.get(b)
            if ia is None or ib is None:
                break
            up.append(ia)
            down.insert(0, ib)
            toward = rows(ib, int(base) + 2 * m)
            if not np.isfinite(toward[ia]):
                continue
            mid = _descend(B, ia, toward)
            out.append(up[:-1] + mid + down[1:] + [h2])
    return out


def margin_pairs(B: CayleyBall, pts: np.ndarray, rows) -> list[tuple[int, int]]:
    R = B.radius
    out = []
    for a, b in combinations(sorted(int(p) for p in pts), 2):
        d = rows(a, R - int(B.dist[a]))[b]
        if np.isfinite(d) and B.dist[a] <= R - d and B.dist[b] <= R - d:
            out.append((a, b))
    return out


def strong_qc_check(B: CayleyBall, H: SubgroupSpec, M: int, n_pairs: int = 60, seed: int = 0,
                    quasi: tuple[float, float] | None = (2.0, 0.0), per_pair: int = 200,
                    max_points: int = 300) -> StrongQCReport:
    """Distance from H ∩ B of every geodesic (and of detour quasigeodesics) between sampled H-points."""
    G = B.group
    pts = subgroup_points(B, H)
    notes = []
    sub = H.fiber_subgroup(G)
    if sub is not None and _covers_fiber(sub):
        notes.append("H contains the whole fiber, so it has finite index in the fiber; its index in G is "
                     f"{'infinite (no generator has nonzero t-exponent)' if all(g.t_exp == 0 for g in H.generators) else 'finite'}")
    if len(pts) == len(B):
        return StrongQCReport(B.radius, 0, 0, 0, 0, False, None, None, 0, notes + ["H ∩ B is the whole ball"])
    rows = _Rows(B)
    dist_H = _multi_source(B, pts)
    if len(pts) > max_points:
        # shortest H-points first: they admit the most margin-valid partners
        pts = pts[np.argsort(B.dist[pts], kind="stable")[:max_points]]
    candidates = [(a, b) for a, b in combinations(sorted(int(p) for p in pts), 2)]
    valid = margin_pairs(B, pts, rows)
    skipped = len(candidates) - len(valid)
    if len(valid) > n_pairs:
        rng = np.random.default_rng(seed)
        pick = rng.choice(len(valid), size=n_pairs, replace=False)
        valid = [valid[k] for k in sorted(pick)]
    best, witness = 0, None
    qbest, qwitness = 0, None
    n_geo = 0
    for a, b in valid:
        for path in all_geodesics(B, a, b, per_pair, rows):
            n_geo += 1
            m = int(dist_H[path].max())
            if m > best:
                best, witness = m, [G.format(B.elements[i]) for i in path]
        if quasi is None:
            continue
        for path in detour_paths(B, a, b, B.radius, rows):
            m = int(dist_H[path].max())
            if m > qbest and is_quasigeodesic(path, rows, *quasi):
                qbest, qwitness = m, [G.format(B.elements[i]) for i in path]
    if quasi is not None:
        notes.append(f"detours are ({quasi[0]:g},{quasi[1]:g})-quasigeodesics h s^m * s^-m between points of H")
    return StrongQCReport(B.radius, len(valid), n_geo, best, qbest, max(best, qbest) > M, witness, qwitness,
                          skipped, notes)


def _covers_fiber(sub: VerticalSubgroup) -> bool:
    return all(sub.automaton.member((i,)) for i in range(1, sub.group.basis.rank + 1))


def _multi_source(B: CayleyBall, sources: np.ndarray) -> np.ndarray:
    dist = np.full(len(B), -1, dtype=np.int64)
    dist[sources] = 0
    frontier = np.asarray(sources, dtype=np.int64)
    d = 0
    while len(frontier):
        d += 1
        nb = B.neighbors[frontier].reshape(-1)
        nb = np.unique(nb[nb >= 0])
        nb = nb[dist[nb] < 0]
        dist[nb] = d
        frontier = nb
    return dist


# ---------------------------------------------------------------------------
# unique roots


@dataclass
class UniqueRootsReport:
    trials: int
    max_power: int
    violations: list[dict]

    @property
    def passed(self) -> bool:
        return not self.violations

    def as_dict(self):
        return {"trials": self.trials, "max_power": self.max_power, "violations": self.violations,
                "passed": self.passed}


def is_unipotent(G: FbcGroup) -> bool:
    M = np.array(G.monodromy.abelianization(), dtype=np.int64)
    n = M.shape[0]
    N = M - np.eye(n, dtype=np.int64)
    P = np.eye(n, dtype=np.int64)
    for _ in range(n):
        P = P @ N
    return not P.any()


def unique_roots_test(G: FbcGroup, trials: int = 500, max_power: int = 10, seed: int = 0,
                      max_word: int = 4) -> UniqueRootsReport:
    if not is_unipotent(G):
        raise ValueError("monodromy is not unipotent on homology; unique roots are not expected")
    rng = np.random.default_rng(seed)
    rank = G.basis.rank

    def random_word() -> tuple:
        n = int(rng.integers(0, max_word + 1))
        w: list[int] = []
        while len(w) < n:
            x = int(rng.integers(1, rank + 1)) * (1 if rng.random() < 0.5 else -1)
            if w and w[-1] == -x:
                continue
            w.append(x)
        return tuple(w)

    violations = []
    done = 0
    while done < trials:
        u, v = random_word(), random_word()
        if u == v:
            continue
        done += 1
        g, h = FbcElement(1, fc.reduce(u)), FbcElement(1, fc.reduce(v))
        pg, ph = g, h
        for n in range(1, max_power + 1):
            if n > 1:
                pg, ph = G.multiply(pg, g), G.multiply(ph, h)
            if pg == ph:
                violations.append({"g": G.format(g), "h": G.format(h), "n": n})
                break
    return UniqueRootsReport(trials, max_power, violations)
