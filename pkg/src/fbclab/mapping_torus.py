"""The free-by-cyclic group G = F x|_phi Z and finite balls of its Cayley graph.

Elements are normal forms ``t^k w`` with ``w`` a reduced word of the fiber.
Conjugation convention: ``t w t^-1 = monodromy(w)``, so ``w t^m = t^m monodromy^-m(w)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from . import free_core as fc
from .free_core import Basis, FreeAutomorphism, Word

DEFAULT_BALL_CAP = 5_000_000


class ResourceError(RuntimeError):
    """A configured cap was exceeded; ``partial`` holds the count reached."""

    def __init__(self, message: str, partial: int = 0):
        super().__init__(message)
        self.partial = partial


class BallRangeError(ValueError):
    pass


class FbcElement(NamedTuple):
    t_exp: int
    fiber: Word


IDENTITY = FbcElement(0, ())


@dataclass(frozen=True)
class Generator:
    name: str
    element: FbcElement


class FbcGroup:
    def __init__(
        self,
        basis: Basis,
        monodromy: FreeAutomorphism,
        stable_letter: str = "t",
        extra_generators: Sequence[tuple[str, FbcElement]] = (),
        name: str = "",
    ):
        if stable_letter in basis.symbols:
            raise fc.WordError(f"stable letter {stable_letter!r} clashes with the basis")
        if monodromy.basis != basis:
            raise fc.WordError("monodromy is defined over a different basis")
        self.basis = basis
        self.monodromy = monodromy
        self.stable_letter = stable_letter
        self.name = name
        gens: list[Generator] = []
        for i, s in enumerate(basis.symbols):
            gens.append(Generator(s, FbcElement(0, (i + 1,))))
            gens.append(Generator(s + "'", FbcElement(0, (-(i + 1),))))
        gens.append(Generator(stable_letter, FbcElement(1, ())))
        gens.append(Generator(stable_letter + "'", FbcElement(-1, ())))
        for nm, el in extra_generators:
            gens.append(Generator(nm, el))
            gens.append(Generator(nm + "'", self.invert(el)))
        self.generators: tuple[Generator, ...] = tuple(gens)
        self._gen_index = {g.name: i for i, g in enumerate(self.generators)}

    # -- arithmetic ---------------------------------------------------------

    def multiply(self, g: FbcElement, h: FbcElement) -> FbcElement:
        k, w = g
        m, u = h
        if m:
            w = self.monodromy.apply(w, -m)
        return FbcElement(k + m, fc.concat(w, u))

    def invert(self, g: FbcElement) -> FbcElement:
        k, w = g
        return FbcElement(-k, self.monodromy.apply(fc.inverse(w), k))

    def product(self, *elements: FbcElement) -> FbcElement:
        out = IDENTITY
        for e in elements:
            out = self.multiply(out, e)
        return out

    def power(self, g: FbcElement, n: int) -> FbcElement:
        if n < 0:
            g, n = self.invert(g), -n
        out, base = IDENTITY, g
        while n:
            if n & 1:
                out = self.multiply(out, base)
            base = self.multiply(base, base)
            n >>= 1
        return out

    def conjugate(self, x: FbcElement, g: FbcElement) -> FbcElement:
        """x g x^-1."""
        return self.multiply(self.multiply(x, g), self.invert(x))

    def commutes(self, g: FbcElement, h: FbcElement) -> bool:
        return self.multiply(g, h) == self.multiply(h, g)

    def fiber(self, w: Word) -> FbcElement:
        return FbcElement(0, w)

    def t(self, k: int = 1) -> FbcElement:
        return FbcElement(k, ())

    def mul_generator(self, g: FbcElement, s: FbcElement) -> FbcElement:
        k, w = g
        m, u = s
        if m == 0 and len(u) == 1:
            x = u[0]
            if w and w[-1] == -x:
                return FbcElement(k, w[:-1])
            return FbcElement(k, w + u)
        return self.multiply(g, s)

    # -- parsing ------------------------------------------------------------

    def parse(self, text: str) -> FbcElement:
        """Evaluate whitespace separated generator tokens, e.g. ``"t b a'"``."""
        out = IDENTITY
        toks = text.split()
        if toks in (["1"], ["e"]):
            return out
        for tok in toks:
            out = self.multiply(out, self.token(tok))
        return out

    def token(self, tok: str) -> FbcElement:
        base, exp = fc.split_token(tok)
        if base == self.stable_letter:
            return FbcElement(exp, ())
        idx = self._gen_index.get(base)
        if idx is not None and base not in self.basis.symbols:
            return self.power(self.generators[idx].element, exp)
        x = self.basis.letter(base)
        return FbcElement(0, fc.power((x,), exp))

    def generator_index(self, name: str) -> int:
        return self._gen_index[name]

    def format(self, g: FbcElement) -> str:
        k, w = g
        parts = []
        if k:
            parts.append(self.stable_letter if k == 1 else f"{self.stable_letter}^{k}")
        if w:
            parts.append(self.basis.format(w))
        return " ".join(parts) if parts else "1"

    def word_to_element(self, names: Sequence[str]) -> FbcElement:
        out = IDENTITY
        for nm in names:
            out = self.multiply(out, self.generators[self._gen_index[nm]].element)
        return out

    def validate_generating_set(self) -> None:
        """Every basis generator and t must be a generator (or product of a few)."""
        elems = {g.element for g in self.generators}
        needed = [FbcElement(1, ())] + [FbcElement(0, (i + 1,)) for i in range(self.basis.rank)]
        for el in needed:
            if el not in elems:
                raise fc.WordError(f"generating set misses {self.format(el)}")
        for g in self.generators:
            if self.invert(g.element) not in elems:
                raise fc.WordError(f"generating set not inverse-closed at {g.name}")

    def __repr__(self):
        return f"FbcGroup({self.name or self.monodromy!r})"


def normal_form_key(g: FbcElement) -> tuple:
    return (g.t_exp, g.fiber)


@dataclass
class CayleyBall:
    """Exact ball of Cay(G; S) around the identity.

    ``elements`` is sorted by normal form; ``neighbors[i, s]`` is the index of
    ``elements[i] * S[s]`` or -1 when that product leaves the ball.
    """

    group: FbcGroup
    radius: int
    elements: list
    index: dict
    dist: np.ndarray
    neighbors: np.ndarray
    _bfs_order: np.ndarray = field(default=None, repr=False)

    def __len__(self):
        return len(self.elements)

    def __contains__(self, g) -> bool:
        return g in self.index

    @property
    def identity_index(self) -> int:
        return self.index[IDENTITY]

    def edges(self) -> list[tuple[int, int, int]]:
        """Undirected edges (i, s, j) with i < j, each listed once."""
        out = []
        n, m = self.neighbors.shape
        for i in range(n):
            row = self.neighbors[i]
            for s in range(m):
                j = row[s]
                if j > i:
                    out.append((i, s, int(j)))
        return out

    def sphere(self, r: int) -> list[int]:
        return [int(i) for i in np.nonzero(self.dist == r)[0]]

    def shortlex_order(self) -> np.ndarray:
        """Indices sorted by (distance, normal form)."""
        if self._bfs_order is None:
            self._bfs_order = np.lexsort((np.arange(len(self)), self.dist))
        return self._bfs_order

    def to_json(self) -> str:
        fmt = self.group.format
        gens = [g.name for g in self.group.generators]
        record = {
            "radius": self.radius,
            "vertices": [{"id": i, "label": fmt(e), "dist": int(self.dist[i])} for i, e in enumerate(self.elements)],
            "edges": [[i, gens[s], j] for i, s, j in self.edges()],
        }
        return json.dumps(record, sort_keys=True, separators=(",", ":"))

    def to_dot(self) -> str:
        fmt = self.group.format
        gens = [g.name for g in self.group.generators]
        lines = ["graph cayley {"]
        for i, e in enumerate(self.elements):
            lines.append(f'  v{i} [label="{fmt(e)}"];')
        for i, s, j in self.edges():
            lines.append(f'  v{i} -- v{j} [label="{gens[s]}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def ball(group: FbcGroup, r: int, cap: int = DEFAULT_BALL_CAP) -> CayleyBall:
    if r < 0:
        raise BallRangeError("radius must be non-negative")
    gens = [g.element for g in group.generators]
    seen: dict = {IDENTITY: 0}
    order = [IDENTITY]
    frontier = [IDENTITY]
    mul = group.mul_generator
    for d in range(1, r + 1):
        nxt = []
        for g in frontier:
            for s in gens:
                h = mul(g, s)
                if h not in seen:
                    seen[h] = d
                    nxt.append(h)
                    if len(seen) > cap:
                        raise ResourceError(f"ball cap {cap} exceeded at radius {d}", partial=len(seen))
        order.extend(nxt)
        frontier = nxt
    elements = sorted(order)
    index = {g: i for i, g in enumerate(elements)}
    dist = np.fromiter((seen[g] for g in elements), dtype=np.int32, count=len(elements))
    nbr = np.full((len(elements), len(gens)), -1, dtype=np.int64)
    inv_of = [gens.index(group.invert(s)) for s in gens]
    for i, g in enumerate(elements):
        row = nbr[i]
        for s_idx, s in enumerate(gens):
            if row[s_idx] != -1:
                continue
            j = index.get(mul(g, s))
            if j is not None:
                row[s_idx] = j
                nbr[j, inv_of[s_idx]] = i
    return CayleyBall(group, r, elements, index, dist, nbr)


def bfs_distances(neighbors: np.ndarray, source: int, limit: int | None = None) -> np.ndarray:
    """Word distances from ``source`` inside the ball (-1 when unreached or beyond ``limit``)."""
    n = neighbors.shape[0]
    dist = np.full(n, -1, dtype=np.int64)
    dist[source] = 0
    frontier = np.array([source], dtype=np.int64)
    d = 0
    while len(frontier) and (limit is None or d < limit):
        d += 1
        nb = neighbors[frontier].reshape(-1)
        nb = np.unique(nb[nb >= 0])
        nb = nb[dist[nb] < 0]
        dist[nb] = d
        frontier = nb
    return dist


def geodesics_between(B: CayleyBall, g: FbcElement, h: FbcElement, limit: int = 1000) -> tuple[list[tuple[int, ...]], int | None]:
    """Geodesic vertex paths from g to h; returns (paths, exact count or None if truncated)."""
    if g not in B.index or h not in B.index:
        raise BallRangeError("endpoints must lie in the ball")
    gi, hi = B.index[g], B.index[h]
    d_gh = word_length(B.group, B.group.multiply(B.group.invert(g), h), B)
    if int(B.dist[gi]) + d_gh > B.radius:
        raise BallRangeError("geodesics between these endpoints may leave the ball")
    from_g = bfs_distances(B.neighbors, gi, limit=d_gh)
    from_h = bfs_distances(B.neighbors, hi, limit=d_gh)
    paths: list[tuple[int, ...]] = []
    truncated = False

    def extend(path):
        nonlocal truncated
        if len(paths) >= limit:
            truncated = True
            return
        cur = path[-1]
        if cur == hi:
            paths.append(tuple(path))
            return
        step = from_g[cur] + 1
        for j in sorted({int(x) for x in B.neighbors[cur] if x >= 0}):
            if from_g[j] == step and from_h[j] >= 0 and from_h[j] == d_gh - step:
                path.append(j)
                extend(path)
                path.pop()
                if truncated:
                    return

    extend([gi])
    return paths, (None if truncated else len(paths))


def count_geodesics(B: CayleyBall, gi: int, hi: int) -> int:
    """Number of geodesic edge paths between two ball vertices (exact when inside the ball)."""
    from_g = bfs_distances(B.neighbors, gi)
    d = from_g[hi]
    from_h = bfs_distances(B.neighbors, hi, limit=d)
    on = [i for i in range(len(B)) if from_g[i] >= 0 and from_h[i] >= 0 and from_g[i] + from_h[i] == d]
    on.sort(key=lambda i: from_g[i])
    ways = {gi: 1}
    for i in on:
        if i == gi:
            continue
        total = 0
        for j in B.neighbors[i]:
            if j >= 0 and from_g[j] == from_g[i] - 1 and j in ways:
                total += ways[j]
        ways[i] = total
    return ways.get(hi, 0)


def word_length(group: FbcGroup, g: FbcElement, B: CayleyBall | None = None) -> int:
    """Word length of g; read from a ball when g lies in it, else by BFS."""
    if B is not None:
        i = B.index.get(g)
        if i is not None:
            return int(B.dist[i])
        # outside the ball: length exceeds the radius
        raise BallRangeError(f"{group.format(g)} lies outside the radius-{B.radius} ball")
    r = 0
    while True:
        bb = ball(group, r)
        if g in bb.index:
            return r
        r += 1
