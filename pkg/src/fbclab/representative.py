"""Topological representatives of unipotent polynomially growing automorphisms.

A representative is a marked graph with an edge map ``f(e) = e rho_e``.  Edge
paths use the same signed-int encoding as words: edge ``i`` is ``i + 1`` and
its reverse is ``-(i + 1)``, so free reduction of a path removes backtracking.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct
from typing import Sequence

from . import free_core as fc
from .free_core import Basis, FreeAutomorphism, Word

IMMERSION_CHECK_ITERATES = 12
DEFAULT_CONJUGATOR_BOUND = 6


class RepresentativeError(ValueError):
    """Input does not describe a usable representative."""


class RepresentativeQualityError(RepresentativeError):
    """An iterate of an edge stopped being immersed."""


@dataclass(frozen=True)
class MarkedGraph:
    vertices: tuple[str, ...]
    edge_names: tuple[str, ...]
    ends: tuple[tuple[int, int], ...]  # (tail, head) vertex indices per edge
    tree: frozenset[int]  # edge indices of the spanning tree
    marking: dict  # non-tree edge index -> basis letter (signed int)
    basis: Basis
    basepoint: int = 0

    def __post_init__(self):
        n_v, n_e = len(self.vertices), len(self.edge_names)
        if n_e - n_v + 1 != self.basis.rank:
            raise RepresentativeError(
                f"graph rank {n_e - n_v + 1} does not match basis rank {self.basis.rank}"
            )
        if len(self.tree) != n_v - 1:
            raise RepresentativeError("spanning tree must have |V| - 1 edges")
        non_tree = set(range(n_e)) - set(self.tree)
        if set(self.marking) != non_tree:
            raise RepresentativeError("marking must cover exactly the non-tree edges")
        if sorted(abs(x) for x in self.marking.values()) != list(range(1, self.basis.rank + 1)):
            raise RepresentativeError("marking must be a bijection onto the basis")
        # tree must connect everything
        seen = {self.basepoint}
        stack = [self.basepoint]
        while stack:
            v = stack.pop()
            for e in self.tree:
                a, b = self.ends[e]
                for x, y in ((a, b), (b, a)):
                    if x == v and y not in seen:
                        seen.add(y)
                        stack.append(y)
        if len(seen) != n_v:
            raise RepresentativeError("spanning tree does not connect the graph")
        object.__setattr__(self, "_tree_paths", self._compute_tree_paths())

    def _compute_tree_paths(self) -> dict[int, Word]:
        paths = {self.basepoint: ()}
        q = deque([self.basepoint])
        while q:
            v = q.popleft()
            for e in sorted(self.tree):
                a, b = self.ends[e]
                if a == v and b not in paths:
                    paths[b] = paths[v] + (e + 1,)
                    q.append(b)
                elif b == v and a not in paths:
                    paths[a] = paths[v] + (-(e + 1),)
                    q.append(a)
        return paths

    @property
    def n_edges(self) -> int:
        return len(self.edge_names)

    def tail(self, x: int) -> int:
        a, b = self.ends[abs(x) - 1]
        return a if x > 0 else b

    def head(self, x: int) -> int:
        a, b = self.ends[abs(x) - 1]
        return b if x > 0 else a

    def tree_path(self, v: int, w: int) -> Word:
        """Reduced path in the spanning tree from v to w."""
        return fc.reduce(fc.inverse(self._tree_paths[v]) + self._tree_paths[w])

    def is_path(self, p: Word) -> bool:
        return all(self.head(p[i]) == self.tail(p[i + 1]) for i in range(len(p) - 1))

    def path_ends(self, p: Word) -> tuple[int, int]:
        return self.tail(p[0]), self.head(p[-1])

    def path_word(self, p: Sequence[int]) -> Word:
        """Image in F of a path, reading only non-tree edges."""
        out = []
        for x in p:
            letter = self.marking.get(abs(x) - 1)
            if letter is not None:
                out.append(letter if x > 0 else -letter)
        return fc.reduce(out)

    def loop_word(self, v: int, loop: Word) -> Word:
        """Element of F = pi_1(Gamma, x0) for a loop at v, joined to x0 by tree paths."""
        return self.path_word(self.tree_path(self.basepoint, v) + tuple(loop) + self.tree_path(v, self.basepoint))

    def generator_loop(self, i: int) -> Word:
        """Reduced loop at the basepoint representing basis generator i (0-based)."""
        for e, letter in self.marking.items():
            if abs(letter) == i + 1:
                edge = e + 1 if letter > 0 else -(e + 1)
                return fc.reduce(
                    self.tree_path(self.basepoint, self.tail(edge)) + (edge,) + self.tree_path(self.head(edge), self.basepoint)
                )
        raise RepresentativeError(f"no edge marked by generator {i}")

    def word_to_path(self, w: Word) -> Word:
        """Reduced loop at the basepoint whose marking is w."""
        out: list[int] = []
        for x in w:
            loop = self.generator_loop(abs(x) - 1)
            if x < 0:
                loop = fc.inverse(loop)
            out.extend(loop)
        return fc.reduce(out)

    def edge_label(self, x: int) -> str:
        name = self.edge_names[abs(x) - 1]
        return name if x > 0 else name + "'"

    def format_path(self, p: Word) -> str:
        return " ".join(self.edge_label(x) for x in p) if p else "1"

    def parse_path(self, text: str) -> Word:
        out = []
        for tok in text.split():
            sign = 1
            if tok.endswith("'"):
                tok, sign = tok[:-1], -1
            elif tok.endswith("^-1"):
                tok, sign = tok[:-3], -1
            try:
                out.append(sign * (self.edge_names.index(tok) + 1))
            except ValueError:
                raise RepresentativeError(f"unknown edge {tok!r}") from None
        return tuple(out)

    def edge_index(self, name: str) -> int:
        return self.edge_names.index(name)


@dataclass
class ConditionResult:
    name: str
    passed: bool
    first_violation: str | None = None

    def as_dict(self):
        return {"condition": self.name, "passed": self.passed, "first_violation": self.first_violation}


@dataclass
class ValidationReport:
    conditions: list[ConditionResult]
    degrees: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    def condition(self, name: str) -> ConditionResult:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    def as_dict(self):
        return {
            "passed": self.passed,
            "conditions": [c.as_dict() for c in self.conditions],
            "degrees": dict(self.degrees),
            "notes": list(self.notes),
        }


class TopRep:
    """A filtered topological representative ``f(e_i) = e_i rho_i``."""

    def __init__(self, graph: MarkedGraph, edge_images: Sequence[Word], filtration_order: Sequence[int]):
        if len(edge_images) != graph.n_edges:
            raise RepresentativeError("need one image path per edge")
        self.graph = graph
        self.images = tuple(tuple(p) for p in edge_images)
        self.order = tuple(filtration_order)
        self._degrees: dict[int, int] | None = None
        self._conjugators: dict[tuple, Word | None] = {}

    # -- basic structure ------------------------------------------------------

    def suffix(self, e: int) -> Word | None:
        """rho_e when f(e) starts with e, otherwise None."""
        img = self.images[e]
        if img and img[0] == e + 1:
            return img[1:]
        return None

    def image_of(self, x: int) -> Word:
        img = self.images[abs(x) - 1]
        return img if x > 0 else fc.inverse(img)

    def apply_path(self, p: Sequence[int], check_immersed: bool = False) -> Word:
        out: list[int] = []
        for x in p:
            for y in self.image_of(x):
                if out and out[-1] == -y:
                    if check_immersed:
                        raise RepresentativeQualityError(
                            f"cancellation at {self.graph.edge_label(y)} while iterating"
                        )
                    out.pop()
                else:
                    out.append(y)
        return tuple(out)

    def induced_images(self) -> list[Word]:
        """f_* on the basis of F, read through the marking at the basepoint."""
        g = self.graph
        return [g.path_word(self.apply_path(g.generator_loop(i))) for i in range(g.basis.rank)]

    def abelianization(self) -> list[list[int]]:
        r = self.graph.basis.rank
        m = [[0] * r for _ in range(r)]
        for j, img in enumerate(self.induced_images()):
            for x in img:
                m[abs(x) - 1][j] += 1 if x > 0 else -1
        return m

    # -- validation -----------------------------------------------------------

    def validate_filtration(self, monodromy: FreeAutomorphism | None = None,
                            conjugator_bound: int = DEFAULT_CONJUGATOR_BOUND) -> ValidationReport:
        g = self.graph
        conds: list[ConditionResult] = []
        n = g.n_edges

        bad = None
        for e in range(n):
            img = self.images[e]
            if not img or not g.is_path(img) or not fc.is_reduced(img):
                bad = bad or f"{g.edge_names[e]}: image is not a reduced edge path"
            elif g.path_ends(img) != g.ends[e]:
                bad = bad or f"{g.edge_names[e]}: image does not fix the endpoints"
        conds.append(ConditionResult("images", bad is None, bad))

        ok_perm = sorted(self.order) == list(range(n))
        conds.append(ConditionResult(
            "(2) one edge per filtration step", ok_perm,
            None if ok_perm else "filtration order is not a permutation of the edges"))

        pos = {e: i for i, e in enumerate(self.order)} if ok_perm else {}
        bad = None
        if ok_perm:
            for i, e in enumerate(self.order):
                for x in self.images[e]:
                    if pos[abs(x) - 1] > i:
                        bad = f"{g.edge_names[e]}: image leaves Gamma_{i + 1}"
                        break
                if bad:
                    break
        conds.append(ConditionResult("(1) f(Gamma_i) in Gamma_i", ok_perm and bad is None, bad))

        bad = None
        for i, e in enumerate(self.order if ok_perm else range(n)):
            sfx = self.suffix(e)
            name = g.edge_names[e]
            if sfx is None:
                bad = f"{name}: f({name}) does not begin with {name}"
                break
            if not sfx:
                continue
            if ok_perm and any(pos[abs(x) - 1] >= i for x in sfx):
                bad = f"{name}: suffix not contained in Gamma_{i}"
                break
            v = g.head(e + 1)
            if g.tail(sfx[0]) != v or g.head(sfx[-1]) != v:
                bad = f"{name}: suffix is not a loop at the terminal vertex"
                break
            if not fc.is_reduced(sfx) or sfx[0] == -sfx[-1]:
                bad = f"{name}: suffix is not an immersed loop"
                break
        conds.append(ConditionResult("(3) f(e_i) = e_i rho_i", bad is None, bad))

        bad = None
        seen: dict[Word, int] = {}
        for e in range(n):
            sfx = self.suffix(e)
            if sfx:
                if sfx in seen:
                    bad = f"{g.edge_names[seen[sfx]]} and {g.edge_names[e]} share the suffix {g.format_path(sfx)}"
                    break
                seen[sfx] = e
        conds.append(ConditionResult("(4) distinct nontrivial suffixes", bad is None, bad))

        report = ValidationReport(conds)
        structural = all(c.passed for c in conds)

        # abelianization: automorphism and unipotent
        m = self.abelianization()
        det = _det(m)
        conds.append(ConditionResult(
            "homotopy equivalence (abelianized det = +-1)", abs(det) == 1,
            None if abs(det) == 1 else f"abelianized determinant is {det}"))
        unip = abs(det) == 1 and _is_unipotent(m)
        conds.append(ConditionResult(
            "unipotent ((M - I)^rank = 0)", unip, None if unip else "abelianized action is not unipotent"))

        if monodromy is not None:
            c = self.find_conjugator(monodromy, conjugator_bound)
            conds.append(ConditionResult(
                "marking realizes the monodromy up to inner automorphism", c is not None,
                None if c is not None else f"no conjugator of length <= {conjugator_bound}"))

        if structural:
            try:
                for e in range(n):
                    self.iterate_edge(e, IMMERSION_CHECK_ITERATES)
                conds.append(ConditionResult(f"iterates immersed up to n={IMMERSION_CHECK_ITERATES}", True))
            except RepresentativeQualityError as err:
                conds.append(ConditionResult(f"iterates immersed up to n={IMMERSION_CHECK_ITERATES}", False, str(err)))
            if report.passed:
                report.degrees = {g.edge_names[e]: d for e, d in self.degrees().items()}
        report.notes.append(
            "unipotent-representative Nielsen-path conditions are not checked; "
            "immersed iterates are enforced instead"
        )
        return report

    def find_conjugator(self, monodromy: FreeAutomorphism, bound: int = DEFAULT_CONJUGATOR_BOUND) -> Word | None:
        """Shortest c (shortlex) with f_*(x) = c monodromy(x) c^-1 for every generator, |c| <= bound."""
        key = (tuple(monodromy.forward), bound)
        if key not in self._conjugators:
            self._conjugators[key] = self._search_conjugator(list(monodromy.forward), bound)
        return self._conjugators[key]

    def _search_conjugator(self, targets: list[Word], bound: int) -> Word | None:
        induced = self.induced_images()
        for a, b in zip(induced, targets):
            if not fc.are_conjugate(a, b):
                return None
        for c in fc.words_up_to(self.graph.basis.rank, bound):
            ci = fc.inverse(c)
            if all(fc.concat_many(c, b, ci) == a for a, b in zip(induced, targets)):
                return c
        return None

    # -- growth ---------------------------------------------------------------

    def degrees(self) -> dict[int, int]:
        if self._degrees is None:
            deg: dict[int, int] = {}
            for e in self.order:
                sfx = self.suffix(e)
                if not sfx:
                    deg[e] = 0
                else:
                    deg[e] = 1 + max(deg[abs(x) - 1] for x in sfx)
            self._degrees = deg
        return self._degrees

    def growth_degree(self, e: int) -> int:
        return self.degrees()[e]

    @property
    def top_degree(self) -> int:
        return max(self.degrees().values(), default=0)

    def iterate_edge(self, e: int, n: int) -> Word:
        if n < 0:
            raise RepresentativeError("n must be non-negative")
        p: Word = (e + 1,)
        for _ in range(n):
            p = self.apply_path(p, check_immersed=True)
        return p

    def growth_lengths(self, e: int, n_max: int = IMMERSION_CHECK_ITERATES) -> list[int]:
        """|f^n(e)| for n = 0..n_max."""
        out, p = [1], (e + 1,)
        for _ in range(n_max):
            p = self.apply_path(p, check_immersed=True)
            out.append(len(p))
        return out

    def suffix_loop_element(self, e: int) -> Word:
        sfx = self.suffix(e)
        if not sfx:
            raise RepresentativeError(f"edge {self.graph.edge_names[e]} has trivial suffix")
        return self.graph.loop_word(self.graph.head(e + 1), sfx)

    # -- editing --------------------------------------------------------------

    def subdivide(self, e: int, new_vertex: str | None = None) -> TopRep:
        """Split edge e into e1 e2 through a new vertex; e1 joins the spanning tree."""
        g = self.graph
        name = g.edge_names[e]
        v_new = new_vertex or f"{name}_mid"
        vertices = g.vertices + (v_new,)
        m = len(vertices) - 1
        names = list(g.edge_names)
        ends = list(g.ends)
        tail, head = g.ends[e]
        names[e] = name + "1"
        ends[e] = (tail, m)
        names.append(name + "2")
        ends.append((m, head))
        e1, e2 = e, len(names) - 1
        tree = set(g.tree) | {e1}
        marking = dict(g.marking)
        if e in g.tree:
            tree.add(e2)
        else:
            marking.pop(e)
            marking[e2] = g.marking[e]

        def sub(p: Word) -> Word:
            out = []
            for x in p:
                if x == e + 1:
                    out.extend([e1 + 1, e2 + 1])
                elif x == -(e + 1):
                    out.extend([-(e2 + 1), -(e1 + 1)])
                else:
                    out.append(x)
            return tuple(out)

        images = [sub(p) for p in self.images]
        sfx = self.suffix(e)
        images[e1] = (e1 + 1,)
        images.append((e2 + 1,) + sub(sfx or ()))
        order = []
        for x in self.order:
            order.extend([e1, e2] if x == e else [x])
        graph = MarkedGraph(vertices, tuple(names), tuple(ends), frozenset(tree), marking, g.basis, g.basepoint)
        return TopRep(graph, images, order)


def fit_polynomial_degree(values: Sequence[int]) -> int:
    """Degree of the polynomial through the integer sequence, via finite differences.

    Returns -1 when the sequence is not polynomial on the given window.
    """
    diffs = list(values)
    for d in range(len(values)):
        if all(x == diffs[0] for x in diffs):
            return d if diffs[0] != 0 or d == 0 else d - 1
        diffs = [b - a for a, b in zip(diffs, diffs[1:])]
        if len(diffs) < 2:
            return -1
    return -1


def growth_witnesses(lengths: Sequence[int], d: int) -> tuple[Fraction, Fraction]:
    """Constants A, B > 0 with A n^d - A <= L_n <= B n^d + B for n = 1..len-1."""
    ns = range(1, len(lengths))
    b = max(Fraction(lengths[n], n ** d + 1) for n in ns)
    lows = [Fraction(lengths[n], n ** d - 1) for n in ns if n ** d - 1 > 0]
    a = min(lows) if lows else Fraction(1)
    return a, b


def _det(m: list[list[int]]) -> int:
    from fractions import Fraction as Fr

    n = len(m)
    a = [[Fr(x) for x in row] for row in m]
    det = Fr(1)
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c] != 0), None)
        if p is None:
            return 0
        if p != c:
            a[c], a[p] = a[p], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            for k in range(c, n):
                a[r][k] -= f * a[c][k]
    return int(det)


def _is_unipotent(m: list[list[int]]) -> bool:
    n = len(m)
    nm = [[m[i][j] - (1 if i == j else 0) for j in range(n)] for i in range(n)]
    p = [row[:] for row in nm]
    for _ in range(n - 1):
        p = [[sum(p[i][k] * nm[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    return all(x == 0 for row in p for x in row)


def rose(basis: Basis, images: dict[str, str], order: Sequence[str] | None = None) -> TopRep:
    """Representative on the rose with one petal per basis generator (identity marking)."""
    names = basis.symbols
    ends = tuple((0, 0) for _ in names)
    marking = {i: i + 1 for i in range(len(names))}
    graph = MarkedGraph(("v",), names, ends, frozenset(), marking, basis, 0)
    imgs = [graph.parse_path(images[s]) for s in names]
    ord_ = [names.index(s) for s in (order or names)]
    return TopRep(graph, imgs, ord_)
