"""Subgroups of G of the form H ⋊ <z>, with H finitely generated in F.

Vertex groups, edge groups and product subgroups all have this shape: a
finitely generated subgroup ``H`` of the fiber, normalized by an element
``z`` with ``t_exp(z) = 1``.  Membership reduces to a Stallings query after
stripping the right power of ``z``.  A subgroup inside the fiber (no vertical
element) is also allowed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from . import free_core as fc
from .free_core import StallingsAutomaton, Word
from .mapping_torus import IDENTITY, CayleyBall, FbcElement, FbcGroup


class SubgroupError(ValueError):
    pass


class VerticalSubgroup:
    def __init__(self, group: FbcGroup, fiber_gens: Sequence[Word], vertical: FbcElement | None,
                 name: str = ""):
        if vertical is not None and vertical.t_exp != 1:
            raise SubgroupError("vertical element must have t-exponent 1")
        self.group = group
        self.fiber_gens = tuple(fc.reduce(w) for w in fiber_gens if w)
        self.vertical = vertical
        self.name = name
        self.automaton = StallingsAutomaton.build(self.fiber_gens)
        self._z_inv = group.invert(vertical) if vertical is not None else None
        self._zpow: dict[int, FbcElement] = {0: IDENTITY}

    # -- basic queries ----------------------------------------------------

    def z_power(self, k: int) -> FbcElement:
        p = self._zpow.get(k)
        if p is None:
            p = self.group.power(self.vertical, k)
            self._zpow[k] = p
        return p

    def generators(self) -> list[FbcElement]:
        gens = [FbcElement(0, w) for w in self.fiber_gens]
        if self.vertical is not None:
            gens.append(self.vertical)
        return gens

    @property
    def fiber_rank(self) -> int:
        return self.automaton.rank

    def contains(self, g: FbcElement) -> bool:
        k = g.t_exp
        if k:
            if self.vertical is None:
                return False
            g = self.group.multiply(self.z_power(-k), g)
        return self.automaton.member(g.fiber)

    def left_coset_key(self, g: FbcElement) -> tuple:
        k = g.t_exp
        if k and self.vertical is not None:
            g = self.group.multiply(g, self.z_power(-k))
            return (0, self.automaton.left_coset_key(g.fiber))
        return (k, self.automaton.left_coset_key(g.fiber))

    def contains_subgroup(self, other: VerticalSubgroup) -> bool:
        return all(self.contains(x) for x in other.generators())

    def conjugate(self, x: FbcElement, name: str = "") -> VerticalSubgroup:
        """The subgroup x S x^-1."""
        G = self.group
        gens = [G.conjugate(x, FbcElement(0, w)).fiber for w in self.fiber_gens]
        z = G.conjugate(x, self.vertical) if self.vertical is not None else None
        return VerticalSubgroup(G, gens, z, name=name or self.name)

    def normalizes(self) -> bool:
        """z H z^-1 and z^-1 H z lie in H (checked on generators)."""
        if self.vertical is None:
            return True
        G = self.group
        for w in self.fiber_gens:
            h = FbcElement(0, w)
            for c in (self.vertical, self._z_inv):
                img = G.conjugate(c, h)
                if img.t_exp != 0 or not self.automaton.member(img.fiber):
                    return False
        return True

    def describe(self) -> dict:
        G = self.group
        return {
            "name": self.name,
            "fiber_generators": [G.basis.format(w) for w in self.fiber_gens],
            "vertical": G.format(self.vertical) if self.vertical is not None else None,
            "fiber_rank": self.fiber_rank,
        }

    def __repr__(self):
        d = self.describe()
        return f"VerticalSubgroup({d['fiber_generators']}, z={d['vertical']})"

    # -- finite enumeration -------------------------------------------------

    def conjugate_elements_in_ball(self, x: FbcElement, ball: CayleyBall,
                                   max_fiber: int | None = None) -> set[int]:
        """Ball indices of x S x^-1 ∩ ball, exact when the fiber part has rank <= 1.

        Word length bounds |t_exp| by the radius.  With fiber part <h>, an
        element x h^m z^k x^-1 has fiber Q^m W where Q is a fixed conjugate of
        h, so its fiber length is at least |m| - |W|; this bounds m.
        """
        if self.fiber_rank > 1:
            raise SubgroupError("exact enumeration needs fiber rank <= 1")
        G = self.group
        R = ball.radius
        if max_fiber is None:
            max_fiber = max_fiber_length(ball)
        xi = G.invert(x)
        out: set[int] = set()
        ks = range(-R, R + 1) if self.vertical is not None else (0,)
        hx = G.conjugate(x, FbcElement(0, self.fiber_gens[0])) if self.fiber_gens else None
        for k in ks:
            u = G.multiply(G.multiply(x, self.z_power(k)), xi) if k else IDENTITY
            idx = ball.index.get(u)
            if idx is not None:
                out.add(idx)
            if hx is None:
                continue
            limit = max_fiber + len(u.fiber)
            for h in (hx, G.invert(hx)):
                cur = IDENTITY
                for _ in range(limit):
                    cur = G.multiply(cur, h)
                    g = G.multiply(cur, u)
                    idx = ball.index.get(g)
                    if idx is not None:
                        out.add(idx)
        return out


def max_fiber_length(ball: CayleyBall) -> int:
    cached = getattr(ball, "_max_fiber", None)
    if cached is None:
        cached = max((len(e.fiber) for e in ball.elements), default=0)
        ball._max_fiber = cached
    return cached


@dataclass
class ProductSubgroup:
    """A product subgroup H x <z>: z centralizes the fiber factor H."""

    subgroup: VerticalSubgroup
    kind: str  # "nonabelian" or "Z2" (or "whole" for the identity monodromy case)
    origin: str = ""

    @property
    def group(self) -> FbcGroup:
        return self.subgroup.group

    @property
    def name(self) -> str:
        return self.subgroup.name

    def generators(self) -> list[FbcElement]:
        return self.subgroup.generators()

    def contains(self, g: FbcElement) -> bool:
        return self.subgroup.contains(g)

    def left_coset_key(self, g: FbcElement) -> tuple:
        return self.subgroup.left_coset_key(g)

    def verify_commutation(self) -> bool:
        G = self.group
        z = self.subgroup.vertical
        return all(G.commutes(FbcElement(0, w), z) for w in self.subgroup.fiber_gens)

    def describe(self) -> dict:
        d = self.subgroup.describe()
        d.update({"kind": self.kind, "origin": self.origin})
        return d


def make_product(group: FbcGroup, fiber_gens: Sequence[Word], vertical: FbcElement, name: str,
                 origin: str) -> ProductSubgroup:
    sub = VerticalSubgroup(group, fiber_gens, vertical, name=name)
    rank = sub.fiber_rank
    if rank == 0:
        raise SubgroupError(f"{name}: fiber factor is trivial, not a product")
    kind = "nonabelian" if rank >= 2 else "Z2"
    p = ProductSubgroup(sub, kind, origin)
    if not p.verify_commutation():
        raise SubgroupError(f"{name}: vertical element does not centralize the fiber factor")
    return p


def find_conjugator_into(inner: VerticalSubgroup, outer: VerticalSubgroup,
                         candidates: Iterable[FbcElement]) -> FbcElement | None:
    """First x among candidates with x^-1 inner x contained in outer."""
    G = inner.group
    gens = inner.generators()
    for x in candidates:
        xi = G.invert(x)
        if all(outer.contains(G.multiply(G.multiply(xi, g), x)) for g in gens):
            return x
    return None
