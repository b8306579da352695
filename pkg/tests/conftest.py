import functools
from pathlib import Path

import numpy as np
import pytest

from fbclab.definition import load_definition
from fbclab.free_core import Basis, FreeAutomorphism
from fbclab.hierarchy import build_hierarchy, enumerate_products
from fbclab.mapping_torus import IDENTITY, CayleyBall, FbcElement, FbcGroup, ball

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "fixtures"
GOLDENS = ROOT / "goldens"

_balls: dict = {}


@functools.lru_cache(maxsize=None)
def reference(name: str):
    """One shared (group, representative) per fixture, so cached balls and products agree."""
    return load_definition(FIXTURES / f"{name}.fbc").build()


@pytest.fixture(scope="session")
def g2():
    return reference("G2")


@pytest.fixture(scope="session")
def g3():
    return reference("G3")


@pytest.fixture(scope="session")
def p1():
    return reference("P1")


@pytest.fixture(scope="session")
def g2_family(g2):
    G, rep = g2
    root = build_hierarchy(rep, G)
    return root, enumerate_products(root)


@pytest.fixture(scope="session")
def g3_family(g3):
    G, rep = g3
    root = build_hierarchy(rep, G)
    return root, enumerate_products(root)


def shared_ball(G: FbcGroup, r: int) -> CayleyBall:
    key = (id(G), r)
    if key not in _balls:
        _balls[key] = ball(G, r)
    return _balls[key]


@functools.lru_cache(maxsize=None)
def z2_group() -> FbcGroup:
    """F(a) x Z, the integer lattice."""
    B = Basis(("a",))
    return FbcGroup(B, FreeAutomorphism.identity(B), name="Z2")


def free_tree_ball(G: FbcGroup, r: int) -> CayleyBall:
    """Ball of the free fiber's Cayley tree: fiber elements only, t-edges removed."""
    full = ball(G, r)
    keep = [i for i, x in enumerate(full.elements) if x.t_exp == 0 and len(x.fiber) <= r]
    elements = [full.elements[i] for i in keep]
    index = {g: i for i, g in enumerate(elements)}
    gens = [g.element for g in G.generators]
    nbr = np.full((len(elements), len(gens)), -1, dtype=np.int64)
    for i, g in enumerate(elements):
        for s, x in enumerate(gens):
            if x.t_exp == 0:
                j = index.get(G.multiply(g, x))
                if j is not None:
                    nbr[i, s] = j
    dist = np.array([len(x.fiber) for x in elements], dtype=np.int32)
    return CayleyBall(G, r, elements, index, dist, nbr)


def word_element(G: FbcGroup, text: str) -> FbcElement:
    return G.parse(text) if text.strip() else IDENTITY


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
