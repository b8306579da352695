import functools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fbclab.coned_space import cone
from fbclab.free_core import Basis, FreeAutomorphism
from fbclab.hierarchy import build_hierarchy, enumerate_products
from fbclab.mapping_torus import IDENTITY, BallRangeError, FbcGroup, bfs_distances, count_geodesics
from fbclab.morse_lab import (PathSample, SubgroupSpec, Thresholds, affine_defect, all_geodesics, calibrate,
                              detectability_crosscheck, geodesic_samples, is_quasigeodesic, load_thresholds,
                              morse_check, profile, sample_endpoint_pairs, stability_check, strong_qc_check,
                              unique_roots_test)

from .conftest import GOLDENS, reference, shared_ball

G2, REP2 = reference("G2")
TH = load_thresholds(GOLDENS / "morse_thresholds_G2.json")


@functools.lru_cache(maxsize=None)
def coned6():
    members = enumerate_products(build_hierarchy(REP2, G2)).members
    return cone(shared_ball(G2, 6), members)


@pytest.fixture
def cb6():
    return coned6()


def power_path(word: str, n: int) -> PathSample:
    return PathSample.from_steps(G2, [word] * n)


def test_golden_thresholds():
    assert TH == Thresholds(2, 1.5, 0.0)


def test_b_powers_are_consistent_and_a_powers_witness(cb6):
    vb = morse_check(cb6, power_path("b", 2), TH)
    assert vb.classification == vb.qg_classification == "morse-consistent"
    assert vb.max_coset_intersection == 0
    va = morse_check(cb6, power_path("a", 2), TH)
    assert va.classification == va.qg_classification == "non-morse-witness"
    assert va.max_coset_intersection == 2 and va.witness_coset is not None


def test_margin_rule_enforced(cb6):
    with pytest.raises(BallRangeError, match="margin"):
        morse_check(cb6, power_path("b", 4), TH)


def test_path_adjacency_check():
    PathSample.from_text(G2, "a b t' # comment\nb").check(G2)
    with pytest.raises(ValueError):
        PathSample([IDENTITY, G2.parse("a b")]).check(G2)


steps = st.lists(st.sampled_from(["a", "a'", "b", "b'", "t", "t'"]), min_size=1, max_size=2)


@settings(max_examples=40, deadline=None)
@given(steps, st.sampled_from(["a", "b", "t", "b'"]))
def test_verdicts_invariant_under_reversal_and_translation(word, g):
    cb6 = coned6()
    path = PathSample.from_steps(G2, word)
    v = morse_check(cb6, path, TH)
    r = morse_check(cb6, path.reversed(), TH)
    assert (v.classification, v.qg_classification, v.max_coset_intersection) == \
        (r.classification, r.qg_classification, r.max_coset_intersection)
    moved = path.translate(G2, G2.parse(g))
    m = morse_check(cb6, moved, TH)
    assert (v.classification, v.qg_classification) == (m.classification, m.qg_classification)


def test_affine_defect_is_lower_envelope():
    gaps = np.array([1.0, 2.0, 3.0])
    coned = np.array([1.0, 1.0, 1.0])
    assert affine_defect(gaps, coned, 1.0) == 2.0
    assert affine_defect(gaps, coned, 3.0) == 0.0


def test_all_geodesics_matches_count():
    B = shared_ball(G2, 6)
    i, j = B.identity_index, B.index[G2.parse("a t b")]
    paths = all_geodesics(B, i, j)
    assert len(paths) == count_geodesics(B, i, j)
    assert all(len(p) == B.dist[j] + 1 for p in paths)
    rows = lambda k, limit=None: bfs_distances(B.neighbors, k).astype(float)  # noqa: E731
    assert all(is_quasigeodesic(p, rows, 1.0, 0.0) for p in paths)
    detour = [i, B.index[G2.parse("a")], i, B.index[G2.parse("a")]]
    assert not is_quasigeodesic(detour, rows, 1.0, 0.0)


def test_crosscheck_small_sample(cb6):
    pairs = sample_endpoint_pairs(cb6, 30, seed=1, anchors=[(IDENTITY, G2.parse("b b")),
                                                             (IDENTITY, G2.parse("a a"))])
    samples = geodesic_samples(cb6, pairs)
    rep = detectability_crosscheck(cb6, samples, TH)
    assert rep.agreement == 1.0
    assert set(rep.witnesses) == {"morse", "non-morse"}
    th, tried = calibrate([profile(cb6, s) for s in samples])
    assert th is not None and tried[-1]["perfect"]


def test_stability_verdicts(cb6):
    a = stability_check(cb6, SubgroupSpec([G2.parse("a")], 6), thresholds=TH)
    assert a.verdict == "not-stable" and a.nontrivial
    b = stability_check(cb6, SubgroupSpec([G2.parse("b")], 6), thresholds=TH)
    assert b.verdict == "stable-consistent"
    assert b.qi_fit["embedded_consistent"] and b.qi_fit["pairs"] > 0


def test_strong_quasiconvexity_scan():
    B = shared_ball(G2, 6)
    a = strong_qc_check(B, SubgroupSpec([G2.parse("a")]), M=1)
    assert a.escaped and a.quasi_observed_M >= 2 and a.quasi_witness
    b = strong_qc_check(B, SubgroupSpec([G2.parse("b")]), M=1)
    assert not b.escaped and b.observed_M == 0 and b.quasi_observed_M == 0


def test_unique_roots():
    for name in ("G2", "G3"):
        G, _ = reference(name)
        assert unique_roots_test(G, trials=200, seed=3).passed


def test_unique_roots_requires_unipotent():
    B = Basis(("a", "b"))
    swap = FreeAutomorphism(B, [B.parse("b"), B.parse("a")], [B.parse("b"), B.parse("a")])
    with pytest.raises(ValueError):
        unique_roots_test(FbcGroup(B, swap, name="swap"))
