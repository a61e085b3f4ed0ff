from fractions import Fraction
from itertools import combinations
import math

import numpy as np
import pytest

from dnlkit import constants
from dnlkit.core import (TriEdge, TriGraph, TriHypergraph, disjointness_trigraph,
                         hypergraph_combine, mask_of, trigraph_to_hypergraph)
from dnlkit.gen import random_set_system, random_trigraph, random_trihypergraph
from dnlkit.metric import shattered_sphere_instance, metric_trigraph
from dnlkit.vc import (Word, is_shattered, sauer_shelah_bound, sauer_shelah_check, trace,
                       vc_dimension, vc_dimension_bruteforce, word_trace, word_trace_sizes)


def powerset_hypergraph(k):
    return TriHypergraph(k, [TriEdge(k, m, 0) for m in range(1 << k)])


class TestShattering:
    def test_empty_set_needs_an_edge(self):
        assert is_shattered(TriHypergraph(3, []), 0) is None
        assert is_shattered(TriHypergraph(3, [TriEdge(3, 1, 0)]), 0) is not None

    def test_single_edge_cannot_shatter_a_point(self):
        H = TriHypergraph(3, [TriEdge(3, 0b101, 0b010)])
        for v in range(3):
            assert is_shattered(H, [v]) is None

    def test_red_blocks_separation(self):
        H = TriHypergraph(2, [TriEdge(2, 0, 1), TriEdge(2, 1, 0)])
        assert trace(H, 1) == {1: 1}

    def test_witness_verifies(self):
        H = powerset_hypergraph(3)
        w = is_shattered(H, [0, 2])
        assert w.verify(H) and len(w.selectors) == 4

    def test_shattered_sphere_basis(self):
        inst = shattered_sphere_instance(3)
        T = metric_trigraph(inst.cloud, inst.tau, inst.eps)
        assert is_shattered(T, inst.basis) is not None


class TestVCDimension:
    def test_no_edges(self):
        assert vc_dimension(TriHypergraph(4, [])).dimension == -1
        assert vc_dimension_bruteforce(TriHypergraph(4, [])) == -1

    def test_all_red_triangle(self):
        T = TriGraph.from_pairs(3, red=[(0, 1), (0, 2), (1, 2)])
        assert vc_dimension(T).dimension == 0
        assert vc_dimension_bruteforce(T) == 0

    def test_powerset(self):
        H = powerset_hypergraph(3)
        assert vc_dimension(H).dimension == 3
        assert len(H) == sauer_shelah_bound(3, 3)

    def test_cap_reports_lower_bound(self):
        r = vc_dimension(powerset_hypergraph(4), cap=2)
        assert r.dimension == 2 and r.at_least

    @pytest.mark.parametrize("seed", range(30))
    def test_level_search_matches_bruteforce(self, seed):
        H = random_trihypergraph(8, 14, seed=seed)
        r = vc_dimension(H)
        assert r.dimension == vc_dimension_bruteforce(H)
        if r.dimension >= 0:
            assert r.witness.verify(H)

    def test_disjointness_bound_quarter(self):
        eps = Fraction(1, 4)
        for s in range(200):
            n = 6 + s % 9
            F = random_set_system(n, 1 + s % 20, 0.3, seed=s)
            assert vc_dimension(disjointness_trigraph(F, eps)).dimension <= 4

    def test_intersection_bound(self):
        c = constants.INTERSECTION_CONSTANT
        for s in range(60):
            for eps in (Fraction(1, 2), Fraction(1, 3)):
                F = random_set_system(6 + s % 5, 3 + s % 11, 0.3, seed=s)
                H = trigraph_to_hypergraph(disjointness_trigraph(F, eps))
                d = vc_dimension(hypergraph_combine(H, H, "intersect")).dimension
                assert d <= math.ceil(c / eps)

    def test_trace_misses_above_dimension(self):
        T = random_trigraph(8, seed=3)
        H = trigraph_to_hypergraph(T)
        d = vc_dimension(H).dimension
        for X in combinations(range(8), d + 1):
            assert len(trace(H, mask_of(X))) < 2 ** (d + 1)


class TestWords:
    def test_empty_word(self):
        assert word_trace(TriHypergraph(3, []), ()) == set()
        assert word_trace(TriHypergraph(3, [TriEdge(3, 1, 0)]), ()) == {frozenset()}

    def test_repeated_letter(self):
        H = random_trihypergraph(6, 20, seed=1)
        for v in range(6):
            tr = word_trace(H, Word((v, v)))
            assert tr <= {frozenset(), frozenset({0, 1})}

    @pytest.mark.parametrize("seed", range(10))
    def test_sauer_shelah_for_words(self, seed):
        H = random_trihypergraph(8, 10, seed=seed)
        d = vc_dimension(H).dimension
        rng = np.random.default_rng(seed)
        for _ in range(30):
            Z = tuple(rng.integers(0, 8, 5).tolist())
            assert len(word_trace(H, Z)) <= sauer_shelah_bound(5, d)

    def test_vectorised_sizes_agree(self):
        H = random_trihypergraph(7, 12, seed=8)
        rng = np.random.default_rng(0)
        W = rng.integers(0, 7, size=(40, 4))
        sizes = word_trace_sizes(H, W)
        assert sizes.tolist() == [len(word_trace(H, tuple(w))) for w in W.tolist()]

    def test_word_too_long(self):
        with pytest.raises(ValueError):
            word_trace(TriHypergraph(2, []), (0,) * 21)


@pytest.mark.parametrize("seed", range(20))
def test_sauer_shelah_check_clean(seed):
    rep = sauer_shelah_check(random_trihypergraph(1 + seed % 10, 3 + seed, seed=seed), max_word=4)
    assert rep.ok
