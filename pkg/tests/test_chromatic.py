from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from dnlkit.chromatic import (CliqueSystem, HypothesisError, chromatic_number,
                              clique_count_floor, cluster_color_regular_kt_free,
                              cluster_color_regular_triangle_free, count_cliques,
                              dnl_color_triangle_free, exact_oracles, farvertices_falsifier,
                              homomorphism_quotient, independence_number, is_kt_free, is_proper,
                              is_triangle_free)
from dnlkit.core import SimpleGraph
from dnlkit.gen import (blow_up, brandt12, complete_multipartite, haggkvist, orourke_regular,
                        petersen, regular_k4_free, regular_triangle_free)


def cycle(n):
    return SimpleGraph(n, [(i, (i + 1) % n) for i in range(n)])


def kmm(m):
    return complete_multipartite([m, m])


def c5_blowup(m):
    return blow_up(cycle(5), [m] * 5)


def kt_free_bruteforce(G, t):
    return not any(all(G.adj[u, v] for u, v in combinations(S, 2))
                   for S in combinations(range(G.ground_size), t))


class TestOracles:
    def test_c5(self):
        o = exact_oracles(cycle(5))
        assert (o["chromatic_number"], o["independence_number"], o["triangle_free"]) == (3, 2, True)

    def test_brandt(self):
        assert independence_number(brandt12()) == 4

    def test_haggkvist(self):
        G = haggkvist()
        assert G.ground_size == 29 and G.is_regular() and G.min_degree() == 10
        assert is_triangle_free(G) and chromatic_number(G) == 4

    def test_clique_counts(self):
        G = complete_multipartite([2, 2, 2])
        assert count_cliques(G, 3) == 8 and count_cliques(G, 4) == 0

    @pytest.mark.parametrize("seed", range(5))
    def test_kt_free_against_bruteforce(self, seed):
        rng = np.random.default_rng(seed)
        A = np.triu(rng.random((11, 11)) < 0.5, 1)
        G = SimpleGraph(11, adj=A | A.T)
        for t in (3, 4):
            assert is_kt_free(G, t) == kt_free_bruteforce(G, t)

    def test_chromatic_coloring_is_proper(self):
        k, colors = chromatic_number(petersen(), want_coloring=True)
        assert k == 3 and is_proper(petersen(), colors)

    def test_size_caps(self):
        with pytest.raises(ValueError):
            chromatic_number(SimpleGraph(41))
        with pytest.raises(ValueError):
            independence_number(SimpleGraph(61))


class TestCliqueFloor:
    def test_vertices(self):
        G = cycle(10)
        assert clique_count_floor(G, range(3), 1, 0, Fraction(3, 10)) is True

    def test_complete(self):
        G = complete_multipartite([1] * 8)
        assert clique_count_floor(G, range(6), Fraction(1, 2), 1, Fraction(1, 4)) is True

    def test_blowup(self):
        G = complete_multipartite([5] * 4)
        n = 20
        c, eps = Fraction(3, 10), Fraction(1, 10)
        X = [0, 1, 2, 5, 6, 7, 10, 11]
        A = G.adj[np.ix_(X, X)].astype(int)
        triangles = int(np.trace(A @ A @ A)) // 6
        assert clique_count_floor(G, X, c, 1, eps) == (triangles >= eps * c * n * n / 2)
        assert clique_count_floor(G, X, c, 1, eps)

    def test_inapplicable(self):
        assert clique_count_floor(cycle(10), range(10), Fraction(1, 10), 1, 0.1) is None


class TestDNLColoring:
    def test_complete_bipartite(self):
        res = dnl_color_triangle_free(kmm(12), 0.1, seed=1)
        assert res.proper and res.classes_count <= res.report["net_size"]

    def test_c5_blowup(self):
        G = c5_blowup(20)
        res = dnl_color_triangle_free(G, 0.05, seed=2)
        assert is_proper(G, res.colors) and res.classes_count <= res.report["net_size"]

    def test_haggkvist_many_seeds(self):
        G = haggkvist()
        eps = Fraction(10, 29) - Fraction(1, 3)
        for s in range(100):
            assert dnl_color_triangle_free(G, eps, seed=s).proper

    def test_hypothesis(self):
        with pytest.raises(HypothesisError):
            dnl_color_triangle_free(petersen(), 0.05)
        with pytest.raises(HypothesisError):
            dnl_color_triangle_free(complete_multipartite([3, 3, 3]), 0.01)

    def test_force_still_validates(self):
        res = dnl_color_triangle_free(petersen(), 0.05, force=True)
        assert res.proper == is_proper(petersen(), res.colors)


class TestRegularColoring:
    @pytest.mark.parametrize("G", [c5_blowup(10), regular_triangle_free("petersen", 4), kmm(15)],
                             ids=["c5", "petersen-blowup", "kmm"])
    def test_proper(self, G):
        res = cluster_color_regular_triangle_free(G, 0.05, seed=3)
        assert is_proper(G, res.colors)

    def test_not_regular(self):
        G = SimpleGraph(4, [(0, 1), (1, 2), (2, 3)])
        with pytest.raises(HypothesisError):
            cluster_color_regular_triangle_free(G, 0.05)


class TestQuotient:
    def check(self, G, t, parts, Q):
        lab = np.empty(G.ground_size, int)
        for i, p in enumerate(parts):
            lab[p] = i
            assert not G.adj[np.ix_(p, p)].any()
        for i, j in combinations(range(len(parts)), 2):
            assert Q.adj[i, j] == G.adj[np.ix_(parts[i], parts[j])].any()
        assert kt_free_bruteforce(Q, t) if Q.ground_size <= 14 else is_kt_free(Q, t)

    def test_kmm(self):
        G = kmm(10)
        parts, Q, _ = homomorphism_quotient(G, 3, 0.1, seed=0)
        self.check(G, 3, parts, Q)
        assert Q.edge_count() >= 1

    def test_c5_blowup(self):
        G = c5_blowup(12)
        parts, Q, _ = homomorphism_quotient(G, 3, 0.05, seed=1)
        self.check(G, 3, parts, Q)
        assert Q.ground_size >= 5

    def test_tripartite_k4(self):
        G = complete_multipartite([6, 6, 6])
        parts, Q, _ = homomorphism_quotient(G, 4, 0.05, seed=2)
        self.check(G, 4, parts, Q)

    def test_hypothesis(self):
        with pytest.raises(HypothesisError):
            homomorphism_quotient(cycle(7), 3, 0.05)


class TestKtColoring:
    def test_t3_reduces(self):
        G = c5_blowup(8)
        assert cluster_color_regular_kt_free(G, 3, 0.1, seed=0).proper

    def test_tripartite(self):
        G = regular_k4_free("tripartite", 20, seed=1)
        assert G.is_regular() and is_kt_free(G, 4)
        res = cluster_color_regular_kt_free(G, 4, 0.05, seed=1)
        assert is_proper(G, res.colors)

    def test_orourke_refused(self):
        G = orourke_regular(5, 0.05, scale=8, seed=0)
        assert is_kt_free(G, 5)
        with pytest.raises(HypothesisError):
            cluster_color_regular_kt_free(G, 5, 0.05)

    def test_adjacent_vertices_never_extend_together(self):
        G = complete_multipartite([4, 4, 4])
        F = CliqueSystem.of(G, 4).family()
        for u, v in G.edges:
            assert F.count_xy(u, v) == 0


class TestFalsifier:
    def test_above_threshold(self):
        G = regular_k4_free("tripartite", 10)
        assert farvertices_falsifier(G, 4, Fraction(1, 20)) is None

    def test_constructed_witness(self):
        W = farvertices_falsifier(cycle(8), 3, 0)
        F = CliqueSystem.of(cycle(8), 3).family()
        assert W is not None and len(W) == 4
        assert all(F.count_xy(u, v) == 0 for u, v in combinations(W, 2))

    def test_pigeonhole(self):
        assert farvertices_falsifier(cycle(3), 3, 0) is None
