from itertools import combinations
import math

import numpy as np
import pytest

from dnlkit import gen
from dnlkit.chromatic import chromatic_number, independence_number, is_kt_free, is_triangle_free
from dnlkit.tournament import VoterProfile


class TestNamed:
    def test_brandt(self):
        G = gen.named_graph("brandt12")
        assert G.ground_size == 12 and independence_number(G) == 4

    def test_haggkvist(self):
        G = gen.named_graph("haggkvist")
        assert G.ground_size == 29 and G.is_regular() and G.min_degree() == 10
        assert is_triangle_free(G) and chromatic_number(G) == 4

    def test_grotzsch(self):
        G = gen.named_graph("grotzsch")
        assert G.ground_size == 11 and is_triangle_free(G) and chromatic_number(G) == 4

    def test_digests_frozen(self):
        for name in gen.NAMED:
            assert gen.digest(gen.named_graph(name)) == gen.NAMED_DIGESTS[name]

    def test_unknown(self):
        with pytest.raises(ValueError):
            gen.named_graph("nope")


class TestKneser:
    def test_schrijver_22_size(self):
        assert gen.schrijver_graph(2, 2).ground_size == 9

    def test_schrijver_22_chromatic(self):
        assert chromatic_number(gen.schrijver_graph(2, 2)) == 4

    def test_induced_in_kneser(self):
        S = gen.schrijver_graph(2, 3)
        K = gen.kneser_graph(7, 2)
        index = {lab: i for i, lab in enumerate(K.labels)}
        idx = [index[lab] for lab in S.labels]
        assert np.array_equal(K.adj[np.ix_(idx, idx)], S.adj)

    def test_stable_sets(self):
        for X in gen.schrijver_graph(3, 2).labels:
            m = 8
            assert all((b - a) % m not in (1, m - 1) for a, b in combinations(X, 2))


class TestSchrijverHajnal:
    def test_triangle_free(self):
        assert is_triangle_free(gen.schrijver_hajnal(3, 2, 2))

    def test_chromatic_lower_bound(self):
        G = gen.schrijver_hajnal(2, 2, 2)
        s = G.meta["schrijver"]
        assert chromatic_number(G.induced(range(s))) >= 4

    @pytest.mark.parametrize("l,k,K", [(2, 2, 2), (3, 2, 1), (2, 4, 2)])
    def test_deficit_formula(self, l, k, K):
        G = gen.schrijver_hajnal(l, k, K)
        m = G.meta
        assert m["deficit"] == k * l ** K // 2
        s, a, block = m["schrijver"], m["A"], m["block"]
        S = gen.schrijver_graph(l, k)
        for x in range(s):
            assert G.degrees[x] == S.degrees[x] + l * block
        assert (G.degrees[s + a:] == a).all()


class TestSphereConstructions:
    def test_borsuk_hajnal(self):
        G = gen.borsuk_hajnal(2, 0.3, 30, 30, seed=1)
        assert is_triangle_free(G)
        n = G.ground_size
        assert G.min_degree() >= (1 / 3 - G.meta["eps_prime"]) * n - 1e-9

    def test_circle_hand_check(self):
        nx, ny, eps = 6, 4, 0.4
        G = gen.borsuk_hajnal(1, eps, nx, ny, seed=3)
        r = G.meta["rounds"] - 1
        X = gen.sphere_points(nx, 1, 3, label=("X", r))
        Y = gen.sphere_points(ny, 1, 3, label=("Y", r))
        ang = lambda p, q: math.acos(max(-1.0, min(1.0, float(p @ q))))
        for i, j in combinations(range(nx), 2):
            assert G.adj[i, j] == (ang(X[i], X[j]) >= math.pi - eps)
        for i in range(nx):
            for j in range(ny):
                assert G.adj[i, nx + j] == (ang(X[i], Y[j]) <= math.pi / 2 - eps)
        assert G.adj[nx:nx + ny, nx + ny:].all()

    def test_orourke_t4(self):
        G = gen.orourke_regular(4, 0.05, scale=20, seed=0)
        assert is_kt_free(G, 4) and G.meta["spread"] <= 1
        assert abs(G.meta["degree_ratio"] - (4 / 7 - 0.05)) < 0.05

    def test_orourke_t5(self):
        G = gen.orourke_regular(5, 0.05, scale=20, seed=0)
        assert is_kt_free(G, 5) and G.meta["spread"] <= 1
        assert abs(G.meta["degree_ratio"] - (7 / 10 - 0.05)) < 0.05

    def test_orourke_core_triangle_free(self):
        G = gen.orourke_core(20, 2, 0.05, 10, seed=2)
        assert is_triangle_free(G)
        assert G.degrees.max() - G.degrees.min() <= 1


class TestRandom:
    def test_tournament_deterministic(self):
        a, b = gen.random_tournament(5, seed=1), gen.random_tournament(5, seed=1)
        assert a.arcs == b.arcs and a.is_tournament()

    def test_dense_tf(self):
        G = gen.dense_tf_graph(200, 0.05, seed=0)
        assert is_triangle_free(G) and G.min_degree() >= (1 / 3 + 0.05) * 200

    def test_profile(self):
        P = gen.random_profile(10, 7, seed=2)
        assert isinstance(P, VoterProfile) and P.voters == 7
        for row in P.orders:
            assert sorted(row.tolist()) == list(range(10))

    @pytest.mark.parametrize("kind", ["tournament", "profile", "set_system", "trigraph", "trihypergraph"])
    def test_random_instances(self, kind):
        a = gen.random_instances(kind, seed=4)
        b = gen.random_instances(kind, seed=4)
        assert a.to_json() == b.to_json()

    def test_regular_families(self):
        for kind in ("petersen", "clebsch", "c5", "bipartite", "andrasfai"):
            G = gen.regular_triangle_free(kind, 3)
            assert G.is_regular() and is_triangle_free(G)
        G = gen.regular_k4_free("c5join", 4)
        assert G.is_regular() and is_kt_free(G, 4)
