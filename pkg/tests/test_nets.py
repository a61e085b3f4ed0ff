from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import Bounds, LinearConstraint, milp

from dnlkit.core import SetSystem, TriEdge, TriHypergraph, full_mask
from dnlkit.gen import haggkvist, random_trihypergraph
from dnlkit.lp import GE, LinearProgram, Row, solve_lp
from dnlkit.nets import (NetRequest, covers, epsilon_covering, greedy_bound,
                         greedy_transversal, min_transversal_exhaustive, replicate_by_weights,
                         sample_delta_net, sample_net_with_retries, tau_p, validate_net)
from dnlkit.core import SimpleGraph


class TestTau:
    def test_printed_value(self):
        assert tau_p(2, 0.5, 0.5) == 23

    def test_boundary_value(self):
        assert tau_p(1, 1, 0.5) == 6

    def test_decreasing_in_delta(self):
        assert tau_p(3, 0.2, 0.1) < tau_p(3, 0.1, 0.1)

    @pytest.mark.parametrize("args", [(0, 0.5, 0.1), (1, 0, 0.1), (1, 0.5, 1)])
    def test_domain(self, args):
        with pytest.raises(ValueError):
            tau_p(*args)


class TestSampling:
    def test_all_black(self):
        H = TriHypergraph(6, [TriEdge(6, full_mask(6), 0)] * 3)
        assert sample_delta_net(H, NetRequest(0.5, 0.1, 1, seed=3)).valid

    def test_single_vertex(self):
        H = TriHypergraph(1, [TriEdge(1, 1, 0)])
        rep = sample_delta_net(H, NetRequest(1, 0.1, 1))
        assert rep.deduplicated == [0] and rep.valid

    def test_half_edge_frequency(self):
        H = TriHypergraph(20, [TriEdge(20, full_mask(10), 0)])
        ok = sum(sample_delta_net(H, NetRequest(0.5, 0.01, 1, seed=s)).valid for s in range(1000))
        assert ok >= 990

    def test_light_edges_ignored(self):
        H = TriHypergraph(10, [TriEdge(10, 1, 0)])
        assert validate_net(H, [5], 0.5) == (True, None)
        assert validate_net(H, [5], 0.1) == (False, 0)

    def test_retries_reach_validity(self):
        H = random_trihypergraph(30, 40, seed=2)
        rep = sample_net_with_retries(H, NetRequest(0.3, 0.1, 2, seed=1))
        assert rep.valid and validate_net(H, rep.deduplicated, 0.3)[0]

    def test_seeded(self):
        H = random_trihypergraph(30, 10, seed=2)
        a = sample_delta_net(H, NetRequest(0.3, 0.1, 2, seed=9))
        b = sample_delta_net(H, NetRequest(0.3, 0.1, 2, seed=9))
        assert np.array_equal(a.sample, b.sample)


class TestTransversal:
    def test_full_edge(self):
        H = TriHypergraph(4, [TriEdge(4, full_mask(4), 0)])
        assert len(min_transversal_exhaustive(H)) == 1

    def test_disjoint_singletons(self):
        H = TriHypergraph(5, [TriEdge(5, 1 << v, 0) for v in range(5)])
        assert min_transversal_exhaustive(H) == list(range(5))

    @pytest.mark.parametrize("seed", range(5))
    def test_no_larger_than_sampled_nets(self, seed):
        H0 = random_trihypergraph(10, 15, p_black=0.5, seed=seed)
        delta = 0.3
        heavy = [e for e in H0.edges if e.black.bit_count() >= 3]
        H = TriHypergraph(10, heavy)
        best = len(min_transversal_exhaustive(H))
        for s in range(20):
            rep = sample_delta_net(H, NetRequest(delta, 0.1, 2, seed=s))
            if rep.valid:
                assert best <= len(rep.deduplicated)


def milp_hitting_set(M):
    m, n = M.shape
    res = milp(np.ones(n), constraints=LinearConstraint(M.astype(float), 1, np.inf),
               integrality=np.ones(n), bounds=Bounds(0, 1))
    return int(round(res.fun))


class TestGreedy:
    def test_one_set(self):
        assert len(greedy_transversal(SetSystem(5, [{1, 2, 3}]), 0.2)) == 1

    def test_disjoint_sets(self):
        F = SetSystem(12, [set(range(3 * i, 3 * i + 3)) for i in range(4)])
        assert len(greedy_transversal(F, Fraction(1, 4))) == 4

    @pytest.mark.parametrize("seed", range(10))
    def test_random_family(self, seed):
        rng = np.random.default_rng(seed)
        M = np.zeros((20, 40), bool)
        for i in range(20):
            k = int(rng.integers(12, 25))
            M[i, rng.choice(40, k, replace=False)] = True
        F = SetSystem(40, matrix=M)
        picks = greedy_transversal(F, 0.3)
        assert all(M[i, picks].any() for i in range(20))
        assert len(picks) <= greedy_bound(20, 0.3)
        assert milp_hitting_set(M) <= len(picks)

    def test_below_floor(self):
        with pytest.raises(ValueError):
            greedy_transversal(SetSystem(10, [{0}]), 0.5)


class TestReplication:
    def test_unit_weights(self):
        H = random_trihypergraph(5, 4, seed=1)
        rep = replicate_by_weights(H, [1] * 5)
        assert rep.scale == 1 and rep.origin == list(range(5))
        assert rep.hypergraph.edges == H.edges

    def test_halves(self):
        H = TriHypergraph(2, [TriEdge(2, 1, 0)])
        rep = replicate_by_weights(H, [Fraction(1, 2)] * 2)
        assert rep.scale == 2 and rep.hypergraph.ground_size == 2

    def test_fractional_transversal_lift(self):
        H = random_trihypergraph(6, 8, p_black=0.5, seed=4)
        H = TriHypergraph(6, [e for e in H.edges if e.black])
        rows = [Row([1 if e.black >> v & 1 else 0 for v in range(6)], GE, 1) for e in H.edges]
        res = solve_lp(LinearProgram([1] * 6, rows, "min"))
        rep = replicate_by_weights(H, res.solution)
        for e in rep.hypergraph.edges:
            assert e.black.bit_count() >= rep.scale

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            replicate_by_weights(TriHypergraph(2, []), [0, 0])


def cycle(n):
    return SimpleGraph(n, [(i, (i + 1) % n) for i in range(n)])


class TestCovering:
    def test_empty_family(self):
        cov = epsilon_covering(SetSystem(4, []), 0.5)
        assert cov.valid and covers(SetSystem(4, []), 0.5, cov.net[:1])

    def test_c5(self):
        F = cycle(5).neighborhood_system()
        cov = epsilon_covering(F, 0.3, seed=2)
        assert covers(F, 0.3, cov.net) and len(cov.net) <= 5

    def test_haggkvist_all_seeds(self):
        F = haggkvist().neighborhood_system()
        for s in range(100):
            cov = epsilon_covering(F, 0.1, seed=s, rounds=5)
            assert covers(F, 0.1, cov.net)

    def test_uncoverable(self):
        from dnlkit.nets import Uncoverable
        with pytest.raises(Uncoverable):
            epsilon_covering(SetSystem(2, [{0, 1}]), 0.5)
