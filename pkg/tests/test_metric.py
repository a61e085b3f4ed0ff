import math

import numpy as np
import pytest

from dnlkit.core import EDGE, RED, WHITE
from dnlkit.metric import (EmbeddingError, PointCloud, embed_euclidean_to_hamming,
                           embed_hamming_to_sphere, embed_sphere_to_hamming, embedding_bits,
                           metric_trigraph, recheck_certificate, shattered_sphere_instance)
from dnlkit.vc import is_shattered, vc_dimension


class TestMetricTrigraph:
    def test_close_pair_is_edge(self):
        P = PointCloud("euclidean", [[0.0, 0.0], [0.5, 0.0]])
        assert metric_trigraph(P, 1, 0.1).status[0, 1] == EDGE

    def test_buffer_pair_is_red(self):
        P = PointCloud("euclidean", [[0.0], [1.05]])
        assert metric_trigraph(P, 1, 0.1).status[0, 1] == RED

    def test_antipodal_is_non_edge(self):
        P = PointCloud("sphere", [[1.0, 0.0], [-1.0, 0.0]])
        assert metric_trigraph(P, math.pi / 2, 0.1).status[0, 1] == WHITE

    def test_hamming_fractions(self):
        P = PointCloud("hamming", [[0, 0, 0, 0], [1, 1, 0, 0], [1, 1, 1, 1]])
        st = metric_trigraph(P, 0.5, 0.25).status
        assert (st[0, 1], st[0, 2]) == (EDGE, WHITE)

    def test_cloud_validation(self):
        with pytest.raises(ValueError):
            PointCloud("sphere", [[2.0, 0.0]])
        with pytest.raises(ValueError):
            PointCloud("hamming", [[0, 2]])

    def test_packed_json(self):
        P = PointCloud("hamming", np.random.default_rng(0).integers(0, 2, (5, 13)))
        assert np.array_equal(PointCloud.from_json(P.to_json(packed=True)).points, P.points)


class TestHammingToSphere:
    def test_self_product(self):
        S = embed_hamming_to_sphere(PointCloud("hamming", [[0, 1, 1, 0]]))
        assert abs(S.points[0] @ S.points[0] - 1) < 1e-12

    def test_complement(self):
        S = embed_hamming_to_sphere(PointCloud("hamming", [[0, 1, 1], [1, 0, 0]]))
        assert abs(S.points[0] @ S.points[1] + 1) < 1e-12

    def test_identity(self):
        P = PointCloud("hamming", np.random.default_rng(2).integers(0, 2, (30, 64)))
        S = embed_hamming_to_sphere(P)
        lhs = S.points @ S.points.T
        rhs = 1 - 2 * P.distances() / 64
        assert np.abs(lhs - rhs).max() < 1e-9


class TestSphereToHamming:
    def test_equal_points(self):
        P = PointCloud("sphere", [[0.6, 0.8], [0.6, 0.8]])
        H = embed_sphere_to_hamming(P, 200, seed=1)
        assert H.distances()[0, 1] == 0

    def test_antipodal(self):
        P = PointCloud("sphere", [[0.6, 0.8, 0.0], [-0.6, -0.8, 0.0]])
        assert embed_sphere_to_hamming(P, 500, seed=4).distances()[0, 1] == 500

    def test_orthogonal_concentration(self):
        P = PointCloud("sphere", [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
        hits = 0
        for s in range(100):
            d = embed_sphere_to_hamming(P, 10_000, seed=s).distances()[0, 1]
            hits += abs(d / 10_000 - 0.5) <= 0.02
        assert hits >= 99


class TestEuclideanToHamming:
    def test_identical_points(self):
        P = PointCloud("euclidean", np.ones((3, 4)) * 0.2)
        H, cert = embed_euclidean_to_hamming(P, 0.3, seed=1)
        assert (H.points == H.points[0]).all() and cert.clean

    def test_vacuous(self):
        P = PointCloud("euclidean", [[-1.0, 0.0], [1.0, 0.0]])
        H, cert = embed_euclidean_to_hamming(P, 0.3)
        assert cert.clean and cert.checked_quadruples == 0

    def test_bit_count(self):
        assert embedding_bits(60, 0.3) == math.floor(math.log(3600) / (2 * 0.3 ** 4)) + 1

    def test_certificate_recheck(self):
        rng = np.random.default_rng(5)
        X = rng.normal(size=(12, 3))
        X *= (rng.uniform(0, 1.5, 12) / np.linalg.norm(X, axis=1))[:, None]
        P = PointCloud("euclidean", X)
        H, cert = embed_euclidean_to_hamming(P, 0.3, seed=2, strict=False)
        assert recheck_certificate(P, H, cert)

    def test_strict_raises_with_quadruple(self):
        P = PointCloud("euclidean", [[0.0], [1.0], [2.3], [-0.1]])
        try:
            embed_euclidean_to_hamming(P, 0.3, seed=0, rounds=1)
        except EmbeddingError as err:
            assert err.quadruple is not None

    def test_norm_guard(self):
        with pytest.raises(ValueError):
            embed_euclidean_to_hamming(PointCloud("euclidean", [[4.0]]), 0.3)


class TestShatteredSphere:
    def test_two(self):
        inst = shattered_sphere_instance(2)
        assert len(inst.cloud) == 6
        T = metric_trigraph(inst.cloud, inst.tau, inst.eps)
        assert is_shattered(T, inst.basis) is not None

    def test_four(self):
        inst = shattered_sphere_instance(4)
        T = metric_trigraph(inst.cloud, inst.tau, inst.eps)
        assert vc_dimension(T).dimension >= 4

    @pytest.mark.parametrize("N", [2, 3, 5])
    def test_inner_products(self, N):
        inst = shattered_sphere_instance(N)
        P = inst.cloud.points
        for S in range(1 << N):
            v = P[N + S]
            for i in range(N):
                want = (1 if S >> i & 1 else -1) / math.sqrt(N)
                assert abs(P[i] @ v - want) < 1e-12
