"""Refined differences, eps-clusterings and the regularity partition."""
from dataclasses import dataclass, field
from fractions import Fraction
import math

import numpy as np

from . import constants
from .core import (EDGE, RED, WHITE, SetSystem, TriEdge, TriGraph, TriHypergraph, as_fraction,
                   disjointness_trigraph, mask_from_bool)
from .metric import PointCloud, embed_euclidean_to_hamming
from .nets import MAX_DRAWS, MAX_ROUNDS, NetRequest, draw, heavy_floor
from .rng import derive, stream

EXHAUSTIVE_LIMIT = 500
SAMPLED_PAIRS = 100_000


class ClusteringError(RuntimeError):
    def __init__(self, msg, report=None):
        super().__init__(msg)
        self.report = report


class HypothesisError(ValueError):
    pass


# ---------------------------------------------------------------- differences

class Differences:
    """Refined differences T1 \\ T2 for an integer quantity matrix Q.

    E: Q <= lo, R: lo < Q <= hi, split at mid into R1 (Q <= mid) and R2.
    Edge (v, w) has B = N1[v] ∩ W2(w) and B∪R = (N1[v] ∪ R1(v)) ∩ (W2(w) ∪ R2(w)).
    The thresholds are rationals; Q is compared against their floors.  The
    diagonal is read from Q like any other entry, so v itself lies in N1[v]
    exactly when Q_vv <= lo.  With that convention x in B(v,w)∪R(v,w) always
    separates the signatures of v and w at x.
    """

    def __init__(self, Q, lo, mid, hi):
        Q = np.asarray(Q, dtype=np.int64)
        n = len(Q)
        lo, mid, hi = (math.floor(as_fraction(x)) for x in (lo, mid, hi))
        if not lo <= mid <= hi:
            raise ValueError("need lo <= mid <= hi")
        self.n = n
        self.Q = Q
        self.thresholds = (lo, mid, hi)
        self.near = Q <= lo          # N1[v]
        self.near_mid = Q <= mid     # N1[v] ∪ R1(v)
        self.far = Q > hi            # W2(w)
        self.far_mid = Q > mid       # W2(w) ∪ R2(w)

    def black_sizes(self):
        return np.rint(self.near.astype(np.float64) @ self.far.T.astype(np.float64)).astype(np.int64)

    def hypergraph(self):
        n = self.n
        edges = []
        for v in range(n):
            for w in range(n):
                B = mask_from_bool(self.near[v] & self.far[w])
                BR = mask_from_bool(self.near_mid[v] & self.far_mid[w])
                edges.append(TriEdge(n, B, BR & ~B))
        return TriHypergraph(n, edges)

    def validate_net(self, X, delta):
        """(valid, first unhit heavy pair (v, w) or None)."""
        idx = sorted(set(int(x) for x in X))
        heavy = self.black_sizes() >= heavy_floor(delta, self.n)
        if idx:
            a = self.near_mid[:, idx].astype(np.float64)
            b = self.far_mid[:, idx].astype(np.float64)
            hit = (a @ b.T) > 0.5
        else:
            hit = np.zeros((self.n, self.n), bool)
        bad = np.argwhere(heavy & ~hit)
        if len(bad):
            return False, (int(bad[0][0]), int(bad[0][1]))
        return True, None

    def signatures(self, X):
        """Row v: [Q_vx <= mid] over the net X."""
        return self.near_mid[:, list(X)]


@dataclass
class DisjointnessKind:
    system: SetSystem
    eps: object

    def differences(self):
        F, e = self.system, as_fraction(self.eps)
        m = len(F)
        return Differences(F.co_counts, 0, e * m / 2, e * m)

    def trigraph(self):
        return disjointness_trigraph(self.system, self.eps)


@dataclass
class HammingKind:
    cloud: PointCloud
    tau: object
    eps: object

    def differences(self):
        N = self.cloud.dimension
        t, e = as_fraction(self.tau), as_fraction(self.eps)
        return Differences(self.cloud.distances(), t * N, (t + e / 2) * N, (t + e) * N)

    def trigraph(self):
        D = self.cloud.distances()
        lo, _, hi = self.differences().thresholds
        st = np.where(D <= lo, EDGE, np.where(D <= hi, RED, WHITE)).astype(np.uint8)
        np.fill_diagonal(st, WHITE)
        return TriGraph(len(D), st)


def refined_differences(T, kind):
    """Tri-hypergraph with one edge per ordered pair (v, w), row-major in (v, w)."""
    if isinstance(kind, HammingKind) and kind.cloud.geometry != "hamming":
        raise ValueError("hamming differences need a hamming cloud")
    if not isinstance(kind, (DisjointnessKind, HammingKind)):
        raise TypeError("kind must be DisjointnessKind or HammingKind")
    if T is not None and not np.array_equal(T.status, kind.trigraph().status):
        raise ValueError("trigraph does not match the named construction")
    return kind.differences().hypergraph()


# ---------------------------------------------------------------- clusterings

@dataclass
class Clustering:
    parts: list
    signature_keys: list
    net: list
    labels: np.ndarray = None
    report: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.parts)

    def to_json(self):
        return {"type": "Clustering", "parts": self.parts,
                "signature_keys": ["".join(map(str, k)) for k in self.signature_keys],
                "net": self.net, "report": self.report}


def _partition(sig):
    """Group rows of a boolean matrix; parts ordered by their lowest vertex."""
    n = len(sig)
    if n == 0:
        return np.zeros(0, np.int64), [], []
    if sig.shape[1] == 0:
        return np.zeros(n, np.int64), [list(range(n))], [()]
    _, inv = np.unique(np.packbits(sig, axis=1), axis=0, return_inverse=True)
    inv = inv.reshape(-1)
    order = {}
    labels = np.empty(n, np.int64)
    for v in range(n):
        labels[v] = order.setdefault(int(inv[v]), len(order))
    parts = [[] for _ in order]
    for v in range(n):
        parts[labels[v]].append(v)
    keys = [tuple(int(b) for b in sig[p[0]]) for p in parts]
    return labels, parts, keys


def pair_violations(labels, left, right, limit, seed=0):
    """Same-part pairs (u, v) with |left[u] & right[v]| > limit.

    Exhaustive up to EXHAUSTIVE_LIMIT vertices, then SAMPLED_PAIRS random
    same-part pairs.
    """
    n = len(labels)
    L = left.astype(np.float64)
    R = right.astype(np.float64)
    if n <= EXHAUSTIVE_LIMIT:
        counts = np.rint(L @ R.T)
        same = labels[:, None] == labels[None, :]
        bad = np.argwhere(same & (counts > limit))
        return [(int(u), int(v)) for u, v in bad], int(same.sum()), False
    rng = stream(seed, "cluster.sampled-pairs")
    groups = {}
    for v, l in enumerate(labels.tolist()):
        groups.setdefault(l, []).append(v)
    u = rng.integers(0, n, size=SAMPLED_PAIRS)
    v = np.array([groups[labels[x]][rng.integers(len(groups[labels[x]]))] for x in u])
    counts = (left[u] & right[v]).sum(axis=1)
    bad = np.flatnonzero(counts > limit)
    return [(int(u[i]), int(v[i])) for i in bad], SAMPLED_PAIRS, True


def _agree_on_net(labels, sig):
    """Canary: same part must mean identical signature rows."""
    first = {}
    for v, l in enumerate(labels.tolist()):
        if l in first:
            if not np.array_equal(sig[first[l]], sig[v]):
                return False
        else:
            first[l] = v
    return True


def _cluster_via_net(D, dimension, eta, seed, p, rounds, check, tag):
    """Sample an eta-net of D, key vertices by signatures, validate with `check`."""
    n = D.n
    req = NetRequest(float(as_fraction(eta)), p, dimension, seed)
    size = req.size
    last = None
    for r in range(rounds):
        k = min(size, MAX_DRAWS)
        sample = draw(n, k, seed, tag, r) if n else np.zeros(0, np.int64)
        X = sorted(set(sample.tolist()))
        net_ok, bad_pair = D.validate_net(X, eta) if n else (True, None)
        sig = D.signatures(X)
        labels, parts, keys = _partition(sig)
        violations, checked, sampled = check(labels)
        report = {"rounds": r + 1, "requested": size, "drawn": k, "capped": size > MAX_DRAWS,
                  "net_valid": net_ok, "net_violation": bad_pair, "violations": len(violations),
                  "first_violation": violations[0] if violations else None,
                  "pairs_checked": checked, "sampled": sampled,
                  "signatures_agree": _agree_on_net(labels, sig)}
        assert len(parts) <= 2 ** len(X) or not X
        last = report
        if net_ok and not violations:
            return Clustering(parts, keys, X, labels, report)
        size *= 2
    raise ClusteringError(f"no valid clustering after {rounds} rounds", last)


def _check_range(**kw):
    for name, x in kw.items():
        if not 0 < as_fraction(x) <= 1:
            raise ValueError(f"{name} must lie in (0, 1]")


def set_system_clustering(F, eps, eta, seed=0, p=constants.DEFAULT_P, rounds=MAX_ROUNDS):
    """Cluster V so same-part u, v have |D(u) \\ D_eps(v)| <= eta|V|."""
    _check_range(eps=eps, eta=eta)
    n = F.ground_size
    D = DisjointnessKind(F, eps).differences()
    C = F.co_counts
    limit = math.floor(as_fraction(eta) * n)
    disjoint = C == 0
    far = C > math.floor(as_fraction(eps) * len(F))

    def check(labels):
        return pair_violations(labels, disjoint, far, limit, seed)

    d = constants.set_difference_dimension(float(eps))
    return _cluster_via_net(D, d, eta, seed, p, rounds, check, "cluster.set")


def _antipodal_differences(dist, N, c, eps):
    """Differences for E = {d >= cN}, R = {(c-eps)N <= d < cN}, via Q = -d."""
    c, e = as_fraction(c), as_fraction(eps)
    return Differences(-np.asarray(dist, np.int64), -c * N, -(c - e / 2) * N, -(c - e) * N)


def _hamming_check(dist, N, c, eps, eta, seed):
    c, e = as_fraction(c), as_fraction(eps)
    far = dist >= math.ceil(c * N)
    near = dist <= math.floor((c - e) * N)
    limit = math.floor(as_fraction(eta) * len(dist))
    return lambda labels: pair_violations(labels, far, near, limit, seed)


def hamming_clustering(P, c, eps, eta, seed=0, p=constants.DEFAULT_P, rounds=MAX_ROUNDS):
    """Cluster so same-part u, v leave <= eta|V| points w with d(u,w) >= cN, d(v,w) <= (c-eps)N."""
    if P.geometry != "hamming":
        raise ValueError("expected a hamming cloud")
    _check_range(c=c, eps=eps, eta=eta)
    if as_fraction(eps) > as_fraction(c):
        raise ValueError("need eps <= c")
    N = P.dimension
    dist = P.distances()
    D = _antipodal_differences(dist, N, c, eps)
    check = _hamming_check(dist, N, c, eps, eta, seed)
    d = constants.hamming_difference_dimension(float(eps))
    return _cluster_via_net(D, d, eta, seed, p, rounds, check, "cluster.hamming")


def _ball_thresholds(src, ham, eps, N):
    """Threshold c and sensitivity for one ball from the realised Hamming gap."""
    iu = np.triu_indices(len(src), 1)
    ds, dh = src[iu], ham[iu]
    close = dh[ds <= 1 + 1e-12]
    far = dh[ds >= 1 + eps - 1e-12]
    if len(far) == 0:
        top = int(close.max()) if len(close) else 0
        return Fraction(min(top + 1, N), N), Fraction(1, N)
    b = int(far.min())
    a = int(close.max()) if len(close) else -1
    return Fraction(b, N), Fraction(max(b - a, 1), N)


def euclidean_clustering(P, eps, eta, seed=0, p=constants.DEFAULT_P, rounds=3):
    """Cluster so same-part u, v leave <= eta|V| points in B(u,1) \\ B(v,1+eps)."""
    if P.geometry != "euclidean":
        raise ValueError("expected a euclidean cloud")
    _check_range(eps=eps, eta=eta)
    n = len(P)
    dist = P.distances()
    g = 1e-12
    ball = dist <= 1 + g
    outside = dist > 1 + float(eps) + g
    limit = math.floor(as_fraction(eta) * n)
    heavy = ball.sum(axis=1) >= heavy_floor(eta, n)
    last = None
    for r in range(rounds):
        centers = []
        for z in range(n):
            if heavy[z] and all(dist[z, y] > 2 + g for y in centers):
                centers.append(z)
        keys = [[] for _ in range(n)]
        net, balls = [], []
        for i, z in enumerate(centers):
            Vi = np.flatnonzero(dist[z] <= 3 + g)
            local = PointCloud("euclidean", P.points[Vi] - P.points[z], P.dimension)
            H, cert = embed_euclidean_to_hamming(local, float(eps), derive(seed, "ball", r, i),
                                                 strict=False)
            hd = H.distances()
            c, s = _ball_thresholds(dist[np.ix_(Vi, Vi)], hd, float(eps), H.dimension)
            D = _antipodal_differences(hd, H.dimension, c, s)
            req = NetRequest(float(as_fraction(eta)), p,
                             constants.hamming_difference_dimension(float(s)), seed)
            k = min(req.size, MAX_DRAWS)
            X = sorted(set(draw(len(Vi), k, seed, "cluster.euclid", r, i).tolist()))
            labels, _, _ = _partition(D.signatures(X))
            for j, v in enumerate(Vi):
                keys[v].append((i, int(labels[j])))
            net += [int(Vi[x]) for x in X]
            balls.append({"center": int(z), "size": int(len(Vi)), "bits": H.dimension,
                          "threshold": str(c), "sensitivity": str(s),
                          "certificate_clean": cert.clean})
        index = {}
        lab = np.array([index.setdefault(tuple(k), len(index)) for k in keys], dtype=np.int64)
        parts = [[] for _ in index]
        for v in range(n):
            parts[lab[v]].append(v)
        violations, checked, sampled = pair_violations(lab, ball, outside, limit, seed)
        last = {"rounds": r + 1, "centers": centers, "balls": balls,
                "violations": len(violations),
                "first_violation": violations[0] if violations else None,
                "pairs_checked": checked, "sampled": sampled}
        if not violations:
            sig_keys = [tuple(keys[pt[0]]) for pt in parts]
            return Clustering(parts, sig_keys, sorted(set(net)), lab, last)
    raise ClusteringError(f"no valid clustering after {rounds} rounds", last)


# ---------------------------------------------------------------- regularity

@dataclass
class RegularityPartition:
    parts: list
    non_homogeneous_pairs: list
    eta: Fraction
    clusters: int = 0
    report: dict = field(default_factory=dict)

    @property
    def bad_fraction(self):
        K = len(self.parts)
        pairs = K * (K - 1) // 2
        return Fraction(len(self.non_homogeneous_pairs), pairs) if pairs else Fraction(0)

    def to_json(self):
        return {"type": "RegularityPartition", "parts": self.parts,
                "non_homogeneous_pairs": self.non_homogeneous_pairs, "eta": str(self.eta),
                "bad_fraction": str(self.bad_fraction), "clusters": self.clusters,
                "report": self.report}


def equitable_chop(clusters, n, K):
    """Cut each cluster into pieces of the target sizes; pool and re-cut the leftovers."""
    q, r = divmod(n, K)
    big, small = r, K - r
    parts, pool = [], []
    for cl in clusters:
        cl = sorted(cl)
        while True:
            if big and len(cl) >= q + 1:
                parts.append(cl[:q + 1]); cl = cl[q + 1:]; big -= 1
            elif small and q and len(cl) >= q:
                parts.append(cl[:q]); cl = cl[q:]; small -= 1
            else:
                break
        pool += cl
    pool.sort()
    for size in [q + 1] * big + [q] * small:
        parts.append(pool[:size]); pool = pool[size:]
    assert not pool
    return parts


def homogeneity(T, parts, eta):
    """Pairs (i, j), i < j, where both edge and non-edge densities exceed eta."""
    K = len(parts)
    P = np.zeros((K, T.ground_size))
    for i, part in enumerate(parts):
        P[i, part] = 1
    E = (T.status == EDGE).astype(np.float64)
    W = (T.status == WHITE).astype(np.float64)
    np.fill_diagonal(W, 0)
    Eb = np.rint(P @ E @ P.T).astype(np.int64)
    Wb = np.rint(P @ W @ P.T).astype(np.int64)
    sizes = [len(p) for p in parts]
    eta = as_fraction(eta)
    bad = []
    for i in range(K):
        for j in range(i + 1, K):
            tot = sizes[i] * sizes[j]
            if Eb[i, j] > eta * tot and Wb[i, j] > eta * tot:
                bad.append((i, j))
    return bad


def regularity_partition(F, eps, eta, seed=0, p=constants.DEFAULT_P):
    """Equitable partition of the disjointness trigraph of F with few non-homogeneous pairs."""
    _check_range(eps=eps)
    eta = as_fraction(eta)
    if not 0 < eta < Fraction(1, 4):
        raise ValueError("eta must lie in (0, 1/4)")
    T = disjointness_trigraph(F, eps)
    n = T.ground_size
    if 8 * T.red_count() > eta * eta * n * n:
        raise HypothesisError(f"{T.red_count()} red pairs exceed eta^2 n^2 / 8")
    cl = set_system_clustering(F, eps, eta * eta / 16, seed, p)
    t = len(cl.parts)
    K = max(math.ceil(4 * t / eta), math.ceil(8 / eta))
    K = max(1, min(K, n))
    parts = equitable_chop(cl.parts, n, K) if n else []
    bad = homogeneity(T, parts, eta)
    rep = {"K": K, "uncapped_K": max(math.ceil(4 * t / eta), math.ceil(8 / eta)),
           "clustering": cl.report}
    return RegularityPartition(parts, bad, eta, t, rep)


def count_conflicts(T, V1, V2):
    """Conflicts between V1 and V2: ordered triples with one edge and one non-edge."""
    V1, V2 = list(V1), list(V2)
    if set(V1) & set(V2):
        raise ValueError("V1 and V2 must be disjoint")
    S = T.status
    E = S[np.ix_(V1, V2)] == EDGE
    W = S[np.ix_(V1, V2)] == WHITE
    e1, w1 = E.sum(axis=1), W.sum(axis=1)
    e2, w2 = E.sum(axis=0), W.sum(axis=0)
    return int(2 * (e1 * w1).sum() + 2 * (e2 * w2).sum())
