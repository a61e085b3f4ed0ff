"""Point clouds in three geometries, metric trigraphs and the embeddings between them."""
from dataclasses import dataclass, field
import math

import numpy as np

from .core import EDGE, RED, WHITE, TriGraph
from .rng import stream

GUARD = 1e-12
MAX_BITS = 200_000
GEOMETRIES = ("hamming", "sphere", "euclidean")


class EmbeddingError(RuntimeError):
    def __init__(self, msg, quadruple=None):
        super().__init__(msg)
        self.quadruple = quadruple


class PointCloud:
    def __init__(self, geometry, points, dimension=None):
        if geometry not in GEOMETRIES:
            raise ValueError(f"unknown geometry {geometry!r}")
        pts = np.asarray(points, dtype=np.uint8 if geometry == "hamming" else float)
        if pts.ndim == 1:
            pts = pts.reshape(len(pts), -1) if len(pts) else pts.reshape(0, dimension or 0)
        dim = pts.shape[1] if dimension is None else int(dimension)
        if pts.shape[1] != dim:
            raise ValueError("points disagree with the dimension")
        if geometry == "hamming" and (pts > 1).any():
            raise ValueError("hamming coordinates must be 0/1")
        if geometry == "sphere" and len(pts):
            if (np.abs(np.linalg.norm(pts, axis=1) - 1) > GUARD).any():
                raise ValueError("sphere points must have unit norm")
        pts.setflags(write=False)
        self.geometry, self.points, self.dimension = geometry, pts, dim

    def __len__(self):
        return len(self.points)

    def distances(self):
        """Full distance matrix: raw Hamming counts, angles, or Euclidean lengths."""
        X = self.points
        if self.geometry == "hamming":
            A = X.astype(np.float64)
            d = A @ (1 - A).T
            return np.rint(d + d.T).astype(np.int64)
        if self.geometry == "sphere":
            return np.arccos(np.clip(X @ X.T, -1.0, 1.0))
        sq = (X * X).sum(axis=1)
        d2 = sq[:, None] + sq[None, :] - 2 * X @ X.T
        np.fill_diagonal(d2, 0)
        return np.sqrt(np.clip(d2, 0, None))

    def subset(self, idx):
        return PointCloud(self.geometry, self.points[list(idx)], self.dimension)

    def to_json(self, packed=False):
        out = {"type": "PointCloud", "geometry": self.geometry, "dimension": self.dimension}
        if self.geometry == "hamming":
            if packed:
                out["packed"] = [np.packbits(p).tobytes().hex() for p in self.points]
            else:
                out["points"] = self.points.astype(int).tolist()
        else:
            out["points"] = self.points.tolist()
        return out

    @classmethod
    def from_json(cls, doc):
        dim = doc["dimension"]
        if "packed" in doc:
            rows = [np.unpackbits(np.frombuffer(bytes.fromhex(h), dtype=np.uint8))[:dim] for h in doc["packed"]]
            return cls("hamming", np.array(rows, dtype=np.uint8).reshape(-1, dim), dim)
        return cls(doc["geometry"], np.array(doc["points"]).reshape(-1, dim), dim)

    def __repr__(self):
        return f"PointCloud({self.geometry}, dim={self.dimension}, |V|={len(self)})"


def _scaled(P, tau, eps):
    if P.geometry == "hamming":
        return tau * P.dimension, eps * P.dimension
    return tau, eps


def metric_trigraph(P, tau, eps, guard=GUARD):
    """E: d <= tau, R: tau < d <= tau + eps.

    For Hamming clouds tau and eps are fractions of the string length N.
    """
    if tau < 0 or eps < 0:
        raise ValueError("tau and eps must be non-negative")
    t, e = _scaled(P, tau, eps)
    d = P.distances()
    st = np.where(d <= t + guard, EDGE, np.where(d <= t + e + guard, RED, WHITE)).astype(np.uint8)
    np.fill_diagonal(st, WHITE)
    T = TriGraph(len(P), st)
    T.meta = {"geometry": P.geometry, "tau": tau, "eps": eps, "guard": guard}
    return T


def embed_hamming_to_sphere(P):
    if P.geometry != "hamming":
        raise ValueError("expected a hamming cloud")
    N = P.dimension
    if N < 1:
        raise ValueError("need N >= 1")
    return PointCloud("sphere", (2.0 * P.points - 1.0) / math.sqrt(N), N)


def embed_sphere_to_hamming(P, m, seed=0):
    """One bit per random hyperplane through the origin: the side of each point."""
    if P.geometry != "sphere":
        raise ValueError("expected a sphere cloud")
    if m < 1:
        raise ValueError("need m >= 1")
    G = stream(seed, "metric.sphere-to-hamming").standard_normal((m, P.dimension))
    return PointCloud("hamming", (P.points @ G.T > 0).astype(np.uint8), m)


# ---------------------------------------------------------------- gaps

@dataclass
class GapCertificate:
    threshold: float
    sensitivity: float
    checked_quadruples: int = 0
    violations: list = field(default_factory=list)
    achieved_gap: float = None
    bits: int = None
    rounds: int = 1

    @property
    def clean(self):
        return not self.violations

    def to_json(self):
        return {"threshold": self.threshold, "sensitivity": self.sensitivity,
                "checked_quadruples": self.checked_quadruples, "violations": self.violations,
                "achieved_gap": self.achieved_gap, "bits": self.bits, "rounds": self.rounds}


def embedding_bits(n_points, eps):
    """Least N with exp(-2 eps^4 N) < 1/|V|^2."""
    if n_points <= 1:
        return 1
    return math.floor(math.log(n_points ** 2) / (2 * eps ** 4)) + 1


def gap_check(src_dist, ham_dist, threshold, eps, bits):
    """Quadruple gap check: close pairs d <= threshold vs far pairs d >= threshold + eps.

    Needs d_H(far) - d_H(close) >= eps^2 * bits for every such combination, so
    only the extreme pairs matter; the worst offending quadruple is reported.
    """
    n = len(src_dist)
    iu = np.triu_indices(n, 1)
    ds = src_dist[iu]
    dh = ham_dist[iu]
    close = ds <= threshold + GUARD
    far = ds >= threshold + eps - GUARD
    cert = GapCertificate(threshold, eps * eps, int(close.sum()) * int(far.sum()), bits=bits)
    if not close.any() or not far.any():
        return cert
    ic = np.flatnonzero(close)[np.argmax(dh[close])]
    jf = np.flatnonzero(far)[np.argmin(dh[far])]
    gap = int(dh[jf]) - int(dh[ic])
    cert.achieved_gap = gap / bits
    if gap < eps * eps * bits - 1e-9:
        cert.violations.append({"close": [int(iu[0][ic]), int(iu[1][ic])],
                                "far": [int(iu[0][jf]), int(iu[1][jf])],
                                "gap_bits": gap, "needed_bits": eps * eps * bits})
    return cert


def embed_euclidean_to_hamming(P, eps, seed=0, rounds=8, strict=True):
    """Random threshold cuts along Gaussian directions; certified quadruple gap.

    alpha = eps^2/(4 pi), beta = sqrt(pi ln(2/alpha)); directions U ~ N(0, pi/(2n) I),
    offsets uniform on [-3 beta/sqrt(n), 3 beta/sqrt(n)], bit = <U, v> > t.
    Redraws up to `rounds` times.  With strict=False the best round is
    returned instead of raising.
    """
    if P.geometry != "euclidean":
        raise ValueError("expected a euclidean cloud")
    if not 0 < eps <= 0.5:
        raise ValueError("eps must lie in (0, 0.5]")
    X = P.points
    if len(X) and (np.linalg.norm(X, axis=1) > 3 + 1e-9).any():
        raise ValueError("all norms must be at most 3")
    n = max(P.dimension, 1)
    alpha = eps * eps / (4 * math.pi)
    beta = math.sqrt(math.pi * math.log(2 / alpha))
    N = embedding_bits(len(X), eps)
    if N > MAX_BITS:
        raise EmbeddingError(f"needs {N} bits, above the cap {MAX_BITS}")
    src = P.distances()
    best = None
    for r in range(rounds):
        rng = stream(seed, "metric.euclid-to-hamming", r)
        U = rng.normal(0.0, math.sqrt(math.pi / (2 * n)), size=(N, P.dimension))
        t = rng.uniform(-3 * beta / math.sqrt(n), 3 * beta / math.sqrt(n), size=N)
        bits = (X @ U.T > t).astype(np.uint8) if len(X) else np.zeros((0, N), np.uint8)
        H = PointCloud("hamming", bits, N)
        cert = gap_check(src, H.distances(), 1.0, eps, N)
        cert.rounds = r + 1
        if cert.clean:
            return H, cert
        if best is None or cert.achieved_gap > best[1].achieved_gap:
            best = (H, cert)
    if strict:
        raise EmbeddingError("gap not reached within the retry budget", best[1].violations[0])
    return best


def recheck_certificate(src, hamming, cert):
    """Recompute a certificate from the two clouds alone."""
    again = gap_check(src.distances(), hamming.distances(), cert.threshold,
                      math.sqrt(cert.sensitivity), hamming.dimension)
    return again.violations == cert.violations and again.checked_quadruples == cert.checked_quadruples


# ---------------------------------------------------------------- lower bound

@dataclass
class ShatteredSphere:
    cloud: PointCloud
    basis: list
    tau: float
    eps: float


def shattered_sphere_instance(N):
    """Basis vectors plus v_S = (sum_{S} b_s - sum_{not S} b_t)/sqrt(N) for every S."""
    if not 2 <= N <= 16:
        raise ValueError("N must lie in 2..16")
    pts = list(np.eye(N))
    for S in range(1 << N):
        pts.append(np.array([1.0 if S >> i & 1 else -1.0 for i in range(N)]) / math.sqrt(N))
    P = PointCloud("sphere", np.array(pts), N)
    return ShatteredSphere(P, list(range(N)), math.pi / 2, 1 / (2 * math.sqrt(N)))
